use super::{LshFamily, LshHash};
use crate::rng::rng;
use rand::seq::SliceRandom;

/// Bucket label of the empty set.
pub const EMPTY_LABEL: u64 = u64::MAX;

/// MinHash over universe `1..=U` calibrated for the threshold level
/// `p1 = s`, `p2 = s - delta`: collision probability is exactly the
/// Jaccard index.
#[derive(Clone, Debug, PartialEq)]
pub struct MinHashFamily {
    pub universe: u32,
    pub p1: f64,
    pub p2: f64,
}

impl MinHashFamily {
    pub fn new(universe: u32, p1: f64, p2: f64) -> Self {
        MinHashFamily { universe, p1, p2 }
    }
}

/// `rank[s - 1]` is the position of element `s` under a random permutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinHash {
    pub rank: Vec<u32>,
}

impl MinHash {
    pub fn sample(universe: u32, seed: u64) -> Self {
        let mut rank: Vec<u32> = (0..universe).collect();
        rank.shuffle(&mut rng(seed));
        MinHash { rank }
    }
}

impl LshHash<[u32]> for MinHash {
    /// The element of minimum rank.
    fn bucket(&self, s: &[u32]) -> u64 {
        s.iter().min_by_key(|&&e| self.rank[e as usize - 1]).map_or(EMPTY_LABEL, |&e| e as u64)
    }
}

impl LshFamily for MinHashFamily {
    type Point = [u32];
    type Hash = MinHash;

    fn sample(&self, seed: u64) -> MinHash {
        MinHash::sample(self.universe, seed)
    }

    fn p1(&self) -> f64 {
        self.p1
    }

    fn p2(&self) -> f64 {
        self.p2
    }

    fn description(&self) -> String {
        format!("minhash over {} elements, levels {} / {}", self.universe, self.p1, self.p2)
    }
}
