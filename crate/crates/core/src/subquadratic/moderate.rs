//! Moderate-dimensional MinIP to OV.
//!
//! One map samples `N` blocks of `k = floor(d / tau)` coordinates. A pair
//! is "close" under the map when more than `0.2 N` blocks see an
//! orthogonal projection. The map `phi` lifts a vector to one bit per
//! choice of `t = ceil(0.8 N)` blocks and one coordinate inside each; the
//! bit is the AND of the chosen entries. Then `<phi(x), phi(y)> > 0` iff
//! some `t` blocks are all non-orthogonal, so `<phi(x), phi(y)> = 0` iff at
//! least `floor(0.2 N) + 1` blocks are orthogonal.
//!
//! With `m` maps, a majority of close maps is the same as some subset
//! `S` with `|S| > m/2` on which the concatenated lifts are orthogonal,
//! which yields one OV instance per such subset.

use crate::bits::{BitBuilder, BitVec};
use crate::error::{params, Error, Result};
use crate::instances::{BooleanPairInstance, OvBundle};
use crate::protocols::Caps;
use crate::rng::{derive_tagged, rng};
use rand::Rng as _;

/// Default `c` in `N = ceil(1 / (c * eps))`.
pub const DEFAULT_BLOCK_CONST: f64 = 1.0;
/// Default `c` in `m = ceil(3 c * eps * log2 n)`.
pub const DEFAULT_MAP_CONST: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModerateParams {
    /// Blocks per map (`N`).
    pub blocks: usize,
    /// Independent maps (`m`).
    pub maps: usize,
    pub caps: Caps,
}

impl ModerateParams {
    pub fn new(blocks: usize, maps: usize) -> Result<Self> {
        if blocks == 0 || maps == 0 {
            return Err(params("blocks and maps must be positive"));
        }
        if maps > 24 {
            return Err(params(format!("{maps} maps would enumerate too many subsets")));
        }
        Ok(ModerateParams { blocks, maps, caps: Caps::default() })
    }

    /// Parameters from the error knob with explicit constants.
    pub fn from_eps_with(eps: f64, n: usize, block_const: f64, map_const: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) || !(block_const > 0.0) || !(map_const > 0.0) {
            return Err(params("eps and constants must be positive"));
        }
        let blocks = (1.0 / (block_const * eps)).ceil() as usize;
        let logn = (n.max(2) as f64).log2();
        let maps = ((3.0 * map_const * eps * logn).ceil() as usize).max(1);
        Self::new(blocks, maps)
    }

    pub fn from_eps(eps: f64, n: usize) -> Result<Self> {
        Self::from_eps_with(eps, n, DEFAULT_BLOCK_CONST, DEFAULT_MAP_CONST)
    }

    /// Tuple arity `t = ceil(0.8 N)`.
    pub fn arity(&self) -> usize {
        (4 * self.blocks).div_ceil(5)
    }

    /// Fewest orthogonal blocks that make a map close: `floor(0.2 N) + 1`.
    pub fn close_threshold(&self) -> usize {
        self.blocks / 5 + 1
    }

    /// Lift length `L = C(N, t) * k^t`, if it fits in a u128.
    pub fn lift_len(&self, k: usize) -> Option<u128> {
        let t = self.arity();
        let mut l = binom(self.blocks, t)?;
        for _ in 0..t {
            l = l.checked_mul(k as u128)?;
        }
        Some(l)
    }
}

fn binom(n: usize, k: usize) -> Option<u128> {
    let mut r: u128 = 1;
    for i in 0..k.min(n - k) {
        r = r.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(r)
}

/// All `t`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..t).collect();
    if t > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..t).rev().find(|&i| cur[i] < n - t + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..t {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// One sampled map: `blocks[b]` is the coordinate sequence of block b.
#[derive(Clone, Debug)]
pub(crate) struct BlockMap {
    pub blocks: Vec<Vec<u32>>,
}

impl BlockMap {
    pub fn sample(n_blocks: usize, k: usize, d: usize, seed: u64) -> Self {
        let mut r = rng(seed);
        let blocks = (0..n_blocks)
            .map(|_| (0..k).map(|_| r.random_range(0..d as u32)).collect())
            .collect();
        BlockMap { blocks }
    }

    /// Number of blocks on which the projections of x and y are orthogonal.
    #[cfg(test)]
    pub fn orthogonal_blocks(&self, x: &BitVec, y: &BitVec) -> usize {
        self.blocks
            .iter()
            .filter(|t| t.iter().all(|&j| !(x.get(j as usize) && y.get(j as usize))))
            .count()
    }

    /// Appends `phi(z)` to `out`. Tuple index: block subsets in lex order,
    /// then coordinates with the first chosen block most significant.
    pub fn lift_into(&self, z: &BitVec, tuples: &[Vec<usize>], k: usize, out: &mut BitBuilder) {
        let t = tuples.first().map_or(0, Vec::len);
        let per = k.pow(t as u32);
        let mut words = vec![0u64; per.div_ceil(64)];
        for subset in tuples {
            words.iter_mut().for_each(|w| *w = 0);
            let hits: Vec<Vec<usize>> = subset
                .iter()
                .map(|&b| (0..k).filter(|&j| z.get(self.blocks[b][j] as usize)).collect())
                .collect();
            fill(&hits, 0, 0, k, &mut words);
            out.extend(&BitVec::from_words(per, words.clone()));
        }
    }
}

fn fill(hits: &[Vec<usize>], r: usize, idx: usize, k: usize, words: &mut [u64]) {
    if r == hits.len() {
        words[idx / 64] |= 1 << (idx % 64);
        return;
    }
    for &j in &hits[r] {
        fill(hits, r + 1, idx * k + j, k, words);
    }
}

/// Reduces the decision "MIN <= tau vs MIN >= 2 tau" to an OR of OV
/// instances, one per subset of maps of size above `maps / 2`. The item's
/// Merlin index is the subset bitmask. Requires `1 <= tau <= d/2`.
pub fn moderate_maminip_to_ov(
    inst: &BooleanPairInstance,
    tau: usize,
    p: &ModerateParams,
    seed: u64,
) -> Result<OvBundle> {
    inst.validate()?;
    if tau == 0 || 2 * tau > inst.d {
        return Err(params(format!("tau = {tau} must lie in [1, d/2] for d = {}", inst.d)));
    }
    let k = inst.d / tau;
    let lift = p.lift_len(k).unwrap_or(u128::MAX);
    let dim = lift.saturating_mul(p.maps as u128);
    if dim > p.caps.dim as u128 {
        return Err(Error::CapExceeded { what: "lifted dimension", value: dim, cap: p.caps.dim as u128 });
    }
    let subsets: Vec<u32> = (1u32..1 << p.maps).filter(|s| 2 * s.count_ones() as usize > p.maps).collect();
    if subsets.len() > p.caps.bundle {
        return Err(Error::CapExceeded {
            what: "bundle size",
            value: subsets.len() as u128,
            cap: p.caps.bundle as u128,
        });
    }
    let lift = lift as usize;
    let tuples = combinations(p.blocks, p.arity());
    let maps: Vec<BlockMap> = (0..p.maps)
        .map(|i| BlockMap::sample(p.blocks, k, inst.d, derive_tagged(seed, "map", i as u64)))
        .collect();
    let lift_all = |vs: &[BitVec]| -> Vec<Vec<BitVec>> {
        maps.iter()
            .map(|map| {
                vs.iter()
                    .map(|v| {
                        let mut bb = BitBuilder::with_capacity(lift);
                        map.lift_into(v, &tuples, k, &mut bb);
                        bb.finish()
                    })
                    .collect()
            })
            .collect()
    };
    let (la, lb) = (lift_all(&inst.a), lift_all(&inst.b));
    let concat = |lifted: &[Vec<BitVec>], s: u32, row: usize| -> BitVec {
        let mut bb = BitBuilder::with_capacity(s.count_ones() as usize * lift);
        for (i, per_map) in lifted.iter().enumerate() {
            if s >> i & 1 == 1 {
                bb.extend(&per_map[row]);
            }
        }
        bb.finish()
    };
    let mut bundle = OvBundle::new("moderate-minip", 0);
    for &s in &subsets {
        let d = s.count_ones() as usize * lift;
        let a = (0..inst.a.len()).map(|r| concat(&la, s, r)).collect();
        let b = (0..inst.b.len()).map(|r| concat(&lb, s, r)).collect();
        bundle.items.push(crate::instances::BundleItem {
            merlin: s as u64,
            instance: BooleanPairInstance { d, a, b },
        });
    }
    // Items differ in dimension; the bundle records the largest.
    bundle.dim = bundle.items.iter().map(|it| it.instance.d).max().unwrap_or(0);
    Ok(bundle)
}

/// Factor-2 MinIP through OV: binary search for the smallest `tau` whose
/// bundle is yes, over `[0, floor(d/2) + 1]`, and output `2 tau`.
/// `tau = 0` asks the solver about the instance itself; the top of the
/// range is trivially yes.
pub fn moderate_maminip(
    inst: &BooleanPairInstance,
    p: &ModerateParams,
    seed: u64,
    mut ov_solver: impl FnMut(&BooleanPairInstance) -> bool,
) -> Result<u32> {
    inst.validate()?;
    if ov_solver(inst) {
        return Ok(0);
    }
    let (mut lo, mut hi) = (0usize, inst.d / 2 + 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        let bundle = moderate_maminip_to_ov(inst, mid, p, derive_tagged(seed, "tau", mid as u64))?;
        if bundle.decide_with(&mut ov_solver) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(2 * hi as u32)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    #[test]
    fn combinations_are_lex_and_complete() {
        let c = combinations(4, 2);
        assert_eq!(c, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(5, 5).len(), 1);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn integer_thresholds() {
        for (n, t, th) in [(1, 1, 1), (2, 2, 1), (3, 3, 1), (4, 4, 1), (5, 4, 2), (10, 8, 3)] {
            let p = ModerateParams::new(n, 1).unwrap();
            assert_eq!((p.arity(), p.close_threshold()), (t, th), "N = {n}");
        }
    }

    /// For every N <= 5 and every x, y over a small dimension, the lift is
    /// orthogonal exactly when more than 0.2 N blocks are orthogonal.
    #[test]
    fn lift_orthogonality_matches_block_count_exhaustively() {
        let d = 4;
        for n_blocks in 1..=5 {
            let p = ModerateParams::new(n_blocks, 1).unwrap();
            let tuples = combinations(n_blocks, p.arity());
            for k in [1, 2] {
                for seed in 0..3 {
                    let map = BlockMap::sample(n_blocks, k, d, seed);
                    let lifts: Vec<BitVec> = (0..1u64 << d)
                        .map(|v| {
                            let z = BitVec::from_words(d, vec![v]);
                            let mut bb = BitBuilder::with_capacity(0);
                            map.lift_into(&z, &tuples, k, &mut bb);
                            bb.finish()
                        })
                        .collect();
                    assert_eq!(lifts[0].len() as u128, p.lift_len(k).unwrap());
                    for xv in 0..1u64 << d {
                        for yv in 0..1u64 << d {
                            let (x, y) = (BitVec::from_words(d, vec![xv]), BitVec::from_words(d, vec![yv]));
                            let close = map.orthogonal_blocks(&x, &y) >= p.close_threshold();
                            let close_real = 5 * map.orthogonal_blocks(&x, &y) > n_blocks;
                            assert_eq!(close, close_real);
                            assert_eq!(
                                lifts[xv as usize].is_orthogonal(&lifts[yv as usize]),
                                close,
                                "N = {n_blocks} k = {k} x = {xv:b} y = {yv:b}"
                            );
                        }
                    }
                }
            }
        }
    }
}
