//! Locality-sensitive hashing and the reduction from LSH-amenable pair
//! problems to additive-approximate MaxIP, with approximate BCP, FP and
//! Jaccard pipelines on top.
//!
//! Each repetition hashes every point, then maps each bucket label to a
//! random string `(0,1)` or `(1,0)`. Two sketches meet in exactly the
//! repetitions where their labels map to the same string, which happens
//! with probability `1/2 + p/2` when the points collide with probability `p`.

mod approx;
mod backend;
mod minhash;
mod pstable;

pub use approx::{bcp_approx, fp_approx, jaccard_pair_approx, ApproxConfig, ApproxOutcome};
pub use backend::{MaxIpBackend, OracleBackend, OvPipelineBackend, SketchInstance};
pub use minhash::{MinHash, MinHashFamily, EMPTY_LABEL};
pub use pstable::{collision_probability, sample_pstable, PStableFamily, PStableHash, DEFAULT_WIDTH};

use crate::bits::BitVec;
use crate::error::{params, Error, Result};
use crate::gadgets::DEFAULT_DIM_CAP;
use crate::instances::BooleanPairInstance;
use crate::rng::{derive, derive_tagged, rng, splitmix64};
use rand::Rng;
use serde::Serialize;
use std::borrow::Borrow;

/// `c1 = gap^2 / C1_DIVISOR` is the Chernoff exponent for the ±gap/4
/// deviations the thresholds allow.
pub const C1_DIVISOR: f64 = 32.0;

/// A (p1, p2)-sensitive hash family.
pub trait LshFamily: Sync {
    type Point: ?Sized;
    type Hash: LshHash<Self::Point>;

    fn sample(&self, seed: u64) -> Self::Hash;
    fn p1(&self) -> f64;
    fn p2(&self) -> f64;
    fn description(&self) -> String;
}

pub trait LshHash<P: ?Sized> {
    fn bucket(&self, x: &P) -> u64;
}

/// Repetition count and thresholds for one sketch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LshReductionParams {
    /// Collision gap `p1 - p2`.
    pub eps: f64,
    /// Repetitions `N`; the sketch has `2N` coordinates.
    pub reps: usize,
    pub c1: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl LshReductionParams {
    /// `N = ceil((3 / c1) ln n)` so each pair deviates by `gap/4` with
    /// probability at most `n^-3`.
    pub fn new(p1: f64, p2: f64, n: usize) -> Result<Self> {
        if !(p1 > p2) || !p1.is_finite() || !p2.is_finite() {
            return Err(params(format!("need p1 > p2, got p1 = {p1}, p2 = {p2}")));
        }
        let eps = p1 - p2;
        let c1 = eps * eps / C1_DIVISOR;
        let reps = ((3.0 / c1) * (n.max(2) as f64).ln()).ceil() as usize;
        if 2 * reps > DEFAULT_DIM_CAP {
            return Err(Error::CapExceeded { what: "sketch dimension", value: 2 * reps as u128, cap: DEFAULT_DIM_CAP as u128 });
        }
        Ok(LshReductionParams {
            eps,
            reps,
            c1,
            tau1: 0.5 + 0.5 * (p1 - eps / 4.0),
            tau2: 0.5 + 0.5 * (p2 + eps / 4.0),
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.reps
    }

    /// Smallest inner product on the yes side of `(tau1 + tau2) N / 2`.
    pub fn midpoint(&self) -> u32 {
        ((self.tau1 + self.tau2) / 2.0 * self.reps as f64).ceil() as u32
    }
}

/// Sketch of two point sets plus the thresholds it was built for.
#[derive(Clone, Debug, PartialEq)]
pub struct LshSketch {
    pub instance: BooleanPairInstance,
    pub params: LshReductionParams,
}

/// Random string bit of bucket `label` under the repetition seed
/// `derive(phi_seed, rep)`.
pub(crate) fn label_bit(rep_seed: u64, label: u64) -> bool {
    splitmix64(rep_seed ^ label) & 1 == 1
}

/// Packs per-repetition labels into `(bit, !bit)` pairs.
pub(crate) struct SketchWriter {
    words: Vec<Vec<u64>>,
    reps: usize,
}

impl SketchWriter {
    pub fn new(points: usize, reps: usize) -> Self {
        SketchWriter { words: vec![vec![0u64; (2 * reps).div_ceil(64)]; points], reps }
    }

    pub fn put(&mut self, point: usize, rep: usize, bit: bool) {
        let pos = 2 * rep + (!bit) as usize;
        self.words[point][pos / 64] |= 1u64 << (pos % 64);
    }

    pub fn finish(self) -> Vec<BitVec> {
        let len = 2 * self.reps;
        self.words.into_iter().map(|w| BitVec::from_words(len, w)).collect()
    }
}

/// Sketches `A` and `B` under `N` independent hashes from `fam`.
pub fn lsh_to_maxip<F, Q>(fam: &F, a: &[Q], b: &[Q], seed: u64) -> Result<LshSketch>
where
    F: LshFamily,
    Q: Borrow<F::Point>,
{
    let params = LshReductionParams::new(fam.p1(), fam.p2(), a.len().max(b.len()))?;
    let phi_seed = derive_tagged(seed, "phi", 0);
    let mut wa = SketchWriter::new(a.len(), params.reps);
    let mut wb = SketchWriter::new(b.len(), params.reps);
    for rep in 0..params.reps {
        let h = fam.sample(derive(seed, rep as u64));
        let rep_seed = derive(phi_seed, rep as u64);
        for (j, x) in a.iter().enumerate() {
            wa.put(j, rep, label_bit(rep_seed, h.bucket(x.borrow())));
        }
        for (j, y) in b.iter().enumerate() {
            wb.put(j, rep, label_bit(rep_seed, h.bucket(y.borrow())));
        }
    }
    let instance = BooleanPairInstance { d: params.dim(), a: wa.finish(), b: wb.finish() };
    Ok(LshSketch { instance, params })
}

/// Coordinates sampled with replacement plus the scale `d / s` that turns
/// a sampled inner product into an estimate of the full one.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledInstance {
    pub instance: BooleanPairInstance,
    pub scale: f64,
    pub coords: Vec<usize>,
}

/// Sample size `ceil((3 ln n + ln 2) / (2 eps^2))`: Hoeffding plus a union
/// bound over the `n^2` pairs gives failure probability at most `1/n`.
pub fn sample_size(n: usize, eps: f64) -> usize {
    let n = n.max(2) as f64;
    ((3.0 * n.ln() + 2f64.ln()) / (2.0 * eps * eps)).ceil() as usize
}

/// Additive `eps * d` approximation of every inner product (and hence of MAX)
/// by uniform coordinate sampling.
pub fn additive_maxip_by_sampling(inst: &BooleanPairInstance, eps: f64, seed: u64) -> Result<SampledInstance> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(params(format!("eps = {eps} outside (0, 1]")));
    }
    if inst.d == 0 {
        return Err(params("cannot sample coordinates of a 0-dimensional instance"));
    }
    let s = sample_size(inst.n(), eps);
    let mut r = rng(derive_tagged(seed, "sample", 0));
    let coords: Vec<usize> = (0..s).map(|_| r.random_range(0..inst.d)).collect();
    let pick = |v: &BitVec| v.select(&coords);
    let instance = BooleanPairInstance { d: s, a: inst.a.iter().map(pick).collect(), b: inst.b.iter().map(pick).collect() };
    Ok(SampledInstance { instance, scale: inst.d as f64 / s as f64, coords })
}
