//! Probabilistic polynomials for the Gap inner-product problems, the
//! factor-2 MinIP/MaxIP approximations built on them, and the
//! moderate-dimensional MinIP-to-OV reduction.
//!
//! A micro polynomial samples `k = floor(d / tau)` coordinates with random
//! signs in F2. Only the parity of each coordinate's signed multiplicity
//! matters, so a micro collapses to a coefficient mask `c` over `[d]` and
//! `P(x, y) = |c & x & y| mod 2`. The evaluator stores these masks
//! bit-sliced by coordinate, so one pair costs one XOR per common one.

mod moderate;

pub use moderate::{
    moderate_maminip, moderate_maminip_to_ov, ModerateParams, DEFAULT_BLOCK_CONST, DEFAULT_MAP_CONST,
};

use crate::bits::BitVec;
use crate::error::{params, Result};
use crate::instances::{BooleanPairInstance, GapInstance, GapSide};
use crate::oracles::{self, Pair};
use crate::rng::{derive, derive_tagged, rng};
use rand::Rng as _;
use rayon::prelude::*;

/// Default `c1` in `m = ceil(c1 * log2(1/eps))`. At the promise boundary
/// the one-probabilities are about 0.456 and 0.333, whose Chernoff
/// exponents against the 0.4 threshold need roughly 100 micros per bit of
/// error.
pub const DEFAULT_C1: f64 = 100.0;

/// Number of sampled coordinates for threshold `tau`. Flooring keeps both
/// one-probability bounds: `(1 - tau/d)^k >= 1/4` and `(1 - 2tau/d)^k <= e^-2`.
pub fn micro_len(d: usize, tau: usize) -> usize {
    d / tau
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MicroPolynomial {
    pub d: usize,
    /// Sampled coordinates `T_1..T_k`.
    pub t: Vec<u32>,
    /// Signs `z_1..z_k`.
    pub z: Vec<bool>,
}

impl MicroPolynomial {
    pub fn k(&self) -> usize {
        self.t.len()
    }

    /// Coefficient mask: coordinate j is set iff an odd number of signed
    /// samples hit j.
    pub fn coefficients(&self) -> BitVec {
        let mut c = BitVec::zeros(self.d);
        for (&j, &zi) in self.t.iter().zip(&self.z) {
            if zi {
                let j = j as usize;
                c.set(j, !c.get(j));
            }
        }
        c
    }

    pub fn evaluate(&self, x: &BitVec, y: &BitVec) -> bool {
        let mut p = false;
        for (&j, &zi) in self.t.iter().zip(&self.z) {
            let j = j as usize;
            p ^= zi && x.get(j) && y.get(j);
        }
        p
    }
}

pub fn sample_micro(d: usize, tau: usize, seed: u64) -> Result<MicroPolynomial> {
    if tau == 0 {
        return Err(params("micro polynomials need tau >= 1"));
    }
    if tau > d {
        return Err(params(format!("tau = {tau} exceeds d = {d}")));
    }
    let k = micro_len(d, tau);
    let mut r = rng(seed);
    let t = (0..k).map(|_| r.random_range(0..d as u32)).collect();
    let z = (0..k).map(|_| r.random_bool(0.5)).collect();
    Ok(MicroPolynomial { d, t, z })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapConfig {
    pub c1: f64,
}

impl Default for GapConfig {
    fn default() -> Self {
        GapConfig { c1: DEFAULT_C1 }
    }
}

impl GapConfig {
    pub fn micro_count(&self, eps: f64) -> Result<usize> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(params(format!("eps = {eps} must lie in (0, 1)")));
        }
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(params(format!("c1 = {} must be positive", self.c1)));
        }
        Ok(((self.c1 * (1.0 / eps).log2()).ceil() as usize).max(1))
    }
}

/// Threshold of `m` micros: one iff more than `0.4 m` of them are one.
#[derive(Clone, Debug)]
pub struct GapPolynomial {
    pub d: usize,
    pub tau: usize,
    pub eps: f64,
    pub micros: Vec<MicroPolynomial>,
    /// `columns[j]` holds bit i set iff micro i has coefficient 1 at j.
    columns: Vec<Vec<u64>>,
}

impl GapPolynomial {
    /// Micro i is drawn from `derive(seed, i)`.
    pub fn sample(d: usize, tau: usize, eps: f64, cfg: &GapConfig, seed: u64) -> Result<Self> {
        let m = cfg.micro_count(eps)?;
        let micros = (0..m)
            .map(|i| sample_micro(d, tau, derive(seed, i as u64)))
            .collect::<Result<Vec<_>>>()?;
        let words = m.div_ceil(64);
        let mut columns = vec![vec![0u64; words]; d];
        for (i, mp) in micros.iter().enumerate() {
            for j in mp.coefficients().ones_positions() {
                columns[j][i / 64] |= 1 << (i % 64);
            }
        }
        Ok(GapPolynomial { d, tau, eps, micros, columns })
    }

    pub fn m(&self) -> usize {
        self.micros.len()
    }

    /// Number of micros evaluating to one on `(x, y)`.
    pub fn count_ones(&self, x: &BitVec, y: &BitVec) -> u32 {
        let mut acc = vec![0u64; self.m().div_ceil(64)];
        for (wi, (a, b)) in x.words().iter().zip(y.words()).enumerate() {
            let mut w = a & b;
            while w != 0 {
                let col = &self.columns[wi * 64 + w.trailing_zeros() as usize];
                for (s, c) in acc.iter_mut().zip(col) {
                    *s ^= c;
                }
                w &= w - 1;
            }
        }
        acc.iter().map(|w| w.count_ones()).sum()
    }

    /// `10 * count > 4 * m` is `count > 0.4 m` in integers.
    pub fn threshold_met(&self, count: u32) -> bool {
        10 * count as usize > 4 * self.m()
    }
}

/// Approximates `f_gap`: one when `<x, y> >= 2 tau`, zero when `<x, y> <= tau`.
pub fn gap_evaluate(poly: &GapPolynomial, x: &BitVec, y: &BitVec) -> bool {
    poly.threshold_met(poly.count_ones(x, y))
}

/// Per-pair error for deciding a whole instance: `min(n^-3, eps / n^2)`,
/// so a union bound over at most `n^2` pairs fails with probability at
/// most `min(1/n, eps)`.
pub fn per_pair_error(n: usize, eps: f64) -> f64 {
    let n = n.max(1) as f64;
    (1.0 / (n * n * n)).min(eps / (n * n))
}

/// Decides a gap instance and returns the pair that certified a yes.
///
/// Gap-Min is yes iff some pair evaluates to zero; Gap-Max iff some pair
/// evaluates to one. `tau = 0` is decided exactly (MIN = 0, resp. MAX > 0)
/// and `tau > d/2` is trivial because the `2 tau` side is empty.
/// Off-promise answers are unconstrained.
pub fn gap_decide_witness(inst: &GapInstance, eps: f64, cfg: &GapConfig, seed: u64) -> Result<Option<Pair>> {
    let base = &inst.base;
    base.validate()?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(params(format!("eps = {eps} must lie in (0, 1)")));
    }
    let tau = inst.tau;
    if tau == 0 {
        return Ok(match inst.side {
            GapSide::Min => oracles::ov_decide(base).witness,
            GapSide::Max => find_pair(base, |x, y| !x.is_orthogonal(y)),
        });
    }
    if 2 * tau > base.d {
        return Ok(match inst.side {
            GapSide::Min => Some((0, 0)),
            GapSide::Max => None,
        });
    }
    let poly = GapPolynomial::sample(base.d, tau, per_pair_error(base.n(), eps), cfg, seed)?;
    let want = inst.side == GapSide::Max;
    Ok(find_pair(base, |x, y| gap_evaluate(&poly, x, y) == want))
}

pub fn gap_decide(inst: &GapInstance, eps: f64, seed: u64) -> Result<bool> {
    Ok(gap_decide_witness(inst, eps, &GapConfig::default(), seed)?.is_some())
}

/// Lexicographically first pair satisfying `pred`, searched in parallel
/// over rows of A.
fn find_pair(inst: &BooleanPairInstance, pred: impl Fn(&BitVec, &BitVec) -> bool + Sync) -> Option<Pair> {
    inst.a
        .par_iter()
        .enumerate()
        .find_map_first(|(i, x)| inst.b.iter().position(|y| pred(x, y)).map(|j| (i, j)))
}

/// A multiplicative approximation with the pair that supports it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IpEstimate {
    pub value: u32,
    pub witness: Pair,
}

/// Failure budget handed to each gap decision inside the approximations.
const ENUM_EPS: f64 = 1.0 / 3.0;

/// Factor-2 MinIP: returns `2 tau_min` for the smallest `tau` whose Gap-Min
/// decision is yes. The witness is the certifying pair, whose inner
/// product is below `2 tau_min` with high probability.
pub fn mamin_ip_with(inst: &BooleanPairInstance, cfg: &GapConfig, seed: u64) -> Result<IpEstimate> {
    inst.validate()?;
    for tau in 0..=inst.d / 2 + 1 {
        let g = GapInstance { base: inst.clone(), tau, side: GapSide::Min };
        if let Some(w) = gap_decide_witness(&g, ENUM_EPS, cfg, derive_tagged(seed, "tau", tau as u64))? {
            return Ok(IpEstimate { value: 2 * tau as u32, witness: w });
        }
    }
    unreachable!("tau > d/2 always decides yes")
}

/// Factor-2 MaxIP: returns the smallest `tau >= 1` whose Gap-Max decision
/// is no, or 0 when every pair is orthogonal. The witness is the last pair
/// that certified a yes, or a maximizing pair when none did.
pub fn mamax_ip_with(inst: &BooleanPairInstance, cfg: &GapConfig, seed: u64) -> Result<IpEstimate> {
    inst.validate()?;
    let Some(mut witness) = find_pair(inst, |x, y| !x.is_orthogonal(y)) else {
        return Ok(IpEstimate { value: 0, witness: (0, 0) });
    };
    for tau in 1..=inst.d / 2 + 1 {
        let g = GapInstance { base: inst.clone(), tau, side: GapSide::Max };
        match gap_decide_witness(&g, ENUM_EPS, cfg, derive_tagged(seed, "tau", tau as u64))? {
            Some(w) => witness = w,
            None => return Ok(IpEstimate { value: tau as u32, witness }),
        }
    }
    unreachable!("tau > d/2 always decides no")
}

pub fn mamin_ip(inst: &BooleanPairInstance, seed: u64) -> Result<u32> {
    Ok(mamin_ip_with(inst, &GapConfig::default(), seed)?.value)
}

pub fn mamax_ip(inst: &BooleanPairInstance, seed: u64) -> Result<u32> {
    Ok(mamax_ip_with(inst, &GapConfig::default(), seed)?.value)
}

#[cfg(test)]
mod tests;
