//! Approximate MAXSAT for almost-satisfiable formulas: sparsify the clause
//! list, split the variables in half, and find a pair of half-assignments
//! with few jointly unsatisfied clauses through MinIP.

use crate::bits::BitVec;
use crate::error::{params, Error, Result};
use crate::instances::{BooleanPairInstance, CnfInstance};
use crate::oracles::{self, Pair};
use crate::rng::{derive_tagged, rng};
use crate::subquadratic::{mamin_ip_with, GapConfig};
use rand::Rng as _;
use rayon::prelude::*;
use serde::Serialize;

/// Default `c1` in `M = ceil(c1 * n / eps^2)`.
pub const DEFAULT_SPARSIFY_C1: f64 = 18.0;
/// Largest variable count `split_to_minip` will enumerate.
pub const MAX_SPLIT_VARS: u32 = 24;

/// Keeps `ceil(c1 * n / eps^2)` clauses drawn uniformly with replacement,
/// or the formula itself when that is not fewer than it has.
pub fn sparsify_with(inst: &CnfInstance, eps: f64, c1: f64, seed: u64) -> Result<CnfInstance> {
    inst.validate()?;
    if !(eps > 0.0 && eps < 0.5) {
        return Err(params(format!("eps = {eps} must lie in (0, 1/2)")));
    }
    if inst.clauses.is_empty() {
        return Err(params("cannot sparsify an empty formula"));
    }
    let target = (c1 * inst.num_vars.max(1) as f64 / (eps * eps)).ceil();
    if target >= inst.clauses.len() as f64 {
        return Ok(inst.clone());
    }
    let mut r = rng(seed);
    let m = inst.clauses.len();
    let clauses = (0..target as usize).map(|_| inst.clauses[r.random_range(0..m)].clone()).collect();
    CnfInstance::new(inst.num_vars, clauses)
}

pub fn sparsify(inst: &CnfInstance, eps: f64, seed: u64) -> Result<CnfInstance> {
    sparsify_with(inst, eps, DEFAULT_SPARSIFY_C1, seed)
}

/// Half-assignment vectors. Row `a` of A assigns variable `v` (1-based,
/// `v <= half`) to bit `v - 1` of `a`; row `b` of B assigns variable
/// `half + v` to bit `v - 1` of `b`. Coordinate i is set iff clause i has
/// no true literal among that half's variables.
#[derive(Clone, Debug)]
pub struct SplitInstance {
    pub instance: BooleanPairInstance,
    pub num_vars: u32,
    /// Variables per half after padding to an even count.
    pub half: u32,
}

impl SplitInstance {
    /// Joint assignment of the original variables for rows `(a, b)`.
    pub fn assignment(&self, (a, b): Pair) -> Vec<bool> {
        (0..self.num_vars)
            .map(|v| if v < self.half { a >> v & 1 == 1 } else { b >> (v - self.half) & 1 == 1 })
            .collect()
    }
}

pub fn split_to_minip(inst: &CnfInstance) -> Result<SplitInstance> {
    inst.validate()?;
    if inst.num_vars > MAX_SPLIT_VARS {
        return Err(Error::CapExceeded {
            what: "variables for split enumeration",
            value: inst.num_vars as u128,
            cap: MAX_SPLIT_VARS as u128,
        });
    }
    let half = inst.num_vars.div_ceil(2);
    let d = inst.clauses.len();
    let side = |lo: u32| -> Vec<BitVec> {
        (0..1usize << half)
            .into_par_iter()
            .map(|a| {
                BitVec::from_fn(d, |i| {
                    !inst.clauses[i].iter().any(|&l| {
                        let v = l.unsigned_abs() - 1;
                        v >= lo && v < lo + half && (a >> (v - lo) & 1 == 1) == (l > 0)
                    })
                })
            })
            .collect()
    };
    let instance = BooleanPairInstance::new(d, side(0), side(half))?;
    Ok(SplitInstance { instance, num_vars: inst.num_vars, half })
}

/// Pair finder for the split instance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MinIpBackend {
    /// Exhaustive MinIP.
    Exact,
    /// Best witness over `runs` independent factor-2 approximations.
    Subquadratic { runs: usize, cfg: GapConfig },
}

impl Default for MinIpBackend {
    fn default() -> Self {
        MinIpBackend::Subquadratic { runs: 5, cfg: GapConfig::default() }
    }
}

impl MinIpBackend {
    pub fn find_pair(&self, inst: &BooleanPairInstance, seed: u64) -> Result<Pair> {
        match *self {
            MinIpBackend::Exact => Ok(oracles::min_ip(inst).witness),
            MinIpBackend::Subquadratic { runs, cfg } => {
                if runs == 0 {
                    return Err(params("need at least one run"));
                }
                let mut best: Option<(u32, Pair)> = None;
                for run in 0..runs {
                    let (i, j) = mamin_ip_with(inst, &cfg, derive_tagged(seed, "run", run as u64))?.witness;
                    let ip = inst.a[i].dot(&inst.b[j]);
                    if best.is_none_or(|(b, _)| ip < b) {
                        best = Some((ip, (i, j)));
                    }
                }
                Ok(best.expect("runs > 0").1)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxSatOutcome {
    pub assignment: Vec<bool>,
    pub satisfied: usize,
    pub clauses: usize,
    /// Clauses kept after sparsification.
    pub sampled: usize,
}

impl MaxSatOutcome {
    pub fn ratio(&self) -> f64 {
        self.satisfied as f64 / self.clauses as f64
    }
}

/// Sparsify, split and search. The result is scored on the full formula.
pub fn approx_maxsat(inst: &CnfInstance, eps: f64, seed: u64, backend: &MinIpBackend) -> Result<MaxSatOutcome> {
    let sparse = sparsify(inst, eps, derive_tagged(seed, "sparsify", 0))?;
    let split = split_to_minip(&sparse)?;
    let pair = backend.find_pair(&split.instance, derive_tagged(seed, "minip", 0))?;
    let assignment = split.assignment(pair);
    Ok(MaxSatOutcome {
        satisfied: inst.satisfied(&assignment),
        clauses: inst.clauses.len(),
        sampled: sparse.clauses.len(),
        assignment,
    })
}

#[cfg(test)]
mod tests;
