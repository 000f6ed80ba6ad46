//! Exhaustive ground-truth solvers. Ties resolve to the lexicographically
//! smallest witness.

use crate::bits::BitVec;
use crate::error::{params, Result};
use crate::instances::*;
use crate::scalar::{ratio, Real, Scalar};
use serde::Serialize;
use std::collections::HashMap;

pub type Pair = (usize, usize);
pub type Triple = (usize, usize, usize);

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decision<W> {
    pub yes: bool,
    pub witness: Option<W>,
}

impl<W> Decision<W> {
    fn from_witness(witness: Option<W>) -> Self {
        Decision { yes: witness.is_some(), witness }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Optimum<V, W> {
    pub value: V,
    pub witness: W,
}

fn first_pair(a: &[BitVec], b: &[BitVec], mut pred: impl FnMut(&BitVec, &BitVec) -> bool) -> Option<Pair> {
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if pred(x, y) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn ov_decide(inst: &BooleanPairInstance) -> Decision<Pair> {
    Decision::from_witness(first_pair(&inst.a, &inst.b, |x, y| x.is_orthogonal(y)))
}

fn extremal_ip(inst: &BooleanPairInstance, better: impl Fn(u32, u32) -> bool) -> Optimum<u32, Pair> {
    let mut best = Optimum { value: inst.a[0].dot(&inst.b[0]), witness: (0, 0) };
    for (i, x) in inst.a.iter().enumerate() {
        for (j, y) in inst.b.iter().enumerate() {
            let v = x.dot(y);
            if better(v, best.value) {
                best = Optimum { value: v, witness: (i, j) };
            }
        }
    }
    best
}

pub fn max_ip(inst: &BooleanPairInstance) -> Optimum<u32, Pair> {
    extremal_ip(inst, |v, best| v > best)
}

pub fn min_ip(inst: &BooleanPairInstance) -> Optimum<u32, Pair> {
    extremal_ip(inst, |v, best| v < best)
}

pub fn exactip_decide(inst: &ExactIpInstance) -> Decision<Pair> {
    let m = inst.m as u32;
    Decision::from_witness(first_pair(&inst.base.a, &inst.base.b, |x, y| x.dot(y) == m))
}

/// Exact answer to a gap instance: true on the "MIN <= tau" side for
/// Gap-Min and on the "MAX >= 2 tau" side for Gap-Max. `None` off-promise.
pub fn gap_side(inst: &GapInstance) -> Option<bool> {
    let t = inst.tau as u32;
    match inst.side {
        GapSide::Min => {
            let v = min_ip(&inst.base).value;
            if v <= t {
                Some(true)
            } else if v >= 2 * t {
                Some(false)
            } else {
                None
            }
        }
        GapSide::Max => {
            let v = max_ip(&inst.base).value;
            if v >= 2 * t {
                Some(true)
            } else if v <= t {
                Some(false)
            } else {
                None
            }
        }
    }
}

/// `sum |x_i - y_i|^p`, the monotone surrogate used for comparisons.
pub fn lp_pow<S: Real>(x: &[S], y: &[S], p: S) -> S {
    let two = S::one() + S::one();
    if p == two {
        x.iter().zip(y).fold(S::zero(), |s, (a, b)| s + (*a - *b) * (*a - *b))
    } else if p == S::one() {
        x.iter().zip(y).fold(S::zero(), |s, (a, b)| s + (*a - *b).abs())
    } else {
        x.iter().zip(y).fold(S::zero(), |s, (a, b)| s + (*a - *b).abs().powf(p))
    }
}

pub fn lp_dist<S: Real>(x: &[S], y: &[S], p: S) -> S {
    lp_pow(x, y, p).powf(p.recip())
}

fn extremal_dist<S: Real>(inst: &RealPairInstance<S>, better: impl Fn(S, S) -> bool) -> Result<Optimum<S, Pair>> {
    let other = inst.other();
    let mut best: Option<(S, Pair)> = None;
    for (i, j) in inst.pairs() {
        let v = lp_pow(&inst.a[i], &other[j], inst.p);
        if best.is_none_or(|(b, _)| better(v, b)) {
            best = Some((v, (i, j)));
        }
    }
    let (v, w) = best.ok_or_else(|| params("a single point set needs at least two points"))?;
    Ok(Optimum { value: v.powf(inst.p.recip()), witness: w })
}

/// Closest cross pair (or closest distinct pair for a single set).
pub fn bcp<S: Real>(inst: &RealPairInstance<S>) -> Result<Optimum<S, Pair>> {
    extremal_dist(inst, |v, b| v < b)
}

/// Furthest cross pair (or furthest distinct pair for a single set).
pub fn fp<S: Real>(inst: &RealPairInstance<S>) -> Result<Optimum<S, Pair>> {
    extremal_dist(inst, |v, b| v > b)
}

/// Sizes of the intersection and union of two sorted sets.
pub fn overlap(s: &[u32], t: &[u32]) -> (u64, u64) {
    let (mut i, mut j, mut inter) = (0, 0, 0u64);
    while i < s.len() && j < t.len() {
        match s[i].cmp(&t[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    (inter, s.len() as u64 + t.len() as u64 - inter)
}

/// Jaccard index with J(empty, empty) = 1.
pub fn jaccard<S: Scalar>(s: &[u32], t: &[u32]) -> S {
    match overlap(s, t) {
        (_, 0) => S::one(),
        (i, u) => ratio(i, u),
    }
}

pub fn jaccard_max<S: Scalar>(inst: &SetFamilyInstance) -> Optimum<S, Pair> {
    let mut best = Optimum { value: jaccard::<S>(&inst.a[0], &inst.b[0]), witness: (0, 0) };
    for (i, s) in inst.a.iter().enumerate() {
        for (j, t) in inst.b.iter().enumerate() {
            let v = jaccard::<S>(s, t);
            if v > best.value {
                best = Optimum { value: v, witness: (i, j) };
            }
        }
    }
    best
}

pub fn three_ov_decide(inst: &TripleInstance) -> Decision<Triple> {
    for (i, x) in inst.a.iter().enumerate() {
        for (j, y) in inst.b.iter().enumerate() {
            let xy = x.and(y);
            if let Some(k) = inst.c.iter().position(|z| xy.is_orthogonal(z)) {
                return Decision::from_witness(Some((i, j, k)));
            }
        }
    }
    Decision::from_witness(None)
}

pub fn int_dot(x: &[i64], y: &[i64]) -> i128 {
    x.iter().zip(y).map(|(a, b)| *a as i128 * *b as i128).sum()
}

pub fn hopcroft_decide(inst: &IntegerPairInstance) -> Decision<Pair> {
    for (i, x) in inst.a.iter().enumerate() {
        for (j, y) in inst.b.iter().enumerate() {
            if int_dot(x, y) == 0 {
                return Decision::from_witness(Some((i, j)));
            }
        }
    }
    Decision::from_witness(None)
}

pub fn three_sum_decide(inst: &ThreeSumInstance) -> Decision<Triple> {
    let mut first: HashMap<i64, usize> = HashMap::new();
    for (k, &v) in inst.c.iter().enumerate() {
        first.entry(v).or_insert(k);
    }
    for (i, &x) in inst.a.iter().enumerate() {
        for (j, &y) in inst.b.iter().enumerate() {
            if let Some(&k) = first.get(&(-x - y)) {
                return Decision::from_witness(Some((i, j, k)));
            }
        }
    }
    Decision::from_witness(None)
}

/// Largest variable count accepted by [`maxsat_opt`].
pub const MAXSAT_ORACLE_VARS: u32 = 26;

/// Clause as (positive mask, negative mask) over assignment bits.
pub(crate) fn clause_masks(inst: &CnfInstance) -> Vec<(u32, u32)> {
    inst.clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(p, n), &l| {
                let bit = 1u32 << (l.unsigned_abs() - 1);
                if l > 0 {
                    (p | bit, n)
                } else {
                    (p, n | bit)
                }
            })
        })
        .collect()
}

pub fn maxsat_opt(inst: &CnfInstance) -> Result<Optimum<usize, Vec<bool>>> {
    if inst.num_vars > MAXSAT_ORACLE_VARS {
        return Err(params(format!("exhaustive MAXSAT needs at most {MAXSAT_ORACLE_VARS} variables")));
    }
    let masks = clause_masks(inst);
    let (mut best, mut arg) = (0usize, 0u32);
    for x in 0u32..(1u32 << inst.num_vars) {
        let sat = masks.iter().filter(|(p, n)| x & p != 0 || !x & n != 0).count();
        if sat > best || x == 0 {
            best = sat;
            arg = x;
        }
        if best == masks.len() {
            break;
        }
    }
    let witness = (0..inst.num_vars).map(|v| arg >> v & 1 == 1).collect();
    Ok(Optimum { value: best, witness })
}
