//! Exact vector embeddings and enumeration reductions between the
//! inner-product problems.

use crate::bits::{BitBuilder, BitVec};
use crate::error::{invalid, params, Error, Result};
use crate::instances::{BooleanPairInstance, ExactIpInstance, SetFamilyInstance};
use crate::scalar::Scalar;
use serde::Serialize;

/// Default cap on output dimension of any gadget.
pub const DEFAULT_DIM_CAP: usize = 1 << 20;

/// Which side of the pair a vector belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    X,
    Y,
}

/// Dimension accounting attached to every gadget output.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimLedger {
    pub gadget: &'static str,
    pub input_dim: usize,
    pub output_dim: usize,
    /// Inner-product value that marks a yes pair, when the gadget has one.
    pub threshold: Option<u64>,
}

impl DimLedger {
    pub fn check(&self, cap: usize) -> Result<()> {
        if self.output_dim > cap {
            return Err(Error::CapExceeded { what: "gadget output dimension", value: self.output_dim as u128, cap: cap as u128 });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedded<T> {
    pub instance: T,
    pub ledger: DimLedger,
}

/// Per-bit table: x-side 0 -> 10, 1 -> 01; y-side 0 -> 11, 1 -> 10.
/// Paired products sum to `d - <x, y>`.
pub fn reverse_embed(x: &BitVec, side: Side) -> BitVec {
    let mut out = BitBuilder::with_capacity(2 * x.len());
    for bit in x.iter() {
        let pair = match (side, bit) {
            (Side::X, false) => (true, false),
            (Side::X, true) => (false, true),
            (Side::Y, false) => (true, true),
            (Side::Y, true) => (true, false),
        };
        out.push(pair.0);
        out.push(pair.1);
    }
    out.finish()
}

/// MinIP instance whose MAX-oriented twin answers MinIP: `MIN = d - MAX'`.
pub fn reverse_instance(inst: &BooleanPairInstance) -> Embedded<BooleanPairInstance> {
    let a = inst.a.iter().map(|x| reverse_embed(x, Side::X)).collect();
    let b = inst.b.iter().map(|y| reverse_embed(y, Side::Y)).collect();
    Embedded {
        instance: BooleanPairInstance { d: 2 * inst.d, a, b },
        ledger: DimLedger { gadget: "reverse", input_dim: inst.d, output_dim: 2 * inst.d, threshold: None },
    }
}

/// Output length `6d^2 + 2dm + m^2` of [`exactip_to_minip_embed`].
pub fn exactip_minip_dim(d: usize, m: usize) -> usize {
    6 * d * d + 2 * d * m + m * m
}

/// Threshold `5d^2`: paired products equal it iff `<x, y> = m`, exceed it otherwise.
pub fn exactip_minip_threshold(d: usize) -> u64 {
    5 * (d as u64) * (d as u64)
}

/// `(x~, rev(x) repeated 2m times, 1^(5d^2 - 2dm + m^2))` with
/// `x~_(i,j) = x_i x_j`. Paired product is `(<x,y> - m)^2 + 5d^2`.
pub fn exactip_to_minip_embed(x: &BitVec, m: usize, side: Side) -> Result<BitVec> {
    let d = x.len();
    if m > d {
        return Err(params(format!("target m = {m} exceeds d = {d}")));
    }
    let mut out = BitBuilder::with_capacity(exactip_minip_dim(d, m));
    for i in 0..d {
        let xi = x.get(i);
        for j in 0..d {
            out.push(xi && x.get(j));
        }
    }
    let rev = reverse_embed(x, side);
    for _ in 0..2 * m {
        out.extend(&rev);
    }
    out.push_n(true, 5 * d * d + m * m - 2 * d * m);
    Ok(out.finish())
}

/// ExactIP instance as a MinIP instance with threshold `5d^2`.
pub fn exactip_to_minip(inst: &ExactIpInstance, cap: usize) -> Result<Embedded<BooleanPairInstance>> {
    let (d, m) = (inst.base.d, inst.m);
    let ledger = DimLedger {
        gadget: "exactip-minip",
        input_dim: d,
        output_dim: exactip_minip_dim(d, m),
        threshold: Some(exactip_minip_threshold(d)),
    };
    ledger.check(cap)?;
    let a = inst.base.a.iter().map(|x| exactip_to_minip_embed(x, m, Side::X)).collect::<Result<_>>()?;
    let b = inst.base.b.iter().map(|y| exactip_to_minip_embed(y, m, Side::Y)).collect::<Result<_>>()?;
    Ok(Embedded { instance: BooleanPairInstance { d: ledger.output_dim, a, b }, ledger })
}

/// Unary grid block: x-side sets rows `i <= a`, y-side sets columns `j <= b`,
/// so paired blocks meet in `a * b` cells.
pub fn integer_embed(x: &[u32], r: u32, side: Side) -> Result<BitVec> {
    if let Some(v) = x.iter().find(|&&v| v > r) {
        return Err(invalid(format!("entry {v} outside 0..={r}")));
    }
    let r = r as usize;
    let mut out = BitBuilder::with_capacity(x.len() * r * r);
    for &v in x {
        let v = v as usize;
        for i in 1..=r {
            for j in 1..=r {
                out.push(match side {
                    Side::X => i <= v,
                    Side::Y => j <= v,
                });
            }
        }
    }
    Ok(out.finish())
}

/// Dimension and threshold of [`integer_exactip_embed`] for `d`, `r`, `m`.
pub fn integer_exactip_ledger(d: usize, r: u32, m: usize) -> DimLedger {
    let inner = d * (r as usize) * (r as usize);
    let minip = exactip_minip_dim(inner, m);
    DimLedger {
        gadget: "integer",
        input_dim: d,
        output_dim: 2 * minip,
        threshold: Some(minip as u64 - exactip_minip_threshold(inner)),
    }
}

/// Grid encoding, then the ExactIP-to-MinIP gadget, then reversal. Paired
/// products equal the ledger threshold iff `<x, y> = m` and fall below it
/// otherwise.
pub fn integer_exactip_embed(x: &[u32], r: u32, m: usize, side: Side) -> Result<BitVec> {
    let grid = integer_embed(x, r, side)?;
    Ok(reverse_embed(&exactip_to_minip_embed(&grid, m, side)?, side))
}

/// Sets over universe `3d`: `x ∘ 1^(d-|x|) 0^|x| ∘ 0^d` for A and
/// `y ∘ 0^d ∘ 1^(d-|y|) 0^|y|` for B. Every set has size `d`, so
/// `J = <x,y> / (2d - <x,y>)`.
pub fn jaccard_embed(inst: &BooleanPairInstance) -> Result<Embedded<SetFamilyInstance>> {
    let d = inst.d;
    if d == 0 {
        return Err(invalid("jaccard embedding needs d >= 1"));
    }
    let embed = |v: &BitVec, offset: usize| -> Vec<u32> {
        let w = v.count_ones() as usize;
        let mut s: Vec<u32> = v.ones_positions().map(|i| i as u32 + 1).collect();
        s.extend((0..d - w).map(|k| (offset + k) as u32 + 1));
        s
    };
    let a = inst.a.iter().map(|x| embed(x, d)).collect();
    let b = inst.b.iter().map(|y| embed(y, 2 * d)).collect();
    let universe = u32::try_from(3 * d).map_err(|_| invalid("dimension too large"))?;
    Ok(Embedded {
        instance: SetFamilyInstance { universe, a, b },
        ledger: DimLedger { gadget: "jaccard", input_dim: d, output_dim: 3 * d, threshold: None },
    })
}

/// Inverse of the embedding identity: `w = 2d t / (t + 1)`.
pub fn jaccard_recover<S: Scalar>(t: S, d: usize) -> S {
    let two_d = S::from_count(2 * d as u64);
    two_d * t.clone() / (t + S::one())
}

/// MIN by asking an ExactIP decider about `k = 0, 1, ..., d` in turn.
pub fn minip_via_exactip(
    inst: &BooleanPairInstance,
    mut exactip: impl FnMut(&ExactIpInstance) -> Result<bool>,
) -> Result<u32> {
    for k in 0..=inst.d {
        if exactip(&ExactIpInstance { base: inst.clone(), m: k })? {
            return Ok(k as u32);
        }
    }
    Err(invalid("no inner product in 0..=d was reported; the ExactIP solver is inconsistent"))
}

/// MAX by asking an ExactIP decider about `k = d, d - 1, ..., 0` in turn.
pub fn maxip_via_exactip(
    inst: &BooleanPairInstance,
    mut exactip: impl FnMut(&ExactIpInstance) -> Result<bool>,
) -> Result<u32> {
    for k in (0..=inst.d).rev() {
        if exactip(&ExactIpInstance { base: inst.clone(), m: k })? {
            return Ok(k as u32);
        }
    }
    Err(invalid("no inner product in 0..=d was reported; the ExactIP solver is inconsistent"))
}
