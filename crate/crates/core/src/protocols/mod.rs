//! Σ₂ communication protocols and their compilation into OR-bundles of
//! OV (two parties) or 3-OV (three parties) instances.
//!
//! A protocol decides `F(x, y) = 1` iff some Merlin string `a` makes
//! Alice accept for every Megan string `b`, where `w` is the transcript
//! the speaking parties send. Strings are `u64` indices, read as bit
//! strings with the first transmitted bit most significant.
//!
//! Compilation sets, for each Merlin string `a`, coordinate
//! `b * 2^ell + w` of `R_x(a)` to `cons_x ∧ ¬accept` and of `R_y(a)` to
//! `cons_y`. Transcript uniqueness makes the inner product count the
//! Megan strings on which Alice rejects, so `R_x(a) ⊥ R_y(a)` iff `a`
//! convinces Alice.

mod fzero;
mod ip;
mod zip;

pub use fzero::{threesum_to_3ov, value_bits_for, CarryProof, FZeroProtocol};
pub use ip::{exactip_to_ov, ip_viable_count, ip_viable_count_exceeds, IpProtocol};
pub use zip::{first_primes, hopcroft_to_ov, CrtParams, ZipProtocol};

use crate::bits::{BitBuilder, BitVec};
use crate::error::{params, Error, Result};
use crate::instances::{BooleanPairInstance, OvBundle, ThreeOvBundle, TripleInstance};
use rayon::prelude::*;
use serde::Serialize;

/// Message lengths of a protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProtocolSpec {
    /// Merlin proof bits.
    pub m1: u32,
    /// Megan proof bits.
    pub m2: u32,
    /// Transcript bits.
    pub ell: u32,
    pub parties: u8,
}

impl ProtocolSpec {
    /// Dimension `2^(m2 + ell)` of every compiled vector.
    pub fn compiled_dim(&self) -> Option<usize> {
        1usize.checked_shl(self.m2 + self.ell).filter(|_| self.m2 + self.ell < usize::BITS)
    }
}

/// Two-party Σ₂ protocol. All predicates must be pure.
pub trait Sigma2Protocol: Sync {
    type X: Sync;
    type Y: Sync;

    fn spec(&self) -> ProtocolSpec;
    fn consistent_x(&self, x: &Self::X, a: u64, b: u64, w: u64) -> bool;
    fn consistent_y(&self, y: &Self::Y, a: u64, b: u64, w: u64) -> bool;
    fn accepts(&self, x: &Self::X, a: u64, b: u64, w: u64) -> bool;

    /// Merlin strings that are not rejected outright, ascending. `None`
    /// means no pruning is known and all `2^m1` strings are used.
    fn viable_merlin(&self) -> Option<Vec<u64>> {
        None
    }
}

/// Three-party Σ₂ protocol; Alice holds `x` and decides.
pub trait Sigma2Protocol3: Sync {
    type X: Sync;
    type Y: Sync;
    type Z: Sync;

    fn spec(&self) -> ProtocolSpec;
    fn consistent_x(&self, x: &Self::X, a: u64, b: u64, w: u64) -> bool;
    fn consistent_y(&self, y: &Self::Y, a: u64, b: u64, w: u64) -> bool;
    fn consistent_z(&self, z: &Self::Z, a: u64, b: u64, w: u64) -> bool;
    fn accepts(&self, x: &Self::X, a: u64, b: u64, w: u64) -> bool;

    fn viable_merlin(&self) -> Option<Vec<u64>> {
        None
    }
}

/// Blow-up limits for compiled bundles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct Caps {
    pub dim: usize,
    pub bundle: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { dim: 1 << 20, bundle: 1 << 16 }
    }
}

/// Compilation options.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub caps: Caps,
    /// Drop Merlin strings the protocol reports as always rejected.
    pub prune: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { caps: Caps::default(), prune: true }
    }
}

/// Checks caps and returns (compiled dimension, Merlin strings).
fn plan(spec: ProtocolSpec, viable: impl FnOnce() -> Option<Vec<u64>>, opts: &CompileOptions) -> Result<(usize, Vec<u64>)> {
    let dim_exp = spec.m2 + spec.ell;
    let dim = spec.compiled_dim().filter(|&d| d <= opts.caps.dim).ok_or(Error::CapExceeded {
        what: "compiled dimension",
        value: 1u128.checked_shl(dim_exp).unwrap_or(u128::MAX),
        cap: opts.caps.dim as u128,
    })?;
    let pruned = if opts.prune { viable() } else { None };
    let merlin = match pruned {
        Some(list) => list,
        None => {
            let count = 1u128.checked_shl(spec.m1).unwrap_or(u128::MAX);
            if count > opts.caps.bundle as u128 {
                return Err(Error::CapExceeded { what: "bundle size", value: count, cap: opts.caps.bundle as u128 });
            }
            (0..count as u64).collect()
        }
    };
    if merlin.len() > opts.caps.bundle {
        return Err(Error::CapExceeded { what: "bundle size", value: merlin.len() as u128, cap: opts.caps.bundle as u128 });
    }
    Ok((dim, merlin))
}

fn indicator(spec: ProtocolSpec, dim: usize, mut bit: impl FnMut(u64, u64) -> bool) -> BitVec {
    let mut out = BitBuilder::with_capacity(dim);
    for b in 0..1u64 << spec.m2 {
        for w in 0..1u64 << spec.ell {
            out.push(bit(b, w));
        }
    }
    out.finish()
}

/// Reject indicator `R_x(a)`.
pub fn reject_vector_x<P: Sigma2Protocol>(p: &P, x: &P::X, a: u64) -> BitVec {
    let spec = p.spec();
    let dim = spec.compiled_dim().expect("dimension checked by caller");
    indicator(spec, dim, |b, w| p.consistent_x(x, a, b, w) && !p.accepts(x, a, b, w))
}

/// Consistency indicator `R_y(a)`.
pub fn consistency_vector_y<P: Sigma2Protocol>(p: &P, y: &P::Y, a: u64) -> BitVec {
    let spec = p.spec();
    let dim = spec.compiled_dim().expect("dimension checked by caller");
    indicator(spec, dim, |b, w| p.consistent_y(y, a, b, w))
}

/// One OV instance per Merlin string; OR over the bundle equals the
/// satisfying-pair answer.
pub fn compile_to_ov<P: Sigma2Protocol>(
    p: &P,
    a_set: &[P::X],
    b_set: &[P::Y],
    provenance: &str,
    opts: &CompileOptions,
) -> Result<OvBundle> {
    let spec = p.spec();
    if spec.parties != 2 {
        return Err(params(format!("compile_to_ov needs a 2-party protocol, got {}", spec.parties)));
    }
    let (dim, merlin) = plan(spec, || p.viable_merlin(), opts)?;
    let items: Vec<_> = merlin
        .par_iter()
        .map(|&a| {
            let xs = a_set.iter().map(|x| reject_vector_x(p, x, a)).collect();
            let ys = b_set.iter().map(|y| consistency_vector_y(p, y, a)).collect();
            (a, BooleanPairInstance { d: dim, a: xs, b: ys })
        })
        .collect();
    let mut bundle = OvBundle::new(provenance, dim);
    for (a, inst) in items {
        bundle.push(a, inst);
    }
    bundle.canonicalize();
    Ok(bundle)
}

/// One 3-OV instance per Merlin string; vectors are `R_x` (consistent and
/// rejecting), `R_y` and `R_z` (consistent).
pub fn compile_to_3ov<P: Sigma2Protocol3>(
    p: &P,
    a_set: &[P::X],
    b_set: &[P::Y],
    c_set: &[P::Z],
    provenance: &str,
    opts: &CompileOptions,
) -> Result<ThreeOvBundle> {
    let spec = p.spec();
    if spec.parties != 3 {
        return Err(params(format!("compile_to_3ov needs a 3-party protocol, got {}", spec.parties)));
    }
    let (dim, merlin) = plan(spec, || p.viable_merlin(), opts)?;
    let items: Vec<_> = merlin
        .par_iter()
        .map(|&a| {
            let xs = a_set
                .iter()
                .map(|x| indicator(spec, dim, |b, w| p.consistent_x(x, a, b, w) && !p.accepts(x, a, b, w)))
                .collect();
            let ys = b_set.iter().map(|y| indicator(spec, dim, |b, w| p.consistent_y(y, a, b, w))).collect();
            let zs = c_set.iter().map(|z| indicator(spec, dim, |b, w| p.consistent_z(z, a, b, w))).collect();
            (a, TripleInstance { d: dim, a: xs, b: ys, c: zs })
        })
        .collect();
    let mut bundle = ThreeOvBundle::new(provenance, dim);
    for (a, inst) in items {
        bundle.push(a, inst);
    }
    bundle.canonicalize();
    Ok(bundle)
}

/// `F(x, y)` by the protocol's own semantics: some `a` with every `b`
/// accepted on the transcript consistent with both sides.
pub fn protocol_decides<P: Sigma2Protocol>(p: &P, x: &P::X, y: &P::Y) -> bool {
    let spec = p.spec();
    (0..1u64 << spec.m1).any(|a| {
        (0..1u64 << spec.m2).all(|b| {
            (0..1u64 << spec.ell)
                .filter(|&w| p.consistent_x(x, a, b, w) && p.consistent_y(y, a, b, w))
                .all(|w| p.accepts(x, a, b, w))
        })
    })
}

/// Three-party counterpart of [`protocol_decides`].
pub fn protocol_decides3<P: Sigma2Protocol3>(p: &P, x: &P::X, y: &P::Y, z: &P::Z) -> bool {
    let spec = p.spec();
    (0..1u64 << spec.m1).any(|a| {
        (0..1u64 << spec.m2).all(|b| {
            (0..1u64 << spec.ell)
                .filter(|&w| p.consistent_x(x, a, b, w) && p.consistent_y(y, a, b, w) && p.consistent_z(z, a, b, w))
                .all(|w| p.accepts(x, a, b, w))
        })
    })
}

/// Number of transcripts consistent with both sides; should be 1.
pub fn consistent_transcripts<P: Sigma2Protocol>(p: &P, x: &P::X, y: &P::Y, a: u64, b: u64) -> usize {
    (0..1u64 << p.spec().ell).filter(|&w| p.consistent_x(x, a, b, w) && p.consistent_y(y, a, b, w)).count()
}

/// Number of transcripts consistent with all three sides; should be 1.
pub fn consistent_transcripts3<P: Sigma2Protocol3>(p: &P, x: &P::X, y: &P::Y, z: &P::Z, a: u64, b: u64) -> usize {
    (0..1u64 << p.spec().ell)
        .filter(|&w| p.consistent_x(x, a, b, w) && p.consistent_y(y, a, b, w) && p.consistent_z(z, a, b, w))
        .count()
}

/// Bits needed to index `count` values: `ceil(log2 count)`, 0 for count <= 1.
pub fn index_bits(count: u64) -> u32 {
    if count <= 1 {
        0
    } else {
        64 - (count - 1).leading_zeros()
    }
}

/// Chunk `i` of `k` chunks of `width` bits, first chunk most significant.
pub(crate) fn chunk(s: u64, i: u32, k: u32, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    (s >> ((k - 1 - i) * width)) & ((1u64 << width) - 1)
}
