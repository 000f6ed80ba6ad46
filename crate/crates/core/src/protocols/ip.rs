use super::{chunk, compile_to_ov, index_bits, CompileOptions, ProtocolSpec, Sigma2Protocol};
use crate::bits::BitVec;
use crate::error::{params, Result};
use crate::instances::{ExactIpInstance, OvBundle};

/// Decides `<x, y> = k` for `x, y` of length `d`, split into `groups`
/// groups of `g = ceil(d / groups)` coordinates (zero-padded).
///
/// Merlin sends the per-group inner products `psi`, Megan a group index,
/// Bob his group. Alice rejects outright unless `sum psi = k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpProtocol {
    pub d: usize,
    pub k: usize,
    pub groups: u32,
    /// Group length `g`.
    pub g: u32,
    /// Bits per `psi_i`.
    pub chunk_bits: u32,
}

impl IpProtocol {
    pub fn new(d: usize, k: usize, groups: usize) -> Result<Self> {
        if groups == 0 || groups > d {
            return Err(params(format!("group count {groups} must be in 1..={d}")));
        }
        if k > d {
            return Err(params(format!("target {k} exceeds d = {d}")));
        }
        let g = d.div_ceil(groups) as u32;
        let proto = IpProtocol { d, k, groups: groups as u32, g, chunk_bits: index_bits(g as u64 + 1) };
        if proto.spec().m1 > 63 || g > 63 {
            return Err(params("protocol messages exceed 63 bits"));
        }
        Ok(proto)
    }

    pub fn psi(&self, a: u64, i: u32) -> u64 {
        chunk(a, i, self.groups, self.chunk_bits)
    }

    /// Merlin index of `psi`.
    pub fn encode_psi(&self, psi: &[u64]) -> u64 {
        psi.iter().fold(0, |acc, &p| acc << self.chunk_bits | p)
    }

    /// Group `i` of `v` as a `g`-bit string, lowest coordinate first.
    pub fn group(&self, v: &BitVec, i: u32) -> u64 {
        let start = (i * self.g) as usize;
        (0..self.g as usize).fold(0, |acc, j| {
            let c = start + j;
            acc << 1 | (c < v.len() && v.get(c)) as u64
        })
    }
}

impl Sigma2Protocol for IpProtocol {
    type X = BitVec;
    type Y = BitVec;

    fn spec(&self) -> ProtocolSpec {
        ProtocolSpec { m1: self.groups * self.chunk_bits, m2: index_bits(self.groups as u64), ell: self.g, parties: 2 }
    }

    fn consistent_x(&self, _x: &BitVec, _a: u64, _b: u64, _w: u64) -> bool {
        true
    }

    fn consistent_y(&self, y: &BitVec, _a: u64, b: u64, w: u64) -> bool {
        let expect = if b < self.groups as u64 { self.group(y, b as u32) } else { 0 };
        w == expect
    }

    fn accepts(&self, x: &BitVec, a: u64, b: u64, w: u64) -> bool {
        let total: u64 = (0..self.groups).map(|i| self.psi(a, i)).sum();
        if total != self.k as u64 {
            return false;
        }
        if b >= self.groups as u64 {
            return true;
        }
        let xi = self.group(x, b as u32);
        (xi & w).count_ones() as u64 == self.psi(a, b as u32)
    }

    /// Every `psi` with entries in `0..=g` summing to `k`.
    fn viable_merlin(&self) -> Option<Vec<u64>> {
        let mut out = Vec::new();
        let mut psi = vec![0u64; self.groups as usize];
        fn rec(p: &IpProtocol, i: usize, left: u64, psi: &mut Vec<u64>, out: &mut Vec<u64>) {
            if i == psi.len() {
                if left == 0 {
                    out.push(p.encode_psi(psi));
                }
                return;
            }
            let rest_cap = (psi.len() - i - 1) as u64 * p.g as u64;
            for v in left.saturating_sub(rest_cap)..=left.min(p.g as u64) {
                psi[i] = v;
                rec(p, i + 1, left - v, psi, out);
            }
        }
        rec(self, 0, self.k as u64, &mut psi, &mut out);
        Some(out)
    }
}

/// Number of pruned Merlin strings: compositions of `k` into `groups`
/// parts each at most `ceil(d / groups)`.
pub fn ip_viable_count(d: usize, k: usize, groups: usize) -> u128 {
    if groups == 0 {
        return (k == 0) as u128;
    }
    let g = d.div_ceil(groups);
    let mut ways = vec![0u128; k + 1];
    ways[0] = 1;
    for _ in 0..groups {
        let mut next = vec![0u128; k + 1];
        for (s, &c) in ways.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for v in 0..=g.min(k - s) {
                next[s + v] = next[s + v].saturating_add(c);
            }
        }
        ways = next;
    }
    ways[k]
}

/// ExactIP as an OR-bundle of OV instances through [`IpProtocol`].
pub fn exactip_to_ov(inst: &ExactIpInstance, groups: usize, opts: &CompileOptions) -> Result<OvBundle> {
    let p = IpProtocol::new(inst.base.d, inst.m, groups)?;
    compile_to_ov(&p, &inst.base.a, &inst.base.b, &format!("exactip-ov groups={groups}"), opts)
}

fn binom_saturating(n: u128, k: u128, cap: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut c: u128 = 1;
    for i in 0..k.min(n - k) {
        c = c.saturating_mul(n - i) / (i + 1);
        if c > cap {
            return cap + 1;
        }
    }
    c
}

/// Whether more than `cap` Merlin strings survive pruning, without the
/// full count when the instance is large. Uses the symmetry
/// `psi_i -> g - psi_i` and lower bounds from near-balanced compositions.
pub fn ip_viable_count_exceeds(d: usize, k: usize, groups: usize, cap: u128) -> bool {
    if groups == 0 {
        return false;
    }
    let g = d.div_ceil(groups) as u128;
    let total = groups as u128 * g;
    let k = k as u128;
    if k > total {
        return false;
    }
    let n = groups as u128;
    let kk = k.min(total - k);
    let (q, rem) = (kk / n, kk % n);
    // Parts q or q + 1 with `rem` of them raised.
    if rem > 0 && binom_saturating(n, rem, cap) > cap {
        return true;
    }
    // Lower one q-part and raise another.
    if q >= 1 && g >= 2 && (n - rem).saturating_mul((n - rem).saturating_sub(1)) > cap {
        return true;
    }
    // Raise one (q + 1)-part and lower another.
    if q + 2 <= g && rem.saturating_mul(rem.saturating_sub(1)) > cap {
        return true;
    }
    ip_viable_count((groups as u128 * g) as usize, kk as usize, groups) > cap
}
