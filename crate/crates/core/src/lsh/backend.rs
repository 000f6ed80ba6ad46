use crate::error::{params, Error, Result};
use crate::instances::{BooleanPairInstance, ExactIpInstance};
use crate::oracles;
use crate::protocols::{exactip_to_ov, index_bits, ip_viable_count, ip_viable_count_exceeds, Caps, CompileOptions};

/// A sketch to be queried. With `exclude_diagonal`, `A` and `B` list the
/// same points and the pairs `(i, i)` do not count.
#[derive(Clone, Copy, Debug)]
pub struct SketchInstance<'a> {
    pub inst: &'a BooleanPairInstance,
    pub exclude_diagonal: bool,
}

/// Threshold decisions on the extremal cross inner product.
pub trait MaxIpBackend {
    fn name(&self) -> &'static str;
    /// Is `MAX >= theta`?
    fn max_at_least(&self, s: SketchInstance<'_>, theta: u32) -> Result<bool>;
    /// Is `MIN <= theta`?
    fn min_at_most(&self, s: SketchInstance<'_>, theta: u32) -> Result<bool>;
}

/// Brute-force scans.
#[derive(Clone, Copy, Debug, Default)]
pub struct OracleBackend;

impl OracleBackend {
    fn pairs<'a>(s: SketchInstance<'a>) -> impl Iterator<Item = u32> + 'a {
        s.inst.a.iter().enumerate().flat_map(move |(i, x)| {
            s.inst.b.iter().enumerate().filter(move |&(j, _)| !(s.exclude_diagonal && i == j)).map(move |(_, y)| x.dot(y))
        })
    }
}

impl MaxIpBackend for OracleBackend {
    fn name(&self) -> &'static str {
        "oracle"
    }

    fn max_at_least(&self, s: SketchInstance<'_>, theta: u32) -> Result<bool> {
        Ok(Self::pairs(s).any(|v| v >= theta))
    }

    fn min_at_most(&self, s: SketchInstance<'_>, theta: u32) -> Result<bool> {
        Ok(Self::pairs(s).any(|v| v <= theta))
    }
}

/// Decides thresholds by ExactIP queries, each reduced to an OR-bundle of
/// OV instances through the IP protocol and solved by the OV oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct OvPipelineBackend {
    pub caps: Caps,
}

impl OvPipelineBackend {
    /// Fewest groups whose compiled dimension fits the cap.
    pub fn groups_for(&self, d: usize) -> Result<usize> {
        let cap_bits = usize::BITS - 1 - self.caps.dim.leading_zeros();
        (1..=d.max(1))
            .find(|&g| index_bits(g as u64) + d.div_ceil(g) as u32 <= cap_bits)
            .ok_or(Error::CapExceeded { what: "compiled dimension", value: d as u128, cap: self.caps.dim as u128 })
    }

    /// `<x, y> = k` for some cross pair, via the OV pipeline.
    pub fn exactip(&self, inst: &BooleanPairInstance, k: usize) -> Result<bool> {
        let d = inst.d;
        let groups = self.groups_for(d)?;
        if ip_viable_count_exceeds(d, k, groups, self.caps.bundle as u128) {
            let cap = self.caps.bundle as u128;
            return Err(if d <= 64 {
                Error::CapExceeded { what: "bundle size", value: ip_viable_count(d, k, groups), cap }
            } else {
                Error::CapExceeded { what: "bundle size lower bound", value: cap + 1, cap }
            });
        }
        let ex = ExactIpInstance::new(inst.clone(), k)?;
        let bundle = exactip_to_ov(&ex, groups, &CompileOptions { caps: self.caps, prune: true })?;
        Ok(bundle.decide_with(|j| oracles::ov_decide(j).yes))
    }

    /// Inner product of every diagonal pair, when they are all equal.
    fn diagonal_value(s: SketchInstance<'_>) -> Option<u32> {
        let vals: Vec<u32> = s.inst.a.iter().zip(&s.inst.b).map(|(x, y)| x.dot(y)).collect();
        vals.first().copied().filter(|v| vals.iter().all(|w| w == v))
    }
}

impl MaxIpBackend for OvPipelineBackend {
    fn name(&self) -> &'static str {
        "ov-pipeline"
    }

    fn max_at_least(&self, s: SketchInstance<'_>, theta: u32) -> Result<bool> {
        if s.exclude_diagonal {
            // Diagonal pairs cannot be masked out of an ExactIP instance.
            return Err(params("the OV pipeline needs two point sets for maximization queries"));
        }
        for k in theta as usize..=s.inst.d {
            if self.exactip(s.inst, k)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn min_at_most(&self, s: SketchInstance<'_>, theta: u32) -> Result<bool> {
        if s.exclude_diagonal {
            // Safe only when no diagonal pair can reach the threshold.
            match Self::diagonal_value(s) {
                Some(v) if v > theta => {}
                _ => return Err(params("diagonal pairs would decide this minimization query")),
            }
        }
        for k in 0..=(theta as usize).min(s.inst.d) {
            if self.exactip(s.inst, k)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}
