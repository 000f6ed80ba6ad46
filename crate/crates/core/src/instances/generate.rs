use super::types::*;
use crate::bits::BitVec;
use crate::error::{params, Error, Result};
use crate::oracles;
use crate::rng::{derive, derive_tagged, rng, Rng};
use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Retry cap for planted constructions, per vector and per whole attempt.
pub const MAX_RETRIES: usize = 1000;

/// Generator parameters. Unused fields are ignored by a given kind.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenParams {
    /// Set size (variables for maxsat).
    pub n: usize,
    pub n_b: Option<usize>,
    pub n_c: Option<usize>,
    pub d: usize,
    /// ExactIP target.
    pub m: Option<usize>,
    pub tau: Option<usize>,
    /// Probability of a one in random bit vectors and sets.
    pub density: Option<f64>,
    pub p: Option<f64>,
    /// Gap factor for planted geometric instances.
    pub eps: Option<f64>,
    pub radius: Option<f64>,
    /// Furthest pair over one point set.
    pub single_set: bool,
    pub universe: Option<u32>,
    /// Entry bound V (hopcroft) or range width W (3sum).
    pub bound: Option<i64>,
    pub num_clauses: Option<usize>,
    pub clause_len: Option<usize>,
    /// Planted fraction of satisfiable clauses for maxsat.
    pub sat: Option<f64>,
    pub plant: Option<bool>,
}

impl GenParams {
    pub fn sizes(n: usize, d: usize) -> Self {
        GenParams { n, d, ..Default::default() }
    }

    fn nb(&self) -> usize {
        self.n_b.unwrap_or(self.n)
    }

    fn nc(&self) -> usize {
        self.n_c.unwrap_or(self.n)
    }

    fn density(&self) -> Result<f64> {
        let rho = self.density.unwrap_or(0.5);
        if !(0.0..=1.0).contains(&rho) {
            return Err(params(format!("density {rho} outside [0, 1]")));
        }
        Ok(rho)
    }
}

/// Deterministic in `(kind, params, seed)`. Planted instances are checked
/// against the matching oracle before they are returned.
pub fn generate(kind: ProblemKind, p: &GenParams, seed: u64) -> Result<Instance> {
    if p.n == 0 || (p.n_b == Some(0)) || (p.n_c == Some(0)) {
        return Err(params("set sizes must be positive"));
    }
    let seed = derive_tagged(seed, kind.as_str(), 0);
    if p.plant.is_none() {
        return build(kind, p, &mut rng(seed));
    }
    for attempt in 0..MAX_RETRIES {
        let inst = build(kind, p, &mut rng(derive(seed, attempt as u64)))?;
        if plant_holds(&inst, p)? {
            return Ok(inst);
        }
    }
    Err(Error::PlantFailed(MAX_RETRIES))
}

fn plant_holds(inst: &Instance, p: &GenParams) -> Result<bool> {
    let want = p.plant.unwrap_or(true);
    Ok(match inst {
        Instance::Ov(b) => oracles::ov_decide(b).yes == want,
        Instance::ExactIp(e) => oracles::exactip_decide(e).yes == want,
        Instance::Gap(g) => oracles::gap_side(g) == Some(want),
        Instance::Bcp(r) => {
            let eps = p.eps.unwrap_or(0.3);
            let radius = p.radius.unwrap_or(1.0);
            let best = oracles::bcp(r)?.value;
            let close = r.pairs().filter(|&(i, j)| oracles::lp_dist(&r.a[i], &r.other()[j], r.p) < (1.0 + eps) * radius).count();
            if want {
                close == 1 && (best - radius).abs() <= 1e-9 * radius
            } else {
                close == 0
            }
        }
        Instance::Fp(r) => {
            let eps = p.eps.unwrap_or(0.3);
            let radius = p.radius.unwrap_or(1.0);
            let best = oracles::fp(r)?.value;
            let far = r.pairs().filter(|&(i, j)| oracles::lp_dist(&r.a[i], &r.other()[j], r.p) > radius / (1.0 + eps)).count();
            if want {
                far == 1 && (best - radius).abs() <= 1e-9 * radius
            } else {
                far == 0
            }
        }
        Instance::Hopcroft(h) => oracles::hopcroft_decide(h).yes == want,
        Instance::ThreeOv(t) => oracles::three_ov_decide(t).yes == want,
        Instance::ThreeSum(t) => oracles::three_sum_decide(t).yes == want,
        Instance::MaxSat(c) => {
            let m = c.clauses.len();
            let target = match p.sat {
                Some(_) => m - planted_pairs(p, m),
                None if want => m,
                None => return Ok(c.num_vars > oracles::MAXSAT_ORACLE_VARS || oracles::maxsat_opt(c)?.value < m),
            };
            c.num_vars > oracles::MAXSAT_ORACLE_VARS || oracles::maxsat_opt(c)?.value == target
        }
        Instance::MinIp(_) | Instance::MaxIp(_) | Instance::Jaccard(_) => {
            return Err(params("plants are defined for decision problems only"))
        }
    })
}

fn random_bits(r: &mut Rng, d: usize, rho: f64) -> BitVec {
    BitVec::from_fn(d, |_| r.random_bool(rho))
}

fn random_side(r: &mut Rng, n: usize, d: usize, rho: f64) -> Vec<BitVec> {
    (0..n).map(|_| random_bits(r, d, rho)).collect()
}

/// Samples each element until `ok` holds, giving up after `MAX_RETRIES`.
fn rejection<T>(r: &mut Rng, mut sample: impl FnMut(&mut Rng) -> T, ok: impl Fn(&T) -> bool) -> Result<T> {
    for _ in 0..MAX_RETRIES {
        let v = sample(r);
        if ok(&v) {
            return Ok(v);
        }
    }
    Err(Error::PlantFailed(MAX_RETRIES))
}

/// A pair `(x, y)` with `<x, y> = m` exactly.
fn pair_with_ip(r: &mut Rng, d: usize, m: usize, rho: f64) -> (BitVec, BitVec) {
    let mut x = random_bits(r, d, rho);
    let mut zeros: Vec<usize> = (0..d).filter(|&i| !x.get(i)).collect();
    zeros.shuffle(r);
    let deficit = m.saturating_sub(x.count_ones() as usize);
    for &i in &zeros[..deficit] {
        x.set(i, true);
    }
    let mut support: Vec<usize> = x.ones_positions().collect();
    support.shuffle(r);
    let mut y = BitVec::from_fn(d, |i| !x.get(i) && r.random_bool(rho));
    for &i in &support[..m] {
        y.set(i, true);
    }
    (x, y)
}

fn boolean_pair(p: &GenParams, r: &mut Rng, want_ip: Option<usize>, bad: impl Fn(u32) -> bool) -> Result<BooleanPairInstance> {
    let (d, rho) = (p.d, p.density()?);
    let b = random_side(r, p.nb(), d, rho);
    let mut a = Vec::with_capacity(p.n);
    match p.plant {
        Some(false) => {
            for _ in 0..p.n {
                a.push(rejection(r, |r| random_bits(r, d, rho), |x| b.iter().all(|y| !bad(x.dot(y))))?);
            }
        }
        _ => a = random_side(r, p.n, d, rho),
    }
    let mut inst = BooleanPairInstance::new(d, a, b)?;
    if let (Some(true), Some(ip)) = (p.plant, want_ip) {
        let (x, y) = pair_with_ip(r, d, ip, rho);
        let (i, j) = (r.random_range(0..p.n), r.random_range(0..p.nb()));
        inst.a[i] = x;
        inst.b[j] = y;
    }
    Ok(inst)
}

fn unit_direction(r: &mut Rng, d: usize, p: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(r)).collect();
        let norm = v.iter().map(|c: &f64| c.abs().powf(p)).sum::<f64>().powf(1.0 / p);
        if norm > 1e-12 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

fn gaussian_points(r: &mut Rng, n: usize, d: usize, sigma: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, r)).collect::<Vec<f64>>())
        .collect()
}

fn real_common(p: &GenParams) -> Result<(f64, f64, f64)> {
    let norm = p.p.unwrap_or(2.0);
    let eps = p.eps.unwrap_or(0.3);
    let radius = p.radius.unwrap_or(1.0);
    if !(1.0..=2.0).contains(&norm) || !(eps > 0.0 && eps < 1.0) || !(radius > 0.0) || p.d == 0 {
        return Err(params("need p in [1,2], eps in (0,1), radius > 0, d >= 1"));
    }
    Ok((norm, eps, radius))
}

/// Close pair at distance `radius`, every other cross pair at least
/// `(1 + eps) radius` apart (yes); or all pairs that far apart (no).
fn bcp_instance(p: &GenParams, r: &mut Rng) -> Result<RealPairInstance<f64>> {
    let (norm, eps, radius) = real_common(p)?;
    let d = p.d;
    let a = gaussian_points(r, p.n, d, radius);
    let far = |x: &Vec<f64>, set: &[Vec<f64>]| set.iter().all(|y| oracles::lp_dist(x, y, norm) >= (1.0 + eps) * radius);
    let b_single = p.single_set;
    if b_single {
        return Err(params("planted closest pair needs two point sets"));
    }
    let mut b = Vec::with_capacity(p.nb());
    for _ in 0..p.nb() {
        let pt = if p.plant.is_some() {
            rejection(r, |r| gaussian_points(r, 1, d, radius).pop().unwrap(), |x| far(x, &a))?
        } else {
            gaussian_points(r, 1, d, radius).pop().unwrap()
        };
        b.push(pt);
    }
    if p.plant == Some(true) {
        let (i, j) = (r.random_range(0..p.n), r.random_range(0..p.nb()));
        let u = unit_direction(r, d, norm);
        b[j] = a[i].iter().zip(&u).map(|(x, du)| x + radius * du).collect();
    }
    RealPairInstance::new(d, norm, a, Some(b))
}

/// Far pair at distance `radius`, every other pair at most
/// `radius / (1 + eps)` apart (yes); or all pairs that close (no).
fn fp_instance(p: &GenParams, r: &mut Rng) -> Result<RealPairInstance<f64>> {
    let (norm, eps, radius) = real_common(p)?;
    let d = p.d;
    let mut a = gaussian_points(r, p.n, d, 1.0);
    let mut b = if p.single_set { None } else { Some(gaussian_points(r, p.nb(), d, 1.0)) };
    if p.plant.is_some() {
        // Points within `c` of the origin are pairwise within 2c and within
        // radius/2 + c of a planted endpoint.
        let c = 0.95 * (1.0 / (1.0 + eps) - 0.5).min(0.5 / (1.0 + eps)) * radius;
        let max_norm = a
            .iter()
            .chain(b.iter().flatten())
            .map(|x| x.iter().map(|v| v.abs().powf(norm)).sum::<f64>().powf(1.0 / norm))
            .fold(0.0, f64::max)
            .max(1e-12);
        for x in a.iter_mut().chain(b.iter_mut().flatten()) {
            x.iter_mut().for_each(|v| *v *= c / max_norm);
        }
    }
    if p.plant == Some(true) {
        let u = unit_direction(r, d, norm);
        let half: Vec<f64> = u.iter().map(|v| v * radius / 2.0).collect();
        let neg: Vec<f64> = half.iter().map(|v| -v).collect();
        let i = r.random_range(0..a.len());
        match &mut b {
            Some(b) => {
                let j = r.random_range(0..b.len());
                a[i] = half;
                b[j] = neg;
            }
            None => {
                if a.len() < 2 {
                    return Err(params("a single set needs two points for a far pair"));
                }
                let j = (i + 1 + r.random_range(0..a.len() - 1)) % a.len();
                a[i] = half;
                a[j] = neg;
            }
        }
    }
    RealPairInstance::new(d, norm, a, b)
}

fn orthogonal_int_partner(r: &mut Rng, x: &[i64], bound: i64) -> Vec<i64> {
    let d = x.len();
    let mut y = vec![0i64; d];
    let zeros: Vec<usize> = (0..d).filter(|&k| x[k] == 0).collect();
    for &k in &zeros {
        y[k] = r.random_range(-bound..=bound);
    }
    let nz: Vec<usize> = (0..d).filter(|&k| x[k] != 0).collect();
    if nz.len() >= 2 {
        let (i, j) = (nz[0], nz[1 + r.random_range(0..nz.len() - 1)]);
        let g = gcd(x[i].abs(), x[j].abs());
        y[i] = x[j] / g;
        y[j] = -x[i] / g;
    }
    y
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Number of contradictory unit-clause pairs for a planted `sat` fraction.
fn planted_pairs(p: &GenParams, m: usize) -> usize {
    ((1.0 - p.sat.unwrap_or(1.0)) * m as f64).round() as usize
}

fn random_clause(r: &mut Rng, n: u32, k: usize) -> Vec<i32> {
    let mut vars: Vec<i32> = (1..=n as i32).collect();
    vars.shuffle(r);
    vars.truncate(k.min(n as usize));
    vars.into_iter().map(|v| if r.random_bool(0.5) { v } else { -v }).collect()
}

fn maxsat_instance(p: &GenParams, r: &mut Rng) -> Result<CnfInstance> {
    let n = u32::try_from(p.n).map_err(|_| params("too many variables"))?;
    let m = p.num_clauses.unwrap_or(100);
    let k = p.clause_len.unwrap_or(3);
    if m == 0 || k == 0 {
        return Err(params("need at least one clause of positive width"));
    }
    if let Some(s) = p.sat {
        if !(0.5..=1.0).contains(&s) {
            return Err(params(format!("sat fraction {s} outside [0.5, 1]")));
        }
    }
    let mut clauses = Vec::with_capacity(m);
    match (p.plant, p.sat) {
        (None, None) => {
            for _ in 0..m {
                clauses.push(random_clause(r, n, k));
            }
        }
        (Some(false), None) => {
            clauses.push(vec![1]);
            clauses.push(vec![-1]);
            for _ in 2..m.max(2) {
                clauses.push(random_clause(r, n, k));
            }
        }
        _ => {
            let hidden: Vec<bool> = (0..n).map(|_| r.random_bool(0.5)).collect();
            let pairs = planted_pairs(p, m);
            for _ in 0..pairs {
                let v = r.random_range(1..=n as i32);
                clauses.push(vec![v]);
                clauses.push(vec![-v]);
            }
            while clauses.len() < m {
                let c = random_clause(r, n, k);
                if c.iter().any(|&l| hidden[l.unsigned_abs() as usize - 1] == (l > 0)) {
                    clauses.push(c);
                }
            }
            clauses.shuffle(r);
        }
    }
    CnfInstance::new(n, clauses)
}

fn build(kind: ProblemKind, p: &GenParams, r: &mut Rng) -> Result<Instance> {
    let need_d = || if p.d == 0 { Err(params("dimension d must be positive")) } else { Ok(()) };
    Ok(match kind {
        ProblemKind::Ov => {
            need_d()?;
            Instance::Ov(boolean_pair(p, r, Some(0), |ip| ip == 0)?)
        }
        ProblemKind::MinIp | ProblemKind::MaxIp => {
            need_d()?;
            if p.plant.is_some() {
                return Err(params("plants are defined for decision problems only"));
            }
            let b = boolean_pair(p, r, None, |_| false)?;
            if kind == ProblemKind::MinIp {
                Instance::MinIp(b)
            } else {
                Instance::MaxIp(b)
            }
        }
        ProblemKind::ExactIp => {
            need_d()?;
            let m = p.m.ok_or_else(|| params("exactip needs m"))?;
            if m > p.d {
                return Err(params(format!("target m = {m} exceeds d = {}", p.d)));
            }
            let base = boolean_pair(p, r, Some(m), |ip| ip as usize == m)?;
            Instance::ExactIp(ExactIpInstance::new(base, m)?)
        }
        ProblemKind::GapMin | ProblemKind::GapMax => {
            need_d()?;
            let tau = p.tau.ok_or_else(|| params("gap instances need tau"))?;
            if 2 * tau > p.d {
                return Err(params(format!("tau = {tau} needs 2 tau <= d = {}", p.d)));
            }
            let (side, base) = if kind == ProblemKind::GapMin {
                (GapSide::Min, boolean_pair(p, r, Some(tau), |ip| (ip as usize) < 2 * tau)?)
            } else {
                (GapSide::Max, boolean_pair(p, r, Some(2 * tau), |ip| ip as usize > tau)?)
            };
            Instance::Gap(GapInstance::new(base, tau, side)?)
        }
        ProblemKind::Bcp => Instance::Bcp(bcp_instance(p, r)?),
        ProblemKind::Fp => Instance::Fp(fp_instance(p, r)?),
        ProblemKind::Jaccard => {
            if p.plant.is_some() {
                return Err(params("plants are defined for decision problems only"));
            }
            let u = p.universe.ok_or_else(|| params("jaccard needs universe"))?;
            let rho = p.density()?;
            let mut fam = |k: usize| -> Vec<Vec<u32>> { (0..k).map(|_| (1..=u).filter(|_| r.random_bool(rho)).collect()).collect() };
            let (a, b) = (fam(p.n), fam(p.nb()));
            Instance::Jaccard(SetFamilyInstance::new(u, a, b)?)
        }
        ProblemKind::Hopcroft => {
            need_d()?;
            let v = p.bound.unwrap_or(20);
            if !(1..=MAX_INTEGER_BOUND).contains(&v) {
                return Err(params(format!("bound {v} outside 1..={MAX_INTEGER_BOUND}")));
            }
            let d = p.d;
            let vec_of = |r: &mut Rng| -> Vec<i64> { (0..d).map(|_| r.random_range(-v..=v)).collect() };
            let b: Vec<Vec<i64>> = (0..p.nb()).map(|_| vec_of(r)).collect();
            let mut a = Vec::with_capacity(p.n);
            for _ in 0..p.n {
                a.push(match p.plant {
                    Some(false) => rejection(r, vec_of, |x| b.iter().all(|y| oracles::int_dot(x, y) != 0))?,
                    _ => vec_of(r),
                });
            }
            let mut inst = IntegerPairInstance::new(d, v, a, b)?;
            if p.plant == Some(true) {
                let (i, j) = (r.random_range(0..p.n), r.random_range(0..p.nb()));
                inst.b[j] = orthogonal_int_partner(r, &inst.a[i], v);
            }
            Instance::Hopcroft(inst)
        }
        ProblemKind::ThreeOv => {
            need_d()?;
            let (d, rho) = (p.d, p.density()?);
            let a = random_side(r, p.n, d, rho);
            let b = random_side(r, p.nb(), d, rho);
            let ab: Vec<BitVec> = a.iter().flat_map(|x| b.iter().map(move |y| x.and(y))).collect();
            let mut c = Vec::with_capacity(p.nc());
            for _ in 0..p.nc() {
                c.push(match p.plant {
                    Some(false) => rejection(r, |r| random_bits(r, d, rho), |z| ab.iter().all(|w| !w.is_orthogonal(z)))?,
                    _ => random_bits(r, d, rho),
                });
            }
            let mut inst = TripleInstance::new(d, a, b, c)?;
            if p.plant == Some(true) {
                let (i, j, k) = (r.random_range(0..p.n), r.random_range(0..p.nb()), r.random_range(0..p.nc()));
                let common = inst.a[i].and(&inst.b[j]);
                inst.c[k] = BitVec::from_fn(d, |t| !common.get(t) && r.random_bool(rho));
            }
            Instance::ThreeOv(inst)
        }
        ProblemKind::ThreeSum => {
            let w = p.bound.unwrap_or(64);
            if w < 2 || w % 2 != 0 {
                return Err(params("3sum bound W must be even and at least 2"));
            }
            let half = w / 2;
            let a: Vec<i64> = (0..p.n).map(|_| r.random_range(-half..half)).collect();
            let b: Vec<i64> = (0..p.nb()).map(|_| r.random_range(-half..half)).collect();
            let sums: std::collections::HashSet<i64> = a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect();
            let mut c = Vec::with_capacity(p.nc());
            for _ in 0..p.nc() {
                c.push(match p.plant {
                    Some(false) => rejection(r, |r| r.random_range(-half..half), |z| !sums.contains(&-z))?,
                    _ => r.random_range(-half..half),
                });
            }
            let mut inst = ThreeSumInstance::new(w, a, b, c)?;
            if p.plant == Some(true) {
                let (i, j, k) = (r.random_range(0..p.n), r.random_range(0..p.nb()), r.random_range(0..p.nc()));
                // Choose a[i], b[j] so that -(a + b) is in range.
                let (x, y) = rejection(
                    r,
                    |r| (r.random_range(-half..half), r.random_range(-half..half)),
                    |(x, y)| (-half..half).contains(&(-x - y)),
                )?;
                inst.a[i] = x;
                inst.b[j] = y;
                inst.c[k] = -x - y;
            }
            Instance::ThreeSum(inst)
        }
        ProblemKind::MaxSat => Instance::MaxSat(maxsat_instance(p, r)?),
    })
}
