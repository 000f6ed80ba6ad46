use super::backend::{MaxIpBackend, SketchInstance};
use super::minhash::{MinHash, MinHashFamily};
use super::pstable::{bucket_of, PStableFamily, PStableHash, DEFAULT_WIDTH};
use super::{label_bit, LshFamily, LshHash, LshReductionParams, SketchWriter};
use crate::bits::BitVec;
use crate::error::{params, Result};
use crate::instances::{BooleanPairInstance, RealPairInstance, SetFamilyInstance};
use crate::oracles::lp_dist;
use crate::rng::{derive, derive_tagged};
use crate::scalar::Real;
use serde::Serialize;
use std::collections::HashSet;

/// Search configuration shared by the approximation pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ApproxConfig {
    pub eps: f64,
    /// p-stable bucket width after normalizing by the radius.
    pub width: f64,
    /// Independent sketches per decision; the majority answer is used.
    pub repeats: usize,
    pub seed: u64,
}

impl ApproxConfig {
    pub fn new(eps: f64, seed: u64) -> Self {
        ApproxConfig { eps, width: DEFAULT_WIDTH, repeats: 3, seed }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(params(format!("eps = {} outside (0, 1)", self.eps)));
        }
        if self.repeats == 0 || self.repeats.is_multiple_of(2) {
            return Err(params("repeats must be odd"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxOutcome<S> {
    pub estimate: S,
    /// Levels queried, in query order, with the majority answer.
    pub decisions: Vec<(usize, bool)>,
    /// Coordinates per sketch; 0 when no sketch was needed.
    pub sketch_dim: usize,
}

/// Majority of up to `repeats` answers, stopping once decided.
fn majority(repeats: usize, mut vote: impl FnMut(usize) -> Result<bool>) -> Result<bool> {
    let (mut yes, mut no) = (0, 0);
    for t in 0..repeats {
        if vote(t)? {
            yes += 1;
        } else {
            no += 1;
        }
        if 2 * yes > repeats || 2 * no > repeats {
            break;
        }
    }
    Ok(2 * yes > repeats)
}

/// First index in `0..=len` where `pred` turns false, assuming it is
/// monotone (true then false). Caches nothing; callers record decisions.
fn first_false(len: usize, mut pred: impl FnMut(usize) -> Result<bool>) -> Result<usize> {
    let (mut lo, mut hi) = (0, len);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid)? {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Projections of every point under `reps` p-stable hashes, reused for
/// every radius.
struct ProjectionBank<S> {
    reps: usize,
    /// `proj[pt * reps + rep]`.
    proj: Vec<S>,
    offset: Vec<S>,
    rep_seeds: Vec<u64>,
}

impl<S: Real> ProjectionBank<S> {
    fn new(p: f64, width: f64, d: usize, pts: &[&[S]], reps: usize, seed: u64) -> Self {
        let hashes: Vec<PStableHash<S>> = (0..reps).map(|rep| PStableHash::sample(p, d, width, 1.0, derive(seed, rep as u64))).collect();
        let mut proj = Vec::with_capacity(reps * pts.len());
        for x in pts {
            proj.extend(hashes.iter().map(|h| h.project(x)));
        }
        let offset = hashes.iter().map(|h| h.offset).collect();
        let phi_seed = derive_tagged(seed, "phi", 0);
        let rep_seeds = (0..reps as u64).map(|rep| derive(phi_seed, rep)).collect();
        ProjectionBank { reps, proj, offset, rep_seeds }
    }

    /// Sketch of point `pt` at radius `r`: repetition `i` sets bit `2i` or
    /// `2i + 1`.
    fn sketch(&self, pt: usize, scale: S) -> BitVec {
        let row = &self.proj[pt * self.reps..(pt + 1) * self.reps];
        let mut words = vec![0u64; (2 * self.reps).div_ceil(64)];
        for (rep, ((&v, &off), &seed)) in row.iter().zip(&self.offset).zip(&self.rep_seeds).enumerate() {
            let bit = label_bit(seed, bucket_of(v, scale, off));
            let pos = 2 * rep + (!bit) as usize;
            words[pos / 64] |= 1u64 << (pos % 64);
        }
        BitVec::from_words(2 * self.reps, words)
    }

    fn sketches(&self, points: usize, r: S, width: f64) -> Vec<BitVec> {
        let scale = S::one() / (r * S::from_f64(width).expect("finite width"));
        (0..points).map(|pt| self.sketch(pt, scale)).collect()
    }
}

/// Geometric radius grid and LSH machinery for one point-set instance.
struct RadiusSearch<'a, S> {
    inst: &'a RealPairInstance<S>,
    cfg: ApproxConfig,
    params: LshReductionParams,
    banks: Vec<ProjectionBank<S>>,
    grid: Vec<S>,
}

fn min_coordinate_gap<S: Real>(pts: &[&[S]], d: usize) -> Option<S> {
    let mut best: Option<S> = None;
    let mut col: Vec<S> = Vec::with_capacity(pts.len());
    for c in 0..d {
        col.clear();
        col.extend(pts.iter().map(|x| x[c]));
        col.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        for w in col.windows(2) {
            let g = w[1] - w[0];
            if g > S::zero() && best.is_none_or(|b| g < b) {
                best = Some(g);
            }
        }
    }
    best
}

impl<'a, S: Real> RadiusSearch<'a, S> {
    /// `None` when every point coincides.
    fn new(inst: &'a RealPairInstance<S>, cfg: ApproxConfig) -> Result<Option<Self>> {
        cfg.validate()?;
        inst.validate()?;
        let p = inst.p.to_f64().expect("finite p");
        let pts = all_points(inst);
        let Some(lo) = min_coordinate_gap(&pts, inst.d) else { return Ok(None) };
        // Triangle inequality: every pairwise distance is at most twice the
        // largest distance from the first point.
        let hi = pts.iter().map(|x| lp_dist(pts[0], x, inst.p)).fold(S::zero(), |a, b| if b > a { b } else { a });
        let hi = hi + hi;
        let ratio = S::from_f64(1.0 + cfg.eps / 3.0).expect("finite ratio");
        let mut grid = vec![lo];
        while *grid.last().expect("non-empty") < hi {
            let next = *grid.last().expect("non-empty") * ratio;
            grid.push(next);
        }
        let fam = PStableFamily::<S>::new(p, 1.0, cfg.eps, cfg.width, inst.d)?;
        let n = inst.a.len().max(inst.other().len());
        let params = LshReductionParams::new(fam.p1(), fam.p2(), n)?;
        Ok(Some(RadiusSearch { inst, cfg, params, banks: Vec::new(), grid }))
    }

    fn bank(&mut self, t: usize) -> &ProjectionBank<S> {
        while self.banks.len() <= t {
            let pts = all_points(self.inst);
            let seed = derive_tagged(self.cfg.seed, "bank", self.banks.len() as u64);
            let bank = ProjectionBank::new(self.inst.p.to_f64().expect("finite p"), self.cfg.width, self.inst.d, &pts, self.params.reps, seed);
            self.banks.push(bank);
        }
        &self.banks[t]
    }

    /// Sketch pair instance at grid level `k` from bank `t`.
    fn sketch(&mut self, t: usize, k: usize) -> (BooleanPairInstance, bool) {
        let r = self.grid[k];
        let width = self.cfg.width;
        let na = self.inst.a.len();
        let single = self.inst.single_set();
        let points = na + self.inst.b.as_ref().map_or(0, Vec::len);
        let sk = self.bank(t).sketches(points, r, width);
        let dim = 2 * self.params.reps;
        let (a, b) = if single { (sk.clone(), sk) } else { (sk[..na].to_vec(), sk[na..].to_vec()) };
        (BooleanPairInstance { d: dim, a, b }, single)
    }
}

fn all_points<S>(inst: &RealPairInstance<S>) -> Vec<&[S]> {
    let mut pts: Vec<&[S]> = inst.a.iter().map(Vec::as_slice).collect();
    if let Some(b) = &inst.b {
        pts.extend(b.iter().map(Vec::as_slice));
    }
    pts
}

fn bits_key<S: Real>(x: &[S]) -> Vec<u64> {
    x.iter().map(|v| v.to_f64().expect("finite").to_bits()).collect()
}

/// `(1 + eps)`-approximate closest pair.
///
/// Level `R_k = lo (1 + eps/3)^k` is "yes" when a cross pair sketches at
/// or above the midpoint threshold; the smallest yes level is returned.
pub fn bcp_approx<S: Real, B: MaxIpBackend>(inst: &RealPairInstance<S>, cfg: ApproxConfig, backend: &B) -> Result<ApproxOutcome<S>> {
    let zero = ApproxOutcome { estimate: S::zero(), decisions: Vec::new(), sketch_dim: 0 };
    let duplicate = match &inst.b {
        Some(b) => {
            let seen: HashSet<Vec<u64>> = inst.a.iter().map(|x| bits_key(x)).collect();
            b.iter().any(|y| seen.contains(&bits_key(y)))
        }
        None => {
            let mut seen = HashSet::new();
            !inst.a.iter().all(|x| seen.insert(bits_key(x)))
        }
    };
    if duplicate {
        return Ok(zero);
    }
    let Some(mut search) = RadiusSearch::new(inst, cfg)? else { return Ok(zero) };
    let theta = search.params.midpoint();
    let top = search.grid.len() - 1;
    let mut decisions = Vec::new();
    // "No close pair at R_k" is true below the answer and false above.
    let first_yes = first_false(top + 1, |k| {
        let yes = majority(cfg.repeats, |t| {
            let (sk, single) = search.sketch(t, k);
            backend.max_at_least(SketchInstance { inst: &sk, exclude_diagonal: single }, theta)
        })?;
        decisions.push((k, yes));
        Ok(!yes)
    })?;
    let estimate = search.grid[first_yes.min(top)];
    Ok(ApproxOutcome { estimate, decisions, sketch_dim: search.params.dim() })
}

/// `(1 + eps)`-approximate furthest pair.
///
/// Level `R_k` is "yes" when some pair sketches below the midpoint
/// threshold, meaning a pair beyond `(1 + eps) R_k`. Returns `R_{k+1}` for
/// the largest yes level `k`, or `R_0` when even that level is no.
pub fn fp_approx<S: Real, B: MaxIpBackend>(inst: &RealPairInstance<S>, cfg: ApproxConfig, backend: &B) -> Result<ApproxOutcome<S>> {
    let Some(mut search) = RadiusSearch::new(inst, cfg)? else {
        return Ok(ApproxOutcome { estimate: S::zero(), decisions: Vec::new(), sketch_dim: 0 });
    };
    let theta = search.params.midpoint().saturating_sub(1);
    let top = search.grid.len() - 1;
    let mut decisions = Vec::new();
    let first_no = first_false(top + 1, |k| {
        let yes = majority(cfg.repeats, |t| {
            let (sk, single) = search.sketch(t, k);
            backend.min_at_most(SketchInstance { inst: &sk, exclude_diagonal: single }, theta)
        })?;
        decisions.push((k, yes));
        Ok(yes)
    })?;
    let ratio = S::from_f64(1.0 + cfg.eps / 3.0).expect("finite ratio");
    let estimate = if first_no <= top { search.grid[first_no] } else { search.grid[top] * ratio };
    Ok(ApproxOutcome { estimate, decisions, sketch_dim: search.params.dim() })
}

/// Additive `eps` approximation of the maximum Jaccard index.
///
/// Levels are `s_k = k eps / 2`; level `s` uses MinHash with `p1 = s`,
/// `p2 = s - eps/2`. MinHash labels do not depend on the level, so each
/// bank is sketched once and only the threshold moves.
pub fn jaccard_pair_approx<B: MaxIpBackend>(inst: &SetFamilyInstance, cfg: ApproxConfig, backend: &B) -> Result<ApproxOutcome<f64>> {
    cfg.validate()?;
    inst.validate()?;
    let delta = cfg.eps / 2.0;
    let levels: Vec<f64> = (0..=(1.0 / delta).ceil() as usize).map(|k| (k as f64 * delta).min(1.0)).collect();
    let n = inst.a.len().max(inst.b.len());
    let level_params: Vec<LshReductionParams> =
        levels.iter().map(|&s| LshReductionParams::new(s, s - delta, n)).collect::<Result<_>>()?;
    let reps = level_params[0].reps;
    let fam = MinHashFamily::new(inst.universe, levels[0], levels[0] - delta);
    let mut banks: Vec<BooleanPairInstance> = Vec::new();
    let mut bank = |t: usize| -> BooleanPairInstance {
        while banks.len() <= t {
            let seed = derive_tagged(cfg.seed, "bank", banks.len() as u64);
            let phi_seed = derive_tagged(seed, "phi", 0);
            let mut wa = SketchWriter::new(inst.a.len(), reps);
            let mut wb = SketchWriter::new(inst.b.len(), reps);
            for rep in 0..reps {
                let h: MinHash = fam.sample(derive(seed, rep as u64));
                let rep_seed = derive(phi_seed, rep as u64);
                for (j, s) in inst.a.iter().enumerate() {
                    wa.put(j, rep, label_bit(rep_seed, h.bucket(s)));
                }
                for (j, s) in inst.b.iter().enumerate() {
                    wb.put(j, rep, label_bit(rep_seed, h.bucket(s)));
                }
            }
            banks.push(BooleanPairInstance { d: 2 * reps, a: wa.finish(), b: wb.finish() });
        }
        banks[t].clone()
    };
    let mut decisions = Vec::new();
    let first_no = first_false(levels.len(), |k| {
        let theta = level_params[k].midpoint();
        let yes = majority(cfg.repeats, |t| {
            let sk = bank(t);
            backend.max_at_least(SketchInstance { inst: &sk, exclude_diagonal: false }, theta)
        })?;
        decisions.push((k, yes));
        Ok(yes)
    })?;
    let estimate = if first_no == 0 { 0.0 } else { levels[first_no - 1] };
    Ok(ApproxOutcome { estimate, decisions, sketch_dim: 2 * reps })
}
