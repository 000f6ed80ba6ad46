use super::{LshFamily, LshHash};
use crate::error::{params, Result};
use crate::rng::{derive_tagged, rng, Rng};
use crate::scalar::Real;
use rand::Rng as _;
use rand_distr::{Cauchy, Distribution, Exp1, StandardNormal};
use std::collections::HashMap;
use std::f64::consts::FRAC_PI_2;
use std::marker::PhantomData;
use std::sync::{Mutex, OnceLock};

/// Bucket width after normalizing by the radius. Maximizes the Euclidean
/// collision gap between distances 1 and 1.3.
pub const DEFAULT_WIDTH: f64 = 2.0;

/// Monte Carlo sample count for collision probabilities.
pub const CALIBRATION_SAMPLES: usize = 100_000;

/// One draw from the symmetric p-stable law: Cauchy at 1, standard normal
/// at 2, Chambers–Mallows–Stuck in between.
pub fn sample_pstable(p: f64, r: &mut Rng) -> f64 {
    if p == 2.0 {
        StandardNormal.sample(r)
    } else if p == 1.0 {
        Cauchy::new(0.0, 1.0).expect("valid scale").sample(r)
    } else {
        let v: f64 = r.random_range(-FRAC_PI_2..FRAC_PI_2);
        let w: f64 = Exp1.sample(r);
        (p * v).sin() / v.cos().powf(1.0 / p) * (((1.0 - p) * v).cos() / w).powf((1.0 - p) / p)
    }
}

/// Collision probability of two points at normalized distance `c`:
/// `E[max(0, 1 - c|Z| / w)]`, averaged over the offset in closed form and
/// over `Z` by Monte Carlo. Cached per `(p, c, w)`; the sample stream is
/// fixed so the value is reproducible.
pub fn collision_probability(p: f64, c: f64, w: f64) -> f64 {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64, u64), f64>>> = OnceLock::new();
    let key = (p.to_bits(), c.to_bits(), w.to_bits());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(&v) = cache.lock().expect("cache lock").get(&key) {
        return v;
    }
    let mut r = rng(derive_tagged(p.to_bits(), "calibrate", 0));
    let total: f64 = (0..CALIBRATION_SAMPLES).map(|_| (1.0 - c * sample_pstable(p, &mut r).abs() / w).max(0.0)).sum();
    let v = total / CALIBRATION_SAMPLES as f64;
    cache.lock().expect("cache lock").insert(key, v);
    v
}

/// `h(x) = floor((<a, x / R> + b) / w)` with `a` p-stable and `b` uniform on `[0, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PStableFamily<S> {
    pub p: f64,
    pub radius: f64,
    pub eps: f64,
    pub width: f64,
    pub d: usize,
    p1: f64,
    p2: f64,
    _scalar: PhantomData<S>,
}

impl<S: Real> PStableFamily<S> {
    /// Close pairs are at distance `<= radius`, far pairs `>= (1 + eps) radius`.
    pub fn new(p: f64, radius: f64, eps: f64, width: f64, d: usize) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(params(format!("p = {p} outside [1, 2]")));
        }
        if !(radius > 0.0 && radius.is_finite()) || !(eps > 0.0 && eps < 1.0) || !(width > 0.0) {
            return Err(params(format!("need radius > 0, eps in (0, 1), width > 0; got {radius}, {eps}, {width}")));
        }
        Ok(PStableFamily {
            p,
            radius,
            eps,
            width,
            d,
            p1: collision_probability(p, 1.0, width),
            p2: collision_probability(p, 1.0 + eps, width),
            _scalar: PhantomData,
        })
    }
}

/// Stores `a`, `b / w` and `1 / (R w)`, so `h(x) = floor(<a, x> / (R w) + b / w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PStableHash<S> {
    pub a: Vec<S>,
    pub offset: S,
    pub scale: S,
}

impl<S: Real> PStableHash<S> {
    pub fn sample(p: f64, d: usize, width: f64, radius: f64, seed: u64) -> Self {
        let mut r = rng(seed);
        let a = (0..d).map(|_| S::from_f64(sample_pstable(p, &mut r)).expect("finite draw")).collect();
        let b: f64 = r.random_range(0.0..width);
        PStableHash {
            a,
            offset: S::from_f64(b / width).expect("finite offset"),
            scale: S::from_f64(1.0 / (radius * width)).expect("finite scale"),
        }
    }

    pub fn project(&self, x: &[S]) -> S {
        self.a.iter().zip(x).fold(S::zero(), |acc, (&ai, &xi)| acc + ai * xi)
    }
}

/// Bucket of a projection under `scale` and `offset`, as a label.
/// Floors by truncation plus correction; saturates outside the i64 range.
#[inline]
pub(crate) fn bucket_of<S: Real>(proj: S, scale: S, offset: S) -> u64 {
    let x = (proj * scale + offset).to_f64().unwrap_or(f64::NAN);
    let t = x as i64;
    (t - ((t as f64) > x) as i64) as u64
}

impl<S: Real> LshHash<[S]> for PStableHash<S> {
    fn bucket(&self, x: &[S]) -> u64 {
        bucket_of(self.project(x), self.scale, self.offset)
    }
}

impl<S: Real> LshFamily for PStableFamily<S> {
    type Point = [S];
    type Hash = PStableHash<S>;

    fn sample(&self, seed: u64) -> PStableHash<S> {
        PStableHash::sample(self.p, self.d, self.width, self.radius, seed)
    }

    fn p1(&self) -> f64 {
        self.p1
    }

    fn p2(&self) -> f64 {
        self.p2
    }

    fn description(&self) -> String {
        format!("{}-stable, R = {}, eps = {}, w = {}", self.p, self.radius, self.eps, self.width)
    }
}
