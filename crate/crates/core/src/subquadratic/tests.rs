use super::*;
use crate::instances::{generate, GenParams, Instance, ProblemKind};
use proptest::prelude::*;
use std::collections::BTreeSet;

/// Pair of length-d vectors with exactly `ip` common ones and nothing else.
fn pair_with_ip(d: usize, ip: usize) -> (BitVec, BitVec) {
    let x = BitVec::from_fn(d, |i| i < ip);
    (x.clone(), x)
}

/// Exact one-probability of a micro on a pair with inner product `ip`: each
/// sample flips the parity independently with probability ip / (2d).
fn micro_one_prob(d: usize, tau: usize, ip: usize) -> f64 {
    let k = micro_len(d, tau) as i32;
    0.5 * (1.0 - (1.0 - ip as f64 / d as f64).powi(k))
}

fn random_bits(d: usize, seed: u64) -> BitVec {
    let mut r = rng(seed);
    BitVec::from_fn(d, |_| r.random_bool(0.5))
}

fn bool_inst(kind: ProblemKind, n: usize, d: usize, seed: u64) -> BooleanPairInstance {
    match generate(kind, &GenParams::sizes(n, d), seed).unwrap() {
        Instance::MinIp(b) | Instance::MaxIp(b) => b,
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn tau_zero_is_an_error_and_k_floors() {
    assert!(sample_micro(10, 0, 1).is_err());
    assert_eq!(sample_micro(10, 3, 1).unwrap().k(), 3);
    assert_eq!(sample_micro(60, 10, 1).unwrap().k(), 6);
}

#[test]
fn micro_is_deterministic_in_seed() {
    assert_eq!(sample_micro(30, 4, 9).unwrap(), sample_micro(30, 4, 9).unwrap());
    assert_ne!(sample_micro(30, 4, 9).unwrap(), sample_micro(30, 4, 10).unwrap());
}

#[test]
fn zero_pair_never_fires() {
    let z = BitVec::zeros(20);
    for s in 0..200 {
        assert!(!sample_micro(20, 3, s).unwrap().evaluate(&z, &z));
    }
    let poly = GapPolynomial::sample(20, 3, 0.1, &GapConfig::default(), 5).unwrap();
    assert!(!gap_evaluate(&poly, &z, &z));
}

/// The floor keeps both one-probability bounds for every d <= 200 and
/// every tau <= d/2 at the promise boundary.
#[test]
fn one_probability_bounds_hold_for_all_small_parameters() {
    for d in 2..=200 {
        for tau in 1..=d / 2 {
            assert!(micro_one_prob(d, tau, 2 * tau) >= 0.43, "d {d} tau {tau}");
            assert!(micro_one_prob(d, tau, tau) <= 0.375 + 1e-12, "d {d} tau {tau}");
        }
    }
}

#[test]
fn micro_one_frequencies_match_exact_probability() {
    let (d, tau, samples) = (60, 10, 100_000);
    let mut freq = Vec::new();
    for ip in [tau, 2 * tau] {
        let (x, y) = pair_with_ip(d, ip);
        let ones = (0..samples)
            .filter(|&s| sample_micro(d, tau, derive(77, s as u64)).unwrap().evaluate(&x, &y))
            .count();
        let f = ones as f64 / samples as f64;
        assert!((f - micro_one_prob(d, tau, ip)).abs() < 0.01, "ip {ip}: {f}");
        freq.push(f);
    }
    assert!(freq[0] <= 0.375 + 0.01);
    assert!(freq[1] >= 0.43 - 0.01);
    assert!(freq[1] - freq[0] >= 0.03);
}

proptest! {
    #[test]
    fn coefficient_mask_matches_direct_parity(d in 2usize..80, tau in 1usize..20, seed: u64, xs: u64, ys: u64) {
        let tau = tau.min(d / 2).max(1);
        let micro = sample_micro(d, tau, seed).unwrap();
        let (x, y) = (random_bits(d, xs), random_bits(d, ys));
        let c = micro.coefficients();
        prop_assert_eq!(micro.evaluate(&x, &y), c.and(&x).dot(&y) % 2 == 1);
    }

    #[test]
    fn bit_sliced_count_matches_micro_sum(d in 2usize..130, tau in 1usize..10, seed: u64, xs: u64, ys: u64) {
        let tau = tau.min(d / 2).max(1);
        let poly = GapPolynomial::sample(d, tau, 0.3, &GapConfig { c1: 40.0 }, seed).unwrap();
        let (x, y) = (random_bits(d, xs), random_bits(d, ys));
        let direct = poly.micros.iter().filter(|mp| mp.evaluate(&x, &y)).count() as u32;
        prop_assert_eq!(poly.count_ones(&x, &y), direct);
        prop_assert_eq!(gap_evaluate(&poly, &x, &y), 10 * direct as usize > 4 * poly.m());
    }
}

#[test]
fn micro_count_follows_c1() {
    let cfg = GapConfig::default();
    assert_eq!(cfg.micro_count(0.5).unwrap(), 100);
    assert_eq!(cfg.micro_count(0.01).unwrap(), 665);
    assert!(cfg.micro_count(0.0).is_err());
    assert!(cfg.micro_count(1.0).is_err());
}

#[test]
fn gap_polynomial_error_on_boundary_pairs() {
    let (d, tau, eps, trials) = (60, 10, 0.1, 2000);
    let mut errors = 0;
    for s in 0..trials {
        let far = s % 2 == 0;
        let (x, y) = pair_with_ip(d, if far { 2 * tau } else { tau });
        let poly = GapPolynomial::sample(d, tau, eps, &GapConfig::default(), derive(3, s)).unwrap();
        errors += (gap_evaluate(&poly, &x, &y) != far) as usize;
    }
    assert!((errors as f64) / (trials as f64) <= eps, "{errors} errors");
}

#[test]
fn all_ones_pair_fires() {
    let (d, eps) = (40, 0.1);
    let x = BitVec::ones(d);
    let hits = (0..500)
        .filter(|&s| {
            let poly = GapPolynomial::sample(d, d / 4, eps, &GapConfig::default(), s).unwrap();
            gap_evaluate(&poly, &x, &x)
        })
        .count();
    assert!(hits as f64 >= 500.0 * (1.0 - eps), "{hits}");
}

#[test]
fn gap_decide_trivial_sides() {
    let orth = BooleanPairInstance::from_strs(&["1100", "1111"], &["0011", "1111"]).unwrap();
    for tau in 0..=4 {
        let g = GapInstance::new(orth.clone(), tau, GapSide::Min).unwrap();
        assert!(gap_decide(&g, 0.1, tau as u64).unwrap(), "tau {tau}");
    }
    let ones = BooleanPairInstance::new(16, vec![BitVec::ones(16); 3], vec![BitVec::ones(16); 3]).unwrap();
    let g = GapInstance::new(ones.clone(), 4, GapSide::Min).unwrap();
    assert!(!gap_decide(&g, 0.1, 1).unwrap());
    let g = GapInstance::new(ones, 4, GapSide::Max).unwrap();
    assert!(gap_decide(&g, 0.1, 1).unwrap());
    let zeros = BooleanPairInstance::new(8, vec![BitVec::zeros(8)], vec![BitVec::zeros(8)]).unwrap();
    assert!(!gap_decide(&GapInstance::new(zeros, 0, GapSide::Max).unwrap(), 0.1, 0).unwrap());
}

#[test]
fn gap_decide_planted_instances() {
    // Gap-Max "no" needs every product <= tau, hence sparse vectors.
    for (side, density) in [(ProblemKind::GapMin, 0.5), (ProblemKind::GapMax, 0.15)] {
        let mut correct = 0;
        for s in 0..100u64 {
            let p = GenParams {
                tau: Some(3),
                plant: Some(s % 2 == 0),
                density: Some(density),
                ..GenParams::sizes(100, 40)
            };
            let Instance::Gap(g) = generate(side, &p, s).unwrap() else { unreachable!() };
            let truth = oracles::gap_side(&g).expect("planted instances keep the promise");
            correct += (gap_decide(&g, 0.1, derive(11, s)).unwrap() == truth) as usize;
        }
        assert!(correct >= 95, "{side:?}: {correct}/100");
    }
}

#[test]
fn gap_witness_has_small_inner_product() {
    let p = GenParams { tau: Some(3), plant: Some(true), ..GenParams::sizes(50, 40) };
    let Instance::Gap(g) = generate(ProblemKind::GapMin, &p, 4).unwrap() else { unreachable!() };
    let (i, j) = gap_decide_witness(&g, 0.1, &GapConfig::default(), 1).unwrap().unwrap();
    assert!(g.base.a[i].dot(&g.base.b[j]) < 6);
}

#[test]
fn mamin_examples() {
    let orth = BooleanPairInstance::from_strs(&["1010", "1111"], &["0101", "1111"]).unwrap();
    assert_eq!(mamin_ip(&orth, 0).unwrap(), 0);
    for d in [1, 5, 12] {
        let ones = BooleanPairInstance::new(d, vec![BitVec::ones(d)], vec![BitVec::ones(d)]).unwrap();
        let v = mamin_ip(&ones, 3).unwrap() as usize;
        assert!((d..=2 * d).contains(&v), "d {d}: {v}");
        assert_eq!(mamax_ip(&ones, 3).unwrap() as usize * 2 >= d, true);
        assert!(mamax_ip(&ones, 3).unwrap() as usize <= d);
    }
    let zeros = BooleanPairInstance::new(6, vec![BitVec::zeros(6)], vec![BitVec::ones(6)]).unwrap();
    assert_eq!(mamax_ip(&zeros, 0).unwrap(), 0);
}

#[test]
fn mamin_mamax_factor_two_windows() {
    let (mut in_min, mut in_max, mut witness_ok) = (0, 0, 0);
    let trials = 30;
    for s in 0..trials {
        let inst = bool_inst(ProblemKind::MinIp, 100, 40, s);
        let (lo, hi) = (oracles::min_ip(&inst).value, oracles::max_ip(&inst).value);
        let est = mamin_ip_with(&inst, &GapConfig::default(), derive(5, s)).unwrap();
        in_min += (lo <= est.value && est.value <= 2 * lo) as usize;
        let (i, j) = est.witness;
        witness_ok += (inst.a[i].dot(&inst.b[j]) <= 2 * lo) as usize;
        let v = mamax_ip(&inst, derive(6, s)).unwrap();
        in_max += (2 * v >= hi && v <= hi) as usize;
    }
    assert!(in_min * 3 >= trials as usize * 2, "min {in_min}/{trials}");
    assert!(in_max * 3 >= trials as usize * 2, "max {in_max}/{trials}");
    assert!(witness_ok * 3 >= trials as usize * 2, "witness {witness_ok}/{trials}");
}

/// F2 polynomial in variables x_0..x_{d-1}, y_0..y_{d-1}, stored as a set
/// of monomials; bit j is x_j, bit d + j is y_j.
type F2Poly = BTreeSet<u128>;

fn poly_mul(p: &F2Poly, q: &F2Poly) -> F2Poly {
    let mut out = F2Poly::new();
    for &a in p {
        for &b in q {
            let m = a | b;
            if !out.remove(&m) {
                out.insert(m);
            }
        }
    }
    out
}

fn poly_add(p: &mut F2Poly, q: &F2Poly) {
    for &m in q {
        if !p.remove(&m) {
            p.insert(m);
        }
    }
}

fn micro_poly(mp: &MicroPolynomial) -> F2Poly {
    let mut p = F2Poly::new();
    for j in mp.coefficients().ones_positions() {
        p.insert(1u128 << j | 1u128 << (mp.d + j));
    }
    p
}

/// Expands `[sum of micros > 0.4 m]` through the algebraic normal form of
/// the threshold function.
fn expand(poly: &GapPolynomial) -> F2Poly {
    let m = poly.m();
    let mut anf: Vec<bool> = (0..1u32 << m).map(|s| 10 * s.count_ones() as usize > 4 * m).collect();
    for i in 0..m {
        for s in 0..1usize << m {
            if s >> i & 1 == 1 {
                anf[s] ^= anf[s ^ 1 << i];
            }
        }
    }
    let micros: Vec<F2Poly> = poly.micros.iter().map(micro_poly).collect();
    let mut total = F2Poly::new();
    for (s, &c) in anf.iter().enumerate() {
        if c {
            let mut term: F2Poly = [0u128].into_iter().collect();
            for (i, mp) in micros.iter().enumerate() {
                if s >> i & 1 == 1 {
                    term = poly_mul(&term, mp);
                }
            }
            poly_add(&mut total, &term);
        }
    }
    total
}

fn poly_eval(p: &F2Poly, assignment: u128) -> bool {
    p.iter().filter(|&&m| m & assignment == m).count() % 2 == 1
}

#[test]
fn symbolic_expansion_has_degree_at_most_two_m() {
    let d = 5;
    for c1 in [0.3, 0.6, 1.0, 1.3] {
        for seed in 0..4 {
            let poly = GapPolynomial::sample(d, 1, 0.5, &GapConfig { c1 }, seed).unwrap();
            let m = poly.m();
            assert!(m <= 4);
            let expanded = expand(&poly);
            let degree = expanded.iter().map(|m| m.count_ones()).max().unwrap_or(0);
            assert!(degree as usize <= 2 * m, "degree {degree} for m {m}");
            for xv in 0..1u64 << d {
                for yv in 0..1u64 << d {
                    let (x, y) = (BitVec::from_words(d, vec![xv]), BitVec::from_words(d, vec![yv]));
                    let a = (xv as u128) | (yv as u128) << d;
                    assert_eq!(poly_eval(&expanded, a), gap_evaluate(&poly, &x, &y));
                }
            }
        }
    }
}

#[test]
fn moderate_single_map_is_single_subset() {
    let inst = bool_inst(ProblemKind::MinIp, 6, 8, 1);
    let p = ModerateParams::new(3, 1).unwrap();
    let bundle = moderate_maminip_to_ov(&inst, 2, &p, 0).unwrap();
    assert_eq!(bundle.len(), 1);
    assert_eq!(bundle.items[0].merlin, 1);
    assert_eq!(bundle.items[0].instance.d as u128, p.lift_len(4).unwrap());
}

#[test]
fn moderate_subset_count_and_caps() {
    let inst = bool_inst(ProblemKind::MinIp, 4, 8, 2);
    let p = ModerateParams::new(2, 4).unwrap();
    // Subsets of 4 maps with more than 2 members: 4 + 1.
    assert_eq!(moderate_maminip_to_ov(&inst, 2, &p, 0).unwrap().len(), 5);
    let mut tight = p;
    tight.caps.dim = 10;
    assert!(matches!(moderate_maminip_to_ov(&inst, 2, &tight, 0), Err(crate::Error::CapExceeded { .. })));
    assert!(moderate_maminip_to_ov(&inst, 0, &p, 0).is_err());
    assert!(moderate_maminip_to_ov(&inst, 5, &p, 0).is_err());
}

#[test]
fn moderate_bundle_sides() {
    let p = ModerateParams::new(3, 3).unwrap();
    let decide = |b: &crate::instances::OvBundle| b.decide_with(|i| oracles::ov_decide(i).yes);
    let (mut yes, mut no) = (0, 0);
    for s in 0..100u64 {
        let mut inst = bool_inst(ProblemKind::MinIp, 8, 12, s);
        inst.b[3] = inst.a[5].not();
        yes += decide(&moderate_maminip_to_ov(&inst, 1, &p, derive(1, s)).unwrap()) as usize;
        let d = 12;
        let ones = BooleanPairInstance::new(d, vec![BitVec::ones(d); 8], vec![BitVec::ones(d); 8]).unwrap();
        no += !decide(&moderate_maminip_to_ov(&ones, d / 4, &p, derive(2, s)).unwrap()) as usize;
    }
    assert!(yes >= 90, "yes {yes}");
    assert!(no >= 90, "no {no}");
}

#[test]
fn moderate_maminip_examples() {
    let p = ModerateParams::new(3, 3).unwrap();
    let solver = |i: &BooleanPairInstance| oracles::ov_decide(i).yes;
    let orth = BooleanPairInstance::from_strs(&["1010", "1111"], &["0101", "1111"]).unwrap();
    assert_eq!(moderate_maminip(&orth, &p, 0, solver).unwrap(), 0);
    let d = 10;
    let ones = BooleanPairInstance::new(d, vec![BitVec::ones(d)], vec![BitVec::ones(d)]).unwrap();
    let v = moderate_maminip(&ones, &p, 0, solver).unwrap() as usize;
    assert!((d..=2 * d).contains(&v), "{v}");
}

#[test]
fn moderate_params_from_eps() {
    let p = ModerateParams::from_eps(0.25, 32).unwrap();
    assert_eq!((p.blocks, p.maps), (4, 4));
    assert!(ModerateParams::from_eps(0.0, 32).is_err());
    assert!(ModerateParams::new(0, 1).is_err());
}
