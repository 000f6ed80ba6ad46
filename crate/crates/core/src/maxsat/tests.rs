use super::*;
use crate::instances::{generate, GenParams, Instance, ProblemKind};
use crate::rng::derive;

fn random_cnf(n: usize, m: usize, seed: u64) -> CnfInstance {
    let p = GenParams { num_clauses: Some(m), ..GenParams::sizes(n, 0) };
    match generate(ProblemKind::MaxSat, &p, seed).unwrap() {
        Instance::MaxSat(c) => c,
        _ => unreachable!(),
    }
}

fn planted(n: usize, m: usize, sat: f64, seed: u64) -> CnfInstance {
    let p = GenParams { num_clauses: Some(m), sat: Some(sat), ..GenParams::sizes(n, 0) };
    match generate(ProblemKind::MaxSat, &p, seed).unwrap() {
        Instance::MaxSat(c) => c,
        _ => unreachable!(),
    }
}

fn value(inst: &CnfInstance, x: u32) -> f64 {
    let a: Vec<bool> = (0..inst.num_vars).map(|v| x >> v & 1 == 1).collect();
    inst.satisfied(&a) as f64 / inst.clauses.len() as f64
}

#[test]
fn sparsify_is_identity_when_the_sample_would_not_shrink() {
    let f = random_cnf(6, 50, 1);
    assert_eq!(sparsify(&f, 0.2, 3).unwrap(), f);
}

#[test]
fn sparsify_single_clause_keeps_value() {
    let f = CnfInstance::new(30, vec![vec![1, -2]]).unwrap();
    let s = sparsify_with(&f, 0.4, 1e-3, 7).unwrap();
    assert_eq!(s, f);
    let s = sparsify_with(&f, 0.4, 18.0, 7).unwrap();
    assert!(s.clauses.iter().all(|c| c == &vec![1, -2]));
}

#[test]
fn sparsify_rejects_bad_eps() {
    let f = random_cnf(4, 10, 0);
    assert!(sparsify(&f, 0.0, 0).is_err());
    assert!(sparsify(&f, 0.5, 0).is_err());
}

#[test]
fn sparsified_values_stay_within_eps_over_three() {
    let (n, eps) = (10, 0.2);
    // 18 n / eps^2 = 4500 samples from a larger formula.
    let f = random_cnf(n, 8_000, 9);
    let mut good = 0;
    for s in 0..50 {
        let g = sparsify(&f, eps, derive(2, s)).unwrap();
        assert_eq!(g.clauses.len(), 4500);
        let worst = (0..1u32 << n).map(|x| (value(&f, x) - value(&g, x)).abs()).fold(0.0, f64::max);
        good += (worst <= eps / 3.0) as usize;
    }
    assert!(good >= 49, "{good}/50");
}

#[test]
fn split_identity() {
    for seed in 0..5 {
        let f = random_cnf(8, 30, seed);
        let split = split_to_minip(&f).unwrap();
        assert_eq!(split.instance.a.len(), 16);
        assert_eq!(split.instance.d, 30);
        let mut r = rng(seed);
        for _ in 0..100 {
            let pair = (r.random_range(0..16), r.random_range(0..16));
            let ip = split.instance.a[pair.0].dot(&split.instance.b[pair.1]) as usize;
            assert_eq!(ip + f.satisfied(&split.assignment(pair)), f.clauses.len());
        }
    }
}

#[test]
fn split_pads_odd_variable_counts() {
    let f = CnfInstance::new(3, vec![vec![1, 3], vec![-2]]).unwrap();
    let split = split_to_minip(&f).unwrap();
    assert_eq!(split.half, 2);
    for a in 0..4 {
        for b in 0..4 {
            let ip = split.instance.a[a].dot(&split.instance.b[b]) as usize;
            assert_eq!(ip + f.satisfied(&split.assignment((a, b))), 2);
        }
    }
}

#[test]
fn contradiction_has_unit_products() {
    let f = CnfInstance::new(1, vec![vec![1], vec![-1]]).unwrap();
    let split = split_to_minip(&f).unwrap();
    for x in &split.instance.a {
        for y in &split.instance.b {
            assert_eq!(x.dot(y), 1);
        }
    }
}

#[test]
fn satisfiable_formula_has_orthogonal_pair() {
    let f = planted(10, 40, 1.0, 3);
    assert!(oracles::ov_decide(&split_to_minip(&f).unwrap().instance).yes);
    let out = approx_maxsat(&f, 0.05, 1, &MinIpBackend::default()).unwrap();
    assert_eq!(out.satisfied, 40);
}

#[test]
fn split_refuses_too_many_variables() {
    let f = CnfInstance::new(25, vec![vec![25]]).unwrap();
    assert!(matches!(split_to_minip(&f), Err(Error::CapExceeded { .. })));
}

#[test]
fn uniform_value_formula() {
    // Every assignment satisfies exactly one of these two clauses.
    let f = CnfInstance::new(2, vec![vec![1], vec![-1]]).unwrap();
    for backend in [MinIpBackend::Exact, MinIpBackend::default()] {
        assert_eq!(approx_maxsat(&f, 0.4, 0, &backend).unwrap().satisfied, 1);
    }
}

#[test]
fn planted_instances_reach_one_minus_two_eps() {
    let (eps, m) = (0.1, 40);
    let mut ok = 0;
    for s in 0..12 {
        let f = planted(12, m, 0.9, s);
        let out = approx_maxsat(&f, eps, derive(4, s), &MinIpBackend::default()).unwrap();
        ok += (out.satisfied as f64 >= (1.0 - 2.0 * eps) * m as f64) as usize;
    }
    assert!(ok >= 11, "{ok}/12");
}
