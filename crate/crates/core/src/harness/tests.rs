use super::*;

#[test]
fn wilson_interval_known_values() {
    assert_eq!(wilson(0, 0), None);
    let [lo, hi] = wilson(50, 100).unwrap();
    assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3, "{lo} {hi}");
    let [lo, hi] = wilson(10, 10).unwrap();
    assert!((lo - 0.7225).abs() < 1e-3 && (hi - 1.0).abs() < 1e-12, "{lo} {hi}");
    let [lo, _] = wilson(0, 10).unwrap();
    assert_eq!(lo, 0.0);
}

#[test]
fn unknown_reduction_is_an_error() {
    assert!(VerifyConfig::default_for("nope").is_err());
    let cfg = VerifyConfig::default_for("reverse").unwrap();
    assert!(verify("nope", &cfg, 3, 0).is_err());
    assert!(bench("nope", &cfg, &[4], 0).is_err());
}

#[test]
fn zero_trials_is_an_empty_passing_report() {
    let cfg = VerifyConfig::default_for("exactip-ov").unwrap();
    let r = verify("exactip-ov", &cfg, 0, 1).unwrap();
    assert_eq!((r.trials, r.agreements, r.passed), (0, 0, true));
    assert!(r.failures.is_empty() && r.wilson.is_none());
}

#[test]
fn exact_reductions_agree_everywhere() {
    for name in ["exactip-ov", "hopcroft-ov", "threesum-3ov", "reverse", "exactip-minip", "jaccard-gadget"] {
        let mut cfg = VerifyConfig::default_for(name).unwrap();
        cfg.gen.n = cfg.gen.n.min(6);
        let r = verify(name, &cfg, 12, 3).unwrap();
        assert_eq!(r.agreements, 12, "{name}: {:?}", r.failures);
        assert!(r.passed && !r.randomized);
    }
}

#[test]
fn randomized_reductions_run() {
    for name in ["gap-min", "mamin", "mamax", "moderate-minip", "bcp", "fp", "jaccard", "maxsat"] {
        let mut cfg = VerifyConfig::default_for(name).unwrap();
        cfg.gen.n = cfg.gen.n.min(12);
        let r = verify(name, &cfg, 4, 5).unwrap();
        assert!(r.randomized, "{name}");
        assert!(r.agreements >= 2, "{name}: {:?}", r.failures);
    }
}

#[test]
fn reports_are_deterministic() {
    let cfg = VerifyConfig::default_for("exactip-ov").unwrap();
    let a = serde_json::to_string(&verify("exactip-ov", &cfg, 8, 42).unwrap()).unwrap();
    let b = serde_json::to_string(&verify("exactip-ov", &cfg, 8, 42).unwrap()).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bench_rows_follow_the_ladder_and_gadget_ledgers() {
    let cfg = VerifyConfig::default_for("exactip-minip").unwrap();
    let ladder: Vec<usize> = (2..=6).map(|k| 1 << k).collect();
    let rows = bench("exactip-minip", &cfg, &ladder, 0).unwrap();
    assert_eq!(rows.len(), 5);
    let (d, m) = (cfg.gen.d, cfg.gen.m.unwrap());
    for r in &rows {
        assert_eq!(r.output_dim, Some(crate::gadgets::exactip_minip_dim(d, m)));
    }
    assert!(bench("reverse", &cfg, &[], 0).unwrap().is_empty());
    let md = bench_markdown("exactip-minip", &rows);
    assert_eq!(md.lines().count(), 4 + rows.len());
}
