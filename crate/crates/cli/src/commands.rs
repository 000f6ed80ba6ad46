use crate::{
    ApproxArgs, ApproxProblem, Backend, BenchArgs, Cli, Command, Gadget, GenArgs, MaxsatArgs, ReduceArgs, Route, SatBackend,
    SolveArgs, Via, VerifyArgs,
};
use ov_equiv::gadgets::{
    exactip_to_minip, integer_exactip_embed, integer_exactip_ledger, jaccard_embed, reverse_instance, DimLedger, Side,
};
use ov_equiv::harness::{self, VerifyConfig, REDUCTIONS};
use ov_equiv::instances::{
    generate, parse_dimacs, parse_document, serialize, serialize_bundle, to_dimacs, BooleanPairInstance, CnfInstance, Document,
    GenParams, Instance, IntegerPairInstance, ProblemKind,
};
use ov_equiv::lsh::{bcp_approx, fp_approx, jaccard_pair_approx, ApproxConfig, MaxIpBackend, OracleBackend, OvPipelineBackend};
use ov_equiv::maxsat::{approx_maxsat, split_to_minip, MinIpBackend};
use ov_equiv::oracles;
use ov_equiv::protocols::{exactip_to_ov, hopcroft_to_ov, threesum_to_3ov, CompileOptions};
use ov_equiv::rng::derive_tagged;
use ov_equiv::subquadratic::{
    gap_decide_witness, mamax_ip_with, mamin_ip_with, moderate_maminip, moderate_maminip_to_ov, GapConfig, ModerateParams,
};
use serde_json::{json, Value};
use std::fmt;
use std::io::{BufWriter, Read, Write};

#[derive(Debug)]
pub struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<ov_equiv::Error> for CliError {
    fn from(e: ov_equiv::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(format!("config: {e}"))
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

type Out<'a> = &'a mut dyn Write;

/// Runs one command. `Ok(false)` means a verification failed.
pub fn run(cli: &Cli) -> Result<bool> {
    let mut w: Box<dyn Write> = match &cli.output {
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
        Some(p) => Box::new(BufWriter::new(std::fs::File::create(p).map_err(|e| CliError(format!("{p}: {e}")))?)),
    };
    let w = w.as_mut();
    let ok = match &cli.command {
        Command::Gen(a) => gen(cli, a, w),
        Command::Solve(a) => solve(a, w),
        Command::Reduce(a) => reduce(cli, a, w),
        Command::Approx(a) => approx(cli, a, w),
        Command::Verify(a) => verify(cli, a, w),
        Command::Bench(a) => bench(cli, a, w),
        Command::Maxsat(a) => maxsat(cli, a.args(), w),
    }?;
    w.flush()?;
    Ok(ok)
}

fn read_text(path: Option<&str>) -> Result<String> {
    match path {
        None | Some("-") => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError(format!("{p}: {e}"))),
    }
}

/// DIMACS when the first meaningful line is a comment or problem line.
fn looks_like_dimacs(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.starts_with('c') || l.starts_with('p'))
}

fn read_input(path: Option<&str>) -> Result<Vec<Document>> {
    let text = read_text(path)?;
    if looks_like_dimacs(&text) {
        return Ok(vec![Document::Instance(Instance::MaxSat(parse_dimacs(&text)?))]);
    }
    Ok(parse_document(&text)?)
}

fn read_instances(path: Option<&str>) -> Result<Vec<Instance>> {
    read_input(path)?
        .into_iter()
        .map(|d| match d {
            Document::Instance(i) => Ok(i),
            _ => Err(usage("expected instances, found a bundle")),
        })
        .collect()
}

fn emit(w: Out, v: &Value) -> Result<()> {
    Ok(writeln!(w, "{v}")?)
}

fn gen(cli: &Cli, a: &GenArgs, w: Out) -> Result<bool> {
    let kind: ProblemKind = a.kind.parse().map_err(usage)?;
    let p = GenParams {
        n: a.n,
        n_b: a.n_b,
        n_c: a.n_b,
        d: a.d,
        m: a.m,
        tau: a.tau,
        density: a.density,
        p: a.p,
        eps: a.eps,
        radius: a.radius,
        single_set: a.single_set,
        universe: a.universe,
        bound: a.bound,
        num_clauses: a.clauses,
        clause_len: a.clause_len,
        sat: a.sat,
        plant: a.plant,
    };
    if a.dimacs && (kind != ProblemKind::MaxSat || a.count != 1) {
        return Err(usage("--dimacs needs a single maxsat instance"));
    }
    for i in 0..a.count {
        // Same derivation as verification trials, so instance i here is
        // trial i's instance there.
        let inst = generate(kind, &p, derive_tagged(cli.seed, "gen", i as u64))?;
        match &inst {
            Instance::MaxSat(c) if a.dimacs => write!(w, "{}", to_dimacs(c))?,
            _ => writeln!(w, "{}", serialize(&inst))?,
        }
    }
    Ok(true)
}

fn pair(p: (usize, usize)) -> Value {
    json!([p.0, p.1])
}

fn solve_instance(inst: &Instance) -> Result<Value> {
    let kind = inst.kind().as_str();
    Ok(match inst {
        Instance::Ov(b) => {
            let o = oracles::ov_decide(b);
            json!({ "kind": kind, "yes": o.yes, "witness": o.witness })
        }
        Instance::MinIp(b) => {
            let o = oracles::min_ip(b);
            json!({ "kind": kind, "value": o.value, "witness": pair(o.witness) })
        }
        Instance::MaxIp(b) => {
            let o = oracles::max_ip(b);
            json!({ "kind": kind, "value": o.value, "witness": pair(o.witness) })
        }
        Instance::ExactIp(e) => {
            let o = oracles::exactip_decide(e);
            json!({ "kind": kind, "m": e.m, "yes": o.yes, "witness": o.witness })
        }
        Instance::Gap(g) => json!({ "kind": kind, "tau": g.tau, "yes": oracles::gap_side(g) }),
        Instance::Bcp(r) => {
            let o = oracles::bcp(r)?;
            json!({ "kind": kind, "value": o.value, "witness": pair(o.witness) })
        }
        Instance::Fp(r) => {
            let o = oracles::fp(r)?;
            json!({ "kind": kind, "value": o.value, "witness": pair(o.witness) })
        }
        Instance::Jaccard(s) => {
            let exact: ov_equiv::Exact = oracles::jaccard_max(s).value;
            let o = oracles::jaccard_max::<f64>(s);
            json!({ "kind": kind, "value": o.value, "exact": exact.to_string(), "witness": pair(o.witness) })
        }
        Instance::Hopcroft(h) => {
            let o = oracles::hopcroft_decide(h);
            json!({ "kind": kind, "yes": o.yes, "witness": o.witness })
        }
        Instance::ThreeOv(t) => {
            let o = oracles::three_ov_decide(t);
            json!({ "kind": kind, "yes": o.yes, "witness": o.witness })
        }
        Instance::ThreeSum(t) => {
            let o = oracles::three_sum_decide(t);
            json!({ "kind": kind, "yes": o.yes, "witness": o.witness })
        }
        Instance::MaxSat(c) => {
            let o = oracles::maxsat_opt(c)?;
            json!({ "kind": kind, "value": o.value, "clauses": c.clauses.len(), "assignment": bits(&o.witness) })
        }
    })
}

fn bits(a: &[bool]) -> String {
    a.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn solve(a: &SolveArgs, w: Out) -> Result<bool> {
    for d in &read_input(a.source.path())? {
        if let Some(want) = &a.oracle {
            let got = match d {
                Document::Instance(i) => i.kind().as_str(),
                Document::OvBundle(_) => "ov",
                Document::ThreeOvBundle(_) => "3ov",
            };
            if got != want {
                return Err(usage(format!("--oracle {want} given a {got} input")));
            }
        }
        let v = match d {
            Document::Instance(i) => solve_instance(i)?,
            Document::OvBundle(b) => {
                let hit = b.items.iter().find(|it| oracles::ov_decide(&it.instance).yes).map(|it| it.merlin);
                json!({ "bundle": "ov", "count": b.len(), "yes": hit.is_some(), "merlin": hit })
            }
            Document::ThreeOvBundle(b) => {
                let hit = b.items.iter().find(|it| oracles::three_ov_decide(&it.instance).yes).map(|it| it.merlin);
                json!({ "bundle": "3ov", "count": b.len(), "yes": hit.is_some(), "merlin": hit })
            }
        };
        emit(w, &v)?;
    }
    Ok(true)
}

fn print_ledger(show: bool, ledger: &DimLedger) {
    if show {
        eprintln!("{}", json!({ "ledger": ledger }));
    }
}

/// Grid encoding with `r` the largest entry. The maximum inner product of
/// the output reaches the ledger threshold iff some pair has `<x, y> = m`.
fn integer_gadget(h: &IntegerPairInstance, m: usize, cap: usize) -> Result<(BooleanPairInstance, DimLedger)> {
    let entries = h.a.iter().chain(&h.b).flatten();
    if entries.clone().any(|&v| v < 0) {
        return Err(usage("the integer gadget needs non-negative entries"));
    }
    let r = entries.copied().max().unwrap_or(0).max(1);
    let r = u32::try_from(r).map_err(|_| usage(format!("entry {r} too large for the grid encoding")))?;
    let ledger = integer_exactip_ledger(h.d, r, m);
    ledger.check(cap)?;
    let embed = |vs: &[Vec<i64>], side| -> Result<Vec<_>> {
        vs.iter()
            .map(|x| {
                let x: Vec<u32> = x.iter().map(|&v| v as u32).collect();
                Ok(integer_exactip_embed(&x, r, m, side)?)
            })
            .collect()
    };
    let b = BooleanPairInstance { d: ledger.output_dim, a: embed(&h.a, Side::X)?, b: embed(&h.b, Side::Y)? };
    Ok((b, ledger))
}

fn reduce(cli: &Cli, a: &ReduceArgs, w: Out) -> Result<bool> {
    let opts = CompileOptions { caps: cli.caps(), prune: !a.no_prune };
    for (idx, inst) in read_instances(a.source.path())?.iter().enumerate() {
        let mismatch = || usage(format!("reduction does not accept a {} instance", inst.kind()));
        if let Some(g) = a.gadget {
            let out = match (g, inst) {
                (Gadget::Reverse, Instance::MinIp(b) | Instance::MaxIp(b)) => {
                    let e = reverse_instance(b);
                    print_ledger(a.ledger, &e.ledger);
                    if matches!(inst, Instance::MinIp(_)) {
                        Instance::MaxIp(e.instance)
                    } else {
                        Instance::MinIp(e.instance)
                    }
                }
                (Gadget::ExactipMinip, Instance::ExactIp(e)) => {
                    let emb = exactip_to_minip(e, cli.caps().dim)?;
                    print_ledger(a.ledger, &emb.ledger);
                    Instance::MinIp(emb.instance)
                }
                (Gadget::Integer, Instance::Hopcroft(h)) => {
                    let (b, ledger) = integer_gadget(h, a.m, cli.caps().dim)?;
                    print_ledger(a.ledger, &ledger);
                    Instance::MaxIp(b)
                }
                (Gadget::Jaccard, Instance::MaxIp(b)) => {
                    let emb = jaccard_embed(b)?;
                    print_ledger(a.ledger, &emb.ledger);
                    Instance::Jaccard(emb.instance)
                }
                _ => return Err(mismatch()),
            };
            writeln!(w, "{}", serialize(&out))?;
            continue;
        }
        let seed = derive_tagged(cli.seed, "reduce", idx as u64);
        let text = match (a.via.expect("clap requires --gadget or --via"), inst) {
            (Via::ExactipOv, Instance::ExactIp(e)) => serialize_bundle(&exactip_to_ov(e, a.groups, &opts)?),
            (Via::HopcroftOv, Instance::Hopcroft(h)) => serialize_bundle(&hopcroft_to_ov(h, &opts)?),
            (Via::ThreesumThreeOv, Instance::ThreeSum(t)) => serialize_bundle(&threesum_to_3ov(t, a.block_size, &opts)?),
            (Via::ModerateOv, Instance::MinIp(b)) => {
                let tau = a.tau.ok_or_else(|| usage("--via moderate-ov needs --tau"))?;
                let mut p = ModerateParams::new(a.blocks, a.maps)?;
                p.caps = cli.caps();
                serialize_bundle(&moderate_maminip_to_ov(b, tau, &p, seed)?)
            }
            (Via::MaxsatSplit, Instance::MaxSat(c)) => serialize(&Instance::MinIp(split_to_minip(c)?.instance)) + "\n",
            _ => return Err(mismatch()),
        };
        w.write_all(text.as_bytes())?;
    }
    Ok(true)
}

fn boolean(inst: &Instance) -> Result<&BooleanPairInstance> {
    inst.boolean_pair().ok_or_else(|| usage(format!("expected a Boolean pair instance, found {}", inst.kind())))
}

fn sketch_run<B: MaxIpBackend>(p: ApproxProblem, inst: &Instance, cfg: ApproxConfig, backend: &B) -> Result<Value> {
    Ok(match (p, inst) {
        (ApproxProblem::Bcp, Instance::Bcp(r) | Instance::Fp(r)) => serde_json::to_value(bcp_approx(r, cfg, backend)?)?,
        (ApproxProblem::Fp, Instance::Bcp(r) | Instance::Fp(r)) => serde_json::to_value(fp_approx(r, cfg, backend)?)?,
        (ApproxProblem::Jaccard, Instance::Jaccard(s)) => serde_json::to_value(jaccard_pair_approx(s, cfg, backend)?)?,
        _ => return Err(usage(format!("{p:?} does not accept a {} instance", inst.kind()).to_lowercase())),
    })
}

/// Instances up to this many pairs also get the exact oracle value and a
/// success flag.
const ORACLE_PAIRS: usize = 1 << 22;

fn pair_count(inst: &Instance) -> usize {
    match inst {
        Instance::Bcp(r) | Instance::Fp(r) => r.a.len() * r.b.as_ref().map_or(r.a.len(), Vec::len),
        Instance::Jaccard(s) => s.a.len() * s.b.len(),
        other => other.boolean_pair().map_or(usize::MAX, |b| b.a.len() * b.b.len()),
    }
}

/// Exact value and whether `out` meets its guarantee, under the same
/// success rules as the verification harness.
fn oracle_check(p: ApproxProblem, inst: &Instance, eps: f64, out: &Value) -> Result<(Value, bool)> {
    let est = &out["estimate"];
    let f = 1.0 + eps;
    Ok(match (p, inst) {
        (ApproxProblem::Bcp, Instance::Bcp(r) | Instance::Fp(r)) | (ApproxProblem::Fp, Instance::Bcp(r) | Instance::Fp(r)) => {
            let truth = if p == ApproxProblem::Bcp { oracles::bcp(r)?.value } else { oracles::fp(r)?.value };
            let e = est.as_f64().unwrap_or(f64::NAN);
            (json!(truth), e >= truth / f && e <= truth * f)
        }
        (ApproxProblem::Jaccard, Instance::Jaccard(s)) => {
            let truth: f64 = oracles::jaccard_max(s).value;
            (json!(truth), (est.as_f64().unwrap_or(f64::NAN) - truth).abs() <= eps)
        }
        (ApproxProblem::Maminip, _) => {
            let min = oracles::min_ip(boolean(inst)?).value as u64;
            let v = est.as_u64().unwrap_or(u64::MAX);
            (json!(min), min <= v && v <= 2 * min)
        }
        (ApproxProblem::Mamaxip, _) => {
            let max = oracles::max_ip(boolean(inst)?).value as u64;
            let v = est.as_u64().unwrap_or(0);
            (json!(max), max <= 2 * v && v <= max)
        }
        (ApproxProblem::Gap, Instance::Gap(g)) => match oracles::gap_side(g) {
            Some(want) => (json!(want), out["yes"] == json!(want)),
            // Off the promise either answer is correct.
            None => (Value::Null, true),
        },
        _ => unreachable!("problem and instance were matched before the check"),
    })
}

fn approx_once(cli: &Cli, a: &ApproxArgs, inst: &Instance, seed: u64) -> Result<Value> {
    Ok(match a.problem {
        ApproxProblem::Bcp | ApproxProblem::Fp | ApproxProblem::Jaccard => {
            let cfg = ApproxConfig::new(a.eps, seed);
            match a.backend {
                Backend::Oracle => sketch_run(a.problem, inst, cfg, &OracleBackend)?,
                Backend::OvPipeline => sketch_run(a.problem, inst, cfg, &OvPipelineBackend { caps: cli.caps() })?,
            }
        }
        ApproxProblem::Maminip => {
            let b = boolean(inst)?;
            match a.route {
                Route::Direct => {
                    let e = mamin_ip_with(b, &GapConfig::default(), seed)?;
                    json!({ "estimate": e.value, "witness": pair(e.witness) })
                }
                Route::ModerateOv => {
                    let mut p = ModerateParams::new(a.blocks, a.maps)?;
                    p.caps = cli.caps();
                    json!({ "estimate": moderate_maminip(b, &p, seed, |j| oracles::ov_decide(j).yes)? })
                }
            }
        }
        ApproxProblem::Mamaxip => {
            let e = mamax_ip_with(boolean(inst)?, &GapConfig::default(), seed)?;
            json!({ "estimate": e.value, "witness": pair(e.witness) })
        }
        ApproxProblem::Gap => {
            let Instance::Gap(g) = inst else {
                return Err(usage(format!("gap needs a gap-min or gap-max instance, found {}", inst.kind())));
            };
            let w = gap_decide_witness(g, a.eps, &GapConfig::default(), seed)?;
            json!({ "yes": w.is_some(), "witness": w.map(pair) })
        }
    })
}

fn approx(cli: &Cli, a: &ApproxArgs, w: Out) -> Result<bool> {
    let problem = format!("{:?}", a.problem).to_lowercase();
    for (idx, inst) in read_instances(a.source.path())?.iter().enumerate() {
        let base = derive_tagged(cli.seed, "approx", idx as u64);
        let small = pair_count(inst) <= ORACLE_PAIRS;
        for trial in 0..a.trials {
            let mut out = approx_once(cli, a, inst, derive_tagged(base, "trial", trial as u64))?;
            if small {
                let (truth, success) = oracle_check(a.problem, inst, a.eps, &out)?;
                out["oracle"] = truth;
                out["success"] = json!(success);
            }
            let obj = out.as_object_mut().expect("object output");
            obj.insert("problem".into(), json!(problem));
            obj.insert("kind".into(), json!(inst.kind().as_str()));
            obj.insert("instance".into(), json!(idx));
            obj.insert("trial".into(), json!(trial));
            emit(w, &out)?;
        }
    }
    Ok(true)
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

fn config_for(cli: &Cli, name: &str, patch: Option<&str>) -> Result<VerifyConfig> {
    let mut cfg = VerifyConfig::default_for(name)?;
    cfg.caps = cli.caps();
    let Some(patch) = patch else { return Ok(cfg) };
    let mut v = serde_json::to_value(&cfg)?;
    let p: Value = serde_json::from_str(patch)?;
    if !p.is_object() {
        return Err(usage("--config must be a JSON object"));
    }
    merge(&mut v, p);
    Ok(serde_json::from_value(v)?)
}

fn verify(cli: &Cli, a: &VerifyArgs, w: Out) -> Result<bool> {
    if a.reduction == "list" {
        for r in REDUCTIONS {
            emit(w, &json!({ "reduction": r, "target": harness::target_rate(r, &VerifyConfig::default_for(r)?)? }))?;
        }
        return Ok(true);
    }
    let cfg = config_for(cli, &a.reduction, a.config.as_deref())?;
    if a.show_config {
        emit(w, &serde_json::to_value(&cfg)?)?;
        return Ok(true);
    }
    let report = harness::verify(&a.reduction, &cfg, a.trials, cli.seed)?;
    emit(w, &serde_json::to_value(&report)?)?;
    Ok(report.passed)
}

fn bench(cli: &Cli, a: &BenchArgs, w: Out) -> Result<bool> {
    let cfg = config_for(cli, &a.reduction, a.config.as_deref())?;
    let ladder = a
        .ladder
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().map_err(|_| usage(format!("bad ladder entry {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    let rows = harness::bench(&a.reduction, &cfg, &ladder, cli.seed)?;
    if a.markdown {
        write!(w, "{}", harness::bench_markdown(&a.reduction, &rows))?;
    } else {
        for r in &rows {
            let mut v = serde_json::to_value(r)?;
            v.as_object_mut().expect("row object").insert("reduction".into(), json!(a.reduction));
            emit(w, &v)?;
        }
    }
    Ok(true)
}

fn maxsat(cli: &Cli, a: &MaxsatArgs, w: Out) -> Result<bool> {
    let formulas: Vec<CnfInstance> = read_instances(a.source.path())?
        .into_iter()
        .map(|i| match i {
            Instance::MaxSat(c) => Ok(c),
            other => Err(usage(format!("maxsat needs a CNF, found {}", other.kind()))),
        })
        .collect::<Result<_>>()?;
    let backend = match a.backend {
        SatBackend::Exact => MinIpBackend::Exact,
        SatBackend::Subquadratic => MinIpBackend::Subquadratic { runs: a.runs, cfg: GapConfig::default() },
    };
    for (idx, f) in formulas.iter().enumerate() {
        let out = approx_maxsat(f, a.eps, derive_tagged(cli.seed, "maxsat", idx as u64), &backend)?;
        let mut v = json!({
            "satisfied": out.satisfied,
            "clauses": out.clauses,
            "ratio": out.ratio(),
            "sampled": out.sampled,
            "assignment": bits(&out.assignment),
        });
        if a.check {
            v["optimum"] = json!(oracles::maxsat_opt(f)?.value);
        }
        emit(w, &v)?;
    }
    Ok(true)
}
