use super::{unknown, MinIpRoute, SketchBackend, VerifyConfig};
use crate::error::{params, Result};
use crate::gadgets::{exactip_to_minip, jaccard_embed, jaccard_recover, reverse_instance};
use crate::instances::{generate, BooleanPairInstance, GenParams, Instance, ProblemKind};
use crate::lsh::{bcp_approx, fp_approx, jaccard_pair_approx, ApproxConfig, MaxIpBackend, OracleBackend, OvPipelineBackend};
use crate::maxsat::{approx_maxsat, MinIpBackend};
use crate::oracles;
use crate::protocols::{exactip_to_ov, hopcroft_to_ov, threesum_to_3ov, CompileOptions};
use crate::rng::derive_tagged;
use crate::subquadratic::{gap_decide_witness, mamax_ip, mamin_ip, moderate_maminip, GapConfig, ModerateParams};
use crate::Exact;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trial {
    pub trial: usize,
    pub seed: u64,
    pub agree: bool,
    pub input_dim: usize,
    pub output_dim: Option<usize>,
    /// Bundle size, for reductions that produce an OR of instances.
    pub items: Option<usize>,
    pub detail: Value,
}

struct Outcome {
    agree: bool,
    input_dim: usize,
    output_dim: Option<usize>,
    items: Option<usize>,
    detail: Value,
}

impl Outcome {
    fn plain(agree: bool, input_dim: usize, detail: Value) -> Self {
        Outcome { agree, input_dim, output_dim: None, items: None, detail }
    }
}

fn kind_of(name: &str) -> Result<ProblemKind> {
    Ok(match name {
        "exactip-ov" | "exactip-minip" => ProblemKind::ExactIp,
        "hopcroft-ov" => ProblemKind::Hopcroft,
        "threesum-3ov" => ProblemKind::ThreeSum,
        "reverse" | "jaccard-gadget" | "mamin" | "moderate-minip" => ProblemKind::MinIp,
        "mamax" => ProblemKind::MaxIp,
        "gap-min" => ProblemKind::GapMin,
        "gap-max" => ProblemKind::GapMax,
        "bcp" => ProblemKind::Bcp,
        "fp" => ProblemKind::Fp,
        "jaccard" => ProblemKind::Jaccard,
        "maxsat" => ProblemKind::MaxSat,
        _ => return Err(unknown(name)),
    })
}

fn boolean(inst: &Instance) -> Result<&BooleanPairInstance> {
    inst.boolean_pair().ok_or_else(|| params("expected a Boolean pair instance"))
}

/// Runs trial `index` of `name`. Errors inside the reduction (for example
/// a cap) count as a disagreement and are recorded in the detail.
pub fn run_trial(name: &str, cfg: &VerifyConfig, index: usize, seed: u64) -> Result<Trial> {
    let kind = kind_of(name)?;
    let mut gen: GenParams = cfg.gen.clone();
    if cfg.mix_plants && gen.plant.is_none() {
        gen.plant = Some(index.is_multiple_of(2));
    }
    let gen_seed = derive_tagged(seed, "gen", index as u64);
    let run_seed = derive_tagged(seed, "run", index as u64);
    let inst = generate(kind, &gen, gen_seed)?;
    let out = match evaluate(name, cfg, &inst, run_seed) {
        Ok(o) => o,
        Err(e) => Outcome::plain(false, input_dim(&inst), json!({ "error": e.to_string() })),
    };
    Ok(Trial {
        trial: index,
        seed: gen_seed,
        agree: out.agree,
        input_dim: out.input_dim,
        output_dim: out.output_dim,
        items: out.items,
        detail: out.detail,
    })
}

fn input_dim(inst: &Instance) -> usize {
    match inst {
        Instance::Bcp(r) | Instance::Fp(r) => r.d,
        Instance::Jaccard(s) => s.universe as usize,
        Instance::Hopcroft(h) => h.d,
        Instance::ThreeSum(_) => 1,
        Instance::MaxSat(c) => c.num_vars as usize,
        other => other.boolean_pair().map_or(0, |b| b.d),
    }
}

fn evaluate(name: &str, cfg: &VerifyConfig, inst: &Instance, seed: u64) -> Result<Outcome> {
    let opts = CompileOptions { caps: cfg.caps, prune: true };
    let dim = input_dim(inst);
    Ok(match (name, inst) {
        ("exactip-ov", Instance::ExactIp(e)) => {
            let groups = cfg.groups.clamp(1, e.base.d.max(1));
            let bundle = exactip_to_ov(e, groups, &opts)?;
            let got = bundle.decide_with(|j| oracles::ov_decide(j).yes);
            let want = oracles::exactip_decide(e).yes;
            Outcome {
                agree: got == want,
                input_dim: dim,
                output_dim: Some(bundle.dim),
                items: Some(bundle.len()),
                detail: json!({ "m": e.m, "groups": groups, "want": want, "got": got }),
            }
        }
        ("hopcroft-ov", Instance::Hopcroft(h)) => {
            let bundle = hopcroft_to_ov(h, &opts)?;
            let got = bundle.decide_with(|j| oracles::ov_decide(j).yes);
            let want = oracles::hopcroft_decide(h).yes;
            Outcome {
                agree: got == want,
                input_dim: dim,
                output_dim: Some(bundle.dim),
                items: Some(bundle.len()),
                detail: json!({ "want": want, "got": got }),
            }
        }
        ("threesum-3ov", Instance::ThreeSum(t)) => {
            let bundle = threesum_to_3ov(t, cfg.block_size, &opts)?;
            let got = bundle.decide_with(|j| oracles::three_ov_decide(j).yes);
            let want = oracles::three_sum_decide(t).yes;
            Outcome {
                agree: got == want,
                input_dim: dim,
                output_dim: Some(bundle.dim),
                items: Some(bundle.len()),
                detail: json!({ "block_size": cfg.block_size, "want": want, "got": got }),
            }
        }
        ("reverse", _) => {
            let b = boolean(inst)?;
            let emb = reverse_instance(b);
            let d = b.d as u32;
            let identity = b.a.iter().zip(&emb.instance.a).all(|(x, xe)| {
                b.b.iter().zip(&emb.instance.b).all(|(y, ye)| xe.dot(ye) == d - x.dot(y))
            });
            let (want, got) = (oracles::min_ip(b).value, d - oracles::max_ip(&emb.instance).value);
            Outcome {
                agree: identity && want == got,
                input_dim: dim,
                output_dim: Some(emb.ledger.output_dim),
                items: None,
                detail: json!({ "identity": identity, "min": want, "recovered": got }),
            }
        }
        ("exactip-minip", Instance::ExactIp(e)) => {
            let emb = exactip_to_minip(e, cfg.caps.dim)?;
            let threshold = emb.ledger.threshold.expect("exactip-minip has a threshold");
            let got = oracles::min_ip(&emb.instance).value as u64 <= threshold;
            let want = oracles::exactip_decide(e).yes;
            Outcome {
                agree: got == want,
                input_dim: dim,
                output_dim: Some(emb.ledger.output_dim),
                items: None,
                detail: json!({ "m": e.m, "threshold": threshold, "want": want, "got": got }),
            }
        }
        ("jaccard-gadget", _) => {
            let b = boolean(inst)?;
            let emb = jaccard_embed(b)?;
            let best: Exact = oracles::jaccard_max(&emb.instance).value;
            let recovered = jaccard_recover(best, b.d);
            let want = oracles::max_ip(b).value;
            let agree = recovered.is_integer() && recovered.to_integer() == num_bigint::BigInt::from(want);
            Outcome {
                agree,
                input_dim: dim,
                output_dim: Some(emb.ledger.output_dim),
                items: None,
                detail: json!({ "max": want, "recovered": recovered.to_string() }),
            }
        }
        ("gap-min" | "gap-max", Instance::Gap(g)) => {
            let got = gap_decide_witness(g, cfg.eps, &GapConfig::default(), seed)?.is_some();
            match oracles::gap_side(g) {
                Some(want) => Outcome::plain(got == want, dim, json!({ "tau": g.tau, "want": want, "got": got })),
                None => Outcome::plain(true, dim, json!({ "tau": g.tau, "off_promise": true, "got": got })),
            }
        }
        ("mamin" | "moderate-minip", Instance::MinIp(b)) => {
            let min = oracles::min_ip(b).value;
            let route = if name == "moderate-minip" { MinIpRoute::ModerateOv } else { cfg.minip_route };
            let v = match route {
                MinIpRoute::Direct => mamin_ip(b, seed)?,
                MinIpRoute::ModerateOv => {
                    let mut p = ModerateParams::new(cfg.blocks, cfg.maps)?;
                    p.caps = cfg.caps;
                    moderate_maminip(b, &p, seed, |j| oracles::ov_decide(j).yes)?
                }
            };
            Outcome::plain(min <= v && v <= 2 * min, dim, json!({ "min": min, "estimate": v }))
        }
        ("mamax", Instance::MaxIp(b)) => {
            let max = oracles::max_ip(b).value;
            let v = mamax_ip(b, seed)?;
            Outcome::plain(max <= 2 * v && v <= max, dim, json!({ "max": max, "estimate": v }))
        }
        ("bcp" | "fp", Instance::Bcp(r) | Instance::Fp(r)) => {
            let ac = ApproxConfig::new(cfg.eps, seed);
            let backend: &dyn DynBackend = match cfg.sketch_backend {
                SketchBackend::Oracle => &OracleBackend,
                SketchBackend::OvPipeline => &OvPipelineBackend { caps: cfg.caps },
            };
            let (truth, out) = if name == "bcp" {
                (oracles::bcp(r)?.value, backend.bcp(r, ac)?)
            } else {
                (oracles::fp(r)?.value, backend.fp(r, ac)?)
            };
            let f = 1.0 + cfg.eps;
            Outcome {
                agree: out.estimate >= truth / f && out.estimate <= truth * f,
                input_dim: dim,
                output_dim: Some(out.sketch_dim),
                items: None,
                detail: json!({ "truth": truth, "estimate": out.estimate }),
            }
        }
        ("jaccard", Instance::Jaccard(s)) => {
            let ac = ApproxConfig::new(cfg.eps, seed);
            let truth: f64 = oracles::jaccard_max(s).value;
            let out = match cfg.sketch_backend {
                SketchBackend::Oracle => jaccard_pair_approx(s, ac, &OracleBackend)?,
                SketchBackend::OvPipeline => jaccard_pair_approx(s, ac, &OvPipelineBackend { caps: cfg.caps })?,
            };
            Outcome {
                agree: (out.estimate - truth).abs() <= cfg.eps,
                input_dim: dim,
                output_dim: Some(out.sketch_dim),
                items: None,
                detail: json!({ "truth": truth, "estimate": out.estimate }),
            }
        }
        ("maxsat", Instance::MaxSat(c)) => {
            let out = approx_maxsat(c, cfg.eps, seed, &MinIpBackend::default())?;
            let need = (1.0 - 2.0 * cfg.eps) * c.clauses.len() as f64;
            let opt = oracles::maxsat_opt(c).ok().map(|o| o.value);
            Outcome {
                agree: out.satisfied as f64 >= need,
                input_dim: dim,
                output_dim: Some(out.sampled),
                items: None,
                detail: json!({ "satisfied": out.satisfied, "clauses": out.clauses, "optimum": opt }),
            }
        }
        _ => return Err(params(format!("reduction {name} received a {} instance", inst.kind()))),
    })
}

/// Object-safe view of the two sketch backends.
trait DynBackend {
    fn bcp(&self, r: &crate::RealInstance, ac: ApproxConfig) -> Result<crate::lsh::ApproxOutcome<f64>>;
    fn fp(&self, r: &crate::RealInstance, ac: ApproxConfig) -> Result<crate::lsh::ApproxOutcome<f64>>;
}

impl<B: MaxIpBackend> DynBackend for B {
    fn bcp(&self, r: &crate::RealInstance, ac: ApproxConfig) -> Result<crate::lsh::ApproxOutcome<f64>> {
        bcp_approx(r, ac, self)
    }
    fn fp(&self, r: &crate::RealInstance, ac: ApproxConfig) -> Result<crate::lsh::ApproxOutcome<f64>> {
        fp_approx(r, ac, self)
    }
}
