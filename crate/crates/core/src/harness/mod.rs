//! Seeded verification runs: each trial generates an instance, pushes it
//! through a reduction or approximation, and compares against the
//! brute-force oracle on the source problem.
//!
//! Trial `i` draws its instance from `derive_tagged(seed, "gen", i)` and
//! its internal randomness from `derive_tagged(seed, "run", i)`, so reports
//! are a pure function of `(name, config, trials, seed)`.

mod trials;

pub use trials::{run_trial, Trial};

use crate::error::{params, Result};
use crate::instances::GenParams;
use crate::protocols::Caps;
use crate::rng::derive_tagged;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Failures kept verbatim in a report.
pub const MAX_REPORTED_FAILURES: usize = 10;

/// Registered reduction names, in listing order.
pub const REDUCTIONS: [&str; 15] = [
    "exactip-ov",
    "hopcroft-ov",
    "threesum-3ov",
    "reverse",
    "exactip-minip",
    "jaccard-gadget",
    "gap-min",
    "gap-max",
    "mamin",
    "mamax",
    "moderate-minip",
    "bcp",
    "fp",
    "jaccard",
    "maxsat",
];

/// Threshold decisions for the BCP/FP/Jaccard pipelines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SketchBackend {
    Oracle,
    OvPipeline,
}

/// How factor-2 MinIP is computed for `mamin`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinIpRoute {
    Direct,
    ModerateOv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub gen: GenParams,
    /// Approximation or error parameter of the run.
    pub eps: f64,
    /// Groups for the IP protocol; clamped to `1..=d`.
    pub groups: usize,
    pub block_size: u32,
    pub sketch_backend: SketchBackend,
    pub minip_route: MinIpRoute,
    /// Moderate reduction blocks and maps.
    pub blocks: usize,
    pub maps: usize,
    pub caps: Caps,
    /// Alternate planted yes and no instances when `gen.plant` is unset.
    pub mix_plants: bool,
}

impl VerifyConfig {
    /// Desk-scale defaults for a registered reduction.
    pub fn default_for(name: &str) -> Result<Self> {
        let mut gen = GenParams::sizes(12, 8);
        let mut eps = 0.3;
        let mut mix_plants = true;
        match name {
            "exactip-ov" | "exactip-minip" => gen.m = Some(3),
            "hopcroft-ov" => {
                gen.d = 3;
                gen.bound = Some(20);
            }
            "threesum-3ov" => {
                gen.n = 10;
                gen.bound = Some(32);
            }
            "reverse" | "jaccard-gadget" | "mamin" | "mamax" => mix_plants = false,
            "gap-min" | "gap-max" => {
                gen = GenParams::sizes(100, 40);
                gen.tau = Some(3);
                if name == "gap-max" {
                    gen.density = Some(0.15);
                }
                eps = 0.1;
            }
            "moderate-minip" => {
                gen = GenParams::sizes(32, 16);
                gen.density = Some(0.8);
                mix_plants = false;
                eps = 0.2;
            }
            "bcp" | "fp" => {
                gen = GenParams::sizes(16, 8);
                gen.eps = Some(0.3);
                gen.radius = Some(1.0);
            }
            "jaccard" => {
                gen = GenParams::sizes(8, 0);
                gen.universe = Some(32);
                mix_plants = false;
                eps = 0.2;
            }
            "maxsat" => {
                gen = GenParams::sizes(16, 0);
                gen.num_clauses = Some(40);
                gen.sat = Some(0.9);
                mix_plants = false;
                eps = 0.1;
            }
            _ => return Err(unknown(name)),
        }
        if matches!(name, "mamin" | "mamax") {
            gen = GenParams::sizes(100, 40);
        }
        Ok(VerifyConfig {
            gen,
            eps,
            groups: 1,
            block_size: 2,
            sketch_backend: SketchBackend::Oracle,
            minip_route: MinIpRoute::Direct,
            blocks: 5,
            maps: 5,
            caps: Caps::default(),
            mix_plants,
        })
    }
}

fn unknown(name: &str) -> crate::Error {
    params(format!("unknown reduction {name:?}; known: {}", REDUCTIONS.join(", ")))
}

/// Contracted success probability: 1 for exact reductions.
pub fn target_rate(name: &str, cfg: &VerifyConfig) -> Result<f64> {
    Ok(match name {
        "exactip-ov" | "hopcroft-ov" | "threesum-3ov" | "reverse" | "exactip-minip" | "jaccard-gadget" => 1.0,
        "gap-min" | "gap-max" => 1.0 - 1.0 / cfg.gen.n.max(1) as f64,
        "mamin" | "mamax" | "moderate-minip" | "bcp" | "fp" | "jaccard" | "maxsat" => 2.0 / 3.0,
        _ => return Err(unknown(name)),
    })
}

/// 95% Wilson score interval for `successes / trials`.
pub fn wilson(successes: usize, trials: usize) -> Option<[f64; 2]> {
    if trials == 0 {
        return None;
    }
    let z = 1.959_963_984_540_054_f64;
    let (n, p) = (trials as f64, successes as f64 / trials as f64);
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    Some([(centre - half).max(0.0), (centre + half).min(1.0)])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub reduction: String,
    pub seed: u64,
    pub trials: usize,
    pub agreements: usize,
    pub randomized: bool,
    pub target: f64,
    pub rate: Option<f64>,
    pub wilson: Option<[f64; 2]>,
    /// Exact runs pass only with full agreement; randomized runs pass
    /// unless the Wilson interval lies entirely below the target.
    pub passed: bool,
    pub failures: Vec<Trial>,
}

pub fn verify(name: &str, cfg: &VerifyConfig, trials: usize, seed: u64) -> Result<VerifyReport> {
    let target = target_rate(name, cfg)?;
    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(name, cfg, i, seed))
        .collect::<Result<_>>()?;
    let agreements = outcomes.iter().filter(|t| t.agree).count();
    let randomized = target < 1.0;
    let interval = wilson(agreements, trials);
    let passed = if randomized {
        interval.is_none_or(|[_, hi]| hi >= target)
    } else {
        agreements == trials
    };
    Ok(VerifyReport {
        reduction: name.to_string(),
        seed,
        trials,
        agreements,
        randomized,
        target,
        rate: (trials > 0).then(|| agreements as f64 / trials as f64),
        wilson: interval,
        passed,
        failures: outcomes.into_iter().filter(|t| !t.agree).take(MAX_REPORTED_FAILURES).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub input_dim: usize,
    pub output_dim: Option<usize>,
    pub items: Option<usize>,
    /// `output_dim / input_dim`.
    pub blowup: Option<f64>,
    pub agree: bool,
    /// Wall-clock time; the only field that varies between runs.
    pub millis: f64,
}

/// One trial per ladder size, with the dimension ledger of the output.
pub fn bench(name: &str, cfg: &VerifyConfig, ladder: &[usize], seed: u64) -> Result<Vec<BenchRow>> {
    target_rate(name, cfg)?;
    ladder
        .iter()
        .map(|&n| {
            let mut c = cfg.clone();
            c.gen.n = n;
            let start = Instant::now();
            let t = run_trial(name, &c, 0, derive_tagged(seed, "bench", n as u64))?;
            let millis = start.elapsed().as_secs_f64() * 1e3;
            Ok(BenchRow {
                n,
                input_dim: t.input_dim,
                output_dim: t.output_dim,
                items: t.items,
                blowup: t.output_dim.filter(|_| t.input_dim > 0).map(|o| o as f64 / t.input_dim as f64),
                agree: t.agree,
                millis,
            })
        })
        .collect()
}

/// Markdown table of bench rows.
pub fn bench_markdown(name: &str, rows: &[BenchRow]) -> String {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let mut s = format!("### {name}\n\n| n | input dim | output dim | items | blow-up | agree | ms |\n|---|---|---|---|---|---|---|\n");
    for r in rows {
        s += &format!(
            "| {} | {} | {} | {} | {} | {} | {:.2} |\n",
            r.n,
            r.input_dim,
            opt(r.output_dim.map(|v| v.to_string())),
            opt(r.items.map(|v| v.to_string())),
            opt(r.blowup.map(|v| format!("{v:.2}"))),
            r.agree,
            r.millis
        );
    }
    s
}

#[cfg(test)]
mod tests;
