//! `oveq`: generate instances, run oracles, reductions and approximation
//! pipelines, and produce verification reports. Every output line is a
//! JSON object (markdown bench tables excepted), and every run is a pure
//! function of its arguments and `--seed`.
//!
//! Exit codes: 0 on success, 1 when a verification fails, 2 on usage,
//! input or configuration errors.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ov_equiv::protocols::Caps;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "oveq", version, about = "Reductions around Orthogonal Vectors, with brute-force oracles")]
pub struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Largest compiled or embedded dimension.
    #[arg(long, global = true)]
    pub cap_dim: Option<usize>,
    /// Largest OR-bundle.
    #[arg(long, global = true)]
    pub cap_bundle: Option<usize>,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

impl Cli {
    pub fn caps(&self) -> Caps {
        let d = Caps::default();
        Caps { dim: self.cap_dim.unwrap_or(d.dim), bundle: self.cap_bundle.unwrap_or(d.bundle) }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate seeded instances, one per line.
    Gen(GenArgs),
    /// Solve instances or bundles exactly with the brute-force oracles.
    Solve(SolveArgs),
    /// Apply a gadget or a protocol reduction.
    Reduce(ReduceArgs),
    /// Run an approximation or gap algorithm.
    Approx(ApproxArgs),
    /// Seeded oracle-equivalence trials for a registered reduction.
    Verify(VerifyArgs),
    /// Dimension blow-up and wall-clock across a size ladder.
    Bench(BenchArgs),
    /// Approximate MAXSAT on a CNF (DIMACS or JSON line).
    Maxsat(MaxsatCmd),
}

#[derive(Args, Debug)]
pub struct Source {
    /// Input file; `-` or absent reads stdin.
    #[arg(value_name = "FILE")]
    pub input: Option<String>,
    /// Same as the positional FILE.
    #[arg(long = "input", value_name = "FILE", conflicts_with = "input")]
    pub input_flag: Option<String>,
}

impl Source {
    pub fn path(&self) -> Option<&str> {
        self.input.as_deref().or(self.input_flag.as_deref())
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub source: Source,
    /// Expected kind (`ov`, `minip`, ..., or `3ov` for 3-OV bundles);
    /// any other input is rejected.
    #[arg(long)]
    pub oracle: Option<String>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Problem kind: ov, minip, maxip, exactip, gap-min, gap-max, bcp, fp,
    /// jaccard, hopcroft, 3ov, 3sum, maxsat.
    pub kind: String,
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    #[arg(long, default_value_t = 8)]
    pub d: usize,
    /// Size of the second (and third) set; defaults to n.
    #[arg(long)]
    pub n_b: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long)]
    pub density: Option<f64>,
    /// Norm of geometric instances.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub single_set: bool,
    #[arg(long)]
    pub universe: Option<u32>,
    #[arg(long)]
    pub bound: Option<i64>,
    #[arg(long)]
    pub clauses: Option<usize>,
    #[arg(long)]
    pub clause_len: Option<usize>,
    #[arg(long)]
    pub sat: Option<f64>,
    /// Plant a yes (`true`) or no (`false`) instance.
    #[arg(long)]
    pub plant: Option<bool>,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    /// Write CNF instances as DIMACS instead of JSON.
    #[arg(long)]
    pub dimacs: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Gadget {
    Reverse,
    ExactipMinip,
    /// Non-negative integer vectors (a `hopcroft` instance) to MaxIP.
    Integer,
    Jaccard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Via {
    ExactipOv,
    HopcroftOv,
    #[value(name = "threesum-3ov")]
    ThreesumThreeOv,
    ModerateOv,
    MaxsatSplit,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, conflicts_with = "via", required_unless_present = "via")]
    pub gadget: Option<Gadget>,
    #[arg(long)]
    pub via: Option<Via>,
    /// Groups for the inner-product protocol.
    #[arg(long, visible_alias = "group-len", default_value_t = 1)]
    pub groups: usize,
    /// Digit size for the 3-SUM protocol.
    #[arg(long, default_value_t = 2)]
    pub block_size: u32,
    /// Threshold for the moderate-dimension reduction.
    #[arg(long)]
    pub tau: Option<usize>,
    /// Target inner product for the integer gadget.
    #[arg(long, default_value_t = 0)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub blocks: usize,
    #[arg(long, default_value_t = 5)]
    pub maps: usize,
    /// Keep Merlin strings the protocol always rejects.
    #[arg(long)]
    pub no_prune: bool,
    /// Also print the gadget's dimension ledger to stderr.
    #[arg(long)]
    pub ledger: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ApproxProblem {
    Bcp,
    Fp,
    Jaccard,
    Maminip,
    Mamaxip,
    Gap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Oracle,
    OvPipeline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Direct,
    ModerateOv,
}

#[derive(Args, Debug)]
pub struct ApproxArgs {
    pub problem: ApproxProblem,
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 0.3)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = Backend::Oracle)]
    pub backend: Backend,
    /// MinIP route for `maminip`.
    #[arg(long, value_enum, default_value_t = Route::Direct)]
    pub route: Route,
    #[arg(long, default_value_t = 5)]
    pub blocks: usize,
    #[arg(long, default_value_t = 5)]
    pub maps: usize,
    /// Independent seeded runs per instance.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Registered reduction; `list` prints the names.
    pub reduction: String,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// JSON object merged over the reduction's default configuration.
    #[arg(long)]
    pub config: Option<String>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    pub show_config: bool,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    pub reduction: String,
    /// Comma-separated set sizes; empty for no rows.
    #[arg(long, default_value = "64,128,256,512,1024")]
    pub ladder: String,
    #[arg(long)]
    pub config: Option<String>,
    /// Emit a markdown table instead of JSON lines.
    #[arg(long)]
    pub markdown: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SatBackend {
    Exact,
    Subquadratic,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
pub struct MaxsatCmd {
    #[command(subcommand)]
    pub mode: Option<MaxsatMode>,
    #[command(flatten)]
    pub args: MaxsatArgs,
}

impl MaxsatCmd {
    pub fn args(&self) -> &MaxsatArgs {
        match &self.mode {
            Some(MaxsatMode::Approx(a)) => a,
            None => &self.args,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum MaxsatMode {
    /// Same as `maxsat` without a mode.
    Approx(MaxsatArgs),
}

#[derive(Args, Debug)]
pub struct MaxsatArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = SatBackend::Subquadratic)]
    pub backend: SatBackend,
    /// Independent approximate MinIP runs.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    /// Also report the exhaustive optimum (at most 26 variables).
    #[arg(long)]
    pub check: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
