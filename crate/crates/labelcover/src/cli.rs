//! Command-line surface. Every randomized subcommand requires an explicit
//! `--seed`; identical command lines produce byte-identical outputs.
//!
//! Exit codes: 0 success, 1 validation/runtime error, 2 usage error.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::generate::{generate, GenKind, GenSpec};
use crate::harness::{
    counting_bound, trial_completeness, trial_soundness_small, trial_trim, trial_unsat_tail,
    CompletenessTrialConfig, SoundnessTrialConfig, TrimTrialConfig,
};
use crate::instance::{eval_labeling, eval_multilabeling, Instance, Multilabeling};
use crate::reduce::{
    amplify_copies, compute_params, instantiate_gap_params, sparsify, ReductionConstants,
};
use crate::report::TrialReport;
use crate::solve::{maxrep_exact, minrep_exact, random_labeling, trivial_minrep};
use crate::textio;

#[derive(Parser)]
#[command(
    name = "labelcover",
    version,
    about = "Label Cover toolkit: generators, degree sparsification, solvers, statistical harness"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Evaluate a labeling or multilabeling against an instance.
    Eval(EvalArgs),
    /// Run the subsample-and-trim reduction on an instance.
    Sparsify(SparsifyArgs),
    /// Solve Max-Rep or Min-Rep.
    Solve(SolveArgs),
    /// Run a statistical experiment and emit a report.
    Trial(TrialArgs),
    /// Derive reduction or gap parameters.
    Params(ParamsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Planted,
    Corrupted,
    Random,
}

impl From<KindArg> for GenKind {
    fn from(k: KindArg) -> GenKind {
        match k {
            KindArg::Planted => GenKind::Planted,
            KindArg::Corrupted => GenKind::Corrupted,
            KindArg::Random => GenKind::Random,
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    deg: usize,
    #[arg(long)]
    sigma: usize,
    /// Corruption fraction (corrupted kind only).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Output instance file.
    #[arg(short, long)]
    out: PathBuf,
    /// Also write the planted labeling (planted/corrupted kinds).
    #[arg(long)]
    labeling_out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    instance: PathBuf,
    #[arg(long, conflicts_with = "multilabeling")]
    labeling: Option<PathBuf>,
    #[arg(long)]
    multilabeling: Option<PathBuf>,
}

#[derive(Args)]
struct SparsifyArgs {
    instance: PathBuf,
    #[arg(long)]
    gamma: f64,
    #[arg(long)]
    c_delta: Option<f64>,
    #[arg(long)]
    c_p: Option<f64>,
    #[arg(long)]
    guard_ratio: Option<f64>,
    /// Tune c_delta so the degree bound lands exactly here.
    #[arg(long, conflicts_with = "c_delta")]
    delta: Option<usize>,
    /// Tune c_p so the sampling probability lands exactly here.
    #[arg(long, conflicts_with = "c_p")]
    p: Option<f64>,
    #[arg(long)]
    seed: u64,
    /// Output (trimmed) instance file.
    #[arg(short, long)]
    out: PathBuf,
    /// Structured JSON report (params, statistics, both instances).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Maxrep,
    Minrep,
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    objective: ObjectiveArg,
    /// Exact search (default).
    #[arg(long)]
    exact: bool,
    /// Greedy per-edge cover (minrep only).
    #[arg(long, conflicts_with = "exact")]
    trivial: bool,
    /// Uniform random labeling (maxrep only; needs --seed).
    #[arg(long, conflicts_with_all = ["exact", "trivial"])]
    random: bool,
    #[arg(long, default_value_t = u64::MAX)]
    budget: u64,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Trim,
    Completeness,
    Soundness,
    UnsatTail,
    Counting,
}

#[derive(Clone, Copy, ValueEnum)]
enum PsiArg {
    /// All-empty multilabeling (value 0).
    Empty,
    /// Singleton lift of a seeded random labeling.
    RandomLift,
}

#[derive(Args)]
struct TrialArgs {
    #[arg(long, value_enum)]
    experiment: ExperimentArg,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    deg: Option<usize>,
    #[arg(long)]
    sigma: Option<usize>,
    #[arg(long, default_value_t = 1)]
    amplify: usize,
    #[arg(long, value_enum, default_value = "random")]
    kind: KindArg,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    c_delta: Option<f64>,
    #[arg(long)]
    c_p: Option<f64>,
    #[arg(long)]
    guard_ratio: Option<f64>,
    /// Tune c_delta so the degree bound lands exactly here.
    #[arg(long, conflicts_with = "c_delta")]
    delta: Option<usize>,
    /// Tune c_p so the sampling probability lands exactly here
    /// (trim/completeness/soundness) or the direct probability (unsat-tail).
    #[arg(long, conflicts_with = "c_p")]
    p: Option<f64>,
    /// Multilabeling for unsat-tail.
    #[arg(long, value_enum, default_value = "empty")]
    psi: PsiArg,
    /// Total vertex count N for counting.
    #[arg(long)]
    n_total: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Worker threads for the trial loop (output is identical for any count).
    #[arg(long)]
    workers: Option<usize>,
    /// CSV summary output.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Line-delimited JSON output.
    #[arg(long)]
    jsonl: Option<PathBuf>,
}

impl TrialArgs {
    fn constant_flags(&self) -> ConstantFlags {
        ConstantFlags {
            c_delta: self.c_delta,
            c_p: self.c_p,
            guard_ratio: self.guard_ratio,
            delta: self.delta,
            p: self.p,
        }
    }
}

#[derive(Args)]
struct ParamsArgs {
    /// Target gap g (with --big-c).
    #[arg(long)]
    gap: Option<u64>,
    #[arg(long)]
    big_c: Option<f64>,
    /// Alphabet size (with --gamma).
    #[arg(long)]
    sigma: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    c_delta: Option<f64>,
}

enum CliError {
    Usage(String),
    Run(String),
}

impl CliError {
    fn run(err: impl std::fmt::Display) -> CliError {
        CliError::Run(err.to_string())
    }
}

macro_rules! usage {
    ($($arg:tt)*) => { CliError::Usage(format!($($arg)*)) };
}

/// Parse argv and execute; returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors
            e.exit();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            2
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Eval(args) => cmd_eval(args),
        Cmd::Sparsify(args) => cmd_sparsify(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Trial(args) => cmd_trial(args),
        Cmd::Params(args) => cmd_params(args),
    }
}

fn read_instance(path: &PathBuf) -> Result<Instance, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::run(format!("cannot read {}: {e}", path.display())))?;
    textio::parse_instance(&text).map_err(CliError::run)
}

fn write_file(path: &PathBuf, content: &str) -> Result<(), CliError> {
    fs::write(path, content)
        .map_err(|e| CliError::run(format!("cannot write {}: {e}", path.display())))
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    match (args.kind, args.eps) {
        (KindArg::Corrupted, None) => {
            return Err(usage!("--kind corrupted requires --eps"));
        }
        (KindArg::Planted | KindArg::Random, Some(_)) => {
            return Err(usage!("--eps only applies to --kind corrupted"));
        }
        _ => {}
    }
    if matches!(args.kind, KindArg::Random) && args.labeling_out.is_some() {
        return Err(usage!("--labeling-out only applies to planted/corrupted kinds"));
    }
    let spec = GenSpec {
        n: args.n,
        deg: args.deg,
        sigma: args.sigma,
        kind: args.kind.into(),
        eps: args.eps.unwrap_or(0.0),
        seed: args.seed,
    };
    let (inst, phi) = generate(&spec).map_err(CliError::run)?;
    write_file(&args.out, &textio::serialize_instance(&inst))?;
    if let Some(path) = args.labeling_out {
        let phi = phi.expect("planted kinds carry a labeling");
        write_file(&path, &textio::serialize_labeling(&phi))?;
    }
    println!("wrote {} ({} edges)", args.out.display(), inst.num_edges());
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    match (args.labeling, args.multilabeling) {
        (Some(path), None) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::run(format!("cannot read {}: {e}", path.display())))?;
            let phi = textio::parse_labeling(&text, &inst).map_err(CliError::run)?;
            let rep = eval_labeling(&inst, &phi).map_err(CliError::run)?;
            println!("value {}", rep.value());
            println!("satisfied {} of {}", rep.satisfied, rep.total);
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::run(format!("cannot read {}: {e}", path.display())))?;
            let psi = textio::parse_multilabeling(&text, &inst).map_err(CliError::run)?;
            let rep = eval_multilabeling(&inst, &psi).map_err(CliError::run)?;
            println!("value {}", rep.value());
            println!("satisfied {} of {}", rep.satisfied, rep.total);
            println!("cost {}", rep.cost.expect("multilabeling eval has a cost"));
        }
        _ => return Err(usage!("exactly one of --labeling / --multilabeling is required")),
    }
    Ok(())
}

/// Constant flags shared by sparsify and trial: either the raw multipliers
/// or exact delta/p targets they get tuned to hit.
struct ConstantFlags {
    c_delta: Option<f64>,
    c_p: Option<f64>,
    guard_ratio: Option<f64>,
    delta: Option<usize>,
    p: Option<f64>,
}

fn resolve_constants(
    sigma: usize,
    gamma: f64,
    d: Option<usize>,
    flags: &ConstantFlags,
) -> Result<ReductionConstants, CliError> {
    let defaults = ReductionConstants::default();
    let c_delta = match (flags.c_delta, flags.delta) {
        (Some(c), None) => c,
        (None, Some(t)) => ReductionConstants::c_delta_for_target(t, sigma, gamma),
        (None, None) => defaults.c_delta,
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    };
    let mut consts = ReductionConstants {
        c_delta,
        c_p: flags.c_p.unwrap_or(defaults.c_p),
        guard_ratio: flags.guard_ratio.unwrap_or(defaults.guard_ratio),
    };
    if let Some(p) = flags.p {
        let d = d.ok_or_else(|| usage!("--p needs a known degree"))?;
        let params = compute_params(sigma, gamma, &consts).map_err(CliError::run)?;
        consts.c_p = p * d as f64 / params.delta as f64;
    }
    Ok(consts)
}

#[derive(serde::Serialize)]
struct SparsifyReport<'a> {
    params: &'a crate::reduce::SparsifyParams,
    original_edges: usize,
    intermediate_edges: usize,
    trimmed_edges: usize,
    removed_edges: usize,
    trimmed_vertices_a: usize,
    trimmed_vertices_b: usize,
    intermediate: String,
    trimmed: String,
}

fn cmd_sparsify(args: SparsifyArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    let d = crate::instance::degree_profile(&inst).uniform_degree();
    let consts = resolve_constants(
        inst.sigma(),
        args.gamma,
        d,
        &ConstantFlags {
            c_delta: args.c_delta,
            c_p: args.c_p,
            guard_ratio: args.guard_ratio,
            delta: args.delta,
            p: args.p,
        },
    )?;
    let out = sparsify(&inst, args.gamma, args.seed, &consts).map_err(CliError::run)?;
    write_file(&args.out, &textio::serialize_instance(&out.trimmed))?;
    if let Some(path) = &args.report {
        let report = SparsifyReport {
            params: &out.params,
            original_edges: inst.num_edges(),
            intermediate_edges: out.intermediate.num_edges(),
            trimmed_edges: out.trimmed.num_edges(),
            removed_edges: out.removed_edges,
            trimmed_vertices_a: out.trimmed_vertices_a,
            trimmed_vertices_b: out.trimmed_vertices_b,
            intermediate: textio::serialize_instance(&out.intermediate),
            trimmed: textio::serialize_instance(&out.trimmed),
        };
        let json = serde_json::to_string_pretty(&report).expect("serializable");
        write_file(path, &json)?;
    }
    println!(
        "delta {} p {} kept {} removed {}",
        out.params.delta,
        out.params.p.expect("bound by sparsify"),
        out.trimmed.num_edges(),
        out.removed_edges
    );
    Ok(())
}

fn cmd_solve(args: SolveArgs) -> Result<(), CliError> {
    let inst = read_instance(&args.instance)?;
    match (args.objective, args.trivial, args.random) {
        (ObjectiveArg::Maxrep, true, _) => {
            Err(usage!("--trivial applies to --objective minrep"))
        }
        (ObjectiveArg::Minrep, _, true) => {
            Err(usage!("--random applies to --objective maxrep"))
        }
        (ObjectiveArg::Maxrep, _, true) => {
            let seed = args
                .seed
                .ok_or_else(|| usage!("--random requires an explicit --seed"))?;
            let phi = random_labeling(&inst, seed);
            let rep = eval_labeling(&inst, &phi).map_err(CliError::run)?;
            println!("value {}", rep.value());
            print!("{}", textio::serialize_labeling(&phi));
            Ok(())
        }
        (ObjectiveArg::Maxrep, false, false) => {
            let r = maxrep_exact(&inst, args.budget);
            println!("value {}", r.value());
            println!("proved_optimal {}", r.proved_optimal);
            println!("nodes {}", r.nodes_explored);
            print!("{}", textio::serialize_labeling(&r.witness));
            Ok(())
        }
        (ObjectiveArg::Minrep, true, false) => {
            let psi = trivial_minrep(&inst);
            let rep = eval_multilabeling(&inst, &psi).map_err(CliError::run)?;
            println!("cost {}", psi.cost());
            println!("value {}", rep.value());
            print!("{}", textio::serialize_multilabeling(&psi));
            Ok(())
        }
        (ObjectiveArg::Minrep, false, false) => {
            let r = minrep_exact(&inst, args.budget);
            println!("cost {}", r.cost);
            println!("proved_optimal {}", r.proved_optimal);
            println!("nodes {}", r.nodes_explored);
            print!("{}", textio::serialize_multilabeling(&r.witness));
            Ok(())
        }
    }
}

fn require<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage!("--{name} is required for this experiment"))
}

fn cmd_trial(args: TrialArgs) -> Result<(), CliError> {
    let report = match args.workers {
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| CliError::run(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_trial(&args))?
        }
        None => run_trial(&args)?,
    };
    let csv = report.to_csv();
    print!("{csv}");
    if let Some(path) = &args.report {
        write_file(path, &csv)?;
    }
    if let Some(path) = &args.jsonl {
        write_file(path, &report.to_jsonl())?;
    }
    Ok(())
}

fn run_trial(args: &TrialArgs) -> Result<TrialReport, CliError> {
    if matches!(args.experiment, ExperimentArg::Counting) {
        let rec = counting_bound(
            require(args.n_total, "n-total")?,
            require(args.sigma, "sigma")?,
            require(args.gamma, "gamma")?,
        )
        .map_err(CliError::run)?;
        return Ok(TrialReport {
            experiment: "counting".into(),
            trials: 0,
            discarded: 0,
            guard_ok: true,
            records: vec![crate::report::StatRecord::bound_holds(
                "ln_binomial_le_bound",
                rec.ln_binomial,
                rec.ln_bound,
            )],
        });
    }

    let seed = args.seed.ok_or_else(|| usage!("--seed is required (no silent entropy)"))?;
    let n = require(args.n, "n")?;
    let deg = require(args.deg, "deg")?;
    let sigma = require(args.sigma, "sigma")?;
    let spec = GenSpec {
        n,
        deg,
        sigma,
        kind: args.kind.into(),
        eps: args.eps,
        seed,
    };

    match args.experiment {
        ExperimentArg::Trim => {
            let gamma = require(args.gamma, "gamma")?;
            let d = deg * args.amplify;
            let consts = resolve_constants(sigma, gamma, Some(d), &args.constant_flags())?;
            trial_trim(&TrimTrialConfig {
                spec,
                amplify: args.amplify,
                gamma,
                consts,
                trials: args.trials,
                seed,
            })
            .map_err(CliError::run)
        }
        ExperimentArg::Completeness => {
            let gamma = require(args.gamma, "gamma")?;
            let spec = GenSpec { kind: GenKind::Corrupted, ..spec };
            let consts = resolve_constants(sigma, gamma, Some(deg), &args.constant_flags())?;
            trial_completeness(&CompletenessTrialConfig {
                spec,
                gamma,
                consts,
                trials: args.trials,
                seed,
            })
            .map_err(CliError::run)
        }
        ExperimentArg::Soundness => {
            let gamma = require(args.gamma, "gamma")?;
            let consts = resolve_constants(sigma, gamma, Some(deg), &args.constant_flags())?;
            trial_soundness_small(&SoundnessTrialConfig {
                n,
                deg,
                sigma,
                gamma,
                consts,
                trials: args.trials,
                seed,
                budget: args.budget,
            })
            .map_err(CliError::run)
        }
        ExperimentArg::UnsatTail => {
            let p = require(args.p, "p")?;
            let spec = GenSpec { kind: GenKind::Random, ..spec };
            let base = crate::generate::gen_random(&spec).map_err(CliError::run)?;
            let inst = amplify_copies(&base, args.amplify).map_err(CliError::run)?;
            let psi = match args.psi {
                PsiArg::Empty => Multilabeling::empty(inst.n_a(), inst.n_b()),
                PsiArg::RandomLift => random_labeling(&inst, seed).singleton_lift(),
            };
            trial_unsat_tail(&inst, &psi, p, args.trials, seed).map_err(CliError::run)
        }
        ExperimentArg::Counting => unreachable!("handled above"),
    }
}

fn cmd_params(args: ParamsArgs) -> Result<(), CliError> {
    match (args.gap, args.big_c, args.sigma, args.gamma) {
        (Some(g), Some(c), None, None) => {
            let gp = instantiate_gap_params(g, c).map_err(CliError::run)?;
            println!("q {}", gp.q);
            println!("sigma {}", gp.sigma);
            println!("gamma {}", gp.gamma);
            println!("delta {}", gp.delta);
            println!("eps {}", gp.eps);
            println!("delta_slack {}", gp.delta_slack);
            Ok(())
        }
        (None, None, Some(sigma), Some(gamma)) => {
            let consts = ReductionConstants {
                c_delta: args.c_delta.unwrap_or(ReductionConstants::default().c_delta),
                ..Default::default()
            };
            let params = compute_params(sigma, gamma, &consts).map_err(CliError::run)?;
            println!("delta {}", params.delta);
            println!("c_delta {}", params.c_delta);
            println!("c_p {}", params.c_p);
            Ok(())
        }
        _ => Err(usage!("use --gap with --big-c, or --sigma with --gamma")),
    }
}
