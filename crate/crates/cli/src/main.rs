//! `ikit`: AND/OR interaction toolkit.
//!
//! Exit status: 0 on success, 1 when an input or flag is rejected, 2 when a
//! result fails its own numerical self-check.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use ikit_core::concepts::{self, ReportFormat, ThresholdPolicy};
use ikit_core::decompose::{mixed_faithfulness_error, Method, StepDecay};
use ikit_core::interactions::{
    faithfulness_error, from_records, to_records, InteractionDoc, SubsetRecord, EXACT_RTOL,
};
use ikit_core::lattice::{self, dense, LatticeVector};
use ikit_core::shapley;
use ikit_core::synthetic::{generate_game, SyntheticGameSpec};
use ikit_core::table::{TableFormat, ORDERING};
use ikit_core::{
    and_interactions, axioms, decompose, oracle, or_interactions, DecomposerConfig, InteractionKind, ValueTable,
};

#[derive(Parser, Debug)]
#[command(name = "ikit", version, about = "Explain set functions with AND/OR interactions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Harsanyi dividends (AND interactions) of a value table.
    And(ExtractArgs),
    /// OR interactions of a value table.
    Or(ExtractArgs),
    /// Shapley values and pairwise Shapley interaction indices.
    Shapley {
        #[arg(long = "in")]
        input: PathBuf,
        /// Write JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Shapley-Taylor interaction index of order k.
    Taylor {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(short = 'k')]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sparse AND-OR decomposition.
    Decompose(DecomposeArgs),
    /// Salient concepts of a decomposition result.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        /// Keep |I| >= theta * max |I| (default 0.05).
        #[arg(long, conflicts_with = "top_k")]
        theta: Option<f64>,
        /// Keep the m largest |I|.
        #[arg(long)]
        top_k: Option<usize>,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV of (rank, |effect|) over all entries.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Check the seven interaction axioms on a table.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build a game from planted AND/OR terms.
    Synth {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Also write the noise-free interaction vectors.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Fill a table by querying an external oracle process.
    OracleFill {
        #[arg(short = 'n')]
        n: usize,
        /// Shell command speaking the EVAL/QUIT line protocol.
        #[arg(long)]
        cmd: String,
        #[arg(long)]
        out: PathBuf,
        /// Per-query timeout in seconds.
        #[arg(long, default_value_t = 30.0)]
        timeout: f64,
    },
    /// Time the fast transforms against dense matrix products.
    Bench {
        #[arg(short = 'n')]
        n: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
    },
}

#[derive(clap::Args, Debug)]
struct ExtractArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args, Debug)]
struct DecomposeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    tau_ratio: f64,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long, value_enum, default_value_t = DecayArg::InvSqrt)]
    step_decay: DecayArg,
    #[arg(long, default_value_t = 1e-7)]
    stop_tol: f64,
    /// Recorded in the output; the solvers are deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = MethodArg::PrimalDual)]
    method: MethodArg,
    /// CSV of (iteration, objective).
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FormatArg {
    Text,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DecayArg {
    Constant,
    InvSqrt,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MethodArg {
    PrimalDual,
    Subgradient,
}

/// A result that failed its own consistency check.
#[derive(Debug)]
struct GuardFailure(String);

impl std::fmt::Display for GuardFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "numerical check failed: {}", self.0)
    }
}

impl std::error::Error for GuardFailure {}

fn guard(ok: bool, what: impl FnOnce() -> String) -> anyhow::Result<()> {
    if ok {
        Ok(())
    } else {
        Err(GuardFailure(what()).into())
    }
}

#[derive(Serialize, Deserialize)]
struct EpsilonStats {
    max_abs: f64,
    l1: f64,
}

/// On-disk decomposition result.
#[derive(Serialize, Deserialize)]
struct DecompositionDoc {
    format: String,
    version: u16,
    n: usize,
    players: Vec<String>,
    ordering: String,
    source_digest: String,
    config: DecomposerConfig,
    step_size: f64,
    final_objective: f64,
    dual_bound: Option<f64>,
    iterations: usize,
    best_iteration: usize,
    stopped_early: bool,
    tau_max: f64,
    epsilon: EpsilonStats,
    mixed_faithfulness_error: f64,
    and: Vec<SubsetRecord>,
    or: Vec<SubsetRecord>,
}

#[derive(Serialize)]
struct ShapleyDoc {
    format: &'static str,
    n: usize,
    source_digest: String,
    shapley: Vec<SubsetRecord>,
    pairwise_interaction: Vec<SubsetRecord>,
}

#[derive(Serialize)]
struct TaylorDoc {
    format: &'static str,
    n: usize,
    order: usize,
    source_digest: String,
    records: Vec<SubsetRecord>,
}

#[derive(Serialize)]
struct TruthDoc {
    format: &'static str,
    n: usize,
    ordering: &'static str,
    bias_slot: &'static str,
    and: Vec<SubsetRecord>,
    or: Vec<SubsetRecord>,
}

fn read_table(path: &Path) -> anyhow::Result<ValueTable> {
    let bytes = fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    ValueTable::load_auto(&bytes).with_context(|| format!("{} is not a valid value table", path.display()))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn to_json<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s.into_bytes()
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(p) => write_bytes(p, bytes),
        None => {
            print!("{}", String::from_utf8_lossy(bytes));
            Ok(())
        }
    }
}

fn tolerance(vt: &ValueTable) -> f64 {
    EXACT_RTOL * vt.scale()
}

fn cmd_extract(args: &ExtractArgs, kind: InteractionKind) -> anyhow::Result<()> {
    let vt = read_table(&args.input)?;
    let i = match kind {
        InteractionKind::And => and_interactions(&vt)?,
        InteractionKind::Or => or_interactions(&vt)?,
    };
    let err = faithfulness_error(&vt, &i)?;
    guard(err <= tolerance(&vt), || format!("{kind} reconstruction error {err:e}"))?;
    write_bytes(&args.out, &to_json(&InteractionDoc::new(&vt, &i)))
}

fn cmd_shapley(input: &Path, out: Option<&Path>) -> anyhow::Result<()> {
    let vt = read_table(input)?;
    let phi = shapley::shapley_values(&vt)?;
    let gap = (phi.total() - (vt.full_value() - vt.empty_value())).abs();
    guard(gap <= tolerance(&vt), || format!("Shapley efficiency gap {gap:e}"))?;
    let pairwise = if vt.n() >= 2 {
        shapley::shapley_interaction_table(&vt, 2)?.to_records(vt.players())
    } else {
        Vec::new()
    };
    let doc = ShapleyDoc {
        format: "shapley",
        n: vt.n(),
        source_digest: vt.digest(),
        shapley: phi.to_records(vt.players()),
        pairwise_interaction: pairwise,
    };
    emit(out, &to_json(&doc))
}

fn cmd_taylor(input: &Path, k: usize, out: Option<&Path>) -> anyhow::Result<()> {
    let vt = read_table(input)?;
    let table = shapley::shapley_taylor(&vt, k)?;
    let total: f64 = table.entries.values().sum();
    let gap = (total - vt.full_value()).abs();
    guard(gap <= tolerance(&vt), || format!("Shapley-Taylor completeness gap {gap:e}"))?;
    let doc = TaylorDoc {
        format: "shapley_taylor",
        n: vt.n(),
        order: k,
        source_digest: vt.digest(),
        records: table.to_records(vt.players()),
    };
    emit(out, &to_json(&doc))
}

fn cmd_decompose(args: &DecomposeArgs) -> anyhow::Result<()> {
    let vt = read_table(&args.input)?;
    let config = DecomposerConfig {
        method: match args.method {
            MethodArg::PrimalDual => Method::PrimalDual,
            MethodArg::Subgradient => Method::Subgradient,
        },
        max_iters: args.max_iters,
        step_size: args.step,
        step_decay: match args.step_decay {
            DecayArg::Constant => StepDecay::Constant,
            DecayArg::InvSqrt => StepDecay::InvSqrt,
        },
        tau_ratio: args.tau_ratio,
        tau_override: None,
        stop_tol: args.stop_tol,
        seed: args.seed,
    };
    let r = decompose(&vt, &config)?;
    let mixed = mixed_faithfulness_error(&vt, &r)?;
    let bound = r.epsilon_max() + tolerance(&vt);
    guard(mixed <= bound, || {
        format!("mixed reconstruction error {mixed:e} exceeds the error budget {bound:e}")
    })?;
    let doc = DecompositionDoc {
        format: "decomposition".into(),
        version: 1,
        n: vt.n(),
        players: vt.players().to_vec(),
        ordering: ORDERING.into(),
        source_digest: vt.digest(),
        config,
        step_size: r.step_size,
        final_objective: r.final_objective,
        dual_bound: r.dual_bound,
        iterations: r.iterations,
        best_iteration: r.best_iteration,
        stopped_early: r.stopped_early,
        tau_max: r.tau_max(),
        epsilon: EpsilonStats {
            max_abs: r.epsilon_max(),
            l1: r.epsilon_l1(),
        },
        mixed_faithfulness_error: mixed,
        and: to_records(&r.and_hat, vt.players()),
        or: to_records(&r.or_hat, vt.players()),
    };
    write_bytes(&args.out, &to_json(&doc))?;
    if let Some(path) = &args.trace {
        let mut csv = String::from("iteration,objective\n");
        for (t, f) in &r.objective_trace {
            csv.push_str(&format!("{t},{f}\n"));
        }
        write_bytes(path, csv.as_bytes())?;
    }
    Ok(())
}

fn cmd_report(
    input: &Path,
    theta: Option<f64>,
    top_k: Option<usize>,
    format: FormatArg,
    out: Option<&Path>,
    plot: Option<&Path>,
) -> anyhow::Result<()> {
    let bytes = fs::read(input).with_context(|| format!("cannot read {}", input.display()))?;
    let doc: DecompositionDoc = serde_json::from_slice(&bytes)
        .with_context(|| format!("{} is not a decomposition result", input.display()))?;
    if doc.format != "decomposition" {
        bail!("{} has format {:?}, expected \"decomposition\"", input.display(), doc.format);
    }
    let and = from_records(doc.n, InteractionKind::And, &doc.and)?;
    let or = from_records(doc.n, InteractionKind::Or, &doc.or)?;
    let policy = match (theta, top_k) {
        (_, Some(m)) => ThresholdPolicy::TopK(m),
        (Some(t), None) => ThresholdPolicy::Ratio(t),
        (None, None) => ThresholdPolicy::default(),
    };
    let report = concepts::extract_from_vectors(&and, &or, &doc.players, policy)?;
    let format = match format {
        FormatArg::Text => ReportFormat::Text,
        FormatArg::Json => ReportFormat::Json,
    };
    emit(out, &concepts::render_report(&report, format))?;
    if let Some(p) = plot {
        write_bytes(p, concepts::plot_data_csv(&and, &or).as_bytes())?;
    }
    Ok(())
}

fn cmd_verify(input: &Path, seed: u64) -> anyhow::Result<()> {
    let vt = read_table(input)?;
    // A cyclic shift exercises anonymity with every player moved.
    let n = vt.n();
    let perm: Vec<usize> = (0..n).map(|i| (i + 1) % n.max(1)).collect();
    let report = axioms::verify_axioms(&vt, &[], &perm, seed)?;
    for c in &report.checks {
        let status = match (c.applicable, c.passed) {
            (false, _) => "n/a",
            (true, true) => "ok",
            (true, false) => "FAIL",
        };
        println!(
            "{:<24} max_deviation={:.3e} tolerance={:.3e} {status}",
            serde_json::to_value(c.axiom)?.as_str().unwrap_or_default(),
            c.max_deviation,
            c.tolerance
        );
    }
    guard(report.passed(), || "an axiom check exceeded its tolerance".into())
}

fn cmd_synth(spec: &Path, out: &Path, truth: Option<&Path>) -> anyhow::Result<()> {
    let bytes = fs::read(spec).with_context(|| format!("cannot read {}", spec.display()))?;
    let spec: SyntheticGameSpec =
        serde_json::from_slice(&bytes).with_context(|| format!("{} is not a game spec", spec.display()))?;
    let (vt, gt) = generate_game(&spec)?;
    write_bytes(out, &vt.save(TableFormat::from_path(out)))?;
    if let Some(p) = truth {
        let doc = TruthDoc {
            format: "ground_truth",
            n: vt.n(),
            ordering: ORDERING,
            bias_slot: "AND empty set",
            and: to_records(&gt.and, vt.players()),
            or: to_records(&gt.or, vt.players()),
        };
        write_bytes(p, &to_json(&doc))?;
    }
    Ok(())
}

fn cmd_oracle_fill(n: usize, cmd: &str, out: &Path, timeout: f64) -> anyhow::Result<()> {
    if !(timeout > 0.0 && timeout.is_finite()) {
        bail!("--timeout must be a positive number of seconds, got {timeout}");
    }
    let vt = oracle::shell_oracle_fill(n, cmd, Duration::from_secs_f64(timeout))?;
    write_bytes(out, &vt.save(TableFormat::from_path(out)))
}

fn time_best(reps: usize, mut f: impl FnMut()) -> f64 {
    (0..reps.max(1))
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

fn cmd_bench(n: usize, reps: usize) -> anyhow::Result<()> {
    let v = LatticeVector::from_fn(n, |s| ((s.0 as f64) * 0.618_033_988_749_895).fract() - 0.5)?;
    let mut buf = v.as_slice().to_vec();
    let fast_and = time_best(reps, || {
        buf.copy_from_slice(v.as_slice());
        lattice::apply_t_and_in_place(&mut buf);
    });
    let fast_or = time_best(reps, || {
        buf.copy_from_slice(v.as_slice());
        lattice::apply_t_or_in_place(&mut buf);
    });
    println!("n={n} fast T_and: {fast_and:.6e} s");
    println!("n={n} fast T_or:  {fast_or:.6e} s");

    let m = n.min(dense::DENSE_N_CAP);
    let small = LatticeVector::from_fn(m, |s| v.as_slice()[s.mask()])?;
    let matrix = dense::t_and(m)?;
    let dense_m = time_best(reps, || {
        std::hint::black_box(matrix.matvec(small.as_slice()));
    });
    // dense matvec cost grows as 4^n
    let dense_n = dense_m * 4f64.powi((n - m) as i32);
    let label = if m == n { "measured" } else { "extrapolated from n=12" };
    println!("n={n} dense T_and: {dense_n:.6e} s ({label})");
    println!("n={n} speedup: {:.1}x", dense_n / fast_and.max(1e-12));
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::And(a) => cmd_extract(&a, InteractionKind::And),
        Command::Or(a) => cmd_extract(&a, InteractionKind::Or),
        Command::Shapley { input, out } => cmd_shapley(&input, out.as_deref()),
        Command::Taylor { input, k, out } => cmd_taylor(&input, k, out.as_deref()),
        Command::Decompose(a) => cmd_decompose(&a),
        Command::Report {
            input,
            theta,
            top_k,
            format,
            out,
            plot,
        } => cmd_report(&input, theta, top_k, format, out.as_deref(), plot.as_deref()),
        Command::Verify { input, seed } => cmd_verify(&input, seed),
        Command::Synth { spec, out, truth } => cmd_synth(&spec, &out, truth.as_deref()),
        Command::OracleFill { n, cmd, out, timeout } => cmd_oracle_fill(n, &cmd, &out, timeout),
        Command::Bench { n, reps } => cmd_bench(n, reps),
    }
}

fn apply_n_cap() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("IKIT_N_CAP") {
        let cap: usize = raw
            .trim()
            .parse()
            .with_context(|| format!("IKIT_N_CAP must be a player count, got {raw:?}"))?;
        if cap > lattice::MAX_PLAYERS {
            bail!("IKIT_N_CAP = {cap} exceeds the hard limit of {} players", lattice::MAX_PLAYERS);
        }
        lattice::set_n_cap(cap);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match apply_n_cap().and_then(|_| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<GuardFailure>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
