//! `lmproj`: run projected Levenberg-Marquardt solvers on desk or
//! spectrahedron problems, write reproducible traces, and compare runs.
//!
//! Exit codes for `run`: 0 converged, 2 iteration limit, 3 line-search
//! failure, 4 invalid configuration, 5 stationary but not solved,
//! 1 runtime error (non-finite values, projection budget, I/O).

mod config;
mod report;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::{build_plan, Method, RunOverrides};
use lmproj_core::problems::{gen_spectra_instance, write_instance};
use lmproj_core::solve::{global, local, SolveResult, SolveStatus};
use lmproj_core::trace::{to_csv, to_json, RunMeta, RunSummary};

#[derive(Parser)]
#[command(name = "lmproj", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write a trace file.
    Run(Box<RunArgs>),
    /// Render a comparison table from one or more trace files.
    Report(ReportArgs),
    /// Generate a spectrahedron instance file for replayable runs.
    GenInstance(GenArgs),
    /// Run every configuration listed in a file, concurrently.
    Batch(BatchArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Problem selector: desk:<D1..D4> | spectra:<n>,<m>,<q>,<seed> | file:<path>
    #[arg(long)]
    problem: String,
    /// Solver: local | global
    #[arg(long, default_value = "global")]
    method: String,
    /// Projection oracle: exact | condg | fwp
    #[arg(long, default_value = "exact")]
    projection: String,
    /// Parameter preset: box41 | spectra42 (default by problem kind)
    #[arg(long)]
    preset: Option<String>,
    /// Tolerance schedule: zero | const:<t> | geom:<t0>,<rho>
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    tol_f: Option<f64>,
    #[arg(long)]
    tol_stationarity: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    max_backtracks: Option<usize>,
    /// Nonmonotone memory M (window holds M+1 merit values).
    #[arg(long)]
    memory: Option<usize>,
    #[arg(long)]
    eta1: Option<f64>,
    #[arg(long)]
    eta2: Option<f64>,
    #[arg(long)]
    eta3: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Inner iteration budget for the CondG oracle.
    #[arg(long)]
    condg_budget: Option<usize>,
    /// Warm-start rank for the rank-p projector.
    #[arg(long)]
    initial_rank: Option<usize>,
    /// Keep the iterative oracle even when theta = 0.
    #[arg(long)]
    force_iterative: bool,
    /// Spectrahedron start family X0 = (1-a) I/n + a e1 e1^T.
    #[arg(long)]
    start_a: Option<f64>,
    /// Explicit comma-separated start vector (embedding coordinates).
    #[arg(long)]
    start: Option<String>,
    /// Trace output path; defaults to LMPROJ_OUT_DIR or the working dir.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Trace format: csv | json
    #[arg(long, default_value = "csv")]
    format: String,
    /// Suppress the summary line on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Trace files produced by `run`.
    traces: Vec<PathBuf>,
    /// Also write a machine-readable summary.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Dimensions as <n>,<m>,<q>,<seed>.
    #[arg(long)]
    spec: String,
    #[arg(long, short)]
    out: PathBuf,
}

#[derive(Args)]
struct BatchArgs {
    /// File with one `run` argument list per line (# comments allowed).
    file: PathBuf,
    /// Worker threads.
    #[arg(long, default_value_t = 2)]
    jobs: usize,
}

const EXIT_RUNTIME: i32 = 1;
const EXIT_MAX_ITERS: i32 = 2;
const EXIT_LINE_SEARCH: i32 = 3;
const EXIT_INVALID: i32 = 4;
const EXIT_STATIONARY: i32 = 5;

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Report(args) => cmd_report(&args),
        Command::GenInstance(args) => cmd_gen(&args),
        Command::Batch(args) => cmd_batch(&args),
    };
    std::process::exit(code);
}

fn cmd_run(args: &RunArgs) -> i32 {
    if args.format != "csv" && args.format != "json" {
        eprintln!("invalid configuration: format must be csv|json");
        return EXIT_INVALID;
    }
    let overrides = RunOverrides {
        theta: args.theta.clone(),
        tol_f: args.tol_f,
        tol_stationarity: args.tol_stationarity,
        max_iters: args.max_iters,
        max_backtracks: args.max_backtracks,
        memory: args.memory,
        eta1: args.eta1,
        eta2: args.eta2,
        eta3: args.eta3,
        gamma: args.gamma,
        beta: args.beta,
        condg_budget: args.condg_budget,
        initial_rank: args.initial_rank,
        force_iterative: args.force_iterative,
        start_a: args.start_a,
        start: args.start.clone(),
    };
    let plan = match build_plan(
        &args.problem,
        &args.method,
        &args.projection,
        args.preset.as_deref(),
        &overrides,
    ) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID;
        }
    };

    let started = Instant::now();
    let solved = match plan.method {
        Method::Global => global::solve(plan.problem.as_ref(), &plan.start, &plan.global),
        Method::Local => local::solve(plan.problem.as_ref(), &plan.start, &plan.local),
    };
    let result = match solved {
        Ok(r) => r,
        Err(e) => {
            eprintln!("run failed: {e}");
            return EXIT_RUNTIME;
        }
    };
    let elapsed_ms = started.elapsed().as_secs_f64() * 1000.0;
    let summary = RunSummary::from_result(&result, elapsed_ms);

    if let Err(e) = write_trace(args, &plan.meta, &summary, &result) {
        eprintln!("failed to write trace: {e}");
        return EXIT_RUNTIME;
    }
    if !args.quiet {
        println!("{}", summary.one_line());
    }
    match result.status {
        SolveStatus::Converged => 0,
        SolveStatus::MaxIters => EXIT_MAX_ITERS,
        SolveStatus::LineSearchFail => EXIT_LINE_SEARCH,
        SolveStatus::Stationary => EXIT_STATIONARY,
    }
}

fn write_trace(
    args: &RunArgs,
    meta: &RunMeta,
    summary: &RunSummary,
    result: &SolveResult,
) -> std::io::Result<()> {
    let path = match &args.out {
        Some(p) => p.clone(),
        None => {
            let dir = std::env::var_os("LMPROJ_OUT_DIR")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("."));
            let stem: String = format!(
                "{}_{}_{}",
                meta.problem, meta.method, meta.projection
            )
            .chars()
            .map(|c| if c.is_alphanumeric() { c } else { '-' })
            .collect();
            dir.join(format!("{stem}.{}", args.format))
        }
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let content = match args.format.as_str() {
        "json" => serde_json::to_string_pretty(&to_json(meta, summary, &result.trace))
            .expect("serializable")
            + "\n",
        _ => to_csv(meta, summary, &result.trace),
    };
    std::fs::write(&path, content)?;
    if !args.quiet {
        println!("trace: {}", path.display());
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> i32 {
    if args.traces.is_empty() {
        eprintln!("report needs at least one trace file");
        return EXIT_INVALID;
    }
    let mut loaded = Vec::new();
    for path in &args.traces {
        match report::load(path) {
            Ok(t) => loaded.push(t),
            Err(e) => {
                eprintln!("malformed trace: {e}");
                return EXIT_RUNTIME;
            }
        }
    }
    print!("{}", report::render_table(&loaded));
    if let Some(path) = &args.json {
        let json = report::to_json(&loaded);
        if let Err(e) = std::fs::write(path, serde_json::to_string_pretty(&json).unwrap()) {
            eprintln!("failed to write {}: {e}", path.display());
            return EXIT_RUNTIME;
        }
    }
    0
}

fn cmd_gen(args: &GenArgs) -> i32 {
    let parts: Vec<&str> = args.spec.split(',').collect();
    if parts.len() != 4 {
        eprintln!("invalid configuration: --spec needs <n>,<m>,<q>,<seed>");
        return EXIT_INVALID;
    }
    let nums: Result<Vec<u64>, _> = parts.iter().map(|p| p.trim().parse()).collect();
    let nums = match nums {
        Ok(v) => v,
        Err(_) => {
            eprintln!("invalid configuration: bad integer in --spec");
            return EXIT_INVALID;
        }
    };
    let inst = match gen_spectra_instance(nums[0] as usize, nums[1] as usize, nums[2] as usize, nums[3]) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("invalid configuration: {e}");
            return EXIT_INVALID;
        }
    };
    match write_instance(&inst, &args.out) {
        Ok(()) => {
            println!("instance: {}", args.out.display());
            0
        }
        Err(e) => {
            eprintln!("failed to write instance: {e}");
            EXIT_RUNTIME
        }
    }
}

/// Each batch line is a full `run` argument list; lines run concurrently
/// on a small thread pool, each with private state and its own output
/// file. Exit 0 when every run converged, otherwise the worst exit code.
fn cmd_batch(args: &BatchArgs) -> i32 {
    let content = match std::fs::read_to_string(&args.file) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.file.display());
            return EXIT_RUNTIME;
        }
    };
    let lines: Vec<String> = content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect();
    if lines.is_empty() {
        eprintln!("batch file has no runnable lines");
        return EXIT_INVALID;
    }

    let exe = std::env::current_exe().expect("own path");
    let jobs = args.jobs.max(1);
    let results: Vec<(String, i32)> = std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in lines.chunks(lines.len().div_ceil(jobs)) {
            let exe = exe.clone();
            handles.push(scope.spawn(move || {
                chunk
                    .iter()
                    .map(|line| {
                        let words: Vec<String> = line.split_whitespace().map(String::from).collect();
                        let status = std::process::Command::new(&exe)
                            .arg("run")
                            .args(&words)
                            .status();
                        let code = status.ok().and_then(|s| s.code()).unwrap_or(EXIT_RUNTIME);
                        (line.clone(), code)
                    })
                    .collect::<Vec<_>>()
            }));
        }
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("batch worker"))
            .collect()
    });

    let mut worst = 0;
    for (line, code) in &results {
        println!("[exit {code}] {line}");
        worst = worst.max(*code);
    }
    worst
}
