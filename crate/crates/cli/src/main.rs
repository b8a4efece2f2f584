//! `dirtymodel` command-line front end.

mod manifest;
mod range;
mod svg;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use dirtymodel::certify::{check_kkt, KktTolerance};
use dirtymodel::decompose::{check_star_properties, depth_for, h_transform};
use dirtymodel::digits::{
    digits_cv_grid, load_mfeat, mfeat_dir_from_env, run_digits, scale_features, write_digits_csv, DigitsRun,
    PER_DIGIT,
};
use dirtymodel::experiments::{
    baseline_threshold, cv_select, lambda_unit, predicted_threshold, sweep_phase, thresholds,
    write_threshold_csv, CvGrid, SweepPoint, SweepTable, TheoryParams, TrialPlan,
};
use dirtymodel::solver::{solve, SolverConfig, SolverMode};
use dirtymodel::sparsity::{signed_support, DEFAULT_FILTER_THRESHOLD};
use dirtymodel::synth::{
    generate_instance, read_coefficients, read_problem, write_coefficients, write_problem, InstanceSpec,
};
use dirtymodel::{DirtyPair, RegPair};

use manifest::RunManifest;
use range::parse_values;

/// Dirty-model multi-task regression: solver, certificates and experiments.
#[derive(Parser, Debug)]
#[command(name = "dirtymodel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit one problem and print the objective, signed support and KKT report.
    Solve(SolveArgs),
    /// Success rate of signed-support recovery over a θ grid (CSV).
    Sweep(SweepArgs),
    /// 50% recovery thresholds per method and α (CSV).
    Threshold(ThresholdArgs),
    /// Analytic threshold predictions.
    Predict(PredictArgs),
    /// Split a coefficient matrix into block and sparse parts.
    Decompose(DecomposeArgs),
    /// Check optimality conditions for a given (B, S) pair.
    Certify(CertifyArgs),
    /// Handwritten-digits study (CSV).
    Digits(DigitsArgs),
}

#[derive(Args, Debug, Clone)]
struct SolverFlags {
    /// Relative objective change that stops the solver.
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    max_sweeps: usize,
    /// Magnitudes at or below this are treated as zero.
    #[arg(long, default_value_t = DEFAULT_FILTER_THRESHOLD)]
    filter: f64,
}

impl SolverFlags {
    fn config(&self, mode: SolverMode) -> SolverConfig {
        SolverConfig {
            epsilon: self.epsilon,
            max_sweeps: self.max_sweeps,
            mode,
            filter_threshold: self.filter,
        }
    }
}

#[derive(Args, Debug)]
struct SolveArgs {
    /// Problem file (header `p r n`, then r·n rows of design values followed by y).
    /// Without it a synthetic instance is drawn from --p/--alpha/--n/--seed.
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    p: usize,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    alpha: f64,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Seed for the synthetic instance.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lambda_s: Option<f64>,
    #[arg(long)]
    lambda_b: Option<f64>,
    /// Pick λ on the synthetic test split instead of --lambda-s/--lambda-b.
    #[arg(long)]
    cv: bool,
    /// dirty, lasso or linf.
    #[arg(long, default_value = "dirty")]
    mode: SolverMode,
    #[command(flatten)]
    solver: SolverFlags,
    /// Write B here (coefficient file format).
    #[arg(long)]
    save_b: Option<PathBuf>,
    /// Write S here.
    #[arg(long)]
    save_s: Option<PathBuf>,
    /// Write the training problem here (problem file format).
    #[arg(long)]
    save_problem: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, default_value_t = 128)]
    p: usize,
    /// Per-task support size; defaults to ⌊p/10⌋.
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    alpha: f64,
    /// θ grid: `start:stop:step` (stop excluded, 1e-9 tolerance) or a comma list.
    #[arg(long, default_value = "0.2:3.2:0.2")]
    theta: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Comma list of dirty, lasso, linf.
    #[arg(long, default_value = "dirty,lasso,linf")]
    methods: String,
    /// Base seed; every trial seed derives from it.
    #[arg(long, required = true)]
    seed: u64,
    /// Worker threads; output does not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    solver: SolverFlags,
    /// Output CSV path, or `-` for standard output.
    #[arg(long, default_value = "-")]
    out: String,
    /// Also draw the curves to this SVG file.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ThresholdArgs {
    /// Sweep CSV files to read instead of running new sweeps.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    input: Vec<PathBuf>,
    #[arg(long, default_value_t = 128)]
    p: usize,
    /// α values: comma list or `start:stop:step`.
    #[arg(long, default_value = "0.3,0.6667,0.8")]
    alpha: String,
    #[arg(long, default_value = "0.2:3.2:0.2")]
    theta: String,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value = "dirty,lasso,linf")]
    methods: String,
    /// Required unless --input is given.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, default_value = "-")]
    out: String,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// α: a value, comma list or `start:stop:step`. Several values print a CSV.
    #[arg(long)]
    alpha: String,
    /// Share of the common support whose magnitudes differ across tasks.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// λb/λs, strictly between 1 and 2.
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    kappa: f64,
    /// Decimal places kept when printing.
    #[arg(long, default_value_t = 8)]
    precision: usize,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    /// Coefficient file (header `p r n`, then p rows of r values).
    #[arg(long)]
    input: PathBuf,
    /// Clip depth d; derived from --lambda-s/--lambda-b when absent.
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    lambda_s: Option<f64>,
    #[arg(long)]
    lambda_b: Option<f64>,
    #[arg(long)]
    out_b: Option<PathBuf>,
    #[arg(long)]
    out_s: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long)]
    s: PathBuf,
    #[arg(long)]
    lambda_s: f64,
    #[arg(long)]
    lambda_b: f64,
    #[arg(long, default_value_t = DEFAULT_FILTER_THRESHOLD)]
    filter: f64,
    /// Absolute slack; defaults to 1e-4·λ for each condition.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args, Debug)]
struct DigitsArgs {
    /// Directory with mfeat-{pix,fou,kar,fac,zer,mor}; falls back to MFEAT_DIR.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Training fractions n/200.
    #[arg(long, default_value = "0.05,0.1,0.2")]
    fractions: String,
    #[arg(long, default_value = "dirty,linf,lasso")]
    methods: String,
    #[arg(long, required = true)]
    seed: u64,
    /// Independent splits; seeds are seed, seed+1, …
    #[arg(long, default_value_t = 1)]
    repeats: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long, default_value = "-")]
    out: String,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<dirtymodel::Error> for Failure {
    fn from(e: dirtymodel::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn values(flag: &str, text: &str) -> Result<Vec<f64>, Failure> {
    let v = parse_values(text).map_err(|e| usage(format!("--{flag}: {e}")))?;
    if v.is_empty() {
        return Err(usage(format!("--{flag}: empty grid")));
    }
    Ok(v)
}

fn methods(text: &str) -> Result<Vec<SolverMode>, Failure> {
    text.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| t.trim().parse::<SolverMode>().map_err(|e| usage(format!("--methods: {e}"))))
        .collect()
}

/// Output sink; `-` is standard output.
fn open_out(out: &str) -> Result<Box<dyn Write>, Failure> {
    if out == "-" {
        Ok(Box::new(std::io::stdout().lock()))
    } else {
        let file = File::create(out).map_err(|e| Failure::Runtime(format!("{out}: {e}")))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

struct Run {
    command: &'static str,
    seed: Option<u64>,
    started: Instant,
}

impl Run {
    fn new(command: &'static str, seed: Option<u64>) -> Self {
        Self {
            command,
            seed,
            started: Instant::now(),
        }
    }

    /// Records a manifest beside `path` unless it is standard output.
    fn finish(&self, path: &str) -> CmdResult {
        if path == "-" {
            return Ok(());
        }
        let m = RunManifest {
            command: self.command.to_string(),
            args: std::env::args().skip(1).collect(),
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION"),
            duration_secs: self.started.elapsed().as_secs_f64(),
        };
        manifest::write(&m, Path::new(path))?;
        Ok(())
    }
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    let run = Run::new("solve", a.seed);
    let config = a.solver.config(a.mode);
    let (train, test, truth) = match &a.problem {
        Some(path) => (read_problem(path)?, None, None),
        None => {
            let seed = a.seed.ok_or_else(|| usage("--seed is required for a synthetic instance"))?;
            let spec = InstanceSpec {
                sigma: a.sigma,
                ..InstanceSpec::new(a.p, a.alpha, a.n, seed)
            };
            let inst = generate_instance(&spec)?;
            (inst.train, Some(inst.test), Some(inst.truth))
        }
    };
    let (reg, fit) = if a.cv {
        let test = test.as_ref().ok_or_else(|| usage("--cv needs a synthetic instance"))?;
        let unit = lambda_unit(train.r(), train.p(), train.n());
        let out = cv_select(&train, test, &CvGrid::two_task_default(), unit, &config)?;
        let fit = solve(&train, &out.reg, &config, Some(&out.pair))?;
        (out.reg, fit)
    } else {
        let (ls, lb) = match (a.mode, a.lambda_s, a.lambda_b) {
            (SolverMode::Dirty, Some(ls), Some(lb)) => (ls, lb),
            (SolverMode::LassoOnly, Some(ls), lb) => (ls, lb.unwrap_or(0.0)),
            (SolverMode::LinfOnly, ls, Some(lb)) => (ls.unwrap_or(0.0), lb),
            _ => return Err(usage("give --lambda-s/--lambda-b for the chosen mode, or --cv")),
        };
        let reg = match a.mode {
            SolverMode::Dirty => RegPair::new(ls, lb, train.r())?,
            _ => RegPair::unconstrained(ls, lb)?,
        };
        let fit = solve(&train, &reg, &config, None)?;
        (reg, fit)
    };
    let support = signed_support(&fit.pair.theta(), config.filter_threshold);
    let mut out = std::io::stdout().lock();
    writeln!(out, "mode: {}", a.mode.name())?;
    writeln!(out, "lambda_s: {}", reg.lambda_s())?;
    writeln!(out, "lambda_b: {}", reg.lambda_b())?;
    writeln!(out, "objective: {}", fit.objective())?;
    writeln!(out, "sweeps: {}", fit.sweeps_used)?;
    writeln!(out, "converged: {}", fit.converged)?;
    writeln!(out, "support_size: {}", support.nnz())?;
    if let Some(truth) = &truth {
        writeln!(out, "support_recovered: {}", support == truth.sign_support)?;
    }
    writeln!(out, "signed_support:")?;
    for (j, row) in support.as_array().rows().into_iter().enumerate() {
        if row.iter().any(|v| *v != 0) {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:+}")).collect();
            writeln!(out, "  {j}: {}", cells.join(" "))?;
        }
    }
    let report = check_kkt(&train, &fit.pair, &reg, config.filter_threshold, KktTolerance::relative(&reg))?;
    write!(out, "{report}")?;
    if let Some(path) = &a.save_problem {
        write_problem(&train, path)?;
        run.finish(&path.to_string_lossy())?;
    }
    for (path, m) in [(&a.save_b, &fit.pair.b), (&a.save_s, &fit.pair.s)] {
        if let Some(path) = path {
            write_coefficients(m, train.n(), path)?;
            run.finish(&path.to_string_lossy())?;
        }
    }
    Ok(())
}

fn instance_template(p: usize, s: Option<usize>, alpha: f64, sigma: f64, seed: u64) -> Result<InstanceSpec, Failure> {
    let base = InstanceSpec::new(p, alpha, 1, seed);
    let spec = InstanceSpec {
        s: s.unwrap_or(base.s),
        sigma,
        ..base
    };
    spec.validate().map_err(|e| usage(e.to_string()))?;
    Ok(spec)
}

fn log_point(p: &SweepPoint) {
    eprintln!(
        "{} alpha={} theta={} n={} successes={}/{}",
        p.method.name(),
        p.alpha,
        p.theta,
        p.n,
        p.successes,
        p.trials
    );
}

fn cmd_sweep(a: SweepArgs) -> CmdResult {
    let run = Run::new("sweep", Some(a.seed));
    let thetas = values("theta", &a.theta)?;
    let methods = methods(&a.methods)?;
    if a.trials == 0 {
        return Err(usage("--trials must be positive"));
    }
    let template = instance_template(a.p, a.s, a.alpha, a.sigma, a.seed)?;
    let plan = TrialPlan {
        grid: CvGrid::two_task_default(),
        config: a.solver.config(SolverMode::Dirty),
        trials: a.trials,
        workers: a.workers,
    };
    let table = sweep_phase(&template, &thetas, &methods, &plan, log_point)?;
    let mut out = open_out(&a.out)?;
    table.write_csv(&mut out)?;
    out.flush()?;
    drop(out);
    run.finish(&a.out)?;
    if let Some(path) = &a.svg {
        let title = format!("p = {}, alpha = {}", a.p, a.alpha);
        svg::emit_svg(&table, path, &title).map_err(Failure::Runtime)?;
        run.finish(&path.to_string_lossy())?;
    }
    Ok(())
}

/// Reads sweep CSV rows written by `sweep`.
fn read_sweep_csv(path: &Path) -> Result<Vec<SweepPoint>, Failure> {
    let file = File::open(path).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))?;
    let mut points = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let bad = || Failure::Runtime(format!("{}:{}: malformed sweep row", path.display(), i + 1));
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad());
        }
        points.push(SweepPoint {
            method: f[0].parse().map_err(|_| bad())?,
            p: f[1].parse().map_err(|_| bad())?,
            s: f[2].parse().map_err(|_| bad())?,
            alpha: f[3].parse().map_err(|_| bad())?,
            theta: f[4].parse().map_err(|_| bad())?,
            n: f[5].parse().map_err(|_| bad())?,
            trials: f[6].parse().map_err(|_| bad())?,
            successes: f[7].parse().map_err(|_| bad())?,
        });
    }
    Ok(points)
}

fn cmd_threshold(a: ThresholdArgs) -> CmdResult {
    let run = Run::new("threshold", a.seed);
    let mut tables: Vec<SweepTable> = Vec::new();
    if !a.input.is_empty() {
        for path in &a.input {
            let points = read_sweep_csv(path)?;
            // One table per α so that each method's curve stays single-valued.
            let mut alphas: Vec<f64> = Vec::new();
            for p in &points {
                if !alphas.contains(&p.alpha) {
                    alphas.push(p.alpha);
                }
            }
            for alpha in alphas {
                tables.push(SweepTable {
                    points: points.iter().filter(|p| p.alpha == alpha).cloned().collect(),
                });
            }
        }
    } else {
        let seed = a.seed.ok_or_else(|| usage("--seed is required unless --input is given"))?;
        let thetas = values("theta", &a.theta)?;
        let methods = methods(&a.methods)?;
        let plan = TrialPlan {
            grid: CvGrid::two_task_default(),
            config: a.solver.config(SolverMode::Dirty),
            trials: a.trials,
            workers: a.workers,
        };
        for alpha in values("alpha", &a.alpha)? {
            let template = instance_template(a.p, None, alpha, a.sigma, seed)?;
            tables.push(sweep_phase(&template, &thetas, &methods, &plan, log_point)?);
        }
    }
    let mut rows = Vec::new();
    for table in &tables {
        rows.extend(thresholds(table)?);
    }
    let mut out = open_out(&a.out)?;
    write_threshold_csv(&rows, &mut out)?;
    out.flush()?;
    drop(out);
    run.finish(&a.out)
}

fn rounded(v: f64, places: usize) -> f64 {
    let scale = 10f64.powi(places.min(15) as i32);
    (v * scale).round() / scale
}

fn cmd_predict(a: PredictArgs) -> CmdResult {
    let alphas = values("alpha", &a.alpha)?;
    let mut out = std::io::stdout().lock();
    let dirty = |alpha: f64| -> Result<f64, Failure> {
        let params = TheoryParams::new(a.kappa, a.tau, alpha).map_err(|e| usage(e.to_string()))?;
        Ok(predicted_threshold(&params))
    };
    if let [alpha] = alphas[..] {
        writeln!(out, "{}", rounded(dirty(alpha)?, a.precision))?;
        return Ok(());
    }
    writeln!(out, "alpha,tau,kappa,dirty,lasso,linf")?;
    for alpha in alphas {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            alpha,
            a.tau,
            a.kappa,
            rounded(dirty(alpha)?, a.precision),
            baseline_threshold(SolverMode::LassoOnly, alpha)?,
            rounded(baseline_threshold(SolverMode::LinfOnly, alpha)?, a.precision)
        )?;
    }
    Ok(())
}

fn cmd_decompose(a: DecomposeArgs) -> CmdResult {
    let run = Run::new("decompose", None);
    let theta = read_coefficients(&a.input)?;
    let d = match (a.d, a.lambda_s, a.lambda_b) {
        (Some(d), _, _) => d,
        (None, Some(ls), Some(lb)) => depth_for(&RegPair::new(ls, lb, theta.r())?),
        _ => return Err(usage("give --d or both --lambda-s and --lambda-b")),
    };
    let pair = h_transform(&theta, d)?;
    let star = check_star_properties(&pair, d);
    let mut out = std::io::stdout().lock();
    writeln!(out, "d: {d}")?;
    writeln!(out, "star_p1: {}", star.p1)?;
    writeln!(out, "star_p2: {}", star.p2)?;
    writeln!(out, "star_p3: {}", star.p3)?;
    for (label, path, m) in [("B", &a.out_b, &pair.b), ("S", &a.out_s, &pair.s)] {
        match path {
            Some(path) => {
                write_coefficients(m, 0, path)?;
                run.finish(&path.to_string_lossy())?;
            }
            None => {
                writeln!(out, "{label}:")?;
                for row in m.as_array().rows() {
                    let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                    writeln!(out, "  {}", cells.join(" "))?;
                }
            }
        }
    }
    Ok(())
}

fn cmd_certify(a: CertifyArgs) -> CmdResult {
    let problem = read_problem(&a.problem)?;
    let pair = DirtyPair::new(read_coefficients(&a.b)?, read_coefficients(&a.s)?)?;
    let reg = RegPair::new(a.lambda_s, a.lambda_b, problem.r())?;
    let tol = match a.tol {
        Some(t) if t > 0.0 => KktTolerance::uniform(t),
        Some(t) => return Err(usage(format!("--tol must be positive, got {t}"))),
        None => KktTolerance::relative(&reg),
    };
    let report = check_kkt(&problem, &pair, &reg, a.filter, tol)?;
    print!("{report}");
    Ok(())
}

fn cmd_digits(a: DigitsArgs) -> CmdResult {
    let run = Run::new("digits", Some(a.seed));
    let dir = a
        .data
        .clone()
        .or_else(mfeat_dir_from_env)
        .ok_or_else(|| usage("give --data or set MFEAT_DIR"))?;
    let fractions = values("fractions", &a.fractions)?;
    let methods = methods(&a.methods)?;
    let mut sizes = Vec::new();
    for f in &fractions {
        let n = (f * PER_DIGIT as f64).round() as usize;
        if !(2..=PER_DIGIT - 1).contains(&n) {
            return Err(usage(format!("--fractions: {f} gives {n} rows per digit, need 2..=199")));
        }
        sizes.push(n);
    }
    let ds = scale_features(&load_mfeat(&dir)?)?;
    let grid = digits_cv_grid();
    let mut jobs = Vec::new();
    for (fi, &n) in sizes.iter().enumerate() {
        for &m in &methods {
            for r in 0..a.repeats {
                jobs.push((fi, n, m, a.seed.wrapping_add(r)));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.workers.max(1))
        .build()
        .map_err(|e| Failure::Runtime(e.to_string()))?;
    let runs: Vec<DigitsRun> = pool.install(|| {
        use rayon::prelude::*;
        jobs.par_iter()
            .map(|&(_, n, m, seed)| run_digits(&ds, n, seed, &grid, &a.solver.config(m)))
            .collect::<dirtymodel::Result<_>>()
    })?;
    // Jobs are grouped by (fraction, method) with the repeats innermost.
    for (job, group) in jobs.chunks(a.repeats.max(1) as usize).zip(runs.chunks(a.repeats.max(1) as usize)) {
        let (fi, _, m, _) = job[0];
        let k = group.len() as f64;
        let mean = group.iter().map(|r| r.metrics.mean_error).sum::<f64>() / k;
        let mis = group.iter().map(|r| r.metrics.misclassification).sum::<f64>() / k;
        eprintln!(
            "fraction={} method={} mean_error={mean:.5} misclassification={mis:.5} splits={}",
            fractions[fi],
            m.name(),
            group.len()
        );
    }
    let rows: Vec<(f64, &DigitsRun)> = jobs.iter().zip(&runs).map(|(j, r)| (fractions[j.0], r)).collect();
    let mut out = open_out(&a.out)?;
    write_digits_csv(&rows, &mut out)?;
    out.flush()?;
    drop(out);
    run.finish(&a.out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Digits(a) => cmd_digits(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run with --help for usage");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
