//! Regularization selection, Monte-Carlo support-recovery rates, phase
//! sweeps, 50% thresholds and the analytic threshold predictors.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::solver::{precompute, solve_cached, SolverConfig, SolverMode};
use crate::sparsity::signed_support;
use crate::synth::{generate_instance, n_for_theta, InstanceSpec};
use crate::types::{DirtyPair, MultiTaskProblem, RegPair};

/// `count` points spaced evenly in log between `lo` and `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Search grid: `λb = c · base` for each `c`, and `λs = ratio · λb`.
#[derive(Debug, Clone, PartialEq)]
pub struct CvGrid {
    pub c_values: Vec<f64>,
    pub ratio_values: Vec<f64>,
}

impl CvGrid {
    pub fn new(c_values: Vec<f64>, ratio_values: Vec<f64>) -> Result<Self> {
        if c_values.is_empty() || ratio_values.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if c_values.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return Err(Error::InvalidArgument("c values must be positive".into()));
        }
        if ratio_values.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(Error::InvalidArgument(
                "lambda_s / lambda_b ratios must lie in (0, 1]".into(),
            ));
        }
        Ok(Self {
            c_values,
            ratio_values,
        })
    }

    /// 30 log-spaced `c` in `[0.01, 100]`, ratios `0.55, 0.60, …, 0.95`.
    pub fn two_task_default() -> Self {
        Self {
            c_values: log_spaced(0.01, 100.0, 30),
            ratio_values: (0..9).map(|i| 0.55 + 0.05 * i as f64).collect(),
        }
    }

    pub fn cells(&self) -> usize {
        self.c_values.len() * self.ratio_values.len()
    }
}

/// `√(r · ln p / n)`, the unit that the `c` grid multiplies.
pub fn lambda_unit(r: usize, p: usize, n: usize) -> f64 {
    (r as f64 * (p as f64).ln() / n as f64).sqrt()
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub reg: RegPair,
    pub pair: DirtyPair,
    pub score: f64,
    /// `(c index, ratio index)` of the winning cell.
    pub cell: (usize, usize),
}

/// Regularization pair for grid cell `(c, ratio)` under `method`.
fn cell_reg(method: SolverMode, lambda: f64, ratio: f64, r: usize) -> Result<RegPair> {
    match method {
        SolverMode::Dirty => RegPair::new(ratio * lambda, lambda, r),
        SolverMode::LassoOnly => RegPair::unconstrained(lambda, 0.0),
        SolverMode::LinfOnly => RegPair::unconstrained(0.0, lambda),
    }
}

/// Fits every grid cell on `train` and keeps the one with the smallest
/// unpenalized squared loss of the filtered fit on `test`.
///
/// Cells run with `c` ascending, then ratio ascending, each warm-started from
/// the previous solution. The baselines ignore the ratio axis. Ties go to the
/// earliest cell.
pub fn cv_select(
    train: &MultiTaskProblem,
    test: &MultiTaskProblem,
    grid: &CvGrid,
    unit: f64,
    config: &SolverConfig,
) -> Result<CvOutcome> {
    if grid.c_values.is_empty() || grid.ratio_values.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if (train.p(), train.r()) != (test.p(), test.r()) {
        return Err(Error::Shape("train and test problems differ in shape".into()));
    }
    let ratios: &[f64] = match config.mode {
        SolverMode::Dirty => &grid.ratio_values,
        _ => &grid.ratio_values[..1],
    };
    let cache = precompute(train);
    let mut warm: Option<DirtyPair> = None;
    let mut best: Option<CvOutcome> = None;
    for (ci, &c) in grid.c_values.iter().enumerate() {
        for (ri, &ratio) in ratios.iter().enumerate() {
            let reg = cell_reg(config.mode, c * unit, ratio, train.r())?;
            let fit = solve_cached(&cache, &reg, config, warm.as_ref())?;
            let theta = fit.pair.theta().filtered(config.filter_threshold);
            let score = test.squared_loss(&theta)?;
            if best.as_ref().is_none_or(|b| score < b.score) {
                best = Some(CvOutcome {
                    reg,
                    pair: fit.pair.clone(),
                    score,
                    cell: (ci, ri),
                });
            }
            warm = Some(fit.pair);
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one Monte-Carlo trial; independent of scheduling.
pub fn trial_seed(base: u64, method: SolverMode, theta_index: usize, trial: usize) -> u64 {
    let tag = match method {
        SolverMode::Dirty => 1,
        SolverMode::LassoOnly => 2,
        SolverMode::LinfOnly => 3,
    };
    [tag, theta_index as u64, trial as u64]
        .into_iter()
        .fold(mix(base), |h, v| mix(h ^ v))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub method: SolverMode,
    pub p: usize,
    pub s: usize,
    pub alpha: f64,
    pub theta: f64,
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
}

impl SweepPoint {
    pub fn success_rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Everything a Monte-Carlo run needs besides the instance shape.
#[derive(Debug, Clone)]
pub struct TrialPlan {
    pub grid: CvGrid,
    pub config: SolverConfig,
    pub trials: usize,
    /// Worker threads; results do not depend on it.
    pub workers: usize,
}

fn run_parallel<T, F>(workers: usize, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| (0..count).into_par_iter().map(f).collect())
}

/// Whether one trial with the given seed recovers the signed support.
pub fn trial_succeeds(spec: &InstanceSpec, grid: &CvGrid, config: &SolverConfig) -> Result<bool> {
    let inst = generate_instance(spec)?;
    let unit = lambda_unit(spec.r, spec.p, spec.n);
    let out = cv_select(&inst.train, &inst.test, grid, unit, config)?;
    let recovered = signed_support(&out.pair.theta(), config.filter_threshold);
    Ok(recovered == inst.truth.sign_support)
}

/// Fraction of `plan.trials` instances whose signed support is recovered
/// exactly by the cross-validated fit. `spec.seed` is the base seed.
pub fn success_probability(
    spec: &InstanceSpec,
    theta: f64,
    theta_index: usize,
    plan: &TrialPlan,
) -> Result<SweepPoint> {
    if plan.trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    spec.validate()?;
    let method = plan.config.mode;
    let outcomes = run_parallel(plan.workers, plan.trials, |t| {
        let trial = InstanceSpec {
            seed: trial_seed(spec.seed, method, theta_index, t),
            ..*spec
        };
        trial_succeeds(&trial, &plan.grid, &plan.config)
    })?;
    Ok(SweepPoint {
        method,
        p: spec.p,
        s: spec.s,
        alpha: spec.alpha,
        theta,
        n: spec.n,
        trials: plan.trials,
        successes: outcomes.into_iter().filter(|ok| *ok).count(),
    })
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepTable {
    pub points: Vec<SweepPoint>,
}

impl SweepTable {
    pub fn methods(&self) -> Vec<SolverMode> {
        let mut out: Vec<SolverMode> = Vec::new();
        for p in &self.points {
            if !out.contains(&p.method) {
                out.push(p.method);
            }
        }
        out
    }

    pub fn curve(&self, method: SolverMode) -> Vec<&SweepPoint> {
        self.points.iter().filter(|p| p.method == method).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "method,p,s,alpha,theta,n,trials,successes,success_rate")?;
        for p in &self.points {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                p.method.name(),
                p.p,
                p.s,
                p.alpha,
                p.theta,
                p.n,
                p.trials,
                p.successes,
                p.success_rate()
            )?;
        }
        Ok(())
    }
}

/// Success rates over `theta_grid` for each method, with `n = n_for_theta(θ)`.
/// `template.n` is ignored. `on_point` sees each point as it completes.
pub fn sweep_phase(
    template: &InstanceSpec,
    theta_grid: &[f64],
    methods: &[SolverMode],
    plan: &TrialPlan,
    mut on_point: impl FnMut(&SweepPoint),
) -> Result<SweepTable> {
    if theta_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("theta grid must be increasing".into()));
    }
    let mut table = SweepTable::default();
    for &method in methods {
        let method_plan = TrialPlan {
            config: SolverConfig {
                mode: method,
                ..plan.config
            },
            ..plan.clone()
        };
        for (i, &theta) in theta_grid.iter().enumerate() {
            let n = n_for_theta(theta, template.p, template.s, template.effective_alpha())?;
            let spec = InstanceSpec { n, ..*template };
            let point = success_probability(&spec, theta, i, &method_plan)?;
            on_point(&point);
            table.points.push(point);
        }
    }
    Ok(table)
}

/// First upward crossing of 0.5 by linear interpolation between the
/// bracketing points. A point exactly at 0.5 returns its abscissa. `None`
/// when the curve never crosses, or starts above 0.5 (no bracket).
pub fn threshold_50(curve: &[(f64, f64)]) -> Option<f64> {
    crossing(curve).map(|(x, _)| x)
}

/// Crossing abscissa and the slope of the bracketing segment (`None` for an
/// exact hit).
fn crossing(curve: &[(f64, f64)]) -> Option<(f64, Option<f64>)> {
    let first = curve.first()?;
    if first.1 == 0.5 {
        return Some((first.0, None));
    }
    if first.1 > 0.5 {
        return None;
    }
    for w in curve.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y1 == 0.5 {
            return Some((x1, None));
        }
        if y0 < 0.5 && y1 > 0.5 {
            let slope = (y1 - y0) / (x1 - x0);
            return Some((x0 + (0.5 - y0) / slope, Some(slope)));
        }
    }
    None
}

/// 50% crossing in raw sample counts with a Monte-Carlo standard error:
/// the binomial error of a rate near 0.5, `√(0.25 / trials)`, divided by the
/// local slope of the success curve.
pub fn n_star_with_error(points: &[&SweepPoint]) -> Option<(f64, f64)> {
    let curve: Vec<(f64, f64)> = points.iter().map(|p| (p.n as f64, p.success_rate())).collect();
    let (n_star, slope) = crossing(&curve)?;
    let trials = points.iter().map(|p| p.trials).min().unwrap_or(1) as f64;
    let rate_se = (0.25 / trials).sqrt();
    let se = match slope {
        Some(s) => rate_se / s,
        // Exact hit: fall back to half the local grid spacing.
        None => {
            let gaps: Vec<f64> = curve.windows(2).map(|w| w[1].0 - w[0].0).collect();
            gaps.iter().copied().fold(f64::INFINITY, f64::min) / 2.0
        }
    };
    Some((n_star, se))
}

/// `n / (s · ln(p − s))` for the lasso and `n / (s · ln(p − (2−α)s))` for
/// the other two methods: the scale on which each method's own transition
/// constant is stated.
pub fn method_theta(method: SolverMode, n: f64, p: usize, s: usize, alpha: f64) -> Result<f64> {
    let rows = match method {
        SolverMode::LassoOnly => s as f64,
        _ => (2.0 - alpha) * s as f64,
    };
    let arg = p as f64 - rows;
    if !(arg > 1.0) {
        return Err(Error::LogArgument(arg));
    }
    Ok(n / (s as f64 * arg.ln()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdRow {
    pub method: SolverMode,
    pub p: usize,
    pub s: usize,
    pub alpha: f64,
    /// Crossing on [`method_theta`]'s scale.
    pub theta_star: Option<f64>,
    pub n_star: Option<f64>,
    pub n_star_se: Option<f64>,
}

/// One row per method of `table`.
pub fn thresholds(table: &SweepTable) -> Result<Vec<ThresholdRow>> {
    let mut rows = Vec::new();
    for method in table.methods() {
        let curve = table.curve(method);
        let first = curve[0];
        let found = n_star_with_error(&curve);
        let theta_star = found
            .map(|(n, _)| method_theta(method, n, first.p, first.s, first.alpha))
            .transpose()?;
        rows.push(ThresholdRow {
            method,
            p: first.p,
            s: first.s,
            alpha: first.alpha,
            theta_star,
            n_star: found.map(|f| f.0),
            n_star_se: found.map(|f| f.1),
        });
    }
    Ok(rows)
}

/// Missing crossings are written as empty fields.
pub fn write_threshold_csv<W: Write>(rows: &[ThresholdRow], mut out: W) -> Result<()> {
    writeln!(out, "method,p,s,alpha,theta_star,n_star")?;
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.method.name(),
            r.p,
            r.s,
            r.alpha,
            opt(r.theta_star),
            opt(r.n_star)
        )?;
    }
    Ok(())
}

/// Penalty ratio `κ = λb/λs`, unbalanced share `τ` of the common support and
/// overlap `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryParams {
    pub kappa: f64,
    pub tau: f64,
    pub alpha: f64,
}

impl TheoryParams {
    pub fn new(kappa: f64, tau: f64, alpha: f64) -> Result<Self> {
        if !(kappa > 1.0 && kappa < 2.0) {
            return Err(Error::InvalidArgument(format!(
                "kappa = {kappa} must lie in (1, 2)"
            )));
        }
        for (name, v) in [("tau", tau), ("alpha", alpha)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        Ok(Self { kappa, tau, alpha })
    }

    /// `f(κ, τ, α) = 2 − 2(1−τ)α − 2τακ + ((1+τ)/2)ακ²`.
    pub fn f(&self) -> f64 {
        let Self { kappa, tau, alpha } = *self;
        2.0 - 2.0 * (1.0 - tau) * alpha - 2.0 * tau * alpha * kappa
            + 0.5 * (1.0 + tau) * alpha * kappa * kappa
    }
}

/// `g(κ, τ, α) = max(2f/κ², f)`: the dirty model's threshold on the
/// `n / (s · ln(p − (2−α)s))` scale.
pub fn predicted_threshold(params: &TheoryParams) -> f64 {
    let f = params.f();
    (2.0 * f / (params.kappa * params.kappa)).max(f)
}

/// Threshold at `κ = √2`: `2 − α + (3 − 2√2)τα`.
pub fn sqrt2_threshold(tau: f64, alpha: f64) -> f64 {
    2.0 - alpha + (3.0 - 2.0 * 2f64.sqrt()) * tau * alpha
}

/// Lasso: 2 on its own scale. ℓ1/ℓ∞: `4 − 3α`.
pub fn baseline_threshold(method: SolverMode, alpha: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha = {alpha} must lie in [0, 1]")));
    }
    match method {
        SolverMode::LassoOnly => Ok(2.0),
        SolverMode::LinfOnly => Ok(4.0 - 3.0 * alpha),
        SolverMode::Dirty => Err(Error::InvalidArgument(
            "the dirty model threshold depends on kappa and tau".into(),
        )),
    }
}
