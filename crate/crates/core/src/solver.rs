//! Alternating cyclic coordinate descent for
//!
//! ```text
//! min_{B,S}  (1/2n) Σ_k ‖y_k − X_k (b_k + s_k)‖² + λs ‖S‖₁,₁ + λb ‖B‖₁,∞
//! ```
//!
//! Each outer iteration is one pass over the entries of `S` (scalar
//! soft-thresholding) followed by one pass over the rows of `B` (weighted ℓ∞
//! prox), `j` ascending and `k` ascending. Everything is expressed through the
//! Gram quantities `c = Xᵀy` and `D = XᵀX`, so a pass costs `O(p·r)` plus
//! `O(p)` per coordinate that actually moves.
//!
//! Regularization weights are taken on the scale of the objective above. The
//! coordinate updates work with the `½‖·‖²` loss, so both weights are
//! multiplied by `n` internally.

use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::prox::{soft_threshold, weighted_linf_prox_into};
use crate::sparsity::{matrix_norms, DEFAULT_FILTER_THRESHOLD};
use crate::types::{CoefMatrix, DirtyPair, MultiTaskProblem, RegPair};

/// Inner products `c_k = X_kᵀ y_k`, `D_k = X_kᵀ X_k`, and `y_kᵀ y_k`.
///
/// Tasks with bit-identical designs share one Gram matrix.
#[derive(Debug, Clone)]
pub struct GramCache {
    n: usize,
    p: usize,
    r: usize,
    /// `r × p`; row `k` is `X_kᵀ y_k`.
    c: Array2<f64>,
    d: Vec<Arc<Array2<f64>>>,
    yy: Vec<f64>,
}

impl GramCache {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `⟨X_j^(k), y^(k)⟩`.
    pub fn c(&self, j: usize, k: usize) -> f64 {
        self.c[(k, j)]
    }

    /// `⟨X_i^(k), X_j^(k)⟩`.
    pub fn d(&self, i: usize, j: usize, k: usize) -> f64 {
        self.d[k][(i, j)]
    }

    pub fn gram(&self, k: usize) -> &Array2<f64> {
        &self.d[k]
    }
}

pub fn precompute(problem: &MultiTaskProblem) -> GramCache {
    let (n, p, r) = (problem.n(), problem.p(), problem.r());
    let mut c = Array2::zeros((r, p));
    let mut d: Vec<Arc<Array2<f64>>> = Vec::with_capacity(r);
    let mut yy = Vec::with_capacity(r);
    for k in 0..r {
        let x = problem.design(k);
        let y = problem.response(k);
        c.row_mut(k).assign(&x.t().dot(y));
        yy.push(y.dot(y));
        let shared = (0..k).find(|&i| problem.design(i) == x);
        d.push(match shared {
            Some(i) => Arc::clone(&d[i]),
            None => Arc::new(x.t().dot(x)),
        });
    }
    GramCache {
        n,
        p,
        r,
        c,
        d,
        yy,
    }
}

/// Which blocks are optimized. The single-penalty modes pin the other block to
/// zero and ignore its weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverMode {
    Dirty,
    LassoOnly,
    LinfOnly,
}

impl SolverMode {
    pub fn name(self) -> &'static str {
        match self {
            SolverMode::Dirty => "dirty",
            SolverMode::LassoOnly => "lasso",
            SolverMode::LinfOnly => "linf",
        }
    }
}

impl std::str::FromStr for SolverMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dirty" => Ok(SolverMode::Dirty),
            "lasso" | "lasso_only" => Ok(SolverMode::LassoOnly),
            "linf" | "linf_only" => Ok(SolverMode::LinfOnly),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once the relative objective change of an outer iteration is below this.
    pub epsilon: f64,
    pub max_sweeps: usize,
    pub mode: SolverMode,
    /// Not applied by [`solve`]; carried for callers that filter the output.
    pub filter_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-6,
            max_sweeps: 10_000,
            mode: SolverMode::Dirty,
            filter_threshold: DEFAULT_FILTER_THRESHOLD,
        }
    }
}

impl SolverConfig {
    pub fn with_mode(mode: SolverMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub pair: DirtyPair,
    /// Objective after each outer iteration.
    pub objective_trace: Vec<f64>,
    pub sweeps_used: usize,
    pub converged: bool,
}

impl SolveResult {
    pub fn objective(&self) -> f64 {
        *self.objective_trace.last().expect("at least one sweep is run")
    }
}

/// Loss plus penalties, evaluated directly from the data.
pub fn objective(problem: &MultiTaskProblem, pair: &DirtyPair, reg: &RegPair) -> Result<f64> {
    let loss = problem.squared_loss(&pair.theta())?;
    let (l11, _) = matrix_norms(&pair.s);
    let (_, l1inf) = matrix_norms(&pair.b);
    Ok(loss + reg.lambda_s() * l11 + reg.lambda_b() * l1inf)
}

/// Iterate of the coordinate descent.
///
/// Besides `B` and `S` it tracks `G_k θ_k` for every task, which turns each
/// coordinate update into an `O(1)` computation plus an `O(p)` correction when
/// the coordinate changes.
#[derive(Debug, Clone)]
pub struct SolverState {
    p: usize,
    r: usize,
    /// `p × r`, row-major.
    b: Vec<f64>,
    s: Vec<f64>,
    /// `r × p`; `gtheta[k*p + i] = Σ_j D_k[i, j] θ[j, k]`.
    gtheta: Vec<f64>,
    active: Vec<usize>,
    targets: Vec<f64>,
    weights: Vec<f64>,
    block: Vec<f64>,
    order: Vec<usize>,
}

impl SolverState {
    pub fn new(cache: &GramCache, init: &DirtyPair) -> Result<Self> {
        let (p, r) = (cache.p, cache.r);
        if init.dim() != (p, r) {
            return Err(Error::Shape(format!(
                "initial pair is {:?}, problem expects ({p}, {r})",
                init.dim()
            )));
        }
        let b: Vec<f64> = init.b.as_array().iter().copied().collect();
        let s: Vec<f64> = init.s.as_array().iter().copied().collect();
        let mut state = Self {
            p,
            r,
            b,
            s,
            gtheta: vec![0.0; p * r],
            active: Vec::with_capacity(r),
            targets: Vec::with_capacity(r),
            weights: Vec::with_capacity(r),
            block: Vec::with_capacity(r),
            order: Vec::with_capacity(r),
        };
        state.refresh(cache);
        Ok(state)
    }

    /// Recomputes `G θ` from scratch.
    fn refresh(&mut self, cache: &GramCache) {
        let (p, r) = (self.p, self.r);
        for k in 0..r {
            let d = cache.d[k].as_slice().expect("standard layout");
            let gt = &mut self.gtheta[k * p..(k + 1) * p];
            gt.iter_mut().for_each(|v| *v = 0.0);
            for j in 0..p {
                let theta = self.b[j * r + k] + self.s[j * r + k];
                if theta != 0.0 {
                    axpy(gt, theta, &d[j * p..(j + 1) * p]);
                }
            }
        }
    }

    pub fn pair(&self) -> DirtyPair {
        let shape = (self.p, self.r);
        let b = Array2::from_shape_vec(shape, self.b.clone()).expect("shape");
        let s = Array2::from_shape_vec(shape, self.s.clone()).expect("shape");
        DirtyPair {
            b: CoefMatrix::new(b).expect("iterates stay finite"),
            s: CoefMatrix::new(s).expect("iterates stay finite"),
        }
    }

    /// One cyclic pass over every entry of `S`, holding `B` fixed.
    pub fn sweep_s(&mut self, cache: &GramCache, lambda_s: f64) {
        let (p, r) = (self.p, self.r);
        let threshold = cache.n as f64 * lambda_s;
        for j in 0..p {
            for k in 0..r {
                let d = cache.d[k].as_slice().expect("standard layout");
                let djj = d[j * p + j];
                let idx = j * r + k;
                let old = self.s[idx];
                // A zero column contributes nothing to the fit; its D row is zero.
                let new = if djj > 0.0 {
                    let alpha = cache.c[(k, j)] - self.gtheta[k * p + j] + old * djj;
                    soft_threshold(alpha, threshold) / djj
                } else {
                    0.0
                };
                let delta = new - old;
                if delta != 0.0 {
                    self.s[idx] = new;
                    axpy(
                        &mut self.gtheta[k * p..(k + 1) * p],
                        delta,
                        &d[j * p..(j + 1) * p],
                    );
                }
            }
        }
    }

    /// One cyclic pass over the rows of `B`, holding `S` fixed. Each row is
    /// minimized exactly with the weighted ℓ∞ prox.
    pub fn sweep_b(&mut self, cache: &GramCache, lambda_b: f64) {
        let (p, r) = (self.p, self.r);
        let threshold = cache.n as f64 * lambda_b;
        for j in 0..p {
            self.active.clear();
            self.targets.clear();
            self.weights.clear();
            for k in 0..r {
                let djj = cache.d[k][(j, j)];
                if djj > 0.0 {
                    let target =
                        (cache.c[(k, j)] - self.gtheta[k * p + j]) / djj + self.b[j * r + k];
                    self.active.push(k);
                    self.targets.push(target);
                    self.weights.push(djj);
                } else {
                    self.b[j * r + k] = 0.0;
                }
            }
            self.block.clear();
            self.block.resize(self.active.len(), 0.0);
            weighted_linf_prox_into(
                &self.targets,
                &self.weights,
                threshold,
                &mut self.block,
                &mut self.order,
            );
            for (slot, &k) in self.active.iter().enumerate() {
                let idx = j * r + k;
                let delta = self.block[slot] - self.b[idx];
                if delta != 0.0 {
                    self.b[idx] = self.block[slot];
                    let d = cache.d[k].as_slice().expect("standard layout");
                    axpy(
                        &mut self.gtheta[k * p..(k + 1) * p],
                        delta,
                        &d[j * p..(j + 1) * p],
                    );
                }
            }
        }
    }

    /// Objective value computed from the cached inner products.
    pub fn objective(&self, cache: &GramCache, reg: &RegPair) -> f64 {
        let (p, r) = (self.p, self.r);
        let mut loss = 0.0;
        for k in 0..r {
            let mut cross = 0.0;
            let mut quad = 0.0;
            for j in 0..p {
                let theta = self.b[j * r + k] + self.s[j * r + k];
                cross += cache.c[(k, j)] * theta;
                quad += theta * self.gtheta[k * p + j];
            }
            loss += cache.yy[k] - 2.0 * cross + quad;
        }
        let loss = (loss / (2.0 * cache.n as f64)).max(0.0);
        let l11: f64 = self.s.iter().map(|v| v.abs()).sum();
        let l1inf: f64 = self
            .b
            .chunks(r)
            .map(|row| row.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
            .sum();
        loss + reg.lambda_s() * l11 + reg.lambda_b() * l1inf
    }
}

#[inline]
fn axpy(y: &mut [f64], alpha: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Runs the alternating coordinate descent from `init` (zeros when absent).
///
/// Dirty mode trusts `reg` as constructed: use [`RegPair::new`] for a validated
/// pair, or [`RegPair::unconstrained`] for deliberate limiting cases.
pub fn solve(
    problem: &MultiTaskProblem,
    reg: &RegPair,
    config: &SolverConfig,
    init: Option<&DirtyPair>,
) -> Result<SolveResult> {
    let cache = precompute(problem);
    solve_cached(&cache, reg, config, init)
}

/// [`solve`] with a precomputed cache, for grids of solves on one problem.
pub fn solve_cached(
    cache: &GramCache,
    reg: &RegPair,
    config: &SolverConfig,
    init: Option<&DirtyPair>,
) -> Result<SolveResult> {
    if !(config.epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {}",
            config.epsilon
        )));
    }
    if config.max_sweeps == 0 {
        return Err(Error::InvalidArgument("max_sweeps must be positive".into()));
    }
    let zeros = DirtyPair::zeros(cache.p, cache.r);
    let mut start = init.unwrap_or(&zeros).clone();
    match config.mode {
        SolverMode::Dirty => {}
        SolverMode::LassoOnly => start.b = CoefMatrix::zeros(cache.p, cache.r),
        SolverMode::LinfOnly => start.s = CoefMatrix::zeros(cache.p, cache.r),
    }
    let mut state = SolverState::new(cache, &start)?;
    // The ignored weight must not leak into the reported objective.
    let effective = match config.mode {
        SolverMode::Dirty => *reg,
        SolverMode::LassoOnly => RegPair::unconstrained(reg.lambda_s(), 0.0)?,
        SolverMode::LinfOnly => RegPair::unconstrained(0.0, reg.lambda_b())?,
    };

    let mut previous = state.objective(cache, &effective);
    let mut trace = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_sweeps {
        match config.mode {
            SolverMode::Dirty => {
                state.sweep_s(cache, reg.lambda_s());
                state.sweep_b(cache, reg.lambda_b());
            }
            SolverMode::LassoOnly => state.sweep_s(cache, reg.lambda_s()),
            SolverMode::LinfOnly => state.sweep_b(cache, reg.lambda_b()),
        }
        let current = state.objective(cache, &effective);
        trace.push(current);
        let change = (previous - current).abs() / previous.max(1e-12);
        previous = current;
        if change < config.epsilon {
            converged = true;
            break;
        }
    }
    Ok(SolveResult {
        pair: state.pair(),
        sweeps_used: trace.len(),
        objective_trace: trace,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::{array, Array1};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn random_problem(n: usize, p: usize, r: usize, seed: u64) -> MultiTaskProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |rows, cols| {
            Array2::from_shape_simple_fn((rows, cols), || StandardNormal.sample(&mut rng))
        };
        let designs: Vec<Array2<f64>> = (0..r).map(|_| draw(n, p)).collect();
        let responses = designs
            .iter()
            .map(|x| {
                let beta = Array1::from_iter((0..p).map(|j| if j < 2 { 1.0 } else { 0.0 }));
                x.dot(&beta) + draw(n, 1).column(0).mapv(|v| 0.1 * v)
            })
            .collect();
        MultiTaskProblem::new(designs, responses).unwrap()
    }

    /// Design whose columns are orthogonal with squared norm n.
    fn orthogonal_problem(y: &[Vec<f64>]) -> MultiTaskProblem {
        // 4×2 Hadamard-style columns: XᵀX = 4·I.
        let x = array![[1.0, 1.0], [1.0, -1.0], [1.0, 1.0], [1.0, -1.0]];
        let designs = vec![x; y.len()];
        let responses = y.iter().map(|v| Array1::from(v.clone())).collect();
        MultiTaskProblem::new(designs, responses).unwrap()
    }

    #[test]
    fn precompute_identity_design() {
        let problem =
            MultiTaskProblem::new(vec![Array2::eye(2)], vec![array![1.0, 2.0]]).unwrap();
        let cache = precompute(&problem);
        assert_eq!((cache.c(0, 0), cache.c(1, 0)), (1.0, 2.0));
        assert_eq!(cache.gram(0), &Array2::<f64>::eye(2));

        let zero = MultiTaskProblem::new(vec![Array2::zeros((3, 2))], vec![array![1.0, 2.0, 3.0]])
            .unwrap();
        let cache = precompute(&zero);
        assert!(cache.c.iter().all(|v| *v == 0.0));
        assert!(cache.gram(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn precompute_matches_products() {
        let problem = random_problem(4, 3, 1, 3);
        let cache = precompute(&problem);
        let x = problem.design(0);
        let y = problem.response(0);
        for i in 0..3 {
            let xi = x.column(i);
            assert_abs_diff_eq!(cache.c(i, 0), xi.dot(y), epsilon = 1e-12);
            for j in 0..3 {
                let manual: f64 = (0..4).map(|row| x[(row, i)] * x[(row, j)]).sum();
                assert_abs_diff_eq!(cache.d(i, j, 0), manual, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn shared_designs_share_gram() {
        let problem = orthogonal_problem(&[vec![1.0; 4], vec![2.0; 4]]);
        let cache = precompute(&problem);
        assert!(Arc::ptr_eq(&cache.d[0], &cache.d[1]));
    }

    #[test]
    fn objective_examples() {
        let problem = MultiTaskProblem::new(vec![array![[1.0]]], vec![array![1.0]]).unwrap();
        let pair = DirtyPair::new(
            CoefMatrix::zeros(1, 1),
            CoefMatrix::from_rows(&[vec![0.5]]).unwrap(),
        )
        .unwrap();
        let reg = RegPair::unconstrained(1.0, 123.0).unwrap();
        assert_abs_diff_eq!(objective(&problem, &pair, &reg).unwrap(), 0.625);

        let doubled = RegPair::unconstrained(2.0, 123.0).unwrap();
        assert_abs_diff_eq!(
            objective(&problem, &pair, &doubled).unwrap() - objective(&problem, &pair, &reg).unwrap(),
            0.5
        );

        let problem = random_problem(6, 3, 2, 1);
        let zero = DirtyPair::zeros(3, 2);
        let expected: f64 = problem
            .responses()
            .iter()
            .map(|y| y.dot(y))
            .sum::<f64>()
            / 12.0;
        assert_abs_diff_eq!(
            objective(&problem, &zero, &reg).unwrap(),
            expected,
            epsilon = 1e-12
        );

        let wrong = DirtyPair::zeros(2, 2);
        assert!(objective(&problem, &wrong, &reg).is_err());
    }

    #[test]
    fn gram_objective_matches_direct() {
        let problem = random_problem(10, 4, 2, 9);
        let cache = precompute(&problem);
        let reg = RegPair::new(0.05, 0.08, 2).unwrap();
        let pair = DirtyPair::new(
            CoefMatrix::from_rows(&[
                vec![0.5, -0.5],
                vec![0.0, 0.0],
                vec![0.2, 0.1],
                vec![0.0, 0.0],
            ])
            .unwrap(),
            CoefMatrix::from_rows(&[
                vec![0.1, 0.0],
                vec![0.0, 0.3],
                vec![0.0, 0.0],
                vec![-0.2, 0.0],
            ])
            .unwrap(),
        )
        .unwrap();
        let state = SolverState::new(&cache, &pair).unwrap();
        assert_abs_diff_eq!(
            state.objective(&cache, &reg),
            objective(&problem, &pair, &reg).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn sweep_s_orthogonal_closed_form() {
        // XᵀX = n·I with n = 4, so each entry is soft(x_jᵀy / n, λs).
        let y = vec![vec![3.0, 1.0, 2.0, -0.5], vec![0.1, 0.2, -0.3, 0.0]];
        let problem = orthogonal_problem(&y);
        let cache = precompute(&problem);
        let lambda_s = 0.3;
        let mut state = SolverState::new(&cache, &DirtyPair::zeros(2, 2)).unwrap();
        state.sweep_s(&cache, lambda_s);
        let pair = state.pair();
        for k in 0..2 {
            for j in 0..2 {
                let corr = cache.c(j, k) / 4.0;
                assert_abs_diff_eq!(
                    pair.s.get(j, k),
                    soft_threshold(corr, lambda_s),
                    epsilon = 1e-14
                );
            }
        }
        assert!(pair.b.as_array().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn zero_response_stays_zero() {
        let problem = MultiTaskProblem::new(
            vec![array![[1.0, 2.0], [0.5, -1.0], [2.0, 0.0]]; 2],
            vec![Array1::zeros(3), Array1::zeros(3)],
        )
        .unwrap();
        let reg = RegPair::new(0.1, 0.15, 2).unwrap();
        let out = solve(&problem, &reg, &SolverConfig::default(), None).unwrap();
        assert_eq!(out.pair, DirtyPair::zeros(2, 2));
        assert_eq!(out.sweeps_used, 1);
        assert!(out.converged);
    }

    #[test]
    fn single_coordinate_converges_in_one_sweep() {
        // n = 2, p = 1, r = 1: minimize (1/4)((2 − θ)² + (1 − 2θ)²)·... via calculus.
        let problem =
            MultiTaskProblem::new(vec![array![[1.0], [2.0]]], vec![array![2.0, 1.0]]).unwrap();
        let reg = RegPair::unconstrained(0.25, 0.0).unwrap();
        let config = SolverConfig::with_mode(SolverMode::LassoOnly);
        let out = solve(&problem, &reg, &config, None).unwrap();
        // d/dθ: (1/2)(5θ − 4) + 0.25 = 0  =>  θ = 0.7.
        assert_abs_diff_eq!(out.pair.s.get(0, 0), 0.7, epsilon = 1e-14);
        assert!(out.sweeps_used <= 2);
    }

    #[test]
    fn sweep_b_examples() {
        // Unit Gram, two tasks, n = 1: targets equal c, weights 1.
        let problem = MultiTaskProblem::new(
            vec![array![[1.0]], array![[1.0]]],
            vec![array![3.0], array![1.0]],
        )
        .unwrap();
        let cache = precompute(&problem);
        let mut state = SolverState::new(&cache, &DirtyPair::zeros(1, 2)).unwrap();
        state.sweep_b(&cache, 1.0);
        assert_eq!(state.pair().b.as_array(), &array![[2.0, 1.0]]);

        let mut state = SolverState::new(&cache, &DirtyPair::zeros(1, 2)).unwrap();
        state.sweep_b(&cache, 4.0);
        assert_eq!(state.pair().b.as_array(), &array![[0.0, 0.0]]);
    }

    #[test]
    fn zero_columns_are_skipped() {
        let x = array![[0.0, 1.0], [0.0, 2.0], [0.0, -1.0]];
        let problem =
            MultiTaskProblem::new(vec![x.clone(), x], vec![array![1.0, 2.0, 0.5]; 2]).unwrap();
        let reg = RegPair::new(0.01, 0.015, 2).unwrap();
        let out = solve(&problem, &reg, &SolverConfig::default(), None).unwrap();
        assert_eq!(out.pair.b.get(0, 0), 0.0);
        assert_eq!(out.pair.s.get(0, 1), 0.0);
        assert!(out.pair.theta().get(1, 0).abs() > 0.1);
    }

    #[test]
    fn trace_is_monotone_and_converges() {
        for seed in 0..5 {
            let problem = random_problem(30, 8, 3, seed);
            let reg = RegPair::new(0.02, 0.05, 3).unwrap();
            let out = solve(&problem, &reg, &SolverConfig::default(), None).unwrap();
            assert!(out.converged);
            for w in out.objective_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0));
            }
            let direct = objective(&problem, &out.pair, &reg).unwrap();
            assert_abs_diff_eq!(direct, out.objective(), epsilon = 1e-10);
        }
    }

    #[test]
    fn lasso_mode_ignores_block_weight() {
        let problem = random_problem(20, 5, 2, 4);
        let config = SolverConfig::with_mode(SolverMode::LassoOnly);
        let a = solve(&problem, &RegPair::unconstrained(0.05, 0.0).unwrap(), &config, None).unwrap();
        let b = solve(&problem, &RegPair::unconstrained(0.05, 9.0).unwrap(), &config, None).unwrap();
        assert_eq!(a.pair, b.pair);
        assert!(a.pair.b.as_array().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rejects_bad_config() {
        let problem = random_problem(5, 2, 1, 0);
        let reg = RegPair::unconstrained(0.1, 0.1).unwrap();
        let config = SolverConfig {
            epsilon: 0.0,
            ..SolverConfig::default()
        };
        assert!(solve(&problem, &reg, &config, None).is_err());
        let bad_init = DirtyPair::zeros(3, 1);
        assert!(solve(&problem, &reg, &SolverConfig::default(), Some(&bad_init)).is_err());
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in [SolverMode::Dirty, SolverMode::LassoOnly, SolverMode::LinfOnly] {
            assert_eq!(mode.name().parse::<SolverMode>().unwrap(), mode);
        }
        assert!("ridge".parse::<SolverMode>().is_err());
    }
}
