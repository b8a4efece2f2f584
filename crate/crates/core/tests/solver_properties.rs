use dirtymodel::certify::{check_kkt, KktTolerance};
use dirtymodel::solver::{objective, solve, SolverConfig, SolverMode};
use dirtymodel::{CoefMatrix, DirtyPair, MultiTaskProblem, RegPair};
use ndarray::{Array1, Array2};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gaussian designs with a few planted coefficients and small noise.
fn random_problem(seed: u64, n: usize, p: usize, r: usize) -> MultiTaskProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut designs = Vec::new();
    let mut responses = Vec::new();
    for _ in 0..r {
        let x = Array2::from_shape_simple_fn((n, p), || rng.sample::<f64, _>(StandardNormal));
        let beta = Array1::from_shape_fn(p, |j| if j < 3 { rng.random_range(-1.0..1.0) } else { 0.0 });
        let noise = Array1::from_shape_simple_fn(n, || 0.1 * rng.sample::<f64, _>(StandardNormal));
        responses.push(x.dot(&beta) + noise);
        designs.push(x);
    }
    MultiTaskProblem::new(designs, responses).unwrap()
}

fn tight() -> SolverConfig {
    SolverConfig {
        epsilon: 1e-13,
        max_sweeps: 100_000,
        ..SolverConfig::default()
    }
}

fn max_diff(a: &CoefMatrix, b: &CoefMatrix) -> f64 {
    (a.as_array() - b.as_array()).iter().fold(0.0, |m, v| m.max(v.abs()))
}

#[test]
fn huge_block_weight_reduces_to_lasso() {
    for seed in 0..10 {
        let problem = random_problem(seed, 30, 8, 2);
        let lasso = solve(
            &problem,
            &RegPair::unconstrained(0.05, 0.0).unwrap(),
            &SolverConfig { mode: SolverMode::LassoOnly, ..tight() },
            None,
        )
        .unwrap();
        let dirty = solve(&problem, &RegPair::unconstrained(0.05, 1e9).unwrap(), &tight(), None).unwrap();
        assert!(dirty.pair.b.as_array().iter().all(|v| *v == 0.0));
        assert!(max_diff(&dirty.pair.theta(), &lasso.pair.theta()) < 1e-10);
    }
}

#[test]
fn huge_sparse_weight_reduces_to_block() {
    for seed in 0..10 {
        let problem = random_problem(seed, 30, 8, 3);
        let linf = solve(
            &problem,
            &RegPair::unconstrained(0.0, 0.08).unwrap(),
            &SolverConfig { mode: SolverMode::LinfOnly, ..tight() },
            None,
        )
        .unwrap();
        let dirty = solve(&problem, &RegPair::unconstrained(1e9, 0.08).unwrap(), &tight(), None).unwrap();
        assert!(dirty.pair.s.as_array().iter().all(|v| *v == 0.0));
        assert!(max_diff(&dirty.pair.theta(), &linf.pair.theta()) < 1e-10);
    }
}

#[test]
fn warm_start_does_not_change_the_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 0..10 {
        let problem = random_problem(seed, 40, 10, 2);
        let reg = RegPair::new(0.03, 0.05, 2).unwrap();
        let cold = solve(&problem, &reg, &tight(), None).unwrap();
        let init = DirtyPair::new(
            CoefMatrix::new(Array2::from_shape_simple_fn((10, 2), || rng.random_range(-2.0..2.0))).unwrap(),
            CoefMatrix::new(Array2::from_shape_simple_fn((10, 2), || rng.random_range(-2.0..2.0))).unwrap(),
        )
        .unwrap();
        let warm = solve(&problem, &reg, &tight(), Some(&init)).unwrap();
        let (a, b) = (cold.objective(), warm.objective());
        assert!((a - b).abs() <= 1e-10 * a.max(b), "{a} vs {b}");
        // n > p makes the loss strongly convex in Θ, so Θ itself is unique.
        assert!(max_diff(&cold.pair.theta(), &warm.pair.theta()) < 1e-5);
    }
}

#[test]
fn warm_start_objective_agrees_at_default_tolerance() {
    let config = SolverConfig::default();
    for seed in 0..20 {
        let problem = random_problem(seed, 40, 10, 2);
        let reg = RegPair::new(0.03, 0.05, 2).unwrap();
        let cold = solve(&problem, &reg, &config, None).unwrap();
        let far = DirtyPair::new(
            CoefMatrix::new(Array2::from_elem((10, 2), 1.5)).unwrap(),
            CoefMatrix::new(Array2::from_elem((10, 2), -0.7)).unwrap(),
        )
        .unwrap();
        let warm = solve(&problem, &reg, &config, Some(&far)).unwrap();
        let (a, b) = (cold.objective(), warm.objective());
        assert!((a - b).abs() <= 10.0 * config.epsilon * a.max(b), "seed {seed}: {a} vs {b}");
    }
}

#[test]
fn permuting_tasks_permutes_the_solution() {
    let order = [2, 0, 1];
    for seed in 0..5 {
        let problem = random_problem(seed, 30, 6, 3);
        let reg = RegPair::new(0.04, 0.07, 3).unwrap();
        let base = solve(&problem, &reg, &tight(), None).unwrap();
        let permuted = solve(&problem.permute_tasks(&order).unwrap(), &reg, &tight(), None).unwrap();
        let expected = base.pair.theta().permute_columns(&order).unwrap();
        assert!(max_diff(&permuted.pair.theta(), &expected) < 1e-6);
        assert!((base.objective() - permuted.objective()).abs() < 1e-12 * base.objective().max(1.0));
    }
}

/// An objective-change stop only bounds the dual residual like √(ε·obj), so
/// certification is checked after a tight solve.
#[test]
fn converged_output_certifies() {
    let config = SolverConfig {
        epsilon: 1e-12,
        ..SolverConfig::default()
    };
    let cases = [(40, 10, 0.02, 0.035), (20, 4, 0.1, 0.15), (30, 60, 0.02, 0.035)];
    for (n, p, ls, lb) in cases {
        for seed in 0..20 {
            let problem = random_problem(seed, n, p, 2);
            let reg = RegPair::new(ls, lb, 2).unwrap();
            let out = solve(&problem, &reg, &config, None).unwrap();
            assert!(out.converged);
            let report = check_kkt(&problem, &out.pair, &reg, 1e-3, KktTolerance::relative(&reg)).unwrap();
            assert!(report.s_subgrad_ok && report.b_subgrad_ok, "n={n} p={p} seed {seed}\n{report}");
        }
    }
}

#[test]
fn reported_objective_matches_direct_evaluation() {
    let problem = random_problem(9, 25, 7, 2);
    let reg = RegPair::new(0.05, 0.08, 2).unwrap();
    let out = solve(&problem, &reg, &SolverConfig::default(), None).unwrap();
    let direct = objective(&problem, &out.pair, &reg).unwrap();
    assert!((out.objective() - direct).abs() < 1e-10 * direct);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_trace_never_increases(
        seed in any::<u64>(),
        n in 5usize..30,
        p in 1usize..8,
        r in 1usize..4,
        lambda_b in 0.01f64..1.0,
        frac in 0.05f64..0.95,
    ) {
        let problem = random_problem(seed, n, p, r);
        // Keep λb/λs strictly inside (1, r] and off the integers.
        let ratio = if r == 1 { 1.0 + frac * 0.5 } else { 1.0 + frac * (r as f64 - 1.0) };
        let ratio = if (ratio - ratio.round()).abs() < 1e-6 { ratio + 0.01 } else { ratio };
        let reg = RegPair::unconstrained(lambda_b / ratio, lambda_b).unwrap();
        let out = solve(&problem, &reg, &SolverConfig::default(), None).unwrap();
        for w in out.objective_trace.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-15, "{} -> {}", w[0], w[1]);
        }
    }
}
