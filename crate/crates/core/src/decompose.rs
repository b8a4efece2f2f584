//! The `H_d` split of a coefficient matrix into a row-block part and an
//! elementwise-sparse excess, plus design diagnostics and the closed-form
//! ℓ∞ error bounds.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sparsity::{row_max_set, sparsity_stats, TIE_REL_TOL};
use crate::types::{CoefMatrix, DirtyPair, MultiTaskProblem, RegPair};

/// Splits `theta` row by row: with `v_j` the `(d+1)`-th largest magnitude of
/// row `j` (zero when `d = r`), `S*` keeps the excess `sign(θ)(|θ| − v_j)_+`
/// and `B*` the clipped remainder.
pub fn h_transform(theta: &CoefMatrix, d: usize) -> Result<DirtyPair> {
    let (p, r) = theta.dim();
    if d == 0 || d > r {
        return Err(Error::InvalidArgument(format!("d = {d} must lie in 1..={r}")));
    }
    let mut b = theta.as_array().clone();
    let mut s = theta.as_array().clone();
    let mut magnitudes = Vec::with_capacity(r);
    for j in 0..p {
        magnitudes.clear();
        magnitudes.extend(theta.as_array().row(j).iter().map(|v| v.abs()));
        magnitudes.sort_by(|x, y| y.total_cmp(x));
        let v = magnitudes.get(d).copied().unwrap_or(0.0);
        for k in 0..r {
            let t = theta.get(j, k);
            // Clipping B first keeps tied maxima bit-identical.
            let clipped = t.signum() * t.abs().min(v);
            b[(j, k)] = if t == 0.0 { 0.0 } else { clipped };
            s[(j, k)] = t - b[(j, k)];
        }
    }
    DirtyPair::new(CoefMatrix::new(b)?, CoefMatrix::new(s)?)
}

/// `d = ⌊λb/λs⌋`, the block depth tied to a regularization pair.
pub fn depth_for(reg: &RegPair) -> usize {
    reg.ratio().floor() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarReport {
    /// `M(B) ≥ d + 1` and `D(S) ≤ d`.
    pub p1: bool,
    /// On the maximal coordinates of every nonzero row of `B`, a nonzero `s`
    /// carries the sign of `b`.
    pub p2: bool,
    /// `S` vanishes off the maximal coordinates of every nonzero row of `B`.
    pub p3: bool,
}

impl StarReport {
    pub fn all(&self) -> bool {
        self.p1 && self.p2 && self.p3
    }
}

pub fn check_star_properties(pair: &DirtyPair, d: usize) -> StarReport {
    let b_stats = sparsity_stats(&pair.b, 0.0);
    let s_stats = sparsity_stats(&pair.s, 0.0);
    let p1 = b_stats.m_stat.is_none_or(|m| m > d) && s_stats.d_stat <= d;
    let mut p2 = true;
    let mut p3 = true;
    for &j in &b_stats.row_support {
        let row = pair.b.as_array().row(j);
        let max_set = row_max_set(row, TIE_REL_TOL);
        for k in 0..pair.b.r() {
            let s = pair.s.get(j, k);
            if s == 0.0 {
                continue;
            }
            if max_set.contains(&k) {
                p2 &= s.signum() == row[k].signum();
            } else {
                p3 = false;
            }
        }
    }
    StarReport { p1, p2, p3 }
}

/// Incoherence and curvature constants of a design restricted to per-task
/// supports `U_k`.
///
/// `gamma_s`, `gamma_b` and `d_max` are `None` when some restricted Gram matrix
/// is singular; no pseudo-inverse is substituted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignDiagnostics {
    pub gamma_s: Option<f64>,
    pub gamma_b: Option<f64>,
    /// Smallest eigenvalue of `(1/n) X_Ukᵀ X_Uk` over tasks, floored at 0.
    pub c_min: f64,
    /// Largest `‖((1/n) X_Ukᵀ X_Uk)⁻¹‖∞,1` (max row ℓ1 norm) over tasks.
    pub d_max: Option<f64>,
    /// Every column satisfies `‖X_j‖₂ ≤ √(2n)`.
    pub column_norm_ok: bool,
}

pub fn design_diagnostics(
    problem: &MultiTaskProblem,
    supports: &[Vec<usize>],
) -> Result<DesignDiagnostics> {
    let (n, p, r) = (problem.n(), problem.p(), problem.r());
    if supports.len() != r {
        return Err(Error::Shape(format!(
            "{} support sets for {r} tasks",
            supports.len()
        )));
    }
    for (k, u) in supports.iter().enumerate() {
        if u.is_empty() {
            return Err(Error::InvalidArgument(format!("support of task {k} is empty")));
        }
        if let Some(&j) = u.iter().find(|&&j| j >= p) {
            return Err(Error::InvalidArgument(format!(
                "task {k}: feature {j} out of range for p = {p}"
            )));
        }
    }
    let nf = n as f64;
    let limit = 2.0 * nf;
    let column_norm_ok = problem
        .designs()
        .iter()
        .all(|x| x.columns().into_iter().all(|c| c.dot(&c) <= limit));

    let mut union = vec![false; p];
    for u in supports {
        for &j in u {
            union[j] = true;
        }
    }

    let mut c_min = f64::INFINITY;
    let mut d_max: Option<f64> = Some(0.0);
    // Per task, |X_jᵀ X_U (X_Uᵀ X_U)⁻¹|₁ for every feature j.
    let mut leverage: Vec<Option<Vec<f64>>> = Vec::with_capacity(r);
    for (k, u) in supports.iter().enumerate() {
        let x = problem.design(k);
        let xu = DMatrix::from_fn(n, u.len(), |i, c| x[(i, u[c])]);
        let gram = xu.transpose() * &xu;
        let scaled = &gram / nf;
        let eig = SymmetricEigen::new(scaled.clone()).eigenvalues.min();
        c_min = c_min.min(eig.max(0.0));
        let inverse = scaled.clone().cholesky().map(|c| c.inverse());
        match inverse {
            Some(inv) => {
                let norm = (0..inv.nrows())
                    .map(|i| inv.row(i).iter().map(|v| v.abs()).sum::<f64>())
                    .fold(0.0, f64::max);
                d_max = d_max.map(|m| m.max(norm));
                let gram_inv = inv / nf;
                let xfull = DMatrix::from_fn(n, p, |i, j| x[(i, j)]);
                // Row j of X_allᵀ X_U (X_Uᵀ X_U)⁻¹.
                let coupling = xfull.transpose() * &xu * gram_inv;
                leverage.push(Some(
                    (0..p)
                        .map(|j| coupling.row(j).iter().map(|v| v.abs()).sum())
                        .collect(),
                ));
            }
            None => {
                d_max = None;
                leverage.push(None);
            }
        }
    }

    let (gamma_s, gamma_b) = if leverage.iter().all(Option::is_some) {
        let lev: Vec<&Vec<f64>> = leverage.iter().map(|l| l.as_ref().unwrap()).collect();
        let mut worst_s = 0.0_f64;
        for (k, u) in supports.iter().enumerate() {
            for j in (0..p).filter(|j| !u.contains(j)) {
                worst_s = worst_s.max(lev[k][j]);
            }
        }
        let worst_b = (0..p)
            .filter(|&j| !union[j])
            .map(|j| lev.iter().map(|l| l[j]).sum::<f64>())
            .fold(0.0_f64, f64::max);
        (Some(1.0 - worst_s), Some(1.0 - worst_b))
    } else {
        (None, None)
    };

    Ok(DesignDiagnostics {
        gamma_s,
        gamma_b,
        c_min,
        d_max,
        column_norm_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Fixed design: `√(4σ² ln(pr) / (n C_min)) + λs D_max`.
    Deterministic,
    /// Gaussian design: `√(50σ² ln(rs) / (n C_min)) + λs (4s / (C_min √n) + D_max)`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBoundParams {
    pub sigma: f64,
    pub n: usize,
    pub p: usize,
    pub r: usize,
    pub s: usize,
    pub c_min: f64,
    pub d_max: f64,
    pub lambda_s: f64,
}

/// ℓ∞ error bound on the estimate of `Θ`, natural logarithms throughout.
pub fn error_bound(kind: BoundKind, params: &ErrorBoundParams) -> Result<f64> {
    let ErrorBoundParams {
        sigma,
        n,
        p,
        r,
        s,
        c_min,
        d_max,
        lambda_s,
    } = *params;
    if !(c_min > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "c_min must be positive, got {c_min}"
        )));
    }
    if n == 0 || p == 0 || r == 0 || s == 0 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    let nf = n as f64;
    let bound = match kind {
        BoundKind::Deterministic => {
            (4.0 * sigma * sigma * ((p * r) as f64).ln() / (nf * c_min)).sqrt()
                + lambda_s * d_max
        }
        BoundKind::Gaussian => {
            (50.0 * sigma * sigma * ((r * s) as f64).ln() / (nf * c_min)).sqrt()
                + lambda_s * (4.0 * s as f64 / (c_min * nf.sqrt()) + d_max)
        }
    };
    Ok(bound)
}
