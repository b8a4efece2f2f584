//! Optimality certificates for a candidate `(B, S)`.
//!
//! The dual variable is read off the stationarity equation, then checked for
//! membership in `λs ∂‖S‖₁,₁` and `λb ∂‖B‖₁,∞` on the supports of the filtered
//! pair. Strict inequalities are checked non-strictly with additive slack.

use std::fmt;

use crate::error::Result;
use crate::sparsity::{row_linf, sparsity_stats, TIE_REL_TOL};
use crate::types::{CoefMatrix, DirtyPair, MultiTaskProblem, RegPair};

/// `Z = (1/n) Xᵀ(y − X(B + S))` per task; the unique `Z` satisfying stationarity.
pub fn dual_from_stationarity(problem: &MultiTaskProblem, pair: &DirtyPair) -> Result<CoefMatrix> {
    let theta = pair.theta();
    if theta.dim() != (problem.p(), problem.r()) {
        return Err(crate::Error::Shape(format!(
            "pair is {:?}, problem expects ({}, {})",
            theta.dim(),
            problem.p(),
            problem.r()
        )));
    }
    let nf = problem.n() as f64;
    let mut z = ndarray::Array2::zeros(theta.dim());
    for k in 0..problem.r() {
        let x = problem.design(k);
        let residual = problem.response(k) - &x.dot(&theta.as_array().column(k));
        z.column_mut(k).assign(&(x.t().dot(&residual) / nf));
    }
    CoefMatrix::new(z)
}

/// Additive slack for the sparse (C1/C3) and block (C2/C4) conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktTolerance {
    pub s: f64,
    pub b: f64,
}

impl KktTolerance {
    /// `1e-4 · λs` and `1e-4 · λb`.
    pub fn relative(reg: &RegPair) -> Self {
        Self {
            s: 1e-4 * reg.lambda_s(),
            b: 1e-4 * reg.lambda_b(),
        }
    }

    pub fn uniform(tol: f64) -> Self {
        Self { s: tol, b: tol }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NecessaryReport {
    /// Nonzero `s` shares the sign of `b` wherever the `B` row is nonzero.
    pub p1: bool,
    /// `D(S) < λb/λs < M(B)`.
    pub p2: bool,
    /// Every entry in `Supp(S)` sits on a maximal coordinate of its `B` row.
    pub p3: bool,
    /// Every row has a maximal `B` coordinate outside `Supp(S)`.
    pub p4: bool,
}

impl NecessaryReport {
    pub fn all(&self) -> bool {
        self.p1 && self.p2 && self.p3 && self.p4
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertReport {
    /// Largest violation of the subgradient conditions by the stationarity dual.
    pub stationarity_residual: f64,
    pub s_subgrad_ok: bool,
    pub b_subgrad_ok: bool,
    pub necessary: NecessaryReport,
    pub tol: KktTolerance,
}

impl CertReport {
    pub fn all(&self) -> bool {
        self.s_subgrad_ok && self.b_subgrad_ok && self.necessary.all()
    }
}

impl fmt::Display for CertReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "stationarity_residual: {:e}", self.stationarity_residual)?;
        writeln!(f, "s_subgrad_ok: {}", self.s_subgrad_ok)?;
        writeln!(f, "b_subgrad_ok: {}", self.b_subgrad_ok)?;
        writeln!(f, "necessary_p1: {}", self.necessary.p1)?;
        writeln!(f, "necessary_p2: {}", self.necessary.p2)?;
        writeln!(f, "necessary_p3: {}", self.necessary.p3)?;
        writeln!(f, "necessary_p4: {}", self.necessary.p4)?;
        writeln!(f, "tol_s: {:e}", self.tol.s)?;
        writeln!(f, "tol_b: {:e}", self.tol.b)?;
        writeln!(f, "certified: {}", self.all())
    }
}

/// Largest violation of `Z ∈ λs ∂‖S‖₁,₁` and of `Z ∈ λb ∂‖B‖₁,∞` with the
/// supports of `filtered`.
fn subgradient_violations(z: &CoefMatrix, filtered: &DirtyPair, reg: &RegPair, tie: f64) -> (f64, f64) {
    let (p, r) = z.dim();
    let (ls, lb) = (reg.lambda_s(), reg.lambda_b());
    let mut worst_s = 0.0_f64;
    let mut worst_b = 0.0_f64;
    for j in 0..p {
        for k in 0..r {
            let zk = z.get(j, k);
            let s = filtered.s.get(j, k);
            let v = if s != 0.0 {
                (zk - ls * s.signum()).abs()
            } else {
                (zk.abs() - ls).max(0.0)
            };
            worst_s = worst_s.max(v);
        }

        let row = filtered.b.as_array().row(j);
        let top = row_linf(row);
        let z_row = z.as_array().row(j);
        if top == 0.0 {
            let l1: f64 = z_row.iter().map(|v| v.abs()).sum();
            worst_b = worst_b.max(l1 - lb);
            continue;
        }
        let mut mass = 0.0;
        for k in 0..r {
            let b = row[k];
            if b.abs() >= top - tie {
                // t_k = z · sign(b) must be non-negative.
                let t = z_row[k] * b.signum();
                worst_b = worst_b.max(-t);
                mass += t;
            } else {
                worst_b = worst_b.max(z_row[k].abs());
            }
        }
        worst_b = worst_b.max((mass - lb).abs());
    }
    (worst_s, worst_b)
}

/// Checks the subgradient conditions and the necessary structure of `pair`.
pub fn check_kkt(
    problem: &MultiTaskProblem,
    pair: &DirtyPair,
    reg: &RegPair,
    filter_threshold: f64,
    tol: KktTolerance,
) -> Result<CertReport> {
    let z = dual_from_stationarity(problem, pair)?;
    let filtered = DirtyPair {
        b: pair.b.filtered(filter_threshold),
        s: pair.s.filtered(filter_threshold),
    };
    // Exact minimizers tie bit-for-bit; this only absorbs rounding.
    let tie = TIE_REL_TOL * filtered.b.max_abs();
    let (vs, vb) = subgradient_violations(&z, &filtered, reg, tie);
    Ok(CertReport {
        stationarity_residual: vs.max(vb),
        s_subgrad_ok: vs <= tol.s,
        b_subgrad_ok: vb <= tol.b,
        necessary: check_necessary(pair, reg, filter_threshold, tie),
        tol,
    })
}

/// Structural properties every optimum must have when `λb/λs` is not an
/// integer. Magnitudes within `tol` of a row maximum count as maximal.
pub fn check_necessary(
    pair: &DirtyPair,
    reg: &RegPair,
    filter_threshold: f64,
    tol: f64,
) -> NecessaryReport {
    let b = pair.b.filtered(filter_threshold);
    let s = pair.s.filtered(filter_threshold);
    let (p, r) = b.dim();
    let ratio = reg.ratio();

    let mut p1 = true;
    let mut p3 = true;
    let mut p4 = true;
    let mut min_ties: Option<usize> = None;
    for j in 0..p {
        let row = b.as_array().row(j);
        let top = row_linf(row);
        let maximal = |k: usize| row[k].abs() >= top - tol;
        if top > 0.0 {
            let ties = (0..r).filter(|&k| maximal(k)).count();
            min_ties = Some(min_ties.map_or(ties, |m| m.min(ties)));
        }
        let mut free_max = false;
        for k in 0..r {
            let sk = s.get(j, k);
            if sk != 0.0 {
                if top > 0.0 && row[k] != 0.0 && sk.signum() != row[k].signum() {
                    p1 = false;
                }
                if !maximal(k) {
                    p3 = false;
                }
            } else if maximal(k) {
                free_max = true;
            }
        }
        if !free_max {
            p4 = false;
        }
    }
    let d_stat = sparsity_stats(&s, 0.0).d_stat;
    let below = (d_stat as f64) < ratio;
    let above = min_ties.is_none_or(|m| ratio < m as f64);
    NecessaryReport {
        p1,
        p2: below && above,
        p3,
        p4,
    }
}
