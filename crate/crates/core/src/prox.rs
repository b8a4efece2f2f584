//! Closed-form proximal operators used by the coordinate updates.
//!
//! * [`soft_threshold`]: prox of `λ|x|`, the sparse-component update.
//! * [`linf_prox`]: prox of `λ‖b‖∞` with unit weights, the block update of the
//!   textbook algorithm (sort, pick the best clipping depth, clip).
//! * [`weighted_linf_prox`]: prox of `λ‖b‖∞` under a diagonal quadratic, solved
//!   by water-filling. This is the update the solver uses, since the Gram
//!   diagonal of a column is generally not 1.
//! * [`l1_ball_project`]: Euclidean projection onto the ℓ1 ball. By Moreau
//!   decomposition `linf_prox(a, λ) = a − l1_ball_project(a, λ)`, which makes it
//!   a useful cross-check.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// `sign(a) · max(|a| − λ, 0)`.
#[inline]
pub fn soft_threshold(a: f64, lambda: f64) -> f64 {
    if a > lambda {
        a - lambda
    } else if a < -lambda {
        a + lambda
    } else {
        0.0
    }
}

/// Indices sorted by decreasing magnitude; ties keep ascending index order.
fn order_by_magnitude(a: &[f64], order: &mut Vec<usize>) {
    order.clear();
    order.extend(0..a.len());
    order.sort_by(|&i, &j| {
        a[j].abs()
            .partial_cmp(&a[i].abs())
            .unwrap_or(Ordering::Equal)
    });
}

/// `argmin_b ½‖a − b‖² + λ‖b‖∞`.
pub fn linf_prox(a: &[f64], lambda: f64) -> Vec<f64> {
    if lambda == 0.0 {
        return a.to_vec();
    }
    let total: f64 = a.iter().map(|v| v.abs()).sum();
    if total <= lambda {
        return vec![0.0; a.len()];
    }
    let mut order = Vec::with_capacity(a.len());
    order_by_magnitude(a, &mut order);

    // Clipping depth m* maximizing (Σ_{l≤m} |a_(l)| − λ) / m.
    let mut best_depth = 1;
    let mut best_level = f64::NEG_INFINITY;
    let mut cumulative = 0.0;
    for (m, &k) in order.iter().enumerate() {
        cumulative += a[k].abs();
        let level = (cumulative - lambda) / (m + 1) as f64;
        if level > best_level {
            best_level = level;
            best_depth = m + 1;
        }
    }

    let mut out = a.to_vec();
    for &k in &order[..best_depth] {
        out[k] = a[k].signum() * best_level;
    }
    out
}

/// Input to [`weighted_linf_prox`]: minimize `Σ_k ½ w_k (b_k − a_k)² + λ‖b‖∞`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxInput {
    pub a: Vec<f64>,
    pub w: Vec<f64>,
    pub lambda: f64,
}

pub fn weighted_linf_prox(input: &ProxInput) -> Result<Vec<f64>> {
    if input.a.len() != input.w.len() {
        return Err(Error::Shape(format!(
            "{} targets but {} weights",
            input.a.len(),
            input.w.len()
        )));
    }
    if let Some((index, &value)) = input
        .w
        .iter()
        .enumerate()
        .find(|(_, w)| !(**w > 0.0 && w.is_finite()))
    {
        return Err(Error::NonPositiveWeight { index, value });
    }
    if !(input.lambda >= 0.0 && input.lambda.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be finite and non-negative, got {}",
            input.lambda
        )));
    }
    if input.a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("prox target"));
    }
    let mut out = vec![0.0; input.a.len()];
    let mut order = Vec::with_capacity(input.a.len());
    weighted_linf_prox_into(&input.a, &input.w, input.lambda, &mut out, &mut order);
    Ok(out)
}

/// Unchecked water-filling kernel. `out` must have the length of `a`; `order`
/// is scratch space.
pub(crate) fn weighted_linf_prox_into(
    a: &[f64],
    w: &[f64],
    lambda: f64,
    out: &mut [f64],
    order: &mut Vec<usize>,
) {
    if lambda == 0.0 {
        out.copy_from_slice(a);
        return;
    }
    let pull: f64 = a.iter().zip(w).map(|(v, wk)| wk * v.abs()).sum();
    if pull <= lambda {
        out.iter_mut().for_each(|v| *v = 0.0);
        return;
    }
    order_by_magnitude(a, order);

    // Smallest level t with Σ_k w_k (|a_k| − t)_+ ≤ λ. Between consecutive
    // breakpoints the left side is linear in t.
    let mut weight = 0.0;
    let mut weighted_sum = 0.0;
    let mut level = 0.0;
    for (m, &k) in order.iter().enumerate() {
        weight += w[k];
        weighted_sum += w[k] * a[k].abs();
        level = (weighted_sum - lambda) / weight;
        let next = order.get(m + 1).map_or(0.0, |&i| a[i].abs());
        if level >= next {
            break;
        }
    }
    let level = level.max(0.0);
    for ((o, &v), _) in out.iter_mut().zip(a).zip(w) {
        *o = if v.abs() > level { v.signum() * level } else { v };
    }
}

/// Euclidean projection onto `{x : ‖x‖₁ ≤ radius}`.
pub fn l1_ball_project(a: &[f64], radius: f64) -> Vec<f64> {
    let total: f64 = a.iter().map(|v| v.abs()).sum();
    if total <= radius {
        return a.to_vec();
    }
    if radius <= 0.0 {
        return vec![0.0; a.len()];
    }
    let mut sorted: Vec<f64> = a.iter().map(|v| v.abs()).collect();
    sorted.sort_by(|x, y| y.partial_cmp(x).unwrap_or(Ordering::Equal));

    let mut cumulative = 0.0;
    let mut shift = 0.0;
    for (j, u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - radius) / (j + 1) as f64;
        if u - candidate > 0.0 {
            shift = candidate;
        } else {
            break;
        }
    }
    a.iter()
        .map(|v| v.signum() * (v.abs() - shift).max(0.0))
        .collect()
}
