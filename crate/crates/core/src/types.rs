//! Domain types shared by the solver, the certificates and the experiment
//! harness.
//!
//! Coefficient matrices are `p × r`: one row per feature, one column per task.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// Tolerance used to decide whether `lambda_b / lambda_s` is an integer.
pub const INTEGER_RATIO_TOL: f64 = 1e-9;

/// `r` regression tasks sharing a feature space: `y_k = X_k θ_k + w_k`.
#[derive(Debug, Clone)]
pub struct MultiTaskProblem {
    designs: Vec<Array2<f64>>,
    responses: Vec<Array1<f64>>,
}

impl MultiTaskProblem {
    pub fn new(designs: Vec<Array2<f64>>, responses: Vec<Array1<f64>>) -> Result<Self> {
        if designs.is_empty() {
            return Err(Error::Shape("at least one task is required".into()));
        }
        if designs.len() != responses.len() {
            return Err(Error::Shape(format!(
                "{} designs but {} responses",
                designs.len(),
                responses.len()
            )));
        }
        let (n, p) = designs[0].dim();
        if n == 0 || p == 0 {
            return Err(Error::Shape(format!("design is {n}x{p}; need n, p >= 1")));
        }
        for (k, (x, y)) in designs.iter().zip(&responses).enumerate() {
            if x.dim() != (n, p) {
                return Err(Error::Shape(format!(
                    "task {k}: design is {:?}, expected ({n}, {p})",
                    x.dim()
                )));
            }
            if y.len() != n {
                return Err(Error::Shape(format!(
                    "task {k}: response has length {}, expected {n}",
                    y.len()
                )));
            }
            if !x.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("design"));
            }
            if !y.iter().all(|v| v.is_finite()) {
                return Err(Error::NonFinite("response"));
            }
        }
        Ok(Self { designs, responses })
    }

    /// Number of tasks.
    pub fn r(&self) -> usize {
        self.designs.len()
    }

    /// Samples per task.
    pub fn n(&self) -> usize {
        self.designs[0].nrows()
    }

    /// Number of features.
    pub fn p(&self) -> usize {
        self.designs[0].ncols()
    }

    pub fn design(&self, k: usize) -> &Array2<f64> {
        &self.designs[k]
    }

    pub fn response(&self, k: usize) -> &Array1<f64> {
        &self.responses[k]
    }

    pub fn designs(&self) -> &[Array2<f64>] {
        &self.designs
    }

    pub fn responses(&self) -> &[Array1<f64>] {
        &self.responses
    }

    /// Reorders the tasks: task `k` of the result is task `order[k]` of `self`.
    pub fn permute_tasks(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.r())?;
        Ok(Self {
            designs: order.iter().map(|&k| self.designs[k].clone()).collect(),
            responses: order.iter().map(|&k| self.responses[k].clone()).collect(),
        })
    }

    /// `(1/2n) Σ_k ‖y_k − X_k θ_k‖²`.
    pub fn squared_loss(&self, theta: &CoefMatrix) -> Result<f64> {
        if theta.dim() != (self.p(), self.r()) {
            return Err(Error::Shape(format!(
                "coefficients are {:?}, problem expects ({}, {})",
                theta.dim(),
                self.p(),
                self.r()
            )));
        }
        let mut total = 0.0;
        for k in 0..self.r() {
            let fitted = self.designs[k].dot(&theta.as_array().column(k));
            total += (&self.responses[k] - &fitted).mapv(|v| v * v).sum();
        }
        Ok(total / (2.0 * self.n() as f64))
    }
}

fn check_permutation(order: &[usize], r: usize) -> Result<()> {
    let mut seen = vec![false; r];
    if order.len() != r {
        return Err(Error::InvalidArgument(format!(
            "permutation has {} entries for {r} tasks",
            order.len()
        )));
    }
    for &k in order {
        if k >= r || seen[k] {
            return Err(Error::InvalidArgument(format!("{order:?} is not a permutation")));
        }
        seen[k] = true;
    }
    Ok(())
}

/// A finite `p × r` coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefMatrix(Array2<f64>);

impl CoefMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        if !entries.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("coefficient matrix"));
        }
        Ok(Self(entries))
    }

    pub fn zeros(p: usize, r: usize) -> Self {
        Self(Array2::zeros((p, r)))
    }

    /// Builds a matrix from feature rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != r) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let entries = Array2::from_shape_vec((rows.len(), r), flat)
            .map_err(|e| Error::Shape(e.to_string()))?;
        Self::new(entries)
    }

    pub fn p(&self) -> usize {
        self.0.nrows()
    }

    pub fn r(&self) -> usize {
        self.0.ncols()
    }

    pub fn dim(&self) -> (usize, usize) {
        self.0.dim()
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.0[(j, k)]
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn into_inner(self) -> Array2<f64> {
        self.0
    }

    /// Zeroes every entry with magnitude at or below `threshold`.
    pub fn filtered(&self, threshold: f64) -> Self {
        Self(self.0.mapv(|v| if v.abs() > threshold { v } else { 0.0 }))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Column permutation matching [`MultiTaskProblem::permute_tasks`].
    pub fn permute_columns(&self, order: &[usize]) -> Result<Self> {
        check_permutation(order, self.r())?;
        let mut out = Array2::zeros(self.dim());
        for (dst, &src) in order.iter().enumerate() {
            out.column_mut(dst).assign(&self.0.column(src));
        }
        Ok(Self(out))
    }
}

impl std::ops::Add for &CoefMatrix {
    type Output = CoefMatrix;

    fn add(self, rhs: &CoefMatrix) -> CoefMatrix {
        CoefMatrix(&self.0 + &rhs.0)
    }
}

/// The estimator's two components: row-sparse `b` and elementwise-sparse `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirtyPair {
    pub b: CoefMatrix,
    pub s: CoefMatrix,
}

impl DirtyPair {
    pub fn new(b: CoefMatrix, s: CoefMatrix) -> Result<Self> {
        if b.dim() != s.dim() {
            return Err(Error::Shape(format!(
                "B is {:?} but S is {:?}",
                b.dim(),
                s.dim()
            )));
        }
        Ok(Self { b, s })
    }

    pub fn zeros(p: usize, r: usize) -> Self {
        Self {
            b: CoefMatrix::zeros(p, r),
            s: CoefMatrix::zeros(p, r),
        }
    }

    pub fn dim(&self) -> (usize, usize) {
        self.b.dim()
    }

    pub fn theta(&self) -> CoefMatrix {
        &self.b + &self.s
    }
}

/// Regularization weights `(λs, λb)` on the sparse and block components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegPair {
    lambda_s: f64,
    lambda_b: f64,
}

impl RegPair {
    /// Validated pair for an `r`-task dirty model: both weights positive,
    /// `1 < λb/λs ≤ r`, and the ratio not an integer.
    pub fn new(lambda_s: f64, lambda_b: f64, r: usize) -> Result<Self> {
        let reg = Self::unconstrained(lambda_s, lambda_b)?;
        if lambda_s <= 0.0 || lambda_b <= 0.0 {
            return Err(Error::InvalidRegularization(format!(
                "weights must be positive, got lambda_s={lambda_s}, lambda_b={lambda_b}"
            )));
        }
        let ratio = reg.ratio();
        if ratio <= 1.0 || ratio > r as f64 {
            return Err(Error::InvalidRegularization(format!(
                "lambda_b / lambda_s = {ratio} must lie in (1, {r}]"
            )));
        }
        if (ratio - ratio.round()).abs() < INTEGER_RATIO_TOL {
            return Err(Error::IntegerRatio(ratio));
        }
        Ok(reg)
    }

    /// Only checks that both weights are finite and non-negative.
    ///
    /// Used for the single-penalty baselines (where one weight is ignored) and
    /// for limiting cases such as an effectively infinite `λb`.
    pub fn unconstrained(lambda_s: f64, lambda_b: f64) -> Result<Self> {
        for (name, v) in [("lambda_s", lambda_s), ("lambda_b", lambda_b)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidRegularization(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(Self { lambda_s, lambda_b })
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    pub fn lambda_b(&self) -> f64 {
        self.lambda_b
    }

    /// `λb / λs`.
    pub fn ratio(&self) -> f64 {
        self.lambda_b / self.lambda_s
    }
}

/// `p × r` matrix over {−1, 0, +1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSupport(Array2<i8>);

impl SignSupport {
    pub fn new(signs: Array2<i8>) -> Result<Self> {
        if signs.iter().any(|s| !matches!(s, -1..=1)) {
            return Err(Error::InvalidArgument("signs must be -1, 0 or +1".into()));
        }
        Ok(Self(signs))
    }

    pub fn as_array(&self) -> &Array2<i8> {
        &self.0
    }

    pub fn get(&self, j: usize, k: usize) -> i8 {
        self.0[(j, k)]
    }

    pub fn dim(&self) -> (usize, usize) {
        self.0.dim()
    }

    pub fn nnz(&self) -> usize {
        self.0.iter().filter(|&&s| s != 0).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn reg_pair_ratio_bounds() {
        assert!(RegPair::new(1.0, 1.5, 2).is_ok());
        assert!(RegPair::new(1.0, 1.0, 2).is_err());
        assert!(RegPair::new(1.0, 0.9, 2).is_err());
        assert!(RegPair::new(1.0, 2.5, 2).is_err());
        assert!(RegPair::new(0.0, 1.5, 2).is_err());
        assert!(matches!(
            RegPair::new(1.0, 2.0, 3),
            Err(Error::IntegerRatio(_))
        ));
        assert!(matches!(
            RegPair::new(0.1, 0.2 + 1e-12, 3),
            Err(Error::IntegerRatio(_))
        ));
    }

    #[test]
    fn problem_rejects_inconsistent_shapes() {
        let x = Array2::<f64>::zeros((3, 2));
        let y = Array1::<f64>::zeros(3);
        assert!(MultiTaskProblem::new(vec![x.clone()], vec![y.clone()]).is_ok());
        assert!(MultiTaskProblem::new(vec![x.clone()], vec![Array1::zeros(2)]).is_err());
        assert!(
            MultiTaskProblem::new(vec![x, Array2::zeros((3, 3))], vec![y.clone(), y]).is_err()
        );
        assert!(MultiTaskProblem::new(vec![], vec![]).is_err());
    }

    #[test]
    fn coef_matrix_rejects_nan() {
        assert!(CoefMatrix::new(array![[1.0, f64::NAN]]).is_err());
    }

    #[test]
    fn sign_support_rejects_out_of_range() {
        assert!(SignSupport::new(array![[2i8]]).is_err());
        assert_eq!(SignSupport::new(array![[1i8, 0, -1]]).unwrap().nnz(), 2);
    }

    #[test]
    fn permutation_round_trip() {
        let m = CoefMatrix::from_rows(&[vec![1.0, 2.0, 3.0]]).unwrap();
        let p = m.permute_columns(&[2, 0, 1]).unwrap();
        assert_eq!(p.as_array(), &array![[3.0, 1.0, 2.0]]);
        assert!(m.permute_columns(&[0, 0, 1]).is_err());
    }
}
