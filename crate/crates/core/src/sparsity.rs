//! Matrix norms, signed supports and the row statistics `D(·)` / `M(·)`.

use std::collections::BTreeSet;

use ndarray::{Array2, ArrayView1};

use crate::types::{CoefMatrix, SignSupport};

/// Entries below this magnitude are treated as zero in reported supports.
pub const DEFAULT_FILTER_THRESHOLD: f64 = 1e-3;

/// Relative tolerance for "attains the row maximum".
pub const TIE_REL_TOL: f64 = 1e-9;

/// Returns `(‖M‖₁,₁, ‖M‖₁,∞)`.
pub fn matrix_norms(m: &CoefMatrix) -> (f64, f64) {
    let mut l11 = 0.0;
    let mut l1inf = 0.0;
    for row in m.as_array().rows() {
        l11 += row.iter().map(|v| v.abs()).sum::<f64>();
        l1inf += row_linf(row);
    }
    (l11, l1inf)
}

pub(crate) fn row_linf(row: ArrayView1<'_, f64>) -> f64 {
    row.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Indices of a row's maximal-magnitude entries, `M_j`. Empty for a zero row.
pub fn row_max_set(row: ArrayView1<'_, f64>, rel_tol: f64) -> Vec<usize> {
    let top = row_linf(row);
    if top == 0.0 {
        return Vec::new();
    }
    let floor = top * (1.0 - rel_tol);
    row.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() >= floor)
        .map(|(k, _)| k)
        .collect()
}

pub fn signed_support(m: &CoefMatrix, filter_threshold: f64) -> SignSupport {
    let signs: Array2<i8> = m.as_array().mapv(|v| {
        if v.abs() > filter_threshold {
            if v > 0.0 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    });
    SignSupport::new(signs).expect("signs are in range by construction")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparsityStats {
    pub row_support: BTreeSet<usize>,
    pub support: BTreeSet<(usize, usize)>,
    /// `D(M)`: largest number of nonzeros in any row.
    pub d_stat: usize,
    /// `M(M)`: fewest maximal-magnitude entries over nonzero rows; `None` when
    /// every row is zero (the minimum over an empty set).
    pub m_stat: Option<usize>,
}

pub fn sparsity_stats(m: &CoefMatrix, filter_threshold: f64) -> SparsityStats {
    let filtered = m.filtered(filter_threshold);
    let mut row_support = BTreeSet::new();
    let mut support = BTreeSet::new();
    let mut d_stat = 0;
    let mut m_stat: Option<usize> = None;
    for (j, row) in filtered.as_array().rows().into_iter().enumerate() {
        let mut nnz = 0;
        for (k, v) in row.iter().enumerate() {
            if *v != 0.0 {
                support.insert((j, k));
                nnz += 1;
            }
        }
        if nnz > 0 {
            row_support.insert(j);
            let ties = row_max_set(row, TIE_REL_TOL).len();
            m_stat = Some(m_stat.map_or(ties, |m| m.min(ties)));
        }
        d_stat = d_stat.max(nnz);
    }
    SparsityStats {
        row_support,
        support,
        d_stat,
        m_stat,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    fn mat(rows: &[Vec<f64>]) -> CoefMatrix {
        CoefMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn norms_examples() {
        assert_eq!(matrix_norms(&CoefMatrix::zeros(3, 2)), (0.0, 0.0));
        assert_eq!(
            matrix_norms(&mat(&[vec![1.0, -2.0], vec![0.0, 3.0]])),
            (6.0, 5.0)
        );
        assert_eq!(matrix_norms(&mat(&[vec![4.0]])), (4.0, 4.0));
    }

    #[test]
    fn signed_support_examples() {
        let s = signed_support(&mat(&[vec![0.5, -0.0005]]), 1e-3);
        assert_eq!(s.as_array(), &array![[1i8, 0]]);
        let s = signed_support(&mat(&[vec![0.5, -0.0005], vec![0.0, -2.0]]), 0.0);
        assert_eq!(s.as_array(), &array![[1i8, -1], [0, -1]]);
        assert_eq!(signed_support(&CoefMatrix::zeros(2, 2), 1e-3).nnz(), 0);
    }

    #[test]
    fn stats_examples() {
        let st = sparsity_stats(&mat(&[vec![3.0, 3.0, 1.0]]), 0.0);
        assert_eq!(st.d_stat, 3);
        assert_eq!(st.m_stat, Some(2));

        let st = sparsity_stats(&CoefMatrix::zeros(4, 3), 1e-3);
        assert!(st.support.is_empty() && st.row_support.is_empty());
        assert_eq!(st.d_stat, 0);
        assert_eq!(st.m_stat, None);

        let st = sparsity_stats(&mat(&[vec![2.0, 0.0], vec![0.0, -1.0]]), 1e-3);
        assert_eq!(st.support, [(0, 0), (1, 1)].into_iter().collect());
        assert_eq!(st.row_support, [0, 1].into_iter().collect());
        assert_eq!((st.d_stat, st.m_stat), (1, Some(1)));
    }

    #[test]
    fn ties_use_relative_tolerance() {
        let st = sparsity_stats(&mat(&[vec![1.0, -(1.0 - 1e-12), 0.5]]), 0.0);
        assert_eq!(st.m_stat, Some(2));
    }

    fn small_matrix() -> impl Strategy<Value = CoefMatrix> {
        (1usize..6, 1usize..5).prop_flat_map(|(p, r)| {
            proptest::collection::vec(
                prop_oneof![Just(0.0), -3.0f64..3.0, Just(1.5), Just(-1.5)],
                p * r,
            )
            .prop_map(move |v| CoefMatrix::new(Array2::from_shape_vec((p, r), v).unwrap()).unwrap())
        })
    }

    proptest! {
        #[test]
        fn l11_dominates_l1inf(m in small_matrix()) {
            let (l11, l1inf) = matrix_norms(&m);
            prop_assert!(l11 >= l1inf && l1inf >= 0.0);
            let single_per_row = m
                .as_array()
                .rows()
                .into_iter()
                .all(|row| row.iter().filter(|v| **v != 0.0).count() <= 1);
            prop_assert_eq!((l11 - l1inf).abs() < 1e-12, single_per_row);
        }

        #[test]
        fn filtering_composes(m in small_matrix(), t1 in 0.0f64..2.0, dt in 0.0f64..2.0) {
            let t2 = t1 + dt;
            let twice = signed_support(&m.filtered(t1), t2);
            prop_assert_eq!(twice, signed_support(&m, t2));
        }

        #[test]
        fn stats_are_bounded(m in small_matrix(), t in 0.0f64..1.0) {
            let st = sparsity_stats(&m, t);
            prop_assert!(st.d_stat <= m.r());
            prop_assert!(st.support.len() <= m.p() * m.r());
            prop_assert_eq!(st.support.len(), signed_support(&m, t).nnz());
            if !st.row_support.is_empty() {
                prop_assert!(st.m_stat.unwrap() >= 1);
            }
        }
    }
}
