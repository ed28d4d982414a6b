//! Small dense linear algebra on scalar matrices (SVD rank, kernels, solves).

use nalgebra::{DMatrix, DVector};

use crate::scalar::Scalar;

pub fn to_matrix<S: Scalar>(rows: &[Vec<S>]) -> DMatrix<S> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    DMatrix::from_fn(r, c, |i, j| rows[i][j])
}

/// Singular values in decreasing order.
pub fn singular_values<S: Scalar>(rows: &[Vec<S>]) -> Vec<f64> {
    if rows.is_empty() || rows[0].is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = to_matrix(rows).svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Numerical rank: singular values below `max(rel * sigma_max, floor)` count as zero.
pub fn rank<S: Scalar>(rows: &[Vec<S>], rel: f64, floor: f64) -> usize {
    let sv = singular_values(rows);
    let Some(&top) = sv.first() else {
        return 0;
    };
    let cut = (rel * top).max(floor);
    sv.iter().filter(|&&s| s > cut).count()
}

pub fn norm<S: Scalar>(v: &[S]) -> f64 {
    v.iter().map(|x| x.modulus_squared()).sum::<f64>().sqrt()
}

/// Hermitian inner product `Σ conj(a_i) b_i`.
pub fn inner<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + x.conjugate() * *y)
}

/// Bilinear pairing `Σ a_i b_i` between a space and its dual.
pub fn pair<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + *x * *y)
}

/// Solves the square real system `a x = b`; `None` when singular.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = to_matrix(a);
    let rhs = DVector::from_column_slice(b);
    m.lu().solve(&rhs).map(|x| x.iter().copied().collect())
}
