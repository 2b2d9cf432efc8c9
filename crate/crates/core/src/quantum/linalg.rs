use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use super::NEGATIVE_EIGEN_TOLERANCE;
use crate::error::{Error, Result};

pub(crate) fn to_matrix(dim: usize, entries: &[Complex64]) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(dim, dim, entries)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenvalues within a few ulps of zero (relative to the matrix scale) are
/// round-off; taking their square root would inflate 1e-16 noise to 1e-8.
fn round_off_floor(values: &[f64]) -> f64 {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    4.0 * values.len() as f64 * f64::EPSILON * scale
}

fn clamp_eigenvalue(v: f64, floor: f64) -> Result<f64> {
    if v < -NEGATIVE_EIGEN_TOLERANCE {
        return Err(Error::NotPositive(v));
    }
    Ok(if v <= floor { 0.0 } else { v })
}

/// Principal square root of a Hermitian PSD matrix.
pub(crate) fn psd_sqrt(m: DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let eig = SymmetricEigen::new(m);
    let n = eig.eigenvalues.len();
    let floor = round_off_floor(eig.eigenvalues.as_slice());
    let mut scaled = eig.eigenvectors.clone();
    for (j, &v) in eig.eigenvalues.iter().enumerate() {
        let root = clamp_eigenvalue(v, floor)?.sqrt();
        for i in 0..n {
            scaled[(i, j)] *= Complex64::new(root, 0.0);
        }
    }
    Ok(scaled * eig.eigenvectors.adjoint())
}

/// Σ √λ over the eigenvalues of a Hermitian PSD matrix (trace norm).
pub(crate) fn trace_sqrt(m: DMatrix<Complex64>) -> Result<f64> {
    let values = hermitian_eigenvalues(m);
    let floor = round_off_floor(&values);
    values
        .into_iter()
        .map(|v| clamp_eigenvalue(v, floor).map(f64::sqrt))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_of_diagonal() {
        let m = to_matrix(
            2,
            &[
                Complex64::new(4.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(9.0, 0.0),
            ],
        );
        let r = psd_sqrt(m).unwrap();
        assert!((r[(0, 0)].re - 2.0).abs() < 1e-12);
        assert!((r[(1, 1)].re - 3.0).abs() < 1e-12);
        assert!(r[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn negative_eigenvalues() {
        let tiny = to_matrix(
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-1e-12, 0.0),
            ],
        );
        assert!((trace_sqrt(tiny).unwrap() - 1.0).abs() < 1e-12);
        let bad = to_matrix(
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-0.1, 0.0),
            ],
        );
        assert!(matches!(trace_sqrt(bad), Err(Error::NotPositive(_))));
    }
}
