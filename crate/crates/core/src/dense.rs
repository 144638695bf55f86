//! Dense kernels backed by `nalgebra`: LU solve and symmetric eigenvalues.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::DenseScalar;

fn to_na<T: DenseScalar>(m: &Matrix<T>) -> DMatrix<T> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

/// Solves `A x = b` by LU with partial pivoting.
pub fn lu_solve<T: DenseScalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            expected: a.rows(),
            actual: b.len(),
        });
    }
    let lu = to_na(a).lu();
    let x = lu
        .solve(&DVector::from_column_slice(b))
        .ok_or(Error::Singular)?;
    if x.iter().any(|v| !num_traits::Float::is_finite(*v)) {
        return Err(Error::Singular);
    }
    Ok(x.iter().copied().collect())
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn symmetric_eigenvalues<T: DenseScalar>(a: &Matrix<T>) -> Vec<T> {
    let mut ev: Vec<T> = to_na(a)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
    ev
}

/// Eigenpairs `(λ, v)` of a symmetric matrix, ascending in `λ`.
pub fn symmetric_eigenpairs<T: DenseScalar>(a: &Matrix<T>) -> Vec<(T, Vec<T>)> {
    let eig = to_na(a).symmetric_eigen();
    let mut pairs: Vec<(T, Vec<T>)> = (0..a.rows())
        .map(|k| {
            (
                eig.eigenvalues[k],
                eig.eigenvectors.column(k).iter().copied().collect(),
            )
        })
        .collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite eigenvalues"));
    pairs
}

pub fn min_eigenvalue<T: DenseScalar>(a: &Matrix<T>) -> T {
    symmetric_eigenvalues(a)[0]
}
