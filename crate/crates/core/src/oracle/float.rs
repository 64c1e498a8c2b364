use nalgebra::DMatrix;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Inverse of a symmetric positive-definite matrix through its Cholesky factor.
pub fn invert_spd(a: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
    let n = a.rows();
    let m = DMatrix::from_row_slice(n, n, a.data());
    let chol = m.cholesky().ok_or(Error::Singular)?;
    let inv = chol.inverse();
    Ok(DenseMatrix::from_fn(n, n, |r, c| inv[(r, c)]))
}
