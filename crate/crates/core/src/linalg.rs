//! Small dense least squares and a tridiagonal solver.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Least-squares solution of a tall system with its 2-norm condition number.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    pub condition: f64,
}

/// Solves `min ‖A x − b‖₂` via SVD; `rows` are the rows of `A`.
pub fn least_squares(rows: &[Vec<f64>], rhs: &[f64]) -> Result<LeastSquares> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m < n || n == 0 || rhs.len() != m {
        return Err(Error::InvalidInput(alloc::format!(
            "least squares needs m >= n > 0 (m = {m}, n = {n}, rhs = {})",
            rhs.len()
        )));
    }
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(rhs);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !condition.is_finite() {
        return Err(Error::Singular("least squares"));
    }
    let x = svd.solve(&b, 0.0).map_err(|_| Error::Singular("least squares"))?;
    let r = &a * &x - &b;
    Ok(LeastSquares {
        coefficients: x.iter().copied().collect(),
        residuals: r.iter().copied().collect(),
        condition,
    })
}

/// Thomas algorithm for `lower[i]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1] = rhs[i]`.
///
/// `lower[0]` and `upper[n-1]` are ignored. `scratch` must have length `n`.
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
    scratch: &mut [f64],
) -> Result<()> {
    let n = diag.len();
    if diag[0] == 0.0 {
        return Err(Error::Singular("tridiagonal solve"));
    }
    let mut beta = diag[0];
    rhs[0] /= beta;
    for i in 1..n {
        scratch[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * scratch[i];
        if beta == 0.0 {
            return Err(Error::Singular("tridiagonal solve"));
        }
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_line() {
        let rows: Vec<Vec<f64>> = (0..8).map(|i| vec![i as f64, 1.0]).collect();
        let rhs: Vec<f64> = (0..8).map(|i| 3.0 * i as f64 - 2.0).collect();
        let ls = least_squares(&rows, &rhs).unwrap();
        assert_relative_eq!(ls.coefficients[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(ls.coefficients[1], -2.0, epsilon = 1e-12);
        assert!(ls.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn singular_design_is_an_error() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        assert!(least_squares(&rows, &[1.0; 5]).is_err());
    }

    #[test]
    fn tridiagonal_matches_dense() {
        let n = 6;
        let lower = vec![0.0, -1.0, -1.0, -1.0, -1.0, -1.0];
        let diag = vec![4.0; n];
        let upper = vec![-1.0, -1.0, -1.0, -1.0, -1.0, 0.0];
        let x_true = [1.0, -2.0, 0.5, 3.0, 0.0, 1.5];
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let mut s = diag[i] * x_true[i];
                if i > 0 {
                    s += lower[i] * x_true[i - 1];
                }
                if i + 1 < n {
                    s += upper[i] * x_true[i + 1];
                }
                s
            })
            .collect();
        let mut scratch = vec![0.0; n];
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs, &mut scratch).unwrap();
        for i in 0..n {
            assert_relative_eq!(rhs[i], x_true[i], epsilon = 1e-13);
        }
    }
}
