//! Matrix exponential by scaling and squaring.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Maximum absolute column sum.
fn norm_one(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(m·t)`.
///
/// The argument is halved until its 1-norm is at most 1, the Taylor
/// series is summed until the next term no longer changes the sum in
/// double precision, and the result is squared back up.
pub fn matrix_exponential(m: &DMatrix<f64>, t: f64) -> Result<DMatrix<f64>> {
    if !m.is_square() {
        return Err(Error::shape(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if !t.is_finite() || m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Value("matrix exponential of non-finite input".into()));
    }
    let n = m.nrows();
    let x = m * t;
    let norm = norm_one(&x);

    let mut squarings = 0i32;
    if norm > 1.0 {
        squarings = norm.log2().ceil() as i32;
        // guard against log2 rounding just below the integer
        while norm / 2f64.powi(squarings) > 1.0 {
            squarings += 1;
        }
    }
    let x = x / 2f64.powi(squarings);

    // Terms are collected first and summed smallest-first.
    let mut terms = vec![DMatrix::<f64>::identity(n, n)];
    let mut partial = 1.0;
    for k in 1..=40 {
        let term = &terms[k - 1] * &x / k as f64;
        let term_norm = norm_one(&term);
        terms.push(term);
        partial += term_norm;
        if term_norm == 0.0 || term_norm <= f64::EPSILON * 0.25 * partial.min(1.0) {
            break;
        }
    }
    let mut sum = DMatrix::<f64>::zeros(n, n);
    for term in terms.iter().rev() {
        sum += term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    if sum.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericOverflow {
            at: "matrix exponential".into(),
        });
    }
    Ok(sum)
}
