use crate::error::{Error, Result};

use super::fix_sign;

/// Unit vector `C` whose power moments `Σ_j x_j^n C_j`, `n = 0..N-2`, all
/// vanish, where `x_j` are the positions rescaled to [0, 1].
///
/// The N-1 moment conditions leave a one-dimensional nullspace spanned by
/// the leading coefficients of the Lagrange basis polynomials,
/// `C_j ∝ 1 / Π_{k≠j} (x_j − x_k)`, which is the last column of the inverse
/// Vandermonde matrix. The products are accumulated in log domain.
pub fn solve_moment_constraints(positions: &[f64]) -> Result<Vec<f64>> {
    let n = positions.len();
    if n < 2 {
        return Err(Error::Size(format!("need at least 2 positions, got {n}")));
    }
    if positions.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite position".into()));
    }
    let lo = positions.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if span <= 0.0 {
        return Err(Error::Singular("all positions coincide".into()));
    }
    let x: Vec<f64> = positions.iter().map(|p| (p - lo) / span).collect();

    let mut log_mag = vec![0.0; n];
    let mut negative = vec![false; n];
    for j in 0..n {
        for k in 0..n {
            if k == j {
                continue;
            }
            let d = x[j] - x[k];
            if d == 0.0 {
                return Err(Error::Singular(format!("positions {j} and {k} coincide")));
            }
            log_mag[j] -= d.abs().ln();
            negative[j] ^= d < 0.0;
        }
    }
    let top = log_mag.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut c: Vec<f64> = log_mag
        .iter()
        .zip(&negative)
        .map(|(l, neg)| {
            let m = (l - top).exp();
            if *neg {
                -m
            } else {
                m
            }
        })
        .collect();
    let norm = super::norm2(&c);
    c.iter_mut().for_each(|v| *v /= norm);
    fix_sign(&mut c);
    Ok(c)
}
