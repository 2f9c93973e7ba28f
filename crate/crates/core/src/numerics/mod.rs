//! Dense kernels sized for the matrices that appear here (at most a few
//! dozen rows): a symmetric eigensolver, product quadrature on the unit
//! sphere, the moment-constraint (Vandermonde) solve, and derivative-free
//! minimizers.

mod eigen;
mod matrix;
mod minimize;
mod quadrature;
mod vandermonde;

pub use eigen::{eigh_symmetric, EigenDecomposition};
pub use matrix::SymMatrix;
pub use minimize::{
    minimize_multi, minimize_multi_with, minimize_scalar, minimize_scalar_with, MultiMinimum,
    MultiOptions, ScalarMinimum, DEFAULT_SCAN_POINTS,
};
pub use quadrature::{gauss_legendre, sphere_quadrature, SphereNode, SphereQuadrature};
pub use vandermonde::solve_moment_constraints;

/// Entries with magnitude at or below this are skipped when fixing the sign
/// of a vector.
pub const SIGN_THRESHOLD: f64 = 1e-9;

/// Flips `v` in place so that its first entry with `|v_i| > 1e-9` is positive.
pub fn fix_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
