//! Construction of the minimal-decay (superdark) exciton vector.
//!
//! Three independent routes: the lowest eigenvector of `W`, the
//! moment-constraint solve for an arbitrary collinear array, and the
//! alternating-binomial closed form for an equally spaced chain.

use serde::Serialize;

use crate::decay::DecayMatrix;
use crate::error::{Error, Result};
use crate::geometry::{AtomArray, Polarization};
use crate::numerics::{eigh_symmetric, fix_sign, norm2, solve_moment_constraints};

const NORM_TOL: f64 = 1e-12;
pub const MAX_BINOMIAL_N: usize = 16;

/// Real, unit-norm coefficient vector of a singly excited state. Length N in
/// scalar modes, 3N (atom-major) in vector mode.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcitonVector {
    coefficients: Vec<f64>,
    mode: Polarization,
}

impl ExcitonVector {
    /// Wraps `coefficients`, which must already have unit norm (±1e-12).
    pub fn new(coefficients: Vec<f64>, mode: Polarization) -> Result<Self> {
        let norm = norm2(&coefficients);
        if coefficients.is_empty() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { coefficients, mode })
    }

    /// Scales `coefficients` to unit norm.
    pub fn normalized(mut coefficients: Vec<f64>, mode: Polarization) -> Result<Self> {
        let norm = norm2(&coefficients);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        coefficients.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { coefficients, mode })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn mode(&self) -> Polarization {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn max_abs_diff(&self, other: &ExcitonVector) -> f64 {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Lowest eigenvector of `W` and its decay rate: the global minimum of
/// `Cᵀ W C` over unit vectors. The rate is re-evaluated through the
/// emission integral so it stays accurate below the matrix rounding floor.
pub fn darkest_eigenvector(w: &DecayMatrix) -> Result<(ExcitonVector, f64)> {
    let eig = eigh_symmetric(&w.matrix)?;
    let mut v = eig.vectors[0].clone();
    fix_sign(&mut v);
    let state = ExcitonVector::normalized(v, w.mode)?;
    let rate = w.rate(state.coefficients())?;
    Ok((state, rate))
}

/// Unit vector annihilating the first N−1 power moments of the axial
/// coordinates. Requires a collinear scalar-mode array.
pub fn moment_dark_state(array: &AtomArray) -> Result<ExcitonVector> {
    if !array.polarization().is_scalar() {
        return Err(Error::Usage(
            "moment construction is defined for scalar-mode chains; use darkest_eigenvector".into(),
        ));
    }
    let x = array
        .axial_coordinates()
        .ok_or_else(|| Error::Geometry("moment construction needs collinear atoms".into()))?;
    let c = solve_moment_constraints(&x)?;
    ExcitonVector::normalized(c, array.polarization())
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// `C_j = (−1)^{j−1} [(N−1)!]² / ((j−1)! (N−j)! √((2N−2)!))` for an equally
/// spaced chain of `n` atoms, evaluated in log domain then renormalized.
pub fn binomial_dark_state(n: usize, mode: Polarization) -> Result<ExcitonVector> {
    if !(2..=MAX_BINOMIAL_N).contains(&n) {
        return Err(Error::Size(format!(
            "binomial dark state supports 2 <= N <= {MAX_BINOMIAL_N}, got {n}"
        )));
    }
    let top = 2.0 * ln_factorial(n - 1) - 0.5 * ln_factorial(2 * n - 2);
    let c: Vec<f64> = (1..=n)
        .map(|j| {
            let mag = (top - (ln_factorial(j - 1) + ln_factorial(n - j))).exp();
            if (j - 1) % 2 == 0 {
                mag
            } else {
                -mag
            }
        })
        .collect();
    ExcitonVector::normalized(c, mode)
}

/// Leading-order decay rate of the binomial state of an equally spaced chain:
/// `3/(4N²−1) · [(N−1)!]²/(2N−2)! · (ka)^{2(N−1)}`, times N for the
/// perpendicular mode.
pub fn asymptotic_rate(n: usize, ka: f64, mode: Polarization) -> Result<f64> {
    let factor = match mode {
        Polarization::Parallel => 1.0,
        Polarization::Perpendicular => n as f64,
        Polarization::Vector3D => {
            return Err(Error::Usage(
                "asymptotic rate is defined for parallel or perpendicular chains".into(),
            ))
        }
    };
    if n < 2 {
        return Err(Error::Size(format!("need N >= 2, got {n}")));
    }
    if ka.is_nan() || ka <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "ka must be positive, got {ka}"
        )));
    }
    let nf = n as f64;
    let ln_ratio = 2.0 * ln_factorial(n - 1) - ln_factorial(2 * n - 2);
    let power = 2.0 * (nf - 1.0) * ka.ln();
    Ok(3.0 / (4.0 * nf * nf - 1.0) * (ln_ratio + power).exp() * factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decay::decay_matrix_chain;
    use crate::geometry::{make_chain, ChainSpec};

    fn chain(n: usize, ka: f64, pol: Polarization) -> AtomArray {
        make_chain(ChainSpec::new(n, ka).unwrap(), pol).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn binomial_small_cases() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let two = binomial_dark_state(2, Polarization::Parallel).unwrap();
        assert!(close(two.coefficients(), &[h, -h], 1e-15));
        let s6 = 6f64.sqrt();
        let three = binomial_dark_state(3, Polarization::Parallel).unwrap();
        assert!(close(
            three.coefficients(),
            &[1.0 / s6, -2.0 / s6, 1.0 / s6],
            1e-15
        ));
        let s70 = 70f64.sqrt();
        let five = binomial_dark_state(5, Polarization::Perpendicular).unwrap();
        let expect: Vec<f64> = [1.0, -4.0, 6.0, -4.0, 1.0]
            .iter()
            .map(|v| v / s70)
            .collect();
        assert!(close(five.coefficients(), &expect, 1e-15));
    }

    #[test]
    fn binomial_is_normalized_before_renormalization() {
        // the closed form is already unit norm; renormalization only trims rounding
        for n in 2..=MAX_BINOMIAL_N {
            let top = 2.0 * ln_factorial(n - 1) - 0.5 * ln_factorial(2 * n - 2);
            let norm2: f64 = (1..=n)
                .map(|j| (2.0 * (top - ln_factorial(j - 1) - ln_factorial(n - j))).exp())
                .sum();
            assert!((norm2 - 1.0).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn binomial_symmetry() {
        for n in 2..=MAX_BINOMIAL_N {
            let c = binomial_dark_state(n, Polarization::Parallel).unwrap();
            let c = c.coefficients();
            let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
            for j in 0..n {
                assert_eq!(c[j], sign * c[n - 1 - j], "n = {n}, j = {j}");
            }
        }
    }

    #[test]
    fn binomial_range() {
        assert!(matches!(
            binomial_dark_state(1, Polarization::Parallel),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            binomial_dark_state(17, Polarization::Parallel),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn moment_state_examples() {
        let c3 = moment_dark_state(&chain(3, 0.2, Polarization::Parallel)).unwrap();
        let s6 = 6f64.sqrt();
        assert!(close(
            c3.coefficients(),
            &[1.0 / s6, -2.0 / s6, 1.0 / s6],
            1e-15
        ));
        let c4 = moment_dark_state(&chain(4, 0.2, Polarization::Parallel)).unwrap();
        let s20 = 20f64.sqrt();
        let expect: Vec<f64> = [1.0, -3.0, 3.0, -1.0].iter().map(|v| v / s20).collect();
        assert!(close(c4.coefficients(), &expect, 1e-15));
        let uneven = AtomArray::with_polarization(
            vec![[0.0; 3], [0.0, 0.0, 1.0 / 3.0], [0.0, 0.0, 1.0]],
            Polarization::Perpendicular,
        )
        .unwrap();
        let c = moment_dark_state(&uneven).unwrap();
        let s14 = 14f64.sqrt();
        assert!(close(
            c.coefficients(),
            &[2.0 / s14, -3.0 / s14, 1.0 / s14],
            1e-15
        ));
    }

    #[test]
    fn moment_state_rejects_vector_mode() {
        let a = crate::geometry::make_array(vec![[0.0; 3], [0.0, 0.0, 1.0]]).unwrap();
        assert!(matches!(moment_dark_state(&a), Err(Error::Usage(_))));
    }

    #[test]
    fn binomial_equals_moment_solution() {
        for n in 2..=8 {
            let b = binomial_dark_state(n, Polarization::Parallel).unwrap();
            let m = moment_dark_state(&chain(n, 0.37, Polarization::Parallel)).unwrap();
            assert!(b.max_abs_diff(&m) <= 1e-12, "n = {n}");
        }
    }

    #[test]
    fn asymptotic_examples() {
        let par = asymptotic_rate(3, 0.1, Polarization::Parallel).unwrap();
        assert!((par - 3.0 / 35.0 * 4.0 / 24.0 * 1e-4).abs() < 1e-18);
        assert!((par - 1.42857e-6).abs() < 1e-11);
        let perp = asymptotic_rate(3, 0.1, Polarization::Perpendicular).unwrap();
        assert!((perp - 4.2857e-6).abs() < 1e-10);
        assert!((perp / 1.62e-6 - 2.64).abs() < 0.01);
        for ka in [0.01, 0.3, 2.0] {
            let two = asymptotic_rate(2, ka, Polarization::Parallel).unwrap();
            assert!((two - 0.1 * ka * ka).abs() < 1e-15 * ka * ka);
        }
        assert!(asymptotic_rate(3, 0.1, Polarization::Vector3D).is_err());
        assert!(asymptotic_rate(3, 0.0, Polarization::Parallel).is_err());
    }

    #[test]
    fn darkest_eigenvector_cases() {
        let single = decay_matrix_chain(&AtomArray::single_atom(Polarization::Parallel)).unwrap();
        let (v, rate) = darkest_eigenvector(&single).unwrap();
        assert_eq!(v.coefficients(), &[1.0]);
        assert!((rate - 1.0).abs() < 1e-14);

        let compact =
            AtomArray::with_polarization(vec![[0.0; 3], [0.0, 0.0, 1e-9]], Polarization::Parallel)
                .unwrap();
        let (v, rate) = darkest_eigenvector(&decay_matrix_chain(&compact).unwrap()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(v.coefficients(), &[h, -h], 1e-12));
        assert!(rate.abs() < 1e-15);

        let w = decay_matrix_chain(&chain(3, 0.1, Polarization::Parallel)).unwrap();
        let (_, rate) = darkest_eigenvector(&w).unwrap();
        assert!((0.0..=1.43e-6).contains(&rate));
        let b = binomial_dark_state(3, Polarization::Parallel).unwrap();
        assert!(rate <= w.rate(b.coefficients()).unwrap());
    }

    #[test]
    fn exciton_vector_norm_checks() {
        assert!(ExcitonVector::new(vec![1.0, 1.0], Polarization::Parallel).is_err());
        assert!(ExcitonVector::normalized(vec![0.0, 0.0], Polarization::Parallel).is_err());
        let v = ExcitonVector::normalized(vec![3.0, 4.0], Polarization::Parallel).unwrap();
        assert_eq!(v.coefficients(), &[0.6, 0.8]);
    }
}
