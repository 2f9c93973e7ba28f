//! Per-atom frequency shifts that turn a chosen vector into an exact
//! eigenstate of the atomic Hamiltonian `H = diag(ω) + U`.
//!
//! Two gauges appear: zero-sum (`Σ ω_j = 0`, the natural output of the
//! tuning formulas) and edge-referenced (`ω_1 = 0`, used as the scan
//! parameterization). They differ by a constant, which moves every eigenvalue
//! and leaves every eigenvector alone.

use serde::Serialize;

use crate::darkstate::ExcitonVector;
use crate::error::{Error, Result};
use crate::geometry::Polarization;
use crate::interactions::CouplingMatrix;
use crate::numerics::SymMatrix;

const MIN_COMPONENT: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct TuningResult {
    /// Zero-sum shifts, units of `d²k³`.
    pub shifts: Vec<f64>,
    pub eigenenergy: f64,
    pub target: ExcitonVector,
}

impl TuningResult {
    /// Shifts with the first atom as zero reference.
    pub fn edge_referenced(&self) -> Vec<f64> {
        let edge = self.shifts[0];
        self.shifts.iter().map(|w| w - edge).collect()
    }

    /// Eigenenergy in the edge-referenced gauge.
    pub fn edge_referenced_energy(&self) -> f64 {
        self.eigenenergy - self.shifts[0]
    }

    /// `Ω = ω_2 − ω_1`: detuning of the second atom from the edge.
    pub fn omega(&self) -> f64 {
        if self.shifts.len() < 2 {
            return 0.0;
        }
        self.shifts[1] - self.shifts[0]
    }
}

/// `E = (1/N) Σ_j (UC)_j / C_j` and `ω_j = E − (UC)_j / C_j`.
pub fn tune_frequencies(u: &CouplingMatrix, c: &ExcitonVector) -> Result<TuningResult> {
    if u.mode == Polarization::Vector3D {
        return Err(Error::Usage(
            "frequency tuning is defined for scalar modes only".into(),
        ));
    }
    if c.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: c.len(),
        });
    }
    let coeffs = c.coefficients();
    if let Some((index, value)) = coeffs
        .iter()
        .enumerate()
        .find(|(_, v)| v.abs() <= MIN_COMPONENT)
    {
        return Err(Error::DegenerateTarget {
            index,
            value: *value,
        });
    }
    let uc = u.matrix.matvec(coeffs);
    let ratios: Vec<f64> = uc.iter().zip(coeffs).map(|(a, b)| a / b).collect();
    let n = ratios.len() as f64;
    let eigenenergy = ratios.iter().sum::<f64>() / n;
    let shifts = ratios.iter().map(|r| eigenenergy - r).collect();
    Ok(TuningResult {
        shifts,
        eigenenergy,
        target: c.clone(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct TunedHamiltonian {
    pub matrix: SymMatrix,
    pub mode: Polarization,
}

impl TunedHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// `H = diag(shifts) + U`, any gauge.
pub fn build_hamiltonian(u: &CouplingMatrix, shifts: &[f64]) -> Result<TunedHamiltonian> {
    if shifts.len() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: shifts.len(),
        });
    }
    Ok(TunedHamiltonian {
        matrix: u.matrix.with_added_diagonal(shifts),
        mode: u.mode,
    })
}

/// Eigen-residual `‖H C − (Cᵀ H C) C‖∞`.
pub fn verify_eigenstate(h: &TunedHamiltonian, c: &ExcitonVector) -> Result<f64> {
    if c.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: c.len(),
        });
    }
    let v = c.coefficients();
    let hv = h.matrix.matvec(v);
    let e: f64 = hv.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok(hv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - e * b).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darkstate::binomial_dark_state;
    use crate::geometry::{make_chain, ChainSpec};
    use crate::interactions::{coupling_chain, nearest_neighbor_coupling};
    use crate::numerics::eigh_symmetric;

    fn coupling(n: usize, ka: f64, pol: Polarization) -> CouplingMatrix {
        coupling_chain(&make_chain(ChainSpec::new(n, ka).unwrap(), pol).unwrap()).unwrap()
    }

    #[test]
    fn three_atom_perpendicular_exact_values() {
        let u = coupling(3, 1.0, Polarization::Perpendicular);
        let c = binomial_dark_state(3, Polarization::Perpendicular).unwrap();
        let t = tune_frequencies(&u, &c).unwrap();
        assert!((t.eigenenergy + 19.0 / 12.0).abs() < 1e-14);
        let expect = [7.0 / 24.0, -7.0 / 12.0, 7.0 / 24.0];
        for (a, b) in t.shifts.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!((t.omega() + 7.0 / 8.0).abs() < 1e-14);
        assert!(t.shifts.iter().sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn pair_needs_no_shift() {
        for u12 in [0.3, -2.0, 17.0] {
            let u = CouplingMatrix {
                matrix: SymMatrix::from_rows(&[vec![0.0, u12], vec![u12, 0.0]]).unwrap(),
                mode: Polarization::Parallel,
            };
            let c = binomial_dark_state(2, Polarization::Parallel).unwrap();
            let t = tune_frequencies(&u, &c).unwrap();
            assert!(t.shifts.iter().all(|w| w.abs() < 1e-14));
            assert!((t.eigenenergy + u12).abs() < 1e-14);
        }
    }

    #[test]
    fn four_atom_omega_ratio() {
        for pol in [Polarization::Parallel, Polarization::Perpendicular] {
            for ka in [0.1, 1.0] {
                let u = coupling(4, ka, pol);
                let c = binomial_dark_state(4, pol).unwrap();
                let t = tune_frequencies(&u, &c).unwrap();
                let unn = nearest_neighbor_coupling(pol, ka).unwrap();
                assert!((t.omega() / unn + 37.0 / 27.0).abs() < 1e-12);
                let edge = t.edge_referenced();
                assert_eq!(edge[0], 0.0);
                assert!((edge[1] - edge[2]).abs() < 1e-12 * unn.abs());
            }
        }
    }

    #[test]
    fn degenerate_target_rejected() {
        let u = coupling(3, 1.0, Polarization::Parallel);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c = ExcitonVector::new(vec![h, 0.0, -h], Polarization::Parallel).unwrap();
        assert!(matches!(
            tune_frequencies(&u, &c),
            Err(Error::DegenerateTarget { index: 1, .. })
        ));
    }

    #[test]
    fn hamiltonian_assembly() {
        let u = coupling(2, 1.0, Polarization::Perpendicular);
        let h = build_hamiltonian(&u, &[0.0, 0.0]).unwrap();
        assert_eq!(h.matrix, u.matrix);
        let d = 0.7;
        let h = build_hamiltonian(&u, &[d, -d]).unwrap();
        let e = eigh_symmetric(&h.matrix).unwrap();
        let r = (1.0f64 + d * d).sqrt();
        assert!((e.values[0] + r).abs() < 1e-14 && (e.values[1] - r).abs() < 1e-14);
        assert!(build_hamiltonian(&u, &[0.0]).is_err());
    }

    #[test]
    fn tuned_eigenpair_reproduced_by_eigensolver() {
        let u = coupling(3, 1.0, Polarization::Perpendicular);
        let c = binomial_dark_state(3, Polarization::Perpendicular).unwrap();
        let t = tune_frequencies(&u, &c).unwrap();
        let h = build_hamiltonian(&u, &t.shifts).unwrap();
        assert!(verify_eigenstate(&h, &c).unwrap() <= 1e-12);
        let e = eigh_symmetric(&h.matrix).unwrap();
        let k = e
            .values
            .iter()
            .position(|v| (v - t.eigenenergy).abs() < 1e-11)
            .expect("tuned energy is an eigenvalue");
        let v = &e.vectors[k];
        let overlap: f64 = v.iter().zip(c.coefficients()).map(|(a, b)| a * b).sum();
        assert!((overlap.abs() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn untuned_binomial_is_not_an_eigenstate() {
        let u = coupling(3, 1.0, Polarization::Perpendicular);
        let c = binomial_dark_state(3, Polarization::Perpendicular).unwrap();
        let h = build_hamiltonian(&u, &[0.0; 3]).unwrap();
        assert!(verify_eigenstate(&h, &c).unwrap() > 1e-3);
    }

    #[test]
    fn eigensolver_vectors_have_small_residual() {
        let u = coupling(5, 0.4, Polarization::Parallel);
        let h = build_hamiltonian(&u, &[0.1, -0.3, 0.5, 0.0, 0.2]).unwrap();
        let e = eigh_symmetric(&h.matrix).unwrap();
        for v in e.vectors {
            let c = ExcitonVector::normalized(v, Polarization::Parallel).unwrap();
            assert!(verify_eigenstate(&h, &c).unwrap() <= 1e-11 * h.matrix.norm_inf());
        }
    }

    #[test]
    fn symmetric_shifts_for_symmetric_targets() {
        for n in 2..=8 {
            for pol in [Polarization::Parallel, Polarization::Perpendicular] {
                let u = coupling(n, 0.5, pol);
                let c = binomial_dark_state(n, pol).unwrap();
                let t = tune_frequencies(&u, &c).unwrap();
                let scale = u.matrix.norm_inf();
                for j in 0..n {
                    assert!((t.shifts[j] - t.shifts[n - 1 - j]).abs() <= 1e-12 * scale);
                }
                assert!(t.shifts.iter().sum::<f64>().abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn vector_mode_rejected() {
        let a = crate::geometry::make_array(vec![[0.0; 3], [0.0, 0.0, 1.0]]).unwrap();
        let u = crate::interactions::coupling_tensor(&a).unwrap();
        let c = ExcitonVector::normalized(vec![1.0; 6], Polarization::Vector3D).unwrap();
        assert!(matches!(tune_frequencies(&u, &c), Err(Error::Usage(_))));
    }
}
