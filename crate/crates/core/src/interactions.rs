//! Non-retarded dipole-dipole coupling matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{AtomArray, Polarization};
use crate::numerics::SymMatrix;

/// Real symmetric excitation-transfer matrix in units of `d²k³`, zero on the
/// diagonal. Dimension N for scalar modes, 3N (atom-major, then x, y, z) for
/// vector mode.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingMatrix {
    pub matrix: SymMatrix,
    pub mode: Polarization,
}

impl CouplingMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Scalar chain coupling: `-2/ξ³` (parallel) or `1/ξ³` (perpendicular).
pub fn coupling_chain(array: &AtomArray) -> Result<CouplingMatrix> {
    let mode = array.polarization();
    let sign = mode.coupling_sign()?;
    if !array.is_collinear() {
        return Err(Error::Geometry(
            "chain coupling needs collinear atoms".into(),
        ));
    }
    let matrix = SymMatrix::from_upper(array.n_atoms(), |i, j| {
        if i == j {
            0.0
        } else {
            sign / array.distance(i, j).powi(3)
        }
    });
    Ok(CouplingMatrix { matrix, mode })
}

/// One 3×3 block `(δ_αβ − 3 n_α n_β) / ξ³` for separation vector `r`.
pub fn dipole_block(r: &[f64; 3]) -> [[f64; 3]; 3] {
    let xi = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    let inv3 = 1.0 / (xi * xi * xi);
    let n = [r[0] / xi, r[1] / xi, r[2] / xi];
    let mut b = [[0.0; 3]; 3];
    for (a, row) in b.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            let delta = if a == c { 1.0 } else { 0.0 };
            *v = (delta - 3.0 * n[a] * n[c]) * inv3;
        }
    }
    b
}

/// Full tensor coupling for any geometry.
pub fn coupling_tensor(array: &AtomArray) -> Result<CouplingMatrix> {
    let n = array.n_atoms();
    let mut matrix = SymMatrix::zeros(3 * n);
    for j in 0..n {
        for k in (j + 1)..n {
            let block = dipole_block(&array.separation(j, k));
            for (a, row) in block.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    matrix.set(3 * j + a, 3 * k + b, *v);
                }
            }
        }
    }
    Ok(CouplingMatrix {
        matrix,
        mode: Polarization::Vector3D,
    })
}

/// Mode-appropriate coupling: scalar chain form or full tensor.
pub fn coupling_for(array: &AtomArray) -> Result<CouplingMatrix> {
    if array.polarization().is_scalar() {
        coupling_chain(array)
    } else {
        coupling_tensor(array)
    }
}

/// Nearest-neighbour coupling `U` of an equally spaced chain: `d²/a³` for
/// perpendicular, `-2d²/a³` for parallel. The unit of `Ω/U`.
pub fn nearest_neighbor_coupling(polarization: Polarization, ka: f64) -> Result<f64> {
    Ok(polarization.coupling_sign()? / ka.powi(3))
}
