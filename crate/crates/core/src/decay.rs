//! Collective decay matrices `W` with `Γ_N/Γ = Cᵀ W C`, and accurate decay
//! rates for individual states.
//!
//! `W` is built three ways: closed forms for collinear scalar modes, the
//! closed tensor form for arbitrary geometry, and direct quadrature of the
//! far-field integral. The quadrature route is the independent check on the
//! other two.
//!
//! Rates of deeply subradiant states sit far below the rounding floor of
//! `Cᵀ W C` (about `1e-16 · N`), so [`decay_rate`] integrates the squared
//! emission amplitude `|Σ_j C_j e^{i k·R_j}|²` instead. The amplitude keeps
//! full relative precision down to rates of order `1e-30`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::darkstate::ExcitonVector;
use crate::error::{Error, Result};
use crate::geometry::{dot, AtomArray, Polarization, Vec3};
use crate::numerics::{gauss_legendre, SphereQuadrature, SymMatrix};

const SERIES_CUTOFF: f64 = 1.0;
const SERIES_TERMS: usize = 12;
const NORM_TOL: f64 = 1e-9;
const QUADRATURE_DIAGONAL_TOL: f64 = 1e-8;

/// `3 (sin ξ − ξ cos ξ) / ξ³`, dipoles along the separation.
pub fn w_parallel(xi: f64) -> f64 {
    let xi = xi.abs();
    if xi < SERIES_CUTOFF {
        series_parallel(xi)
    } else {
        let (s, c) = xi.sin_cos();
        3.0 * (s - xi * c) / (xi * xi * xi)
    }
}

/// `(3/2) (ξ cos ξ + (ξ² − 1) sin ξ) / ξ³`, dipoles across the separation.
pub fn w_perpendicular(xi: f64) -> f64 {
    let xi = xi.abs();
    if xi < SERIES_CUTOFF {
        1.5 * series_sinc(xi) - 0.5 * series_parallel(xi)
    } else {
        let (s, c) = xi.sin_cos();
        1.5 * (xi * c + (xi * xi - 1.0) * s) / (xi * xi * xi)
    }
}

// Σ_m (−1)^m 6(m+1)/(2m+3)! ξ^{2m}
fn series_parallel(xi: f64) -> f64 {
    let x2 = xi * xi;
    let mut coeff = 1.0; // 6·1/3!
    let mut power = 1.0;
    let mut sum = 0.0;
    for m in 0..SERIES_TERMS {
        sum += coeff * power;
        let mf = m as f64;
        coeff *= -(mf + 2.0) / (mf + 1.0) / ((2.0 * mf + 4.0) * (2.0 * mf + 5.0));
        power *= x2;
    }
    sum
}

// sin ξ / ξ
fn series_sinc(xi: f64) -> f64 {
    let x2 = xi * xi;
    let mut term = 1.0;
    let mut sum = 0.0;
    for m in 0..SERIES_TERMS {
        sum += term;
        let mf = m as f64;
        term *= -x2 / ((2.0 * mf + 2.0) * (2.0 * mf + 3.0));
    }
    sum
}

/// 3×3 block of the vector-mode decay matrix for separation `r`:
/// `W⊥(ξ) δ_αβ + (W∥(ξ) − W⊥(ξ)) r̂_α r̂_β`. At `r = 0` this is `δ_αβ`.
pub fn w_tensor_block(r: &Vec3) -> [[f64; 3]; 3] {
    let xi = dot(r, r).sqrt();
    let mut b = [[0.0; 3]; 3];
    if xi == 0.0 {
        for (a, row) in b.iter_mut().enumerate() {
            row[a] = 1.0;
        }
        return b;
    }
    let perp = w_perpendicular(xi);
    let diff = w_parallel(xi) - perp;
    let n = [r[0] / xi, r[1] / xi, r[2] / xi];
    for (a, row) in b.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            let delta = if a == c { perp } else { 0.0 };
            *v = delta + diff * n[a] * n[c];
        }
    }
    b
}

/// Decay matrix together with the emission integral for the same geometry.
#[derive(Debug, Clone, Serialize)]
pub struct DecayMatrix {
    pub matrix: SymMatrix,
    pub mode: Polarization,
    #[serde(skip)]
    emission: EmissionIntegral,
}

impl DecayMatrix {
    fn new(matrix: SymMatrix, array: &AtomArray) -> Self {
        Self {
            matrix,
            mode: array.polarization(),
            emission: EmissionIntegral::new(array),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Plain `cᵀ W c` from the stored matrix.
    pub fn quadratic_form(&self, c: &[f64]) -> f64 {
        self.matrix.quadratic_form(c)
    }

    /// `Γ_N/Γ` for unit coefficient vector `c`, from the emission integral.
    pub fn rate(&self, c: &[f64]) -> Result<f64> {
        self.check_dim(c.len())?;
        let norm = crate::numerics::norm2(c);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(self.emission.rate(c).max(0.0))
    }

    /// Symmetric bilinear form `aᵀ W b` from the emission integral; no
    /// normalization requirement.
    pub fn bilinear(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        self.check_dim(a.len())?;
        self.check_dim(b.len())?;
        Ok(self.emission.bilinear(a, b))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Closed-form scalar-mode decay matrix of a collinear array.
pub fn decay_matrix_chain(array: &AtomArray) -> Result<DecayMatrix> {
    let f: fn(f64) -> f64 = match array.polarization() {
        Polarization::Parallel => w_parallel,
        Polarization::Perpendicular => w_perpendicular,
        Polarization::Vector3D => {
            return Err(Error::Usage(
                "closed-form chain decay matrix needs a scalar polarization".into(),
            ))
        }
    };
    if !array.is_collinear() {
        return Err(Error::Geometry(
            "chain decay matrix needs collinear atoms".into(),
        ));
    }
    let matrix = SymMatrix::from_upper(array.n_atoms(), |i, j| {
        if i == j {
            1.0
        } else {
            f(array.distance(i, j))
        }
    });
    Ok(DecayMatrix::new(matrix, array))
}

/// Closed-form 3N×3N decay matrix for arbitrary geometry.
///
/// A scalar-mode array is treated as its vector-mode counterpart.
pub fn decay_matrix_tensor(array: &AtomArray) -> Result<DecayMatrix> {
    let n = array.n_atoms();
    let mut matrix = SymMatrix::zeros(3 * n);
    for j in 0..n {
        for k in j..n {
            let block = w_tensor_block(&array.separation(j, k));
            for (a, row) in block.iter().enumerate() {
                for (b, v) in row.iter().enumerate() {
                    if j != k || a <= b {
                        matrix.set(3 * j + a, 3 * k + b, *v);
                    }
                }
            }
        }
    }
    let vector = vector_view(array);
    Ok(DecayMatrix::new(matrix, &vector))
}

/// Mode-appropriate closed form.
pub fn decay_matrix_for(array: &AtomArray) -> Result<DecayMatrix> {
    if array.polarization().is_scalar() {
        decay_matrix_chain(array)
    } else {
        decay_matrix_tensor(array)
    }
}

/// `W` by direct quadrature of `(3/8π) ∫ dΩ (δ_αβ − k̂_α k̂_β) e^{i k̂·(R_j − R_k)}`.
///
/// Scalar modes project onto the mode's dipole direction. Fails if any
/// diagonal entry misses 1 by more than `1e-8`.
pub fn decay_matrix_quadrature(array: &AtomArray, quad: &SphereQuadrature) -> Result<DecayMatrix> {
    let n = array.n_atoms();
    let prefactor = 3.0 / (8.0 * PI);
    let dirs: Vec<(f64, Vec3)> = quad
        .nodes
        .iter()
        .map(|node| (node.weight * prefactor, node.direction()))
        .collect();

    let matrix = match array.polarization() {
        Polarization::Vector3D => {
            let mut m = SymMatrix::zeros(3 * n);
            for j in 0..n {
                for k in j..n {
                    let r = array.separation(j, k);
                    let mut block = [[0.0; 3]; 3];
                    for (w, khat) in &dirs {
                        let phase = w * dot(khat, &r).cos();
                        for (a, row) in block.iter_mut().enumerate() {
                            for (b, v) in row.iter_mut().enumerate() {
                                let delta = if a == b { 1.0 } else { 0.0 };
                                *v += phase * (delta - khat[a] * khat[b]);
                            }
                        }
                    }
                    for (a, row) in block.iter().enumerate() {
                        for (b, v) in row.iter().enumerate() {
                            if j != k || a <= b {
                                m.set(3 * j + a, 3 * k + b, *v);
                            }
                        }
                    }
                }
            }
            m
        }
        _ => {
            let d = array
                .dipole_direction()
                .ok_or_else(|| Error::Geometry("scalar mode needs collinear atoms".into()))?;
            SymMatrix::from_upper(n, |j, k| {
                let r = array.separation(j, k);
                dirs.iter()
                    .map(|(w, khat)| {
                        let proj = dot(khat, &d);
                        w * (1.0 - proj * proj) * dot(khat, &r).cos()
                    })
                    .sum()
            })
        }
    };

    let deviation = (0..matrix.dim())
        .map(|i| (matrix.get(i, i) - 1.0).abs())
        .fold(0.0, f64::max);
    if deviation > QUADRATURE_DIAGONAL_TOL {
        return Err(Error::Accuracy { deviation });
    }
    Ok(DecayMatrix::new(matrix, array))
}

/// `Γ_N/Γ` of `c` under `w`. Negative round-off is clipped to zero.
pub fn decay_rate(w: &DecayMatrix, c: &ExcitonVector) -> Result<f64> {
    w.rate(c.coefficients())
}

fn vector_view(array: &AtomArray) -> AtomArray {
    if array.polarization() == Polarization::Vector3D {
        return array.clone();
    }
    if array.n_atoms() < 2 {
        return AtomArray::single_atom(Polarization::Vector3D);
    }
    AtomArray::from_positions(array.positions().to_vec())
        .expect("positions were validated when the array was built")
}

/// Far-field emission integral, precomputed for one geometry.
#[derive(Debug, Clone)]
enum EmissionIntegral {
    /// Collinear scalar mode: azimuth integrated analytically, Gauss-Legendre
    /// in `u = cos θ` about the chain axis. `weights` fold in the angular
    /// factor; `phases[i][j] = (cos, sin)(x_j u_i)`.
    Axial {
        weights: Vec<f64>,
        phases: Vec<Vec<(f64, f64)>>,
    },
    /// Vector mode over the full sphere.
    Sphere {
        weights: Vec<f64>,
        directions: Vec<Vec3>,
        phases: Vec<Vec<(f64, f64)>>,
    },
}

impl EmissionIntegral {
    fn new(array: &AtomArray) -> Self {
        let n_nodes = (2.0 * array.extent()).ceil() as usize + 48;
        let n_nodes = n_nodes.max(SphereQuadrature::DEFAULT_N_THETA);
        match (array.polarization(), array.axial_coordinates()) {
            (pol @ (Polarization::Parallel | Polarization::Perpendicular), Some(x)) => {
                let (u, wu) = gauss_legendre(n_nodes);
                let weights = u
                    .iter()
                    .zip(&wu)
                    .map(|(u, w)| match pol {
                        Polarization::Parallel => 0.75 * (1.0 - u * u) * w,
                        _ => 0.375 * (1.0 + u * u) * w,
                    })
                    .collect();
                let phases = u
                    .iter()
                    .map(|u| {
                        x.iter()
                            .map(|x| (x * u).sin_cos())
                            .map(|(s, c)| (c, s))
                            .collect()
                    })
                    .collect();
                EmissionIntegral::Axial { weights, phases }
            }
            _ => {
                let quad = crate::numerics::sphere_quadrature(n_nodes, n_nodes)
                    .expect("node counts are at least 64");
                let prefactor = 3.0 / (8.0 * PI);
                let origin = array.positions()[0];
                let weights = quad.nodes.iter().map(|n| n.weight * prefactor).collect();
                let directions: Vec<Vec3> = quad.nodes.iter().map(|n| n.direction()).collect();
                let phases = directions
                    .iter()
                    .map(|k| {
                        array
                            .positions()
                            .iter()
                            .map(|p| {
                                let r = crate::geometry::sub(p, &origin);
                                let (s, c) = dot(k, &r).sin_cos();
                                (c, s)
                            })
                            .collect()
                    })
                    .collect();
                EmissionIntegral::Sphere {
                    weights,
                    directions,
                    phases,
                }
            }
        }
    }

    fn rate(&self, c: &[f64]) -> f64 {
        self.bilinear(c, c)
    }

    fn bilinear(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            EmissionIntegral::Axial { weights, phases } => weights
                .iter()
                .zip(phases)
                .map(|(w, ph)| {
                    let (ar, ai) = amplitude(ph, a);
                    let (br, bi) = amplitude(ph, b);
                    w * (ar * br + ai * bi)
                })
                .sum(),
            EmissionIntegral::Sphere {
                weights,
                directions,
                phases,
            } => weights
                .iter()
                .zip(directions)
                .zip(phases)
                .map(|((w, k), ph)| {
                    let va = vector_amplitude(ph, a);
                    let vb = vector_amplitude(ph, b);
                    let mut full = 0.0;
                    let (mut ka_r, mut ka_i, mut kb_r, mut kb_i) = (0.0, 0.0, 0.0, 0.0);
                    for s in 0..3 {
                        full += va[s].0 * vb[s].0 + va[s].1 * vb[s].1;
                        ka_r += k[s] * va[s].0;
                        ka_i += k[s] * va[s].1;
                        kb_r += k[s] * vb[s].0;
                        kb_i += k[s] * vb[s].1;
                    }
                    w * (full - (ka_r * kb_r + ka_i * kb_i))
                })
                .sum(),
        }
    }
}

fn amplitude(phases: &[(f64, f64)], c: &[f64]) -> (f64, f64) {
    phases
        .iter()
        .zip(c)
        .fold((0.0, 0.0), |(re, im), ((cs, sn), cj)| {
            (re + cj * cs, im + cj * sn)
        })
}

fn vector_amplitude(phases: &[(f64, f64)], c: &[f64]) -> [(f64, f64); 3] {
    let mut out = [(0.0, 0.0); 3];
    for (j, (cs, sn)) in phases.iter().enumerate() {
        for (s, o) in out.iter_mut().enumerate() {
            let cj = c[3 * j + s];
            o.0 += cj * cs;
            o.1 += cj * sn;
        }
    }
    out
}
