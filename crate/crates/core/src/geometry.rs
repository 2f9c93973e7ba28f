//! Atom positions and polarization modes.
//!
//! Lengths are dimensionless: every position is `k·R` with `k = 2π/λ` the
//! resonant wavenumber. Energies elsewhere in the crate are in units of
//! `d²k³` and rates in units of the single-atom rate Γ.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Vec3 = [f64; 3];

const COLLINEAR_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Dipole along the chain axis.
    Parallel,
    /// Dipole perpendicular to the chain axis.
    Perpendicular,
    /// All three Cartesian components per atom.
    Vector3D,
}

impl Polarization {
    pub fn is_scalar(self) -> bool {
        !matches!(self, Polarization::Vector3D)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Polarization::Parallel => "parallel",
            Polarization::Perpendicular => "perpendicular",
            Polarization::Vector3D => "vector",
        }
    }

    /// Chain coupling `U = sign / ξ³` for the scalar modes.
    pub fn coupling_sign(self) -> Result<f64> {
        match self {
            Polarization::Parallel => Ok(-2.0),
            Polarization::Perpendicular => Ok(1.0),
            Polarization::Vector3D => Err(Error::Usage(
                "scalar chain coupling needs parallel or perpendicular polarization".into(),
            )),
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "par" | "parallel" | "z" => Ok(Polarization::Parallel),
            "perp" | "perpendicular" | "x" => Ok(Polarization::Perpendicular),
            "vec" | "vector" | "vector3d" | "3d" => Ok(Polarization::Vector3D),
            other => Err(Error::Usage(format!("unknown polarization '{other}'"))),
        }
    }
}

/// Equally spaced chain: `n_atoms` sites separated by `ka`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub n_atoms: usize,
    pub ka: f64,
}

impl ChainSpec {
    pub fn new(n_atoms: usize, ka: f64) -> Result<Self> {
        if n_atoms < 2 {
            return Err(Error::Size(format!("chain needs N >= 2, got {n_atoms}")));
        }
        if !(ka.is_finite() && ka > 0.0) {
            return Err(Error::InvalidInput(format!(
                "ka must be positive, got {ka}"
            )));
        }
        Ok(Self { n_atoms, ka })
    }

    /// Total length `kr = (N - 1) ka`.
    pub fn extent(&self) -> f64 {
        (self.n_atoms - 1) as f64 * self.ka
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomArray {
    positions: Vec<Vec3>,
    polarization: Polarization,
}

impl AtomArray {
    /// Sites `(0, 0, (j-1)·ka)` along ẑ.
    pub fn chain(spec: ChainSpec, polarization: Polarization) -> Result<Self> {
        if !polarization.is_scalar() {
            return Err(Error::Usage(
                "make_chain builds scalar-mode chains; use make_array for vector mode".into(),
            ));
        }
        let spec = ChainSpec::new(spec.n_atoms, spec.ka)?;
        let positions = (0..spec.n_atoms)
            .map(|j| [0.0, 0.0, j as f64 * spec.ka])
            .collect();
        Ok(Self {
            positions,
            polarization,
        })
    }

    /// Arbitrary positions in vector (three-component) mode.
    pub fn from_positions(positions: Vec<Vec3>) -> Result<Self> {
        Self::with_polarization(positions, Polarization::Vector3D)
    }

    /// Arbitrary positions with an explicit mode. Scalar modes require the
    /// sites to be collinear.
    pub fn with_polarization(positions: Vec<Vec3>, polarization: Polarization) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::Size(format!(
                "need at least 2 atoms, got {}",
                positions.len()
            )));
        }
        if positions.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Geometry("non-finite coordinate".into()));
        }
        for i in 0..positions.len() {
            for j in 0..i {
                if distance(&positions[i], &positions[j]) == 0.0 {
                    return Err(Error::Geometry(format!(
                        "atoms {j} and {i} share position {:?}",
                        positions[i]
                    )));
                }
            }
        }
        let array = Self {
            positions,
            polarization,
        };
        if polarization.is_scalar() && !array.is_collinear() {
            return Err(Error::Geometry(format!(
                "{polarization} polarization requires collinear atoms"
            )));
        }
        Ok(array)
    }

    /// One atom at the origin. Only useful as a normalization reference:
    /// its decay matrix is `[1]` in every mode.
    pub fn single_atom(polarization: Polarization) -> Self {
        Self {
            positions: vec![[0.0; 3]],
            polarization,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    /// Number of amplitudes per state: N for scalar modes, 3N for vector mode.
    pub fn state_dim(&self) -> usize {
        if self.polarization.is_scalar() {
            self.n_atoms()
        } else {
            3 * self.n_atoms()
        }
    }

    pub fn separation(&self, i: usize, j: usize) -> Vec3 {
        sub(&self.positions[i], &self.positions[j])
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        distance(&self.positions[i], &self.positions[j])
    }

    /// Largest pairwise distance (`kr` for a chain).
    pub fn extent(&self) -> f64 {
        let n = self.n_atoms();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..i {
                best = best.max(self.distance(i, j));
            }
        }
        best
    }

    pub fn min_distance(&self) -> f64 {
        let n = self.n_atoms();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in 0..i {
                best = best.min(self.distance(i, j));
            }
        }
        best
    }

    fn farthest_pair(&self) -> (usize, usize) {
        let n = self.n_atoms();
        let mut best = (0, 0, -1.0);
        for i in 0..n {
            for j in 0..i {
                let d = self.distance(i, j);
                if d > best.2 {
                    best = (j, i, d);
                }
            }
        }
        (best.0, best.1)
    }

    /// Unit vector along the line through the atoms, if they are collinear.
    /// A single atom reports ẑ.
    pub fn axis(&self) -> Option<Vec3> {
        if self.n_atoms() < 2 {
            return Some([0.0, 0.0, 1.0]);
        }
        let (a, b) = self.farthest_pair();
        let d = sub(&self.positions[b], &self.positions[a]);
        let len = norm(&d);
        let axis = scale(&d, 1.0 / len);
        let origin = self.positions[a];
        let tol = COLLINEAR_TOL * len.max(1.0);
        let collinear = self.positions.iter().all(|p| {
            let r = sub(p, &origin);
            let along = dot(&r, &axis);
            let perp = sub(&r, &scale(&axis, along));
            norm(&perp) <= tol
        });
        collinear.then_some(axis)
    }

    pub fn is_collinear(&self) -> bool {
        self.axis().is_some()
    }

    /// Signed coordinates along [`AtomArray::axis`], measured from the first atom.
    pub fn axial_coordinates(&self) -> Option<Vec<f64>> {
        let axis = self.axis()?;
        let origin = self.positions[0];
        Some(
            self.positions
                .iter()
                .map(|p| dot(&sub(p, &origin), &axis))
                .collect(),
        )
    }

    /// Unit dipole direction of a scalar mode: the axis for parallel, a fixed
    /// perpendicular to it for perpendicular.
    pub fn dipole_direction(&self) -> Option<Vec3> {
        let axis = self.axis()?;
        match self.polarization {
            Polarization::Parallel => Some(axis),
            Polarization::Perpendicular => Some(perpendicular_to(&axis)),
            Polarization::Vector3D => None,
        }
    }

    /// True for a collinear array whose sorted axial coordinates are equally
    /// spaced to relative precision `1e-9`. Returns the spacing.
    pub fn uniform_spacing(&self) -> Option<f64> {
        let mut x = self.axial_coordinates()?;
        if x.len() < 2 {
            return None;
        }
        x.sort_by(f64::total_cmp);
        let a = (x[x.len() - 1] - x[0]) / (x.len() - 1) as f64;
        x.windows(2)
            .all(|w| ((w[1] - w[0]) - a).abs() <= 1e-9 * a)
            .then_some(a)
    }

    pub fn translated(&self, shift: Vec3) -> Self {
        Self {
            positions: self.positions.iter().map(|p| add(p, &shift)).collect(),
            polarization: self.polarization,
        }
    }

    /// Applies the row-major rotation `r` to every position.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Self {
        Self {
            positions: self.positions.iter().map(|p| mat_vec(r, p)).collect(),
            polarization: self.polarization,
        }
    }
}

pub fn make_chain(spec: ChainSpec, polarization: Polarization) -> Result<AtomArray> {
    AtomArray::chain(spec, polarization)
}

pub fn make_array(positions: Vec<Vec3>) -> Result<AtomArray> {
    AtomArray::from_positions(positions)
}

pub(crate) fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn distance(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b))
}

fn mat_vec(r: &[[f64; 3]; 3], v: &Vec3) -> Vec3 {
    [dot(&r[0], v), dot(&r[1], v), dot(&r[2], v)]
}

/// Unit vector orthogonal to `axis`, built from the Cartesian axis least
/// aligned with it (so ẑ maps to x̂).
fn perpendicular_to(axis: &Vec3) -> Vec3 {
    let k = (0..3)
        .min_by(|&i, &j| axis[i].abs().total_cmp(&axis[j].abs()))
        .unwrap_or(0);
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let p = sub(&e, &scale(axis, dot(&e, axis)));
    scale(&p, 1.0 / norm(&p))
}
