use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereNode {
    pub theta: f64,
    pub phi: f64,
    pub weight: f64,
}

impl SphereNode {
    /// Unit vector `(sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// Product rule over the unit sphere: Gauss-Legendre in `cosθ` times the
/// uniform (trapezoidal) rule in `φ`.
#[derive(Debug, Clone, Serialize)]
pub struct SphereQuadrature {
    pub nodes: Vec<SphereNode>,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereQuadrature {
    pub const DEFAULT_N_THETA: usize = 64;
    pub const DEFAULT_N_PHI: usize = 64;

    pub fn integrate(&self, mut f: impl FnMut(&SphereNode) -> f64) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n)).sum()
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.weight).sum()
    }
}

impl Default for SphereQuadrature {
    fn default() -> Self {
        sphere_quadrature(Self::DEFAULT_N_THETA, Self::DEFAULT_N_PHI)
            .expect("default node counts are valid")
    }
}

pub fn sphere_quadrature(n_theta: usize, n_phi: usize) -> Result<SphereQuadrature> {
    if n_theta < 2 || n_phi < 2 {
        return Err(Error::InvalidInput(format!(
            "sphere quadrature needs n_theta >= 2 and n_phi >= 2 (got {n_theta}, {n_phi})"
        )));
    }
    let (u, wu) = gauss_legendre(n_theta);
    let dphi = 2.0 * PI / n_phi as f64;
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (x, w) in u.iter().zip(&wu) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for k in 0..n_phi {
            nodes.push(SphereNode {
                theta,
                phi: k as f64 * dphi,
                weight: w * dphi,
            });
        }
    }
    Ok(SphereQuadrature {
        nodes,
        n_theta,
        n_phi,
    })
}
