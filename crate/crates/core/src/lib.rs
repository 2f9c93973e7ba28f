//! Superdark singly excited states of small atomic arrays.
//!
//! Builds the dipole-dipole coupling `U` and the collective decay matrix `W`
//! of N two-level (or J=0→J=1) atoms, constructs the vector that minimizes
//! `Cᵀ W C`, computes the per-atom detunings that make it an exact
//! Hamiltonian eigenstate, and scans detunings to find the slowest decay
//! rate `Γ̃` of the tuned Hamiltonian.
//!
//! Units: positions are `k·R`, energies are in `d²k³`, rates in units of the
//! single-atom rate Γ.

pub mod darkstate;
pub mod decay;
pub mod error;
pub mod geometry;
pub mod interactions;
pub mod numerics;
pub mod spectrum;
pub mod tuning;

pub use darkstate::{
    asymptotic_rate, binomial_dark_state, darkest_eigenvector, moment_dark_state, ExcitonVector,
};
pub use decay::{
    decay_matrix_chain, decay_matrix_for, decay_matrix_quadrature, decay_matrix_tensor, decay_rate,
    w_parallel, w_perpendicular, w_tensor_block, DecayMatrix,
};
pub use error::{Error, Result};
pub use geometry::{make_array, make_chain, AtomArray, ChainSpec, Polarization, Vec3};
pub use interactions::{
    coupling_chain, coupling_for, coupling_tensor, nearest_neighbor_coupling, CouplingMatrix,
};
pub use numerics::{
    eigh_symmetric, minimize_multi, minimize_scalar, solve_moment_constraints, sphere_quadrature,
    EigenDecomposition, SphereQuadrature, SymMatrix,
};
pub use spectrum::{
    find_minimum, find_minimum_near_prediction, gamma_tilde, scan_multi, scan_omega, table1,
    ChainScan, DarkestEigenstate, MinimumReport, ScanPoint, Table1Row,
};
pub use tuning::{
    build_hamiltonian, tune_frequencies, verify_eigenstate, TunedHamiltonian, TuningResult,
};
