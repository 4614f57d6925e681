//! Local-quench dynamics of a finite Bose-Hubbard chain realised by the
//! transverse phonons of a trapped-ion crystal.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! pipeline:
//!
//! * [`fock`] enumerates the fixed-N Fock sector and ranks/unranks states,
//! * [`hamiltonian`] assembles the sparse Bose-Hubbard operator with
//!   per-site interactions,
//! * [`linalg`] holds the dense symmetric eigensolver,
//! * [`dynamics`] diagonalizes and propagates (spectral sum and Krylov),
//! * [`observables`] extracts densities, occupation projections and
//!   `<b_i^† b_j>` correlations,
//! * [`quench`] runs the sign-flip quench protocol and the J/U sweeps,
//! * [`trap`] maps ion-trap hardware to couplings and photon count rates.
//!
//! Energies are angular frequencies with ħ = 1. Site indices are zero-based.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod dynamics;
mod error;
pub mod fock;
pub mod hamiltonian;
pub mod linalg;
pub mod observables;
pub mod quench;
pub mod trap;

pub use num_complex::Complex64;

pub use dynamics::{
    evolve_krylov, evolve_spectral, full_diagonalize, ground_state, EvolvedState, GroundState,
    KrylovOptions, SpectralDecomposition, DENSE_DIMENSION_CAP,
};
pub use error::{Error, Result};
pub use fock::{BasisSector, FockState, DEFAULT_DIMENSION_CAP};
pub use hamiltonian::{build_hamiltonian, Boundary, HamiltonianSpec, SparseOperator};
pub use observables::{
    correlation, local_density, occupation_projection, oscillation_amplitude,
    zero_phonon_series, ObservableSeries,
};
pub use quench::{
    crossover_curve, run_quench, sweep_max_variation, CrossoverPoint, InitialState,
    QuenchProtocol, QuenchResult, QuenchSpec, SweepPoint,
};
pub use trap::{DerivedCouplings, DetectionParams, TrapParams, ValidityReport};
