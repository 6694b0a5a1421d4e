//! Simulation of 1+1D Dirac particles with real and imaginary mass.
//!
//! The crate is organised around the solvers that share a common set of
//! containers:
//!
//! - [`grid`], [`field`], [`observables`], [`units`]: periodic grids,
//!   two-component spinor fields, initial-state builders and expectation
//!   values (always evaluated on the renormalized state).
//! - [`analytic`]: closed-form dispersions, eigenspinors, group velocities,
//!   tunneling probabilities and decay statistics.
//! - [`dirac_evolution`]: Strang split-step spectral propagation, including
//!   the non-Hermitian mass term and a linear electric potential.
//! - [`landau_zener`]: the momentum-space two-level reduction of scattering
//!   off a linear potential.
//! - [`ion_sim`]: spinor ⊗ Fock-space model of a trapped ion driven on its
//!   motional sidebands, with post-selected (no-jump) evolution and quantum
//!   trajectories.
//! - [`duality`]: the space-time exchange mapping normal-particle solutions
//!   onto tachyon solutions, verified by equation residuals.
//!
//! Natural units ħ = c = Δ = 1 are used throughout; masses are `m·cΔ` and
//! times `t·c/Δ`.

pub mod analytic;
pub mod dirac_evolution;
pub mod duality;
pub mod error;
pub mod field;
pub mod grid;
pub mod ion_sim;
pub mod landau_zener;
pub mod observables;
pub mod params;
pub mod spinor;
pub mod units;

pub use error::{Error, ErrorKind, Result};
pub use field::SpinorField;
pub use grid::{make_grid, SpatialGrid};
pub use observables::{observables, ObservableRecord, ObservableSeries};
pub use params::{DiracParams, MassType};

pub use num_complex::Complex64;
