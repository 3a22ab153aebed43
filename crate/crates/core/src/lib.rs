//! Unitary quantum-walk discretization of the 1+1D Dirac equation.
//!
//! The library builds discrete-time quantum walks whose one-step evolution
//! `U = W₋₁ T₁⁻¹ + W₁ T₁ + W₀` discretizes the Dirac equation for *any*
//! representation of the Clifford algebra, carries an intrinsic Wilson term
//! controlled by an exponent ρ, and stays exactly unitary for every value of
//! Wilson's parameter r. On top of the walk itself it provides:
//!
//! - construction and verification of Clifford-algebra representations
//!   ([`clifford`]),
//! - the two coin families (massive Q = 0 and Wilson-λ) with all unitarity
//!   constraints checked numerically ([`coins`]),
//! - the lattice walk operator, the ultralocal two-step Hamiltonian and its
//!   momentum-space symbol ([`lattice`]),
//! - state evolution, wave packets and observables ([`dynamics`]),
//! - dispersion relations, fermion-doubling diagnostics, initial-slope fits
//!   and convergence studies for the Dirac, naive, LGT-Wilson and DQW-Wilson
//!   models ([`spectral`]).

pub mod clifford;
pub mod coins;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod spectral;

pub use error::{Error, Result};
pub use matrix::CMatrix;
