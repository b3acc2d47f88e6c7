//! Phase-space structure and nonclassical statistics of generalized compass
//! states and their photon-subtracted cousins.

pub mod error;
pub mod fock_oracle;
pub mod grid;
pub mod par;
pub mod sensitivity;
pub mod special;
pub mod squeezing;
pub mod states;
pub mod statistics;
pub mod verify;
pub mod wigner;

pub use error::{Error, Result};
pub use grid::{PhaseSpaceGrid, Quadrature, ScalarField};
pub use states::{
    canonical_pscs, ComplexAmplitude, FockVector, GcsParams, PhaseTriple, Route, SubtractionIndex,
};

/// Prefactor of the Wigner function, normalized so that `∫W d²z = 1` with
/// `z = x + iy`.
pub const WIGNER_PREFACTOR: f64 = std::f64::consts::FRAC_2_PI;
