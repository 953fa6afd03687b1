//! Spectral simulation of mKdV and NLS flows together with the
//! perturbation-determinant conserved quantities and modulation-space norms
//! that control them.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] and [`field`]: periodic discretization and the unitary Fourier transform.
//! * [`norms`]: modulation, Sobolev and weighted norms.
//! * [`conserved`]: closed-form quadratic and quartic terms, the operator matrix and its log-determinant.
//! * [`symmetries`]: Galilei boosts and scaling.
//! * [`flows`]: split-step integrators.
//! * [`equicont`]: equicontinuity tails and weight construction.
//! * [`harness`]: experiment configuration, drivers and reports.

pub mod conserved;
pub mod data;
pub mod equicont;
pub mod error;
pub mod field;
pub mod flows;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod special;
pub mod symmetries;

mod fft;

pub use num_complex::Complex64;

pub use conserved::{
    alpha2, alpha4, alpha4_direct, alpha_full, beta2, beta4, beta_full, build_operator, tail_bound, OperatorMatrix,
    OperatorSpec, Sign, SpectralParameter,
};
pub use equicont::{build_weights, equicontinuity_tail, verify_weights, FieldFamily, WeightSequence};
pub use error::{Error, Result};
pub use field::Field;
pub use flows::{evolve, linear_propagator, step, Equation, FlowSpec, Trajectory};
pub use grid::GridSpec;
pub use norms::{admissible_sigma, bracket, hs_functional, modulation_norm, sobolev_norm, ModulationParams};
pub use symmetries::{
    apriori_exponent, boosted_beta2, galilei_boost, scale_field, scaling_bound_factor, BoostFlow, BoostSpec,
};
