//! Numerical tests of whether a function is an optical or symplectic
//! tomogram of a quantum or classical state, and whether its normalization
//! survives tomographic evolution.
//!
//! Units are `m = omega = hbar = 1`. One degree of freedom throughout.
//!
//! Module map:
//!
//! - [`grid`], [`hermite`], [`fock`], [`catalog`], [`io`]: domain types,
//!   Hermite-function machinery, Fock-basis evaluators and closed-form states.
//! - [`transforms`]: Radon maps, filtered backprojection, characteristic
//!   functions, optical/symplectic conversion.
//! - [`validation`]: structural checks, entropy bound, KLM and Bochner
//!   positivity, pure-state overlaps, the Radon fixed-point test.
//! - [`conservation`]: moment conditions, normalization flux, Hermite-class
//!   projection.
//! - [`evolution`]: harmonic rotation, Liouville/Moyal integrators, Fock
//!   evolution and the drift experiment.

pub mod catalog;
pub mod conservation;
pub mod error;
pub mod evolution;
pub mod fock;
pub mod grid;
pub mod hermite;
pub mod io;
pub mod transforms;
pub mod validation;

pub use catalog::{catalog_eval, Representation, State, StateSpec};
pub use error::{Error, Result};
pub use fock::FockMatrix;
pub use grid::{GridSpec, OpticalTomogramGrid, PhaseGridSpec, WignerGrid};
pub use transforms::SymplecticView;
