//! Forward modelling, integral-identity checks and coefficient recovery for the
//! 2×2 coupled wave system `(□I − 𝔓(x))U = δ(t,x)·(1,1)` in three space
//! dimensions.
//!
//! * [`potentials`] — matrix potentials, admissible single-unknown classes,
//!   sampled profiles.
//! * [`geometry`] — sphere and confocal-ellipsoid quadrature, the gradient
//!   factor and the cone boundary line integral.
//! * [`goursat`] — characteristic-grid solver for radial potentials with a
//!   coincident source and receiver.
//! * [`born`] — single- and double-scattering series for the receiver at
//!   `e = (1,0,0)`.
//! * [`identity`] — the adjoint four-term identity, surface integrals and the
//!   Grönwall audit.
//! * [`inversion`] — layer stripping, Gauss–Newton and Born/Picard recovery.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod born;
pub mod error;
pub mod geometry;
pub mod goursat;
pub mod identity;
pub mod inversion;
pub mod par;
pub mod potentials;
pub mod quadrature;
pub mod trace;

pub use error::{Error, Result};
pub use potentials::{
    build_potential, comparability, ClassTag, Comparability, CouplingVector, Field, Interpolation,
    MatrixPotential, ParameterKind, Point, ScalarProfile, Symmetry, FOCUS,
};
pub use trace::{Receiver, Trace};
