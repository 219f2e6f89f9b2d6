//! Numerical laboratory for relativistic massless free fields.
//!
//! The crate evolves and checks the massless wave equation, the first-order
//! Schrödinger-like equation obtained from it for stationary monochromatic
//! fields, and the Helmholtz equation at the end of that chain. On top of the
//! field equations it provides the polar (Madelung) decomposition with its
//! quantum potential, Hamilton-Jacobi, continuity and Poynting identities,
//! the same machinery for linearized gravitational waves in TT gauge, and
//! the field-theoretic densities and polarization states of a complex scalar.
//!
//! [`scenario`] ties the pieces into reproducible verification runs that are
//! driven by TOML configs and emit JSON reports and CSV dumps.

// `!(x > 0.0)` is used on purpose so NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod emfield;
pub mod error;
pub mod evolvers;
pub mod fieldcore;
pub mod gravwave;
pub mod madelung;
pub mod reference;
pub mod scenario;
mod spectral;

pub use error::{LabError, Result};
pub use fieldcore::{DerivMethod, DerivOrder, Grid1D, PhysParams, ScalarField};
