//! Thermodynamics of open quantum systems.
//!
//! Builds GKLS generators in the Schrodinger and Heisenberg pictures,
//! propagates density matrices, evaluates heat currents, power, entropy
//! production and ergotropy, and provides two reference machines: a
//! photovoltaic cell driven by a collective charge oscillation and a pumped
//! quantum oscillator fed by a chemical reaction.

// `!(x > 0.0)` is used on purpose so that NaN inputs are rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod engine;
pub mod error;
pub mod gkls;
pub mod models;
pub mod opcore;
pub mod thermo;
pub mod tolerance;

mod linalg;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
