//! Steady states of self-gravitating particle clouds under Maxwell–Boltzmann
//! and Fermi–Dirac statistics.
//!
//! Radial steady states are computed by shooting from the centre in the
//! log-radius `s = log r`, which turns the elliptic problem into a planar
//! dynamical system. From there the crate builds the mass–density curve,
//! counts solutions of prescribed mass, and measures how Fermi–Dirac
//! solutions approach the classical ones as `η → 0`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bifurcation;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod fermi;
pub mod models;
pub mod numerics;

pub use error::{Error, Result};
pub use models::{ModelSpec, StatisticsKind};
pub use numerics::NumericsConfig;
