//! Fractional Langevin Monte Carlo (FLA) and its Gaussian special case (ULA).
//!
//! The crate is organised bottom-up:
//!
//! * [`stable_noise`]: symmetric alpha-stable draws, Lévy increments and their
//!   closed-form absolute moments.
//! * [`objectives`]: benchmark landscapes with certified Hölder/dissipativity
//!   constants, finite-sum structure and empirical certificate checkers.
//! * [`dynamics`]: the FLA, ULA and stochastic-gradient FLA iterations, the
//!   replica driver and fine-step reference simulation of the continuous
//!   process.
//! * [`diagnostics`]: Wasserstein distances, fractional moments, Gibbs
//!   quadrature, suboptimality curves and weak-error studies.
//! * [`theory_bounds`]: closed-form evaluators for the non-asymptotic bounds
//!   and the exponent-feasibility planner.

// `!(x > 0.0)` rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
mod error;
pub mod objectives;
pub mod seeding;
pub mod special;
pub mod stable_noise;
pub mod theory_bounds;

pub use error::{Error, Result};
