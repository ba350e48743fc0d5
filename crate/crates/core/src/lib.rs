//! Fractional integration on uniform grids with zeta-function end corrections,
//! and explicit schemes of order α through 4+α for the integral form of the
//! fractional relaxation-oscillation equation `y + I^α y = F`.
//!
//! Modules:
//! - [`specfun`]: Γ, Ψ, ζ, Bernoulli numbers/polynomials, polylogarithm, Mittag-Leffler.
//! - [`fracint`]: trapezoidal and corrected Riemann sums for `K^α` and `I^α`.
//! - [`solver`]: the five time-stepping schemes and stability-bound evaluators.
//! - [`problems`]: closed-form benchmark equations.
//! - [`bench`]: convergence sweeps, table reproduction and plot-data emission.

pub mod bench;
pub mod error;
pub mod fracint;
pub mod problems;
pub mod solver;
pub mod specfun;
mod sum;

pub use error::{Error, Result};
