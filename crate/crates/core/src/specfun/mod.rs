//! Real-argument special functions: Γ and friends, ζ, Bernoulli numbers,
//! polylogarithm and the two-parameter Mittag-Leffler function.
//!
//! All functions are pure; the Bernoulli table is built once and shared.

mod bernoulli;
mod gamma;
mod mittag_leffler;
mod zeta;

pub(crate) use bernoulli::bernoulli_first as bernoulli_first_kind;
pub use bernoulli::{bernoulli_numbers, bernoulli_polynomial, BernoulliKind, BernoulliTable};
pub use gamma::{digamma, gamma, ln_gamma, rgamma};
pub use mittag_leffler::mittag_leffler;
pub use zeta::{polylog, zeta};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `sin(πx)` with exact zeros at the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    if x.fract() == 0.0 {
        return 0.0;
    }
    // reduce to r in [-1, 1], sin(πx) = sin(πr)
    let r = x - 2.0 * (x / 2.0).round();
    let (r, sign) = if r < 0.0 { (-r, -1.0) } else { (r, 1.0) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (std::f64::consts::PI * r).sin()
}

/// `cos(πx)` with exact zeros at the half-integers.
pub(crate) fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Generalised binomial coefficient `C(a, k)` for real `a`.
pub fn binomial(a: f64, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (a - j as f64) / (j as f64 + 1.0))
}
