use std::f64::consts::PI;

use super::{sin_pi, EULER_GAMMA};
use crate::{Error, Result};

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_pole(x: f64) -> bool {
    x <= 0.0 && x.fract() == 0.0
}

fn lanczos_sum(xm1: f64) -> f64 {
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (xm1 + i as f64);
    }
    s
}

/// Γ(x) for x ≥ 0.5 by the Lanczos formula.
fn gamma_lanczos(x: f64) -> f64 {
    let xm1 = x - 1.0;
    let w = xm1 + LANCZOS_G + 0.5;
    // split the power so that Γ(171) does not overflow in the intermediate
    let half = w.powf(0.5 * (xm1 + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-w).exp()) * lanczos_sum(xm1)
}

/// The Gamma function.
///
/// Lanczos for x ≥ 1/2, reflection `Γ(x)Γ(1−x) = π/sin(πx)` below.
/// Returns a pole error at 0, −1, −2, ….
pub fn gamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("gamma", "NaN argument"));
    }
    if is_pole(x) {
        return Err(Error::Pole {
            function: "gamma",
            at: x,
        });
    }
    if x >= 0.5 {
        Ok(gamma_lanczos(x))
    } else {
        Ok(PI / (sin_pi(x) * gamma_lanczos(1.0 - x)))
    }
}

/// 1/Γ(x), an entire function: zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if is_pole(x) {
        return 0.0;
    }
    if x > 171.0 {
        return (-ln_gamma_positive(x)).exp();
    }
    if x >= 0.5 {
        1.0 / gamma_lanczos(x)
    } else {
        sin_pi(x) * gamma_lanczos(1.0 - x) / PI
    }
}

fn ln_gamma_positive(x: f64) -> f64 {
    let xm1 = x - 1.0;
    let w = xm1 + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (xm1 + 0.5) * w.ln() - w + lanczos_sum(xm1).ln()
}

/// ln |Γ(x)|.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if is_pole(x) {
        return Err(Error::Pole {
            function: "ln_gamma",
            at: x,
        });
    }
    if x >= 0.5 {
        Ok(ln_gamma_positive(x))
    } else {
        Ok(PI.ln() - sin_pi(x).abs().ln() - ln_gamma_positive(1.0 - x))
    }
}

// B_{2k}/(2k) for k = 1..=8
const DIGAMMA_ASYMPTOTIC: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
];

/// The digamma function Ψ(x) = Γ'(x)/Γ(x).
///
/// Upward recurrence to x ≥ 10, then the asymptotic series; reflection for
/// negative arguments.
pub fn digamma(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::domain("digamma", "NaN argument"));
    }
    if is_pole(x) {
        return Err(Error::Pole {
            function: "digamma",
            at: x,
        });
    }
    if x == 1.0 {
        return Ok(-EULER_GAMMA);
    }
    if x < 0.0 {
        // Ψ(x) = Ψ(1−x) − π cot(πx)
        let cot = super::cos_pi(x) / sin_pi(x);
        return Ok(digamma(1.0 - x)? - PI * cot);
    }
    let mut shift = 0.0;
    let mut x = x;
    while x < 10.0 {
        shift += 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    let mut poly = 0.0;
    for c in DIGAMMA_ASYMPTOTIC.iter().rev() {
        poly = poly * inv2 + c;
    }
    Ok(x.ln() - 0.5 / x - poly * inv2 - shift)
}
