use super::{ln_gamma, rgamma};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

const MAX_TERMS: usize = 10_000;
const MAX_ARGUMENT: f64 = 10.0;

/// The two-parameter Mittag-Leffler function E_{α,β}(z) = Σ z^n / Γ(αn + β).
///
/// Direct power series with compensated summation; intended for |z| ≤ 10.
pub fn mittag_leffler(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::domain("mittag_leffler", format!("alpha = {alpha} must be positive")));
    }
    if !beta.is_finite() || !z.is_finite() {
        return Err(Error::domain("mittag_leffler", "non-finite argument"));
    }
    if z.abs() > MAX_ARGUMENT {
        return Err(Error::domain(
            "mittag_leffler",
            format!("|z| = {} exceeds {MAX_ARGUMENT}", z.abs()),
        ));
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    let ln_abs_z = z.abs().ln();
    let negative = z < 0.0;
    let mut acc = CompensatedSum::new();
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let arg = alpha * n as f64 + beta;
        let magnitude = if arg > 150.0 {
            (n as f64 * ln_abs_z - ln_gamma(arg)?).exp()
        } else {
            z.abs().powi(n as i32) * rgamma(arg)
        };
        let term = if negative && n % 2 == 1 { -magnitude } else { magnitude };
        acc.add(term);
        // terms decrease monotonically once Γ is increasing and z^n/Γ has peaked
        if arg > 2.0 && term.abs() < 1e-16 * (1.0 + acc.value().abs()) {
            small_run += 1;
            if small_run >= 2 {
                return Ok(acc.value());
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence {
        function: "mittag_leffler",
        terms: MAX_TERMS,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    #[test]
    fn exponential_cases() {
        for x in [0.0f64, 1.0, -1.0] {
            assert!((mittag_leffler(1.0, 1.0, x).unwrap() - x.exp()).abs() <= 1e-15 * x.exp().max(1.0));
        }
        assert!((mittag_leffler(1.0, 2.0, 1.0).unwrap() - (E - 1.0)).abs() < 1e-15);
        assert!((mittag_leffler(2.0, 1.0, 1.0).unwrap() - 1.0f64.cosh()).abs() < 1e-15);
    }

    #[test]
    fn exponential_on_grid() {
        for i in 0..50 {
            let x = -2.0 + 4.0 * i as f64 / 49.0;
            let got = mittag_leffler(1.0, 1.0, x).unwrap();
            assert!(((got - x.exp()) / x.exp()).abs() <= 1e-13, "x = {x}");
        }
    }

    #[test]
    fn half_order_is_scaled_erfc() {
        // E_{1/2}(−x) = exp(x²) erfc(x); mpmath reference at x = 1
        let got = mittag_leffler(0.5, 1.0, -1.0).unwrap();
        assert!((got - 0.427_583_576_155_807_0).abs() < 1e-14);
    }

    #[test]
    fn large_argument_and_domain() {
        // E_{1,1}(10) = e^10 through the log-gamma branch for small alpha too
        let got = mittag_leffler(1.0, 1.0, 10.0).unwrap();
        assert!(((got - 10f64.exp()) / 10f64.exp()).abs() < 1e-13);
        // E_{1/2}(3) = exp(9) erfc(−3)
        let got = mittag_leffler(0.5, 1.0, 3.0).unwrap();
        assert!((got / 16_205.988_853_999_586_6 - 1.0).abs() < 1e-13);
        assert!(matches!(mittag_leffler(0.0, 1.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(mittag_leffler(1.0, 1.0, 11.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn pole_beta_starts_with_zero_term() {
        // E_{1,0}(z) = z e^z
        let got = mittag_leffler(1.0, 0.0, 0.5).unwrap();
        assert!((got - 0.5 * 0.5f64.exp()).abs() < 1e-15);
    }
}
