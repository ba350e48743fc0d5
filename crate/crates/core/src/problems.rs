//! Benchmark integral equations `y(x) + I^α y(x) = F(x)` with closed-form
//! solutions, plus two kernel-quadrature benchmarks with known `K^α y`.
//!
//! Solutions are evaluated through their Taylor tails (`e^x` minus its partial
//! sum, the Mittag-Leffler series minus its fractional Taylor polynomial) so
//! that values near `x = 0` keep full relative precision.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fracint::{corrected_sum_i_with, KernelWeights, OrderTag, SchemeCoefficients, UniformGrid};
use crate::specfun::{gamma, mittag_leffler, rgamma};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

const TAIL_MAX_TERMS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ProblemFamily {
    /// `F = y = 0`
    Zero,
    /// `y = x^p`, `F = x^p + Γ(p+1)/Γ(p+α+1) x^{p+α}`
    Power { p: f64 },
    /// `y = e^x − Σ_{k≤m} x^k/k!`
    Exp { m: u32 },
    /// `y = E_α(−x^α) + Γ(1+2α) x^{3α} E_{α,1+3α}(−x^α)` minus its
    /// fractional Taylor polynomial of degree m
    MittagLeffler { m: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkProblem {
    pub alpha: f64,
    pub interval_end: f64,
    pub family: ProblemFamily,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 && alpha != 1.0 {
        Ok(())
    } else {
        Err(Error::domain("problem", format!("alpha = {alpha} must lie in (0,1) ∪ (1,2)")))
    }
}

/// `y + I^α y = x^p + Γ(p+1)/Γ(p+α+1) x^{p+α}` with `y = x^p`.
pub fn make_power_problem(p: f64, alpha: f64) -> Result<BenchmarkProblem> {
    check_alpha(alpha)?;
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain("make_power_problem", format!("p = {p} must be positive")));
    }
    Ok(BenchmarkProblem {
        alpha,
        interval_end: 1.0,
        family: ProblemFamily::Power { p },
    })
}

pub fn make_exp_problem(m: u32, alpha: f64) -> Result<BenchmarkProblem> {
    check_alpha(alpha)?;
    if m > 12 {
        return Err(Error::domain("make_exp_problem", format!("m = {m} exceeds 12")));
    }
    Ok(BenchmarkProblem {
        alpha,
        interval_end: 1.0,
        family: ProblemFamily::Exp { m },
    })
}

pub fn make_ml_problem(m: u32, alpha: f64) -> Result<BenchmarkProblem> {
    check_alpha(alpha)?;
    if m < 2 {
        return Err(Error::domain("make_ml_problem", format!("m = {m} must be at least 2")));
    }
    Ok(BenchmarkProblem {
        alpha,
        interval_end: 1.0,
        family: ProblemFamily::MittagLeffler { m },
    })
}

pub fn make_zero_problem(alpha: f64) -> Result<BenchmarkProblem> {
    check_alpha(alpha)?;
    Ok(BenchmarkProblem {
        alpha,
        interval_end: 1.0,
        family: ProblemFamily::Zero,
    })
}

/// Sum `Σ_{k≥first} term(k)` of a series whose terms eventually decrease
/// monotonically in magnitude once `settled(k)` holds.
fn tail_series(first: usize, settled: impl Fn(usize) -> bool, term: impl Fn(usize) -> f64) -> f64 {
    let mut acc = CompensatedSum::new();
    for k in first..first + TAIL_MAX_TERMS {
        let t = term(k);
        acc.add(t);
        if settled(k) && t.abs() <= 1e-18 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

impl BenchmarkProblem {
    pub fn with_interval_end(mut self, interval_end: f64) -> Self {
        self.interval_end = interval_end;
        self
    }

    /// Right-hand side F(x).
    pub fn forcing(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let alpha = self.alpha;
        match self.family {
            ProblemFamily::Zero => 0.0,
            ProblemFamily::Power { p } => {
                let ratio = gamma(p + 1.0).unwrap_or(f64::NAN) * rgamma(p + alpha + 1.0);
                x.powf(p) + ratio * x.powf(p + alpha)
            }
            ProblemFamily::Exp { m } => {
                // Σ_{k>m} (x^k/k! + x^{k+α}/Γ(k+1+α))
                let first = m as usize + 1;
                let integer = self.exact(x);
                let fractional = tail_series(
                    first,
                    |k| k as f64 + 1.0 + alpha > x + 1.0,
                    |k| x.powf(k as f64 + alpha) * rgamma(k as f64 + 1.0 + alpha),
                );
                integer + fractional
            }
            ProblemFamily::MittagLeffler { m } => {
                let g2 = gamma(1.0 + 2.0 * alpha).unwrap_or(f64::NAN);
                let k = (m + 1) as f64 * alpha;
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                sign * (g2 - 1.0) * rgamma(1.0 + k) * x.powf(k)
            }
        }
    }

    /// Exact solution y(x).
    pub fn exact(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let alpha = self.alpha;
        match self.family {
            ProblemFamily::Zero => 0.0,
            ProblemFamily::Power { p } => x.powf(p),
            ProblemFamily::Exp { m } => tail_series(
                m as usize + 1,
                |k| k as f64 + 1.0 > x,
                |k| x.powi(k as i32) * rgamma(k as f64 + 1.0),
            ),
            ProblemFamily::MittagLeffler { m } => {
                // (1 − Γ(1+2α)) Σ_{n>m} (−1)^n x^{nα}/Γ(nα+1)
                let g2 = gamma(1.0 + 2.0 * alpha).unwrap_or(f64::NAN);
                let xa = x.powf(alpha);
                let series = tail_series(
                    m as usize + 1,
                    |n| n as f64 * alpha + 1.0 > 2.0 + xa,
                    |n| {
                        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                        sign * x.powf(n as f64 * alpha) * rgamma(n as f64 * alpha + 1.0)
                    },
                );
                (1.0 - g2) * series
            }
        }
    }

    /// Solution from its closed form with the Mittag-Leffler and exponential
    /// functions, without the tail rearrangement. Loses relative precision
    /// near 0; used to cross-check [`BenchmarkProblem::exact`].
    pub fn exact_closed_form(&self, x: f64) -> Result<f64> {
        let alpha = self.alpha;
        Ok(match self.family {
            ProblemFamily::Zero => 0.0,
            ProblemFamily::Power { p } => x.powf(p),
            ProblemFamily::Exp { m } => {
                let partial: f64 = (0..=m).map(|k| x.powi(k as i32) * rgamma(k as f64 + 1.0)).sum();
                x.exp() - partial
            }
            ProblemFamily::MittagLeffler { m } => {
                let g2 = gamma(1.0 + 2.0 * alpha)?;
                let xa = x.powf(alpha);
                let mut z = mittag_leffler(alpha, 1.0, -xa)?
                    + g2 * x.powf(3.0 * alpha) * mittag_leffler(alpha, 1.0 + 3.0 * alpha, -xa)?
                    - 1.0
                    + xa * rgamma(1.0 + alpha)
                    - x.powf(2.0 * alpha) * rgamma(1.0 + 2.0 * alpha);
                for k in 3..=m {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    z += (g2 - 1.0) * sign * x.powf(k as f64 * alpha) * rgamma(1.0 + k as f64 * alpha);
                }
                z
            }
        })
    }

    /// Forcing from the closed form `e^x + x^α E_{1,1+α}(x) − Σ_{k≤m}(…)`.
    pub fn forcing_closed_form(&self, x: f64) -> Result<f64> {
        let alpha = self.alpha;
        match self.family {
            ProblemFamily::Exp { m } => {
                let mut f = x.exp() + x.powf(alpha) * mittag_leffler(1.0, 1.0 + alpha, x)?;
                for k in 0..=m {
                    let kf = k as f64;
                    f -= x.powf(kf + alpha) * rgamma(kf + 1.0 + alpha) + x.powi(k as i32) * rgamma(kf + 1.0);
                }
                Ok(f)
            }
            _ => Ok(self.forcing(x)),
        }
    }

    /// Highest derivative order that vanishes at `x = 0`.
    ///
    /// For `x^p`: `p − 1` for integer p, `⌈p⌉ − 1` otherwise. The
    /// Mittag-Leffler family behaves like `x^{(m+1)α}` near 0.
    /// The zero problem reports `usize::MAX`.
    pub fn vanishing_order(&self) -> usize {
        fn power_rule(p: f64) -> usize {
            if p.fract() == 0.0 {
                p as usize - 1
            } else {
                p.ceil() as usize - 1
            }
        }
        match self.family {
            ProblemFamily::Zero => usize::MAX,
            ProblemFamily::Power { p } => power_rule(p),
            ProblemFamily::Exp { m } => m as usize,
            ProblemFamily::MittagLeffler { m } => power_rule((m + 1) as f64 * self.alpha),
        }
    }

    pub fn label(&self) -> String {
        match self.family {
            ProblemFamily::Zero => "Zero".to_string(),
            ProblemFamily::Power { p } => format!("Power p={p}"),
            ProblemFamily::Exp { m } => format!("Exp m={m}"),
            ProblemFamily::MittagLeffler { m } => format!("ML m={m}"),
        }
    }
}

impl fmt::Display for BenchmarkProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (alpha={})", self.label(), self.alpha)
    }
}

const RESIDUAL_STEPS: usize = 4096;

/// `max_j |y(x_j) + Q(x_j) − F(x_j)|` at `x_j = jX/samples`, with Q the
/// order-(4+α) corrected sum of `I^α y` on 4096 steps.
pub fn residual_check(problem: &BenchmarkProblem, samples: usize) -> Result<f64> {
    if samples < 2 {
        return Err(Error::domain("residual_check", "need at least 2 samples"));
    }
    let coeffs = SchemeCoefficients::new(problem.alpha, OrderTag::A4)?;
    let weights = KernelWeights::new(problem.alpha, RESIDUAL_STEPS);
    let mut worst: f64 = 0.0;
    for j in 1..=samples {
        let x = problem.interval_end * j as f64 / samples as f64;
        let grid = UniformGrid::sample(x, RESIDUAL_STEPS, |t| problem.exact(t))?;
        let q = corrected_sum_i_with(&grid, &coeffs, &weights)?;
        worst = worst.max((problem.exact(x) + q - problem.forcing(x)).abs());
    }
    Ok(worst)
}

/// Functions with closed-form `K^α y(x)` used to check the corrected
/// trapezoidal rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelBenchmark {
    /// `y = e^t`
    Exp,
    /// `y = ln(t + 3)`
    LogShift,
}

impl KernelBenchmark {
    pub fn value(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    pub fn derivative(&self, k: usize, t: f64) -> f64 {
        match self {
            KernelBenchmark::Exp => t.exp(),
            KernelBenchmark::LogShift => {
                if k == 0 {
                    (t + 3.0).ln()
                } else {
                    // (−1)^{k−1} (k−1)! / (t+3)^k
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    let fact: f64 = (1..k).map(|j| j as f64).product();
                    sign * fact / (t + 3.0).powi(k as i32)
                }
            }
        }
    }

    /// Exact `K^α y(x)`.
    pub fn exact_k(&self, alpha: f64, x: f64) -> Result<f64> {
        match self {
            // Γ(α) x^α E_{1,1+α}(x)
            KernelBenchmark::Exp => Ok(gamma(alpha)? * x.powf(alpha) * mittag_leffler(1.0, 1.0 + alpha, x)?),
            // Taylor expansion about x: ln(x+3) x^α/α − x^α Σ_{k≥1} r^k/(k(k+α)), r = x/(x+3)
            KernelBenchmark::LogShift => {
                let r = x / (x + 3.0);
                let tail = tail_series(1, |_| true, |k| {
                    let kf = k as f64;
                    r.powi(k as i32) / (kf * (kf + alpha))
                });
                Ok(x.powf(alpha) * ((x + 3.0).ln() / alpha - tail))
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            KernelBenchmark::Exp => "y=exp(t)",
            KernelBenchmark::LogShift => "y=ln(t+3)",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_problem() {
        let p = make_power_problem(4.0, 0.5).unwrap();
        assert_eq!(p.label(), "Power p=4");
        assert_eq!(p.forcing(0.0), 0.0);
        let f1 = 1.0 + 24.0 / gamma(5.5).unwrap();
        assert!((p.forcing(1.0) - f1).abs() < 1e-15);
        assert_eq!(p.vanishing_order(), 3);
        let q = make_power_problem(1.05, 0.5).unwrap();
        let expected = 1.0 + gamma(2.05).unwrap() / gamma(2.55).unwrap();
        assert!((q.forcing(1.0) - expected).abs() < 1e-15);
        assert_eq!(q.vanishing_order(), 1);
        assert!(make_power_problem(0.0, 0.5).is_err());
        assert!(make_power_problem(2.0, 1.0).is_err());
    }

    #[test]
    fn exp_problem_tail_matches_taylor_remainder() {
        for m in 0..=5u32 {
            let p = make_exp_problem(m, 0.5).unwrap();
            assert_eq!(p.exact(0.0), 0.0);
            for i in 0..=20 {
                let x = i as f64 / 20.0;
                let closed = p.exact_closed_form(x).unwrap();
                assert!((p.exact(x) - closed).abs() <= 4.0 * f64::EPSILON * x.exp(), "m={m} x={x}");
                let fc = p.forcing_closed_form(x).unwrap();
                assert!((p.forcing(x) - fc).abs() <= 1e-14, "m={m} x={x}");
            }
        }
        let p = make_exp_problem(1, 0.5).unwrap();
        assert!((p.exact(1.0) - (std::f64::consts::E - 2.0)).abs() < 1e-15);
        assert!(make_exp_problem(13, 0.5).is_err());
    }

    #[test]
    fn ml_problem_tail_matches_closed_form() {
        for (m, alpha) in [(2u32, 0.75), (2, 1.75), (4, 0.65), (9, 0.6), (3, 0.5)] {
            let p = make_ml_problem(m, alpha).unwrap();
            assert_eq!(p.exact(0.0), 0.0);
            for i in 1..=10 {
                let x = i as f64 / 10.0;
                let closed = p.exact_closed_form(x).unwrap();
                assert!((p.exact(x) - closed).abs() < 1e-14, "m={m} alpha={alpha} x={x}");
            }
        }
        assert!(make_ml_problem(1, 0.5).is_err());
    }

    #[test]
    fn residuals_are_small() {
        let zero = make_zero_problem(0.5).unwrap();
        assert_eq!(residual_check(&zero, 20).unwrap(), 0.0);
        let p = make_power_problem(4.0, 0.5).unwrap();
        assert!(residual_check(&p, 20).unwrap() <= 1e-8);
        let e = make_exp_problem(3, 0.5).unwrap();
        assert!(residual_check(&e, 20).unwrap() <= 1e-6);
    }

    #[test]
    fn kernel_benchmark_reference_values() {
        // 30-digit quadrature after u = (X−t)^α
        let k_exp = KernelBenchmark::Exp.exact_k(0.5, 2.0).unwrap();
        assert!((k_exp - 12.500_854_858_280_655_589).abs() < 1e-13);
        let k_log = KernelBenchmark::LogShift.exact_k(0.25, 1.0).unwrap();
        assert!((k_log - 5.329_411_007_852_952_560).abs() < 1e-14);
        assert!((KernelBenchmark::LogShift.derivative(2, 1.0) + 1.0 / 16.0).abs() < 1e-16);
        assert!((KernelBenchmark::LogShift.derivative(3, 1.0) - 2.0 / 64.0).abs() < 1e-16);
    }
}
