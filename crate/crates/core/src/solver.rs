//! Explicit schemes for `y + I^α y = F` on a uniform grid, and the constants
//! of the a-priori error bounds for the uncorrected scheme.
//!
//! Every scheme has the form
//!
//! ```text
//! u_n = (Γ(α) F_n − h^α (Σ_{j≥1} c_j u_{n−j} + Σ_{k=1}^{n−1} u_{n−k} k^{α−1})) / (Γ(α) + c_0 h^α)
//! ```
//!
//! with the weights `c_j` of [`SchemeCoefficients`] and `u_0 = 0`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fracint::{KernelWeights, OrderTag, SchemeCoefficients, UniformGrid};
use crate::problems::BenchmarkProblem;
use crate::specfun::gamma;
use crate::sum::CompensatedSum;
use crate::{Error, Result};

const DENOMINATOR_FLOOR: f64 = 1e-12;

/// One of the five schemes, of orders α, 1+α, 2+α, 3+α and 4+α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemeKind {
    #[serde(rename = "S_A")]
    SA,
    #[serde(rename = "S_A1")]
    SA1,
    #[serde(rename = "S_A2")]
    SA2,
    #[serde(rename = "S_A3")]
    SA3,
    #[serde(rename = "S_A4")]
    SA4,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 5] = [SchemeKind::SA, SchemeKind::SA1, SchemeKind::SA2, SchemeKind::SA3, SchemeKind::SA4];

    pub fn tag(self) -> OrderTag {
        match self {
            SchemeKind::SA => OrderTag::A,
            SchemeKind::SA1 => OrderTag::A1,
            SchemeKind::SA2 => OrderTag::A2,
            SchemeKind::SA3 => OrderTag::A3,
            SchemeKind::SA4 => OrderTag::A4,
        }
    }

    /// Prescribed zero values after `u_0`: `u_1` for S_A3, `u_1, u_2` for S_A4.
    pub fn startup_zeros(self) -> usize {
        match self {
            SchemeKind::SA | SchemeKind::SA1 | SchemeKind::SA2 => 0,
            SchemeKind::SA3 => 1,
            SchemeKind::SA4 => 2,
        }
    }

    /// First node computed by the recurrence.
    pub fn first_computed(self) -> usize {
        self.startup_zeros() + 1
    }

    pub fn nominal_order(self, alpha: f64) -> f64 {
        self.tag().nominal_order(alpha)
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::SA => "S_A",
            SchemeKind::SA1 => "S_A1",
            SchemeKind::SA2 => "S_A2",
            SchemeKind::SA3 => "S_A3",
            SchemeKind::SA4 => "S_A4",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace(['_', '-'], "");
        match key.as_str() {
            "SA" | "A" => Ok(SchemeKind::SA),
            "SA1" | "A1" => Ok(SchemeKind::SA1),
            "SA2" | "A2" => Ok(SchemeKind::SA2),
            "SA3" | "A3" => Ok(SchemeKind::SA3),
            "SA4" | "A4" => Ok(SchemeKind::SA4),
            _ => Err(Error::Parse(format!("unknown scheme '{s}'"))),
        }
    }
}

/// Reusable state for repeated solves with one (α, scheme) pair.
#[derive(Debug, Clone)]
pub struct Stepper {
    scheme: SchemeKind,
    coeffs: SchemeCoefficients,
    weights: KernelWeights,
    gamma_alpha: f64,
}

impl Stepper {
    pub fn new(alpha: f64, scheme: SchemeKind, n_max: usize) -> Result<Self> {
        Ok(Self {
            scheme,
            coeffs: SchemeCoefficients::new(alpha, scheme.tag())?,
            weights: KernelWeights::new(alpha, n_max),
            gamma_alpha: gamma(alpha)?,
        })
    }

    pub fn coefficients(&self) -> &SchemeCoefficients {
        &self.coeffs
    }

    /// Run the recurrence on `[0, upper]` with `n` steps and zero startup values.
    pub fn run(&mut self, upper: f64, n: usize, forcing: impl Fn(f64) -> f64) -> Result<UniformGrid> {
        self.run_seeded(upper, n, forcing, |_| 0.0)
    }

    /// As [`Stepper::run`], but the startup values `u_1..` are `startup(x_m)`.
    pub fn run_seeded(
        &mut self,
        upper: f64,
        n: usize,
        forcing: impl Fn(f64) -> f64,
        startup: impl Fn(f64) -> f64,
    ) -> Result<UniformGrid> {
        let needed = self.scheme.startup_zeros() + 2;
        if n < needed {
            return Err(Error::GridTooShort { n, needed: needed - 1 });
        }
        self.weights.ensure(n);
        let h = upper / n as f64;
        let h_alpha = h.powf(self.coeffs.alpha);
        let denominator = self.gamma_alpha + self.coeffs.c0() * h_alpha;
        if denominator.abs() <= DENOMINATOR_FLOOR {
            return Err(Error::DegenerateDenominator(denominator));
        }

        let mut u = vec![0.0; n + 1];
        for (m, slot) in u.iter_mut().enumerate().take(self.scheme.first_computed()).skip(1) {
            *slot = startup(m as f64 * h);
        }
        for m in self.scheme.first_computed()..=n {
            let x = if m == n { upper } else { m as f64 * h };
            let mut lagged = CompensatedSum::new();
            lagged.add(self.coeffs.tail_correction(&u, m));
            lagged.add(self.weights.history_sum(&u, m));
            u[m] = (self.gamma_alpha * forcing(x) - h_alpha * lagged.value()) / denominator;
        }
        UniformGrid::from_values(upper, u)
    }

    pub fn solve(&mut self, problem: &BenchmarkProblem, n: usize) -> Result<UniformGrid> {
        self.run(problem.interval_end, n, |x| problem.forcing(x))
    }

    /// Solve with the startup values taken from the exact solution.
    pub fn solve_exact_startup(&mut self, problem: &BenchmarkProblem, n: usize) -> Result<UniformGrid> {
        self.run_seeded(problem.interval_end, n, |x| problem.forcing(x), |x| problem.exact(x))
    }
}

/// Numerical solution `u_0..u_n` of the problem on `[0, X]`.
pub fn solve(problem: &BenchmarkProblem, scheme: SchemeKind, n: usize) -> Result<UniformGrid> {
    Stepper::new(problem.alpha, scheme, n)?.solve(problem, n)
}

/// `max_{m≥1} |u_m − y(x_m)|`.
pub fn max_error(numeric: &UniformGrid, exact: impl Fn(f64) -> f64) -> f64 {
    max_error_from(numeric, exact, 1)
}

/// `max_{m≥first} |u_m − y(x_m)|`.
pub fn max_error_from(numeric: &UniformGrid, exact: impl Fn(f64) -> f64, first: usize) -> f64 {
    numeric
        .values()
        .iter()
        .enumerate()
        .skip(first)
        .map(|(m, u)| (u - exact(numeric.x(m))).abs())
        .fold(0.0, f64::max)
}

/// Constants of the a-priori bounds for the uncorrected scheme S_A.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityConstants {
    pub alpha: f64,
    /// Bound on the scaled truncation errors `|a_m|`.
    pub a: f64,
    /// `Γ(α+1)A/(Γ(α+1)−1)`
    pub theorem6_c: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

/// `|e_m| < Γ(α+1)A/(Γ(α+1)−1) h^α` for `1 < α < 2`.
pub fn theorem6_bound(alpha: f64, a: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::domain("theorem6_bound", format!("alpha = {alpha} must lie in (1,2)")));
    }
    if !(a > 0.0) {
        return Err(Error::domain("theorem6_bound", format!("A = {a} must be positive")));
    }
    let g = gamma(alpha + 1.0)?;
    Ok(g * a / (g - 1.0))
}

/// `C_0, C_1, C_2` for `0 < α < 1`; `|e_m| < C_2 h^α` on the whole grid.
pub fn theorem11_constants(alpha: f64, a: f64) -> Result<StabilityConstants> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("theorem11_constants", format!("alpha = {alpha} must lie in (0,1)")));
    }
    if !(a > 0.0) {
        return Err(Error::domain("theorem11_constants", format!("A = {a} must be positive")));
    }
    let g1 = gamma(alpha + 1.0)?;
    let ga = gamma(alpha)?;
    let scaled = 2f64.powf(alpha) * g1;
    let c0 = scaled * a / (scaled - 1.0);
    let c1 = (2f64.powf(1.0 - alpha) * c0 + ga * a) / ga;
    let c2 = (c0 + scaled * c1) / (scaled - 1.0);
    Ok(StabilityConstants {
        alpha,
        a,
        theorem6_c: g1 * a / (g1 - 1.0),
        c0,
        c1,
        c2,
    })
}

/// Scaled truncation errors `a_m` of the left Riemann sum on the exact
/// solution, `m = 1..=n`: `a_m h^α = R_m − I^α y(x_m)` with `I^α y = F − y`.
pub fn truncation_errors(problem: &BenchmarkProblem, n: usize) -> Result<Vec<f64>> {
    let alpha = problem.alpha;
    let grid = UniformGrid::sample(problem.interval_end, n, |t| problem.exact(t))?;
    let weights = KernelWeights::new(alpha, n);
    let h_alpha = grid.h().powf(alpha);
    let ga = gamma(alpha)?;
    Ok((1..=n)
        .map(|m| {
            let x = grid.x(m);
            let riemann = h_alpha / ga * weights.history_sum(grid.values(), m);
            let exact_integral = problem.forcing(x) - problem.exact(x);
            (riemann - exact_integral) / h_alpha
        })
        .collect())
}

/// `1 + 2^{α−1} + ⋯ + (m−1)^{α−1} < m^α/α` by direct summation, and for
/// `0 < α < 1` also the window bound on `[⌈m/2⌉, m]`.
pub fn claim5_partial_sum_check(alpha: f64, m: usize) -> bool {
    if m < 2 || !(alpha > 0.0 && alpha < 2.0) {
        return false;
    }
    let sum: CompensatedSum = (1..m).map(|k| (k as f64).powf(alpha - 1.0)).collect();
    let claim5 = sum.value() < (m as f64).powf(alpha) / alpha;
    if alpha < 1.0 {
        claim5 && claim8_window_check(alpha, m.div_ceil(2).max(1), m)
    } else {
        claim5
    }
}

/// `lo^{α−1} + ⋯ + hi^{α−1} < (hi^α − (lo−1)^α)/α` for `0 < α < 1`.
pub fn claim8_window_check(alpha: f64, lo: usize, hi: usize) -> bool {
    if lo == 0 || lo > hi || !(alpha > 0.0 && alpha < 1.0) {
        return false;
    }
    let sum: CompensatedSum = (lo..=hi).map(|k| (k as f64).powf(alpha - 1.0)).collect();
    sum.value() < ((hi as f64).powf(alpha) - ((lo - 1) as f64).powf(alpha)) / alpha
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fracint::corrected_sum_i;
    use crate::problems::{make_power_problem, make_zero_problem};

    #[test]
    fn zero_forcing_gives_zero_solution() {
        let p = make_zero_problem(0.6).unwrap();
        for scheme in SchemeKind::ALL {
            let u = solve(&p, scheme, 40).unwrap();
            assert!(u.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn startup_values_are_zero() {
        let p = make_power_problem(4.0, 0.4).unwrap();
        let u = solve(&p, SchemeKind::SA4, 20).unwrap();
        assert_eq!(&u.values()[..3], &[0.0, 0.0, 0.0]);
        assert!(u.values()[3] != 0.0);
        let u = solve(&p, SchemeKind::SA3, 20).unwrap();
        assert_eq!(&u.values()[..2], &[0.0, 0.0]);
        assert!(u.values()[2] != 0.0);
        assert!(matches!(solve(&p, SchemeKind::SA4, 3), Err(Error::GridTooShort { .. })));
        assert!(solve(&p, SchemeKind::SA4, 4).is_ok());
    }

    #[test]
    fn uncorrected_scheme_matches_explicit_formula() {
        let p = make_power_problem(1.05, 0.5).unwrap();
        let n = 10;
        let u = solve(&p, SchemeKind::SA, n).unwrap();
        let h: f64 = 0.1;
        let g = gamma(0.5).unwrap();
        let mut v = vec![0.0; n + 1];
        for m in 1..=n {
            let s: f64 = (1..m).map(|k| v[m - k] / (k as f64).sqrt()).sum();
            v[m] = p.forcing(m as f64 * h) - h.sqrt() / g * s;
        }
        for m in 0..=n {
            assert!((u.values()[m] - v[m]).abs() < 1e-14);
        }
    }

    #[test]
    fn scheme_reproduces_its_quadrature() {
        // u solves u_n + Q_n[u] = F_n exactly, where Q is the corrected sum
        let p = make_power_problem(4.0, 1.3).unwrap();
        for scheme in [SchemeKind::SA1, SchemeKind::SA2, SchemeKind::SA3, SchemeKind::SA4] {
            let u = solve(&p, scheme, 30).unwrap();
            let coeffs = SchemeCoefficients::new(1.3, scheme.tag()).unwrap();
            for m in [10, 20, 30] {
                let q = corrected_sum_i(&u.prefix(m).unwrap(), &coeffs).unwrap();
                assert!((u.values()[m] + q - p.forcing(u.x(m))).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn max_error_cases() {
        let g = UniformGrid::sample(1.0, 10, |t| t * t).unwrap();
        assert_eq!(max_error(&g, |t| t * t), 0.0);
        let perturbed: Vec<f64> = g
            .values()
            .iter()
            .enumerate()
            .map(|(m, v)| v + if m % 2 == 0 { 1e-3 } else { -1e-3 })
            .collect();
        let pg = UniformGrid::from_values(1.0, perturbed).unwrap();
        assert!((max_error(&pg, |t| t * t) - 1e-3).abs() < 1e-15);
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in SchemeKind::ALL {
            assert_eq!(s.name().parse::<SchemeKind>().unwrap(), s);
        }
        assert_eq!("a3".parse::<SchemeKind>().unwrap(), SchemeKind::SA3);
        assert!("S_A5".parse::<SchemeKind>().is_err());
    }

    #[test]
    fn bound_constants() {
        let b = theorem6_bound(1.5, 1.0).unwrap();
        assert!((b - 4.036_372_203_023_193_5).abs() < 1e-12);
        // approaches 2 as α → 2⁻
        assert!((theorem6_bound(2.0 - 1e-9, 1.0).unwrap() - 2.0).abs() < 1e-7);
        assert!(theorem6_bound(0.5, 1.0).is_err());

        let c = theorem11_constants(0.5, 1.0).unwrap();
        assert!((c.c0 - 4.947_667_550_644_873_4).abs() < 1e-12);
        for i in 1..=9 {
            let c = theorem11_constants(i as f64 / 10.0, 1.0).unwrap();
            assert!(c.c0 > 0.0);
            assert!(c.c2 > c.c0 && c.c2 > c.c1);
        }
        assert!(theorem11_constants(1.5, 1.0).is_err());
    }

    #[test]
    fn partial_sum_claims() {
        // α = 1: 1 + ⋯ + 1 (9 terms) = 9 < 10
        assert!(claim5_partial_sum_check(1.0, 10));
        assert!(claim5_partial_sum_check(0.5, 1000));
        assert!(claim5_partial_sum_check(1.9, 500));
        assert!(claim8_window_check(0.3, 1, 50));
        assert!(claim8_window_check(0.3, 17, 40));
        assert!(!claim5_partial_sum_check(0.5, 1));
    }
}
