//! Quadratures for the fractional integrals
//!
//! ```text
//! I^α y(x) = 1/Γ(α) ∫_0^x (x−t)^{α−1} y(t) dt,   K^α y(x) = Γ(α) I^α y(x)
//! ```
//!
//! on a uniform grid `x_k = k h`. The uncorrected sums carry an error
//! expansion in powers `h^{k+α}` with coefficients `ζ(1−α−k) y^{(k)}(x)`
//! at the right end, plus Euler-Maclaurin terms in `h^{k+1}` at `t = 0`.
//! The corrected variants subtract the leading terms, either from supplied
//! derivatives ([`corrected_trapezoid_k`]) or from backward differences folded
//! into a few weights on the last nodes ([`corrected_sum_i`]).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::specfun::{binomial, gamma, rgamma, zeta};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

/// Samples `y_0..=y_n` of a function on `[0, X]` with step `h = X/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniformGrid {
    upper: f64,
    values: Vec<f64>,
}

impl UniformGrid {
    pub fn from_values(upper: f64, values: Vec<f64>) -> Result<Self> {
        if !(upper > 0.0) || !upper.is_finite() {
            return Err(Error::InvalidGrid(format!("upper limit {upper} must be positive")));
        }
        if values.len() < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 samples, got {}",
                values.len()
            )));
        }
        Ok(Self { upper, values })
    }

    /// Sample `f` at `k·X/n`, `k = 0..=n`.
    pub fn sample(upper: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("n must be at least 1".into()));
        }
        let h = upper / n as f64;
        let values = (0..=n).map(|k| f(node(k, h, n, upper))).collect();
        Self::from_values(upper, values)
    }

    /// Upper limit `X`.
    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Number of steps.
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    pub fn h(&self) -> f64 {
        self.upper / self.n() as f64
    }

    /// Grid node `x_k`; the last node is exactly `X`.
    pub fn x(&self, k: usize) -> f64 {
        node(k, self.h(), self.n(), self.upper)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n()).map(move |k| self.x(k))
    }

    /// The grid on `[0, x_m]` formed by the first `m+1` samples.
    pub fn prefix(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.n() {
            return Err(Error::InvalidGrid(format!("prefix {m} outside 1..={}", self.n())));
        }
        Self::from_values(self.x(m), self.values[..=m].to_vec())
    }
}

fn node(k: usize, h: f64, n: usize, upper: f64) -> f64 {
    if k == n {
        upper
    } else {
        k as f64 * h
    }
}

/// Kernel weights `k^{α−1}`, `k = 1..=n_max`, shared across grid sizes.
#[derive(Debug, Clone)]
pub struct KernelWeights {
    alpha: f64,
    weights: Vec<f64>,
}

impl KernelWeights {
    pub fn new(alpha: f64, n_max: usize) -> Self {
        let mut w = KernelWeights {
            alpha,
            weights: vec![0.0],
        };
        w.ensure(n_max);
        w
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Extend the table to cover `k ≤ n_max`.
    pub fn ensure(&mut self, n_max: usize) {
        let exponent = self.alpha - 1.0;
        for k in self.weights.len()..=n_max {
            self.weights.push((k as f64).powf(exponent));
        }
    }

    /// `k^{α−1}`; index 0 is unused and holds 0.
    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.weights[k]
    }

    pub fn n_max(&self) -> usize {
        self.weights.len() - 1
    }

    /// `Σ_{k=1}^{n−1} y_{n−k} k^{α−1}` over `values[0..=n]`, compensated.
    pub fn history_sum(&self, values: &[f64], n: usize) -> f64 {
        debug_assert!(n < values.len() && n <= self.n_max() + 1);
        let mut acc = CompensatedSum::new();
        for k in 1..n {
            acc.add(values[n - k] * self.weights[k]);
        }
        acc.value()
    }
}

/// `I^α x^p = Γ(p+1)/Γ(p+α+1) x^{p+α}`.
pub fn frac_integral_exact_power(p: f64, alpha: f64, x: f64) -> Result<f64> {
    if !(p > -1.0) {
        return Err(Error::domain("frac_integral_exact_power", format!("p = {p} must exceed -1")));
    }
    if !(alpha > 0.0) {
        return Err(Error::domain("frac_integral_exact_power", format!("alpha = {alpha} must be positive")));
    }
    if x < 0.0 {
        return Err(Error::domain("frac_integral_exact_power", format!("x = {x} is negative")));
    }
    Ok(gamma(p + 1.0)? * rgamma(p + alpha + 1.0) * x.powf(p + alpha))
}

/// Trapezoidal approximation of `K^α y(X)`:
/// `h^α Σ_{k=1}^{n−1} y_{n−k}/k^{1−α} + y_0 h/(2 X^{1−α})`.
pub fn trapezoid_k(grid: &UniformGrid, alpha: f64) -> Result<f64> {
    let n = grid.n();
    if n < 2 {
        return Err(Error::GridTooShort { n, needed: 1 });
    }
    let h = grid.h();
    let x = grid.upper();
    let weights = KernelWeights::new(alpha, n);
    let sum = weights.history_sum(grid.values(), n);
    Ok(h.powf(alpha) * sum + grid.values()[0] * h / (2.0 * x.powf(1.0 - alpha)))
}

/// Derivative values at the two ends of `[0, X]`.
///
/// Only the entries the requested correction order reads need to be set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EndpointDerivatives {
    /// `y(0), y'(0), y''(0), y'''(0)`
    pub at_zero: [Option<f64>; 4],
    /// `y(X), y'(X), …, y⁽⁵⁾(X)`
    pub at_x: [Option<f64>; 6],
}

impl EndpointDerivatives {
    /// Fill from closures returning the k-th derivative at a point.
    pub fn from_fn(x: f64, derivative: impl Fn(usize, f64) -> f64) -> Self {
        let mut d = Self::default();
        for (k, slot) in d.at_zero.iter_mut().enumerate() {
            *slot = Some(derivative(k, 0.0));
        }
        for (k, slot) in d.at_x.iter_mut().enumerate() {
            *slot = Some(derivative(k, x));
        }
        d
    }

    fn zero(&self, k: usize) -> Result<f64> {
        const NAMES: [&str; 4] = ["y(0)", "y'(0)", "y''(0)", "y'''(0)"];
        self.at_zero[k].ok_or(Error::MissingDerivative(NAMES[k]))
    }

    fn right(&self, k: usize) -> Result<f64> {
        const NAMES: [&str; 6] = ["y(x)", "y'(x)", "y''(x)", "y'''(x)", "y''''(x)", "y'''''(x)"];
        self.at_x[k].ok_or(Error::MissingDerivative(NAMES[k]))
    }
}

/// Correction order of [`corrected_trapezoid_k`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrapezoidOrder {
    Fourth,
    Sixth,
}

/// Trapezoidal `K^α y(X)` minus its asymptotic error terms.
///
/// Fourth order subtracts the `h²` term from `y(0), y'(0)` and the right-end
/// terms `ζ(1−α−k)(−1)^k y^{(k)}(X)/k! h^{k+α}` for `k ≤ 3`. Sixth order adds
/// `k = 4, 5` and the `h⁴` left-end term built from `y(0)..y'''(0)`.
pub fn corrected_trapezoid_k(
    grid: &UniformGrid,
    alpha: f64,
    deriv: &EndpointDerivatives,
    order: TrapezoidOrder,
) -> Result<f64> {
    let trapezoid = trapezoid_k(grid, alpha)?;
    let h = grid.h();
    let x = grid.upper();
    let right_terms = match order {
        TrapezoidOrder::Fourth => 4,
        TrapezoidOrder::Sixth => 6,
    };

    let mut correction = CompensatedSum::new();
    let mut factorial = 1.0;
    for k in 0..right_terms {
        if k > 0 {
            factorial *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign * zeta(1.0 - alpha - k as f64)? / factorial;
        correction.add(coeff * deriv.right(k)? * h.powf(k as f64 + alpha));
    }

    // left end, h²: −(1/12)((1−α) x^{α−2} y(0) + x^{α−1} y'(0))
    let y0 = deriv.zero(0)?;
    let dy0 = deriv.zero(1)?;
    let one_minus = 1.0 - alpha;
    correction.add(
        -(one_minus * x.powf(alpha - 2.0) * y0 + x.powf(alpha - 1.0) * dy0) / 12.0 * h * h,
    );

    if order == TrapezoidOrder::Sixth {
        let d2 = deriv.zero(2)?;
        let d3 = deriv.zero(3)?;
        let two_minus = 2.0 - alpha;
        let three_minus = 3.0 - alpha;
        let h4 = (three_minus * two_minus * one_minus * x.powf(alpha - 4.0) * y0
            + 3.0 * two_minus * one_minus * x.powf(alpha - 3.0) * dy0
            + 3.0 * one_minus * x.powf(alpha - 2.0) * d2
            + x.powf(alpha - 1.0) * d3)
            / 720.0;
        correction.add(h4 * h.powi(4));
    }

    Ok(trapezoid - correction.value())
}

/// Left Riemann sum for `I^α y(X)`: `h^α/Γ(α) Σ_{k=1}^{n} y_{n−k}/k^{1−α}`.
pub fn riemann_left_i(grid: &UniformGrid, alpha: f64) -> Result<f64> {
    let n = grid.n();
    let weights = KernelWeights::new(alpha, n);
    let values = grid.values();
    let mut acc = CompensatedSum::new();
    for k in 1..=n {
        acc.add(values[n - k] * weights.get(k));
    }
    Ok(grid.h().powf(alpha) * rgamma(alpha) * acc.value())
}

/// Which end-corrected approximation of `I^α`: orders α, 1+α, …, 4+α.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrderTag {
    A,
    A1,
    A2,
    A3,
    A4,
}

impl OrderTag {
    pub const ALL: [OrderTag; 5] = [OrderTag::A, OrderTag::A1, OrderTag::A2, OrderTag::A3, OrderTag::A4];

    /// Integer part of the nominal order `k + α`.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn nominal_order(self, alpha: f64) -> f64 {
        self.index() as f64 + alpha
    }

    /// Highest derivative that must vanish at 0 for the nominal order.
    pub fn required_vanishing(self) -> usize {
        match self {
            OrderTag::A | OrderTag::A1 | OrderTag::A2 => 1,
            OrderTag::A3 => 2,
            OrderTag::A4 => 3,
        }
    }
}

impl fmt::Display for OrderTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OrderTag::A => "A",
            OrderTag::A1 => "A1",
            OrderTag::A2 => "A2",
            OrderTag::A3 => "A3",
            OrderTag::A4 => "A4",
        };
        f.write_str(s)
    }
}

/// End-correction weights `c_0..c_3` applied to `y_n..y_{n−3}`.
///
/// They come from the right-end expansion
/// `ΓI ≈ h^α[Σ − ζ(1−α)y + ζ(−α)hy' − ζ(−1−α)h²y''/2 + ζ(−2−α)h³y'''/6]`
/// with the derivatives replaced by one-sided differences of matching order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeCoefficients {
    pub alpha: f64,
    pub tag: OrderTag,
    /// `c_0..c_{len−1}`; empty for [`OrderTag::A`].
    pub c: Vec<f64>,
    /// `ζ(1−α), ζ(−α), ζ(−1−α), ζ(−2−α)`
    pub zeta_cache: [f64; 4],
}

impl SchemeCoefficients {
    pub fn new(alpha: f64, tag: OrderTag) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 2.0) || alpha == 1.0 {
            return Err(Error::domain(
                "scheme_coefficients",
                format!("alpha = {alpha} must lie in (0,1) ∪ (1,2)"),
            ));
        }
        let zeta_cache = [
            zeta(1.0 - alpha)?,
            zeta(-alpha)?,
            zeta(-1.0 - alpha)?,
            zeta(-2.0 - alpha)?,
        ];
        let [z1, z0, zm1, zm2] = zeta_cache;
        let c = match tag {
            OrderTag::A => vec![],
            OrderTag::A1 => vec![-z1],
            OrderTag::A2 => vec![z0 - z1, -z0],
            OrderTag::A3 => vec![
                0.5 * (3.0 * z0 - zm1 - 2.0 * z1),
                -2.0 * z0 + zm1,
                0.5 * (z0 - zm1),
            ],
            OrderTag::A4 => vec![
                11.0 / 6.0 * z0 - zm1 + zm2 / 6.0 - z1,
                -3.0 * z0 + 2.5 * zm1 - 0.5 * zm2,
                1.5 * z0 - 2.0 * zm1 + 0.5 * zm2,
                -z0 / 3.0 + 0.5 * zm1 - zm2 / 6.0,
            ],
        };
        Ok(Self {
            alpha,
            tag,
            c,
            zeta_cache,
        })
    }

    /// `c_0`, or 0 for the uncorrected sum.
    pub fn c0(&self) -> f64 {
        self.c.first().copied().unwrap_or(0.0)
    }

    /// `Σ_{j≥1} c_j y_{n−j}` (terms reaching below index 0 are dropped).
    pub fn tail_correction(&self, values: &[f64], n: usize) -> f64 {
        self.c
            .iter()
            .enumerate()
            .skip(1)
            .filter(|&(j, _)| j <= n)
            .map(|(j, cj)| cj * values[n - j])
            .sum()
    }
}

/// Corrected sum for `I^α y(X)`:
/// `h^α/Γ(α) (Σ_j c_j y_{n−j} + Σ_{k=1}^{n−1} y_{n−k}/k^{1−α})`.
pub fn corrected_sum_i(grid: &UniformGrid, coeffs: &SchemeCoefficients) -> Result<f64> {
    let weights = KernelWeights::new(coeffs.alpha, grid.n());
    corrected_sum_i_with(grid, coeffs, &weights)
}

/// As [`corrected_sum_i`], reusing a precomputed weight table.
pub fn corrected_sum_i_with(
    grid: &UniformGrid,
    coeffs: &SchemeCoefficients,
    weights: &KernelWeights,
) -> Result<f64> {
    let n = grid.n();
    if n <= coeffs.c.len() {
        return Err(Error::GridTooShort {
            n,
            needed: coeffs.c.len(),
        });
    }
    if weights.n_max() + 1 < n || weights.alpha() != coeffs.alpha {
        return Err(Error::InvalidGrid("weight table does not match grid".into()));
    }
    let values = grid.values();
    let mut acc = CompensatedSum::new();
    acc.add(coeffs.c0() * values[n]);
    acc.add(coeffs.tail_correction(values, n));
    acc.add(weights.history_sum(values, n));
    Ok(grid.h().powf(coeffs.alpha) * rgamma(coeffs.alpha) * acc.value())
}

/// `Σ_{k=1}^{n−1} k^α` from its asymptotic expansion
/// `ζ(−α) + n^{1+α}/(1+α) Σ_{m=0}^{M} C(1+α, m) B_m / n^m` (B_1 = −1/2).
pub fn sum_of_powers(alpha: f64, n: usize, m_terms: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain("sum_of_powers", format!("n = {n} must be at least 2")));
    }
    if m_terms > 10 {
        return Err(Error::domain("sum_of_powers", format!("m_terms = {m_terms} exceeds 10")));
    }
    let nf = n as f64;
    let mut series = CompensatedSum::new();
    for m in 0..=m_terms {
        let b = crate::specfun::bernoulli_first_kind(m);
        if b != 0.0 {
            series.add(binomial(1.0 + alpha, m) * b / nf.powi(m as i32));
        }
    }
    Ok(zeta(-alpha)? + nf.powf(1.0 + alpha) / (1.0 + alpha) * series.value())
}
