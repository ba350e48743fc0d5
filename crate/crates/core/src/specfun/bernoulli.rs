use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

const MAX_INDEX: usize = 60;

/// Sign convention for B_1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BernoulliKind {
    /// B_1 = −1/2
    First,
    /// B_1 = +1/2
    Second,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliTable {
    pub kind: BernoulliKind,
    exact: Vec<BigRational>,
    values: Vec<f64>,
}

impl BernoulliTable {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact rational value of B_n.
    pub fn exact(&self, n: usize) -> Option<&BigRational> {
        self.exact.get(n)
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(n).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// First-kind numbers B_0..=B_60 from Σ_{k=0}^{n} C(n+1,k) B_k = 0.
fn first_kind_exact() -> &'static [BigRational] {
    static TABLE: OnceLock<Vec<BigRational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut b: Vec<BigRational> = Vec::with_capacity(MAX_INDEX + 1);
        b.push(BigRational::one());
        for n in 1..=MAX_INDEX {
            // binomial row C(n+1, k)
            let mut c = BigInt::one();
            let mut acc = BigRational::zero();
            for (k, bk) in b.iter().enumerate() {
                acc += BigRational::from_integer(c.clone()) * bk;
                c = c * BigInt::from(n + 1 - k) / BigInt::from(k + 1);
            }
            b.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
        }
        b
    })
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Table of Bernoulli numbers B_0..=B_{n_max}.
pub fn bernoulli_numbers(n_max: usize, kind: BernoulliKind) -> Result<BernoulliTable> {
    if n_max > MAX_INDEX {
        return Err(Error::BernoulliOverflow(n_max));
    }
    let mut exact = first_kind_exact()[..=n_max].to_vec();
    if kind == BernoulliKind::Second && n_max >= 1 {
        exact[1] = -exact[1].clone();
    }
    let values = exact.iter().map(to_f64).collect();
    Ok(BernoulliTable {
        kind,
        exact,
        values,
    })
}

/// First-kind B_n as f64 (n ≤ 60).
pub(crate) fn bernoulli_first(n: usize) -> f64 {
    static VALUES: OnceLock<Vec<f64>> = OnceLock::new();
    VALUES.get_or_init(|| first_kind_exact().iter().map(to_f64).collect())[n]
}

/// Bernoulli polynomial B_n(x) = Σ_k C(n,k) B_{n−k} x^k (first-kind numbers).
pub fn bernoulli_polynomial(n: usize, x: f64) -> Result<f64> {
    if n > MAX_INDEX {
        return Err(Error::BernoulliOverflow(n));
    }
    // Horner in x with coefficients C(n,k) B_{n−k}
    let mut c = 1.0;
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        coeffs.push(c * bernoulli_first(n - k));
        c = c * (n - k) as f64 / (k + 1) as f64;
    }
    Ok(coeffs.iter().rev().fold(0.0, |acc, ck| acc * x + ck))
}
