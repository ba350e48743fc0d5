use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use super::{gamma, sin_pi};
use crate::sum::CompensatedSum;
use crate::{Error, Result};

const BORWEIN_TERMS: usize = 30;

/// Normalised Borwein weights `e_k = (d_n − d_k)/d_n` for the alternating series.
fn borwein_weights() -> &'static [f64; BORWEIN_TERMS] {
    static WEIGHTS: OnceLock<[f64; BORWEIN_TERMS]> = OnceLock::new();
    WEIGHTS.get_or_init(|| {
        let n = BORWEIN_TERMS;
        let nf = n as f64;
        // d_k = Σ_{i≤k} t_i, t_0 = 1, t_{i+1}/t_i = 2(n+i)(n−i)/((i+1)(2i+1))
        let mut d = [0.0; BORWEIN_TERMS + 1];
        let mut t = 1.0;
        let mut acc = 0.0;
        for (i, slot) in d.iter_mut().enumerate() {
            acc += t;
            *slot = acc;
            let fi = i as f64;
            t *= 2.0 * (nf + fi) * (nf - fi) / ((fi + 1.0) * (2.0 * fi + 1.0));
        }
        let dn = d[n];
        let mut e = [0.0; BORWEIN_TERMS];
        for k in 0..n {
            e[k] = (dn - d[k]) / dn;
        }
        e
    })
}

/// Dirichlet eta η(s) = Σ (−1)^{k−1} k^{−s}, Borwein-accelerated.
fn eta(s: f64) -> f64 {
    let weights = borwein_weights();
    let mut acc = CompensatedSum::new();
    for (k, w) in weights.iter().enumerate() {
        let term = w * (-s * ((k + 1) as f64).ln()).exp();
        acc.add(if k % 2 == 0 { term } else { -term });
    }
    acc.value()
}

/// ζ(s) for s > 0 through η(s)/(1 − 2^{1−s}); `one_minus_s` is passed
/// separately so callers near the pole can supply it without cancellation.
fn zeta_positive(s: f64, one_minus_s: f64) -> f64 {
    if s > 60.0 {
        return 1.0 + (-s * LN_2).exp();
    }
    // 1 − 2^{1−s} = −expm1((1−s) ln 2)
    let denom = -(one_minus_s * LN_2).exp_m1();
    eta(s) / denom
}

/// The Riemann zeta function on the real line.
///
/// s > 0 uses Borwein's accelerated eta series; s < 0 uses the functional
/// equation ζ(s) = 2^s π^{s−1} sin(πs/2) Γ(1−s) ζ(1−s).
pub fn zeta(s: f64) -> Result<f64> {
    if s.is_nan() {
        return Err(Error::domain("zeta", "NaN argument"));
    }
    if s == 1.0 {
        return Err(Error::Pole {
            function: "zeta",
            at: 1.0,
        });
    }
    if s == 0.0 {
        return Ok(-0.5);
    }
    if s > 0.0 {
        return Ok(zeta_positive(s, 1.0 - s));
    }
    let sine = sin_pi(0.5 * s);
    if sine == 0.0 {
        // trivial zeros at the negative even integers
        return Ok(0.0);
    }
    let reflected = zeta_positive(1.0 - s, s);
    let scale = (s * (2.0 * PI).ln()).exp() / PI;
    Ok(scale * sine * gamma(1.0 - s)? * reflected)
}

const POLYLOG_MAX_TERMS: usize = 2_000_000;

/// The polylogarithm Li_s(x) = Σ_{n≥1} x^n / n^s.
///
/// Defined here for |x| < 1, for x = −1, and for x = 1 when s > 1.
pub fn polylog(s: f64, x: f64) -> Result<f64> {
    if x.is_nan() || s.is_nan() {
        return Err(Error::domain("polylog", "NaN argument"));
    }
    if x.abs() > 1.0 {
        return Err(Error::domain("polylog", format!("|x| = {} > 1", x.abs())));
    }
    if x == 1.0 {
        if s <= 1.0 {
            return Err(Error::domain("polylog", format!("x = 1 requires s > 1, got s = {s}")));
        }
        return zeta(s);
    }
    if x == -1.0 {
        // Li_s(−1) = −η(s)
        if s > 0.0 {
            return Ok(-eta(s));
        }
        let z = zeta(s)?;
        return Ok(-(1.0 - (2.0f64).powf(1.0 - s)) * z);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut acc = CompensatedSum::new();
    let mut xn = 1.0;
    for n in 1..=POLYLOG_MAX_TERMS {
        xn *= x;
        let nf = n as f64;
        let term = xn * (-s * nf.ln()).exp();
        acc.add(term);
        // once the ratio |x|((n)/(n+1))^s is below 1 the tail is bounded
        // by a geometric series
        let ratio = x.abs() * (nf / (nf + 1.0)).powf(s);
        if ratio < 1.0 {
            let tail = term.abs() * ratio / (1.0 - ratio);
            if tail <= 1e-17 * acc.value().abs().max(1e-300) {
                return Ok(acc.value());
            }
        }
    }
    Err(Error::NonConvergence {
        function: "polylog",
        terms: POLYLOG_MAX_TERMS,
    })
}
