//! Browser bindings: solution curves, convergence sweeps and a
//! Mittag-Leffler plotter. Results cross the boundary as JSON strings or
//! `Float64Array`s.

use serde_json::json;
use wasm_bindgen::prelude::*;

use fracrelax::bench::{emit_solution_curve, halving, ProblemKind, SweepSettings};
use fracrelax::problems::BenchmarkProblem;
use fracrelax::solver::{max_error_from, SchemeKind, Stepper};
use fracrelax::specfun::mittag_leffler;

fn js_err(e: impl std::fmt::Display) -> JsError {
    JsError::new(&e.to_string())
}

/// `param` is p for `power` and m for `exp`/`ml`.
fn build_problem(kind: &str, param: f64, alpha: f64) -> Result<BenchmarkProblem, JsError> {
    let kind: ProblemKind = kind.parse().map_err(js_err)?;
    let settings = SweepSettings {
        problem: Some(kind),
        p: Some(param),
        m: Some(param.max(0.0).round() as u32),
        alpha: Some(alpha),
        ..Default::default()
    };
    settings.problem().map_err(js_err)
}

fn parse_schemes(list: &str) -> Result<Vec<SchemeKind>, JsError> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse().map_err(js_err))
        .collect()
}

/// Exact and numerical solutions on the grid `h`:
/// `{"label", "x": [...], "exact": [...], "series": [{"scheme", "u"}]}`.
#[wasm_bindgen]
pub fn solution_curve(kind: &str, param: f64, alpha: f64, schemes: &str, h: f64) -> Result<String, JsError> {
    let problem = build_problem(kind, param, alpha)?;
    let curve = emit_solution_curve(&problem, &parse_schemes(schemes)?, h).map_err(js_err)?;
    let series: Vec<_> = curve
        .columns
        .iter()
        .map(|(name, u)| json!({ "scheme": name, "u": u }))
        .collect();
    Ok(json!({
        "label": problem.label(),
        "x": curve.x,
        "exact": curve.exact,
        "series": series,
    })
    .to_string())
}

/// Max error and empirical order per halving of `h0`, for each scheme:
/// `[{"scheme", "nominal", "rows": [{"h", "error", "order"}]}]`.
#[wasm_bindgen]
pub fn convergence_sweep(
    kind: &str,
    param: f64,
    alpha: f64,
    schemes: &str,
    h0: f64,
    count: usize,
) -> Result<String, JsError> {
    let problem = build_problem(kind, param, alpha)?;
    let h_list = halving(h0, count);
    let ns: Vec<usize> = h_list.iter().map(|h| (problem.interval_end / h).round() as usize).collect();
    let n_max = ns.iter().copied().max().unwrap_or(1);
    let mut out = Vec::new();
    for scheme in parse_schemes(schemes)? {
        let mut stepper = Stepper::new(alpha, scheme, n_max).map_err(js_err)?;
        let mut rows = Vec::new();
        let mut prev: Option<(f64, f64)> = None;
        for (&h, &n) in h_list.iter().zip(&ns) {
            let u = stepper.solve(&problem, n).map_err(js_err)?;
            let error = max_error_from(&u, |x| problem.exact(x), scheme.first_computed());
            let order = prev.map(|(ph, pe)| (pe / error).ln() / (ph / h).ln());
            rows.push(json!({ "h": h, "error": error, "order": order }));
            prev = Some((h, error));
        }
        out.push(json!({
            "scheme": scheme.name(),
            "nominal": scheme.nominal_order(alpha),
            "rows": rows,
        }));
    }
    Ok(serde_json::Value::Array(out).to_string())
}

/// `E_{α,β}(x)` at `n` evenly spaced points of `[x0, x1]`.
#[wasm_bindgen]
pub fn mittag_leffler_curve(alpha: f64, beta: f64, x0: f64, x1: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let n = n.max(2);
    (0..n)
        .map(|i| {
            let x = x0 + (x1 - x0) * i as f64 / (n - 1) as f64;
            mittag_leffler(alpha, beta, x).map_err(js_err)
        })
        .collect()
}
