//! Convergence sweeps, reproduction of the published tables, and plot data.
//!
//! A sweep runs one target (a scheme on a benchmark problem, or the corrected
//! trapezoidal rule on a kernel benchmark) over a decreasing list of step
//! sizes and reports the maximum error and the empirical order
//! `log(E(h_{r−1})/E(h_r)) / log(h_{r−1}/h_r)` per row.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::fracint::{corrected_trapezoid_k, EndpointDerivatives, TrapezoidOrder, UniformGrid};
use crate::problems::{
    make_exp_problem, make_ml_problem, make_power_problem, make_zero_problem, BenchmarkProblem,
    KernelBenchmark,
};
use crate::solver::{max_error_from, SchemeKind, Stepper};
use crate::{Error, Result};

/// Environment variable that redirects relative output paths.
pub const OUT_DIR_ENV: &str = "FRACRELAX_OUT_DIR";

/// What a sweep measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepTarget {
    Scheme {
        problem: BenchmarkProblem,
        scheme: SchemeKind,
    },
    Kernel {
        benchmark: KernelBenchmark,
        alpha: f64,
        upper: f64,
        order: TrapezoidOrder,
    },
}

impl SweepTarget {
    pub fn alpha(&self) -> f64 {
        match self {
            SweepTarget::Scheme { problem, .. } => problem.alpha,
            SweepTarget::Kernel { alpha, .. } => *alpha,
        }
    }

    pub fn upper(&self) -> f64 {
        match self {
            SweepTarget::Scheme { problem, .. } => problem.interval_end,
            SweepTarget::Kernel { upper, .. } => *upper,
        }
    }

    pub fn label(&self) -> String {
        match self {
            SweepTarget::Scheme { problem, .. } => problem.label(),
            SweepTarget::Kernel { benchmark, upper, .. } => format!("K^a {} at x={upper}", benchmark.label()),
        }
    }

    /// Scheme name, or the trapezoid correction order.
    pub fn method(&self) -> String {
        match self {
            SweepTarget::Scheme { scheme, .. } => scheme.name().to_string(),
            SweepTarget::Kernel { order, .. } => match order {
                TrapezoidOrder::Fourth => "trapezoid-4".to_string(),
                TrapezoidOrder::Sixth => "trapezoid-6".to_string(),
            },
        }
    }

    /// Nominal convergence order.
    pub fn nominal_order(&self) -> f64 {
        match self {
            SweepTarget::Scheme { problem, scheme } => scheme.nominal_order(problem.alpha),
            SweepTarget::Kernel { order, .. } => match order {
                TrapezoidOrder::Fourth => 4.0,
                TrapezoidOrder::Sixth => 6.0,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "md" | "markdown" => Ok(OutputFormat::Markdown),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::Parse(format!("unknown format '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub target: SweepTarget,
    /// Strictly decreasing, each `X/n` for an integer `n`.
    pub h_list: Vec<f64>,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

/// `count` step sizes starting at `h0`, each half the previous.
pub fn halving(h0: f64, count: usize) -> Vec<f64> {
    (0..count).map(|i| h0 / 2f64.powi(i as i32)).collect()
}

/// Default step list: `X/40, X/80, …, X/320`.
pub fn default_h_list(upper: f64) -> Vec<f64> {
    halving(upper / 40.0, 4)
}

impl SweepSpec {
    pub fn new(target: SweepTarget, h_list: Vec<f64>) -> Self {
        Self {
            target,
            h_list,
            format: OutputFormat::Csv,
            out: None,
        }
    }

    /// Step counts `n = X/h`, after checking the spec.
    pub fn step_counts(&self) -> Result<Vec<usize>> {
        if self.h_list.is_empty() {
            return Err(Error::InvalidSweep("empty h list".into()));
        }
        let upper = self.target.upper();
        let mut counts = Vec::with_capacity(self.h_list.len());
        for (i, &h) in self.h_list.iter().enumerate() {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidSweep(format!("h = {h} must be positive")));
            }
            if i > 0 && h >= self.h_list[i - 1] {
                return Err(Error::InvalidSweep(format!(
                    "h values must strictly decrease ({} then {h})",
                    self.h_list[i - 1]
                )));
            }
            let ratio = upper / h;
            let n = ratio.round();
            if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio {
                return Err(Error::InvalidSweep(format!("h = {h} does not divide X = {upper}")));
            }
            counts.push(n as usize);
        }
        Ok(counts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub n: usize,
    pub max_error: f64,
    pub order: Option<f64>,
    pub expected_error: Option<f64>,
    pub expected_order: Option<f64>,
}

/// Where the accepted order band is centred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderReference {
    /// The published order of the same row.
    Printed,
    /// A fixed value for every row.
    Fixed { value: f64 },
}

/// Acceptance band for a reproduced table column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub reference: OrderReference,
    pub half_width: f64,
    /// Computed and published errors may differ by at most this factor.
    pub error_factor: f64,
}

impl Tolerance {
    pub fn band(&self, printed: Option<f64>) -> Option<(f64, f64)> {
        let centre = match self.reference {
            OrderReference::Printed => printed?,
            OrderReference::Fixed { value } => value,
        };
        Some((centre - self.half_width, centre + self.half_width))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub scheme: String,
    pub alpha: f64,
    pub upper: f64,
    pub timestamp: String,
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<Tolerance>,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    /// Rows outside the tolerance, one message each. Empty without a tolerance.
    pub fn violations(&self) -> Vec<String> {
        let Some(tol) = self.tolerance else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for row in &self.rows {
            if let (Some(order), Some((lo, hi))) = (row.order, tol.band(row.expected_order)) {
                if !(order >= lo && order <= hi) {
                    out.push(format!(
                        "{} {} alpha={} h={}: order {order:.4} outside [{lo:.4}, {hi:.4}]",
                        self.label, self.scheme, self.alpha, row.h
                    ));
                }
            }
            if let Some(expected) = row.expected_error {
                let ratio = row.max_error / expected;
                if !(ratio <= tol.error_factor && ratio >= 1.0 / tol.error_factor) {
                    out.push(format!(
                        "{} {} alpha={} h={}: error {:.3e} vs published {expected:.3e} (ratio {ratio:.3})",
                        self.label, self.scheme, self.alpha, row.h, row.max_error
                    ));
                }
            }
        }
        out
    }

    pub fn passes(&self) -> bool {
        self.violations().is_empty()
    }

    /// Drop the first `k` rows (used to hide a lead-in row kept only for the order).
    fn drop_leading(mut self, k: usize) -> Self {
        self.rows.drain(..k.min(self.rows.len()));
        self
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn fill_orders(rows: &mut [ConvergenceRow]) {
    for r in 1..rows.len() {
        let (prev, cur) = (&rows[r - 1], &rows[r]);
        rows[r].order = Some((prev.max_error / cur.max_error).ln() / (prev.h / cur.h).ln());
    }
}

fn sweep_context(h: f64, target: &SweepTarget) -> impl Fn(Error) -> Error + '_ {
    move |e| Error::Sweep {
        h,
        scheme: target.method(),
        source: Box::new(e),
    }
}

/// Run every step size of the spec. Rows come out in the order of `h_list`.
pub fn run_sweep(spec: &SweepSpec) -> Result<ConvergenceReport> {
    let counts = spec.step_counts()?;
    let target = &spec.target;
    let mut rows = Vec::with_capacity(counts.len());

    match target {
        SweepTarget::Scheme { problem, scheme } => {
            let n_max = counts.iter().copied().max().unwrap_or(1);
            let mut stepper = Stepper::new(problem.alpha, *scheme, n_max)
                .map_err(sweep_context(spec.h_list[0], target))?;
            for (&h, &n) in spec.h_list.iter().zip(&counts) {
                let u = stepper.solve(problem, n).map_err(sweep_context(h, target))?;
                let max_error = max_error_from(&u, |x| problem.exact(x), scheme.first_computed());
                rows.push(row(h, n, max_error));
            }
        }
        SweepTarget::Kernel {
            benchmark,
            alpha,
            upper,
            order,
        } => {
            let exact = benchmark.exact_k(*alpha, *upper)?;
            let deriv = EndpointDerivatives::from_fn(*upper, |k, t| benchmark.derivative(k, t));
            for (&h, &n) in spec.h_list.iter().zip(&counts) {
                let grid = UniformGrid::sample(*upper, n, |t| benchmark.value(t)).map_err(sweep_context(h, target))?;
                let value = corrected_trapezoid_k(&grid, *alpha, &deriv, *order).map_err(sweep_context(h, target))?;
                rows.push(row(h, n, (value - exact).abs()));
            }
        }
    }
    fill_orders(&mut rows);

    Ok(ConvergenceReport {
        label: target.label(),
        scheme: target.method(),
        alpha: target.alpha(),
        upper: target.upper(),
        timestamp: timestamp(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        tolerance: None,
        rows,
    })
}

fn row(h: f64, n: usize, max_error: f64) -> ConvergenceRow {
    ConvergenceRow {
        h,
        n,
        max_error,
        order: None,
        expected_error: None,
        expected_order: None,
    }
}

/// One column of a published table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableColumn {
    pub target: SweepTarget,
    pub errors: [f64; 4],
    pub orders: [f64; 4],
    pub tolerance: Tolerance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub id: u8,
    pub h_list: [f64; 4],
    pub columns: Vec<TableColumn>,
}

const H_COARSE: [f64; 4] = [0.025, 0.0125, 0.00625, 0.003125];
const H_FINE: [f64; 4] = [0.003125, 0.0015625, 0.00078125, 0.000390625];

fn scheme_column(
    problem: Result<BenchmarkProblem>,
    scheme: SchemeKind,
    errors: [f64; 4],
    orders: [f64; 4],
    tolerance: Tolerance,
) -> Result<TableColumn> {
    Ok(TableColumn {
        target: SweepTarget::Scheme {
            problem: problem?,
            scheme,
        },
        errors,
        orders,
        tolerance,
    })
}

fn nominal_band(value: f64, half_width: f64) -> Tolerance {
    Tolerance {
        reference: OrderReference::Fixed { value },
        half_width,
        error_factor: 3.0,
    }
}

/// Problem, scheme, α, step sizes and published values of table `id` (1..=10).
pub fn table_spec(id: u8) -> Result<TableSpec> {
    use SchemeKind::*;
    let power = |p, a| make_power_problem(p, a);
    let eq1 = |a| make_power_problem(4.0, a);
    let printed = Tolerance {
        reference: OrderReference::Printed,
        half_width: 0.05,
        error_factor: 3.0,
    };

    let (h_list, columns) = match id {
        1 => {
            let kernel = |benchmark, alpha, upper, errors, orders| TableColumn {
                target: SweepTarget::Kernel {
                    benchmark,
                    alpha,
                    upper,
                    order: TrapezoidOrder::Fourth,
                },
                errors,
                orders,
                tolerance: Tolerance {
                    reference: OrderReference::Fixed { value: 4.0 },
                    half_width: 0.15,
                    error_factor: 3.0,
                },
            };
            (
                H_COARSE,
                vec![
                    kernel(
                        KernelBenchmark::Exp,
                        0.5,
                        2.0,
                        [1.06e-9, 6.48e-11, 3.98e-12, 2.34e-13],
                        [4.04725, 4.03414, 4.02694, 4.08360],
                    ),
                    kernel(
                        KernelBenchmark::LogShift,
                        0.25,
                        1.0,
                        [2.77e-9, 1.73e-10, 1.08e-11, 6.78e-13],
                        [3.99877, 3.99963, 3.99977, 3.99562],
                    ),
                ],
            )
        }
        2 => (
            H_FINE,
            vec![
                scheme_column(
                    power(1.05, 0.25),
                    SA,
                    [0.1344240, 0.0915092, 0.0915092, 0.0758594],
                    [0.2863, 0.2799, 0.2748, 0.2706],
                    printed,
                )?,
                scheme_column(
                    power(1.05, 0.5),
                    SA,
                    [0.0264388, 0.0185593, 0.0130559, 0.0091983],
                    [0.5148, 0.5105, 0.5074, 0.5053],
                    printed,
                )?,
                scheme_column(
                    power(1.05, 0.75),
                    SA,
                    [0.00525169, 0.00311695, 0.00185130, 0.00110006],
                    [0.7544, 0.7526, 0.7516, 0.7510],
                    printed,
                )?,
            ],
        ),
        3 => (
            H_FINE,
            vec![
                scheme_column(
                    power(1.05, 1.25),
                    SA,
                    [0.00018059, 0.00007588, 0.00003189, 0.00001341],
                    [1.2517, 1.2509, 1.2505, 1.2503],
                    nominal_band(1.25, 0.05),
                )?,
                scheme_column(
                    power(1.05, 1.5),
                    SA,
                    [3.093e-5, 1.089e-5, 3.8e-6, 1.4e-6],
                    [1.5082, 1.5056, 1.5039, 1.5027],
                    nominal_band(1.50, 0.05),
                )?,
                scheme_column(
                    power(1.05, 1.75),
                    SA,
                    [5.3e-6, 1.5e-6, 4.5e-7, 1.3e-7],
                    [1.7781, 1.7733, 1.7692, 1.7658],
                    nominal_band(1.77, 0.05),
                )?,
            ],
        ),
        4 => (
            H_FINE,
            vec![
                scheme_column(
                    eq1(0.25),
                    SA1,
                    [0.00015093, 0.00006348, 0.00002670, 0.00001123],
                    [1.2490, 1.2490, 1.2500, 1.2500],
                    nominal_band(1.25, 0.05),
                )?,
                scheme_column(
                    make_exp_problem(1, 0.5),
                    SA1,
                    [2.066e-5, 7.3e-6, 2.6e-6, 9.1e-7],
                    [1.5, 1.5, 1.5, 1.5],
                    nominal_band(1.5, 0.05),
                )?,
                scheme_column(
                    make_ml_problem(2, 0.75),
                    SA1,
                    [4.8e-7, 1.4e-7, 4.2e-8, 1.3e-8],
                    [1.75, 1.75, 1.75, 1.75],
                    nominal_band(1.75, 0.05),
                )?,
            ],
        ),
        5 => (
            H_FINE,
            vec![
                scheme_column(
                    eq1(1.25),
                    SA1,
                    [4.2e-7, 8.9e-8, 1.9e-8, 3.9e-9],
                    [2.2510, 2.2500, 2.2500, 2.2500],
                    nominal_band(2.25, 0.05),
                )?,
                scheme_column(
                    make_exp_problem(1, 1.5),
                    SA1,
                    [2.1e-8, 3.8e-9, 6.7e-10, 1.2e-10],
                    [2.5010, 2.5000, 2.5000, 2.5000],
                    nominal_band(2.5, 0.05),
                )?,
                scheme_column(
                    make_ml_problem(2, 1.75),
                    SA1,
                    [3.8e-10, 5.7e-11, 8.4e-12, 1.3e-12],
                    [2.7580, 2.7540, 2.7520, 2.7510],
                    nominal_band(2.75, 0.05),
                )?,
            ],
        ),
        6 => (
            H_COARSE,
            vec![
                scheme_column(
                    eq1(0.3),
                    SA2,
                    [5.799e-5, 1.189e-5, 2.4e-6, 4.9e-7],
                    [2.2727, 2.2864, 2.2932, 2.2966],
                    nominal_band(2.3, 0.05),
                )?,
                scheme_column(
                    make_exp_problem(2, 0.5),
                    SA2,
                    [5.1e-6, 9.0e-7, 1.6e-7, 2.8e-8],
                    [2.4796, 2.4898, 2.4949, 2.4975],
                    nominal_band(2.5, 0.05),
                )?,
                scheme_column(
                    make_ml_problem(2, 0.7),
                    SA2,
                    [3.8e-7, 5.8e-8, 8.8e-9, 1.4e-9],
                    [2.7141, 2.7160, 2.7095, 2.7055],
                    nominal_band(2.7, 0.05),
                )?,
            ],
        ),
        7 => (
            H_COARSE,
            vec![
                scheme_column(
                    eq1(1.3),
                    SA2,
                    [1.4e-6, 1.4e-7, 1.4e-8, 1.4e-9],
                    [3.2791, 3.2896, 3.2948, 3.2974],
                    nominal_band(3.3, 0.05),
                )?,
                scheme_column(
                    make_exp_problem(2, 1.5),
                    SA2,
                    [6.4e-8, 5.7e-9, 5.0e-10, 4.4e-11],
                    [3.4899, 3.4957, 3.4984, 3.4995],
                    nominal_band(3.5, 0.05),
                )?,
                scheme_column(
                    make_ml_problem(2, 1.7),
                    SA2,
                    [1.6e-8, 1.2e-9, 9.5e-11, 7.3e-12],
                    [3.6762, 3.6881, 3.6941, 3.6970],
                    nominal_band(3.7, 0.05),
                )?,
            ],
        ),
        8 => (
            H_COARSE,
            vec![
                scheme_column(
                    eq1(0.35),
                    SA3,
                    [1.5e-6, 1.5e-7, 1.4e-8, 1.4e-9],
                    [3.3224, 3.3369, 3.3437, 3.3469],
                    nominal_band(3.35, 0.10),
                )?,
                scheme_column(
                    make_exp_problem(3, 0.5),
                    SA3,
                    [7.5e-8, 6.8e-9, 6.0e-10, 5.3e-11],
                    [3.4558, 3.4784, 3.4894, 3.4947],
                    nominal_band(3.5, 0.10),
                )?,
                scheme_column(
                    make_ml_problem(4, 0.65),
                    SA3,
                    [6.8e-9, 4.7e-10, 3.2e-11, 2.1e-12],
                    [3.8511, 3.8689, 3.8802, 3.8875],
                    nominal_band(3.65, 0.10),
                )?,
            ],
        ),
        9 => (
            H_COARSE,
            vec![
                scheme_column(
                    eq1(1.35),
                    SA3,
                    [2.5e-8, 1.3e-9, 6.9e-11, 3.5e-12],
                    [4.1054, 4.2189, 4.2743, 4.3047],
                    nominal_band(4.35, 0.10),
                )?,
                scheme_column(
                    make_exp_problem(3, 1.5),
                    SA3,
                    [8.2e-10, 4.1e-11, 1.9e-12, 8.9e-14],
                    [4.2036, 4.3337, 4.3980, 4.4325],
                    nominal_band(4.5, 0.10),
                )?,
                scheme_column(
                    make_ml_problem(4, 1.65),
                    SA3,
                    [1.3e-11, 5.3e-13, 2.2e-14, 8.8e-16],
                    [4.5161, 4.5832, 4.6179, 4.6233],
                    nominal_band(4.65, 0.10),
                )?,
            ],
        ),
        10 => (
            H_COARSE,
            vec![
                scheme_column(
                    eq1(0.4),
                    SA4,
                    [1.7e-9, 8.1e-11, 3.9e-12, 1.9e-13],
                    [4.3144, 4.3618, 4.3819, 4.3873],
                    nominal_band(4.4, 0.15),
                )?,
                scheme_column(
                    make_exp_problem(4, 0.5),
                    SA4,
                    [1.3e-9, 5.8e-11, 2.6e-12, 1.2e-13],
                    [4.4072, 4.4596, 4.4813, 4.4895],
                    nominal_band(4.5, 0.15),
                )?,
                scheme_column(
                    make_ml_problem(9, 0.6),
                    SA4,
                    [1.9e-11, 7.8e-13, 3.3e-14, 1.4e-15],
                    [4.5234, 4.5641, 4.5884, 4.5413],
                    nominal_band(4.6, 0.15),
                )?,
            ],
        ),
        _ => return Err(Error::InvalidSweep(format!("no table {id}; tables are 1..=10"))),
    };
    Ok(TableSpec { id, h_list, columns })
}

/// Run every column of table `id` next to its published values.
///
/// Each sweep starts one halving coarser than the published list so that the
/// first published row also has an order; that lead-in row is then dropped.
pub fn reproduce_table(id: u8) -> Result<Vec<ConvergenceReport>> {
    let spec = table_spec(id)?;
    let mut h_list = vec![2.0 * spec.h_list[0]];
    h_list.extend_from_slice(&spec.h_list);
    spec.columns
        .iter()
        .map(|col| {
            let mut report = run_sweep(&SweepSpec::new(col.target, h_list.clone()))?.drop_leading(1);
            for (r, row) in report.rows.iter_mut().enumerate() {
                row.expected_error = Some(col.errors[r]);
                row.expected_order = Some(col.orders[r]);
            }
            report.tolerance = Some(col.tolerance);
            Ok(report)
        })
        .collect()
}

fn sci(v: f64) -> String {
    format!("{v:.9e}")
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

const CSV_HEADER: [&str; 5] = ["h", "max_error", "order", "expected_error", "expected_order"];

fn csv_error(e: impl fmt::Display) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn row_fields(row: &ConvergenceRow) -> [String; 5] {
    [
        sci(row.h),
        sci(row.max_error),
        opt_sci(row.order),
        opt_sci(row.expected_error),
        opt_sci(row.expected_order),
    ]
}

/// `h,max_error,order,expected_error,expected_order`; blank cells for missing values.
pub fn report_to_csv(report: &ConvergenceReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in &report.rows {
        w.write_record(row_fields(row)).map_err(csv_error)?;
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

/// Several reports in one file, each row prefixed by `problem,scheme,alpha`.
pub fn reports_to_csv(reports: &[ConvergenceReport]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["problem", "scheme", "alpha"];
    header.extend(CSV_HEADER);
    w.write_record(&header).map_err(csv_error)?;
    for report in reports {
        for row in &report.rows {
            let mut record = vec![report.label.clone(), report.scheme.clone(), report.alpha.to_string()];
            record.extend(row_fields(row));
            w.write_record(&record).map_err(csv_error)?;
        }
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

pub fn reports_to_json(reports: &[ConvergenceReport]) -> Result<String> {
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(reports)
    };
    text.map_err(|e| Error::Parse(format!("json: {e}")))
}

/// Side-by-side layout: one `error | order` pair per report, plus the
/// published pair when present.
pub fn reports_to_markdown(reports: &[ConvergenceReport]) -> String {
    let mut out = String::new();
    if reports.is_empty() {
        return out;
    }
    let with_expected = reports.iter().any(|r| r.rows.iter().any(|row| row.expected_error.is_some()));
    let mut header = String::from("| h |");
    let mut rule = String::from("|---|");
    for r in reports {
        let _ = write!(header, " {} {} a={} error | order |", r.label, r.scheme, r.alpha);
        rule.push_str("---|---|");
        if with_expected {
            header.push_str(" published error | published order |");
            rule.push_str("---|---|");
        }
    }
    let _ = writeln!(out, "{header}\n{rule}");
    let n_rows = reports.iter().map(|r| r.rows.len()).max().unwrap_or(0);
    for i in 0..n_rows {
        let h = reports.iter().find_map(|r| r.rows.get(i)).map(|row| row.h).unwrap_or(f64::NAN);
        let _ = write!(out, "| {h} |");
        for r in reports {
            match r.rows.get(i) {
                Some(row) => {
                    let order = row.order.map(|o| format!("{o:.4}")).unwrap_or_default();
                    let _ = write!(out, " {:.3e} | {order} |", row.max_error);
                    if with_expected {
                        let e = row.expected_error.map(|e| format!("{e:.3e}")).unwrap_or_default();
                        let o = row.expected_order.map(|o| format!("{o:.4}")).unwrap_or_default();
                        let _ = write!(out, " {e} | {o} |");
                    }
                }
                None => out.push_str(if with_expected { " | | | |" } else { " | |" }),
            }
        }
        out.push('\n');
    }
    out
}

pub fn render_reports(reports: &[ConvergenceReport], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv if reports.len() == 1 => report_to_csv(&reports[0]),
        OutputFormat::Csv => reports_to_csv(reports),
        OutputFormat::Json => reports_to_json(reports),
        OutputFormat::Markdown => Ok(reports_to_markdown(reports)),
    }
}

/// Exact solution and several numerical solutions on one grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionCurve {
    pub x: Vec<f64>,
    pub exact: Vec<f64>,
    pub columns: Vec<(String, Vec<f64>)>,
}

impl SolutionCurve {
    /// Columns `x,exact,u_<scheme>…`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["x".to_string(), "exact".to_string()];
        header.extend(self.columns.iter().map(|(name, _)| format!("u_{name}")));
        w.write_record(&header).map_err(csv_error)?;
        for i in 0..self.x.len() {
            let mut record = vec![sci(self.x[i]), sci(self.exact[i])];
            record.extend(self.columns.iter().map(|(_, u)| sci(u[i])));
            w.write_record(&record).map_err(csv_error)?;
        }
        String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
    }
}

/// Solve with each scheme at step `h` and tabulate against the exact solution.
pub fn emit_solution_curve(problem: &BenchmarkProblem, schemes: &[SchemeKind], h: f64) -> Result<SolutionCurve> {
    let target = SweepTarget::Scheme {
        problem: *problem,
        scheme: schemes.first().copied().unwrap_or(SchemeKind::SA),
    };
    let n = SweepSpec::new(target, vec![h]).step_counts()?[0];
    let x: Vec<f64> = UniformGrid::sample(problem.interval_end, n, |_| 0.0)?.nodes().collect();
    let mut columns = Vec::with_capacity(schemes.len());
    for &scheme in schemes {
        let u = Stepper::new(problem.alpha, scheme, n)?.solve(problem, n)?;
        columns.push((scheme.name().to_string(), u.values().to_vec()));
    }
    let exact = x.iter().map(|&t| problem.exact(t)).collect();
    Ok(SolutionCurve { x, exact, columns })
}

/// Which benchmark a sweep runs, as named on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Power,
    Exp,
    Ml,
    Zero,
    KernelExp,
    KernelLog,
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "power" | "eq1" => Ok(ProblemKind::Power),
            "exp" | "eq2" => Ok(ProblemKind::Exp),
            "ml" | "mittag-leffler" | "eq3" => Ok(ProblemKind::Ml),
            "zero" => Ok(ProblemKind::Zero),
            "kernel-exp" => Ok(ProblemKind::KernelExp),
            "kernel-log" => Ok(ProblemKind::KernelLog),
            other => Err(Error::Parse(format!(
                "unknown problem '{other}' (power, exp, ml, zero, kernel-exp, kernel-log)"
            ))),
        }
    }
}

/// Loose sweep settings from a preset file or the command line; later
/// sources override earlier ones field by field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepSettings {
    pub problem: Option<ProblemKind>,
    pub p: Option<f64>,
    pub m: Option<u32>,
    pub alpha: Option<f64>,
    pub scheme: Option<SchemeKind>,
    pub upper: Option<f64>,
    pub h_list: Option<Vec<f64>>,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad value for {key}: '{value}'")))
}

pub fn parse_h_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_value::<f64>("h_list", s))
        .collect()
}

impl SweepSettings {
    /// Parse `key = value` lines; `#` starts a comment.
    pub fn from_config(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", lineno + 1)))?;
            map.insert(key.trim().replace('-', "_"), value.trim().to_string());
        }
        let mut s = SweepSettings::default();
        for (key, value) in &map {
            match key.as_str() {
                "problem" => s.problem = Some(value.parse()?),
                "p" => s.p = Some(parse_value(key, value)?),
                "m" => s.m = Some(parse_value(key, value)?),
                "alpha" => s.alpha = Some(parse_value(key, value)?),
                "scheme" => s.scheme = Some(value.parse()?),
                "x" | "upper" => s.upper = Some(parse_value(key, value)?),
                "h_list" => s.h_list = Some(parse_h_list(value)?),
                "format" => s.format = Some(value.parse()?),
                "out" => s.out = Some(PathBuf::from(value)),
                other => return Err(Error::Parse(format!("unknown config key '{other}'"))),
            }
        }
        Ok(s)
    }

    pub fn overridden_by(self, other: SweepSettings) -> SweepSettings {
        SweepSettings {
            problem: other.problem.or(self.problem),
            p: other.p.or(self.p),
            m: other.m.or(self.m),
            alpha: other.alpha.or(self.alpha),
            scheme: other.scheme.or(self.scheme),
            upper: other.upper.or(self.upper),
            h_list: other.h_list.or(self.h_list),
            format: other.format.or(self.format),
            out: other.out.or(self.out),
        }
    }

    fn require_alpha(&self) -> Result<f64> {
        self.alpha.ok_or_else(|| Error::InvalidSweep("alpha is required".into()))
    }

    /// The benchmark problem named by these settings (not the kernel ones).
    pub fn problem(&self) -> Result<BenchmarkProblem> {
        let alpha = self.require_alpha()?;
        let problem = match self.problem.unwrap_or(ProblemKind::Power) {
            ProblemKind::Power => make_power_problem(self.p.unwrap_or(4.0), alpha)?,
            ProblemKind::Exp => make_exp_problem(self.m.ok_or_else(|| Error::InvalidSweep("exp needs m".into()))?, alpha)?,
            ProblemKind::Ml => make_ml_problem(self.m.ok_or_else(|| Error::InvalidSweep("ml needs m".into()))?, alpha)?,
            ProblemKind::Zero => make_zero_problem(alpha)?,
            kind @ (ProblemKind::KernelExp | ProblemKind::KernelLog) => {
                return Err(Error::InvalidSweep(format!("{kind:?} is a quadrature benchmark, not an equation")))
            }
        };
        Ok(match self.upper {
            Some(x) => problem.with_interval_end(x),
            None => problem,
        })
    }

    pub fn into_spec(self) -> Result<SweepSpec> {
        let target = match self.problem.unwrap_or(ProblemKind::Power) {
            kind @ (ProblemKind::KernelExp | ProblemKind::KernelLog) => SweepTarget::Kernel {
                benchmark: if kind == ProblemKind::KernelExp {
                    KernelBenchmark::Exp
                } else {
                    KernelBenchmark::LogShift
                },
                alpha: self.require_alpha()?,
                upper: self.upper.unwrap_or(1.0),
                order: TrapezoidOrder::Fourth,
            },
            _ => SweepTarget::Scheme {
                problem: self.problem()?,
                scheme: self.scheme.unwrap_or(SchemeKind::SA),
            },
        };
        let h_list = self.h_list.unwrap_or_else(|| default_h_list(target.upper()));
        Ok(SweepSpec {
            target,
            h_list,
            format: self.format.unwrap_or_default(),
            out: self.out,
        })
    }
}

/// Resolve a relative output path against `$FRACRELAX_OUT_DIR` when set.
pub fn resolve_output_path(out: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if out.is_relative() && !dir.is_empty() => PathBuf::from(dir).join(out),
        _ => out.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eq1_spec(h_list: Vec<f64>) -> SweepSpec {
        SweepSpec::new(
            SweepTarget::Scheme {
                problem: make_power_problem(4.0, 0.5).unwrap(),
                scheme: SchemeKind::SA2,
            },
            h_list,
        )
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(run_sweep(&eq1_spec(vec![])), Err(Error::InvalidSweep(_))));
        assert!(eq1_spec(vec![0.1, 0.1]).step_counts().is_err());
        assert!(eq1_spec(vec![0.05, 0.1]).step_counts().is_err());
        assert!(eq1_spec(vec![0.3]).step_counts().is_err());
        assert_eq!(eq1_spec(halving(0.05, 3)).step_counts().unwrap(), vec![20, 40, 80]);
    }

    #[test]
    fn orders_and_blank_first_row() {
        let report = run_sweep(&eq1_spec(halving(0.05, 4))).unwrap();
        assert_eq!(report.rows.len(), 4);
        assert!(report.rows[0].order.is_none());
        for w in report.rows.windows(2) {
            let expect = (w[0].max_error / w[1].max_error).log2();
            assert!((w[1].order.unwrap() - expect).abs() < 1e-12);
            assert!(w[1].max_error < w[0].max_error);
        }
        let csv = report_to_csv(&report).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("h,max_error,order,expected_error,expected_order"));
        assert!(lines.next().unwrap().starts_with("5.000000000e-2,"));
    }

    #[test]
    fn solver_errors_carry_context() {
        let spec = SweepSpec::new(
            SweepTarget::Scheme {
                problem: make_power_problem(4.0, 0.5).unwrap(),
                scheme: SchemeKind::SA4,
            },
            vec![0.5, 0.25],
        );
        match run_sweep(&spec) {
            Err(Error::Sweep { h, scheme, .. }) => {
                assert_eq!(h, 0.5);
                assert_eq!(scheme, "S_A4");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn table_specs_exist() {
        for id in 1..=10 {
            let spec = table_spec(id).unwrap();
            assert_eq!(spec.columns.len(), if id == 1 { 2 } else { 3 });
        }
        assert!(table_spec(0).is_err());
        assert!(table_spec(11).is_err());
    }

    #[test]
    fn tolerance_detects_violations() {
        let mut report = run_sweep(&eq1_spec(halving(0.05, 2))).unwrap();
        report.tolerance = Some(nominal_band(2.5, 0.15));
        report.rows[1].expected_error = Some(report.rows[1].max_error * 2.0);
        assert!(report.passes(), "{:?}", report.violations());
        report.rows[1].expected_error = Some(report.rows[1].max_error * 4.0);
        assert_eq!(report.violations().len(), 1);
        report.tolerance = Some(nominal_band(1.0, 0.1));
        assert_eq!(report.violations().len(), 2);
    }

    #[test]
    fn config_parsing_and_override() {
        let text = "# preset\nproblem = exp\nm = 2\nalpha = 0.5\nscheme = S_A2\nh-list = 0.05, 0.025\nformat = json\n";
        let base = SweepSettings::from_config(text).unwrap();
        assert_eq!(base.problem, Some(ProblemKind::Exp));
        assert_eq!(base.h_list, Some(vec![0.05, 0.025]));
        let merged = base.overridden_by(SweepSettings {
            alpha: Some(1.5),
            ..Default::default()
        });
        let spec = merged.into_spec().unwrap();
        assert_eq!(spec.format, OutputFormat::Json);
        assert_eq!(spec.target.alpha(), 1.5);
        assert!(SweepSettings::from_config("alpha 0.5").is_err());
        assert!(SweepSettings::from_config("colour = red").is_err());
        assert!(SweepSettings::from_config("alpha = x").is_err());
    }

    #[test]
    fn curve_columns() {
        let p = make_power_problem(4.0, 0.5).unwrap();
        let curve = emit_solution_curve(&p, &[SchemeKind::SA, SchemeKind::SA1], 0.05).unwrap();
        assert_eq!(curve.x.len(), 21);
        assert_eq!(*curve.exact.last().unwrap(), 1.0);
        let csv = curve.to_csv().unwrap();
        assert!(csv.starts_with("x,exact,u_S_A,u_S_A1\n"));
        assert_eq!(csv.lines().count(), 22);
    }

    #[test]
    fn markdown_layout() {
        let report = run_sweep(&eq1_spec(halving(0.05, 2))).unwrap();
        let md = reports_to_markdown(&[report.clone(), report]);
        let lines: Vec<_> = md.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0].matches("| order |").count(), 2);
    }
}
