use fracrelax::bench::{halving, reproduce_table, run_sweep, SweepSpec, SweepTarget};
use fracrelax::fracint::{
    corrected_sum_i, frac_integral_exact_power, sum_of_powers, OrderTag, SchemeCoefficients, UniformGrid,
};
use fracrelax::problems::{
    make_exp_problem, make_ml_problem, make_power_problem, residual_check, BenchmarkProblem, ProblemFamily,
};
use fracrelax::solver::{
    max_error_from, theorem11_constants, theorem6_bound, truncation_errors, SchemeKind, Stepper,
};
use fracrelax::specfun::{gamma, zeta};
use proptest::prelude::*;

const ALPHAS: [f64; 6] = [0.25, 0.5, 0.75, 1.25, 1.5, 1.75];

fn orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn power_quadrature_error(p: i32, alpha: f64, tag: OrderTag, n: usize) -> f64 {
    let coeffs = SchemeCoefficients::new(alpha, tag).unwrap();
    let grid = UniformGrid::sample(1.0, n, |t| t.powi(p)).unwrap();
    let exact = frac_integral_exact_power(p as f64, alpha, 1.0).unwrap();
    (corrected_sum_i(&grid, &coeffs).unwrap() - exact).abs()
}

/// Below this the halving ratio measures rounding, not truncation.
const ROUNDOFF_FLOOR: f64 = 1e-13;

#[test]
fn power_rule_oracle_for_corrected_sums() {
    let ns = [64, 128, 256, 512, 1024];
    for p in 2..=5 {
        // left end of the sum: the first nonzero Bernoulli term is h^{p+1} for odd p, h^{p+2} for even p
        let left_order = if p % 2 == 1 { p + 1 } else { p + 2 } as f64;
        for alpha in [0.25, 0.5, 0.75, 1.25, 1.75] {
            for tag in OrderTag::ALL {
                if tag.required_vanishing() > p as usize - 1 {
                    continue;
                }
                let nominal = tag.nominal_order(alpha);
                let lo = nominal.min(left_order) - 0.15;
                let hi = nominal + 0.15;
                let errors: Vec<f64> = ns.iter().map(|&n| power_quadrature_error(p, alpha, tag, n)).collect();
                for (i, order) in orders(&errors).into_iter().enumerate() {
                    if errors[i + 1] < ROUNDOFF_FLOOR {
                        continue;
                    }
                    assert!(
                        order >= lo && order <= hi,
                        "p={p} alpha={alpha} {tag}: order {order:.3} at n={} not in [{lo:.2}, {hi:.2}]",
                        ns[i + 1]
                    );
                }
            }
        }
    }
}

#[test]
fn schemes_reach_nominal_order_with_exact_startup() {
    for alpha in ALPHAS {
        let problem = make_power_problem(4.0, alpha).unwrap();
        for scheme in SchemeKind::ALL {
            let mut stepper = Stepper::new(alpha, scheme, 320).unwrap();
            let errors: Vec<f64> = [40, 80, 160, 320]
                .iter()
                .map(|&n| {
                    let u = stepper.solve_exact_startup(&problem, n).unwrap();
                    max_error_from(&u, |x| problem.exact(x), 1)
                })
                .collect();
            let nominal = scheme.nominal_order(alpha);
            for order in orders(&errors) {
                assert!((order - nominal).abs() <= 0.15, "alpha={alpha} {scheme}: {order:.3} vs {nominal}");
            }
        }
    }
}

#[test]
fn zero_startup_limits_fourth_scheme_to_order_five_above_alpha_one() {
    // startup errors O(h⁴) reach x through h^α Σ k^{α−1} ~ h·x^{α−1}
    for alpha in [1.25, 1.5, 1.75] {
        let problem = make_power_problem(4.0, alpha).unwrap();
        let spec = SweepSpec::new(
            SweepTarget::Scheme {
                problem,
                scheme: SchemeKind::SA4,
            },
            halving(0.025, 4),
        );
        let report = run_sweep(&spec).unwrap();
        for row in &report.rows[1..] {
            assert!((row.order.unwrap() - 5.0).abs() < 0.05, "alpha={alpha}: {:?}", row.order);
        }
    }
}

/// `I^β` of the grid values at every node, A4-corrected where the grid is long enough.
fn integrate_all_nodes(values: &[f64], upper: f64, beta: f64) -> Vec<f64> {
    let n = values.len() - 1;
    let h = upper / n as f64;
    let mut out = vec![0.0; n + 1];
    for (m, slot) in out.iter_mut().enumerate().skip(1) {
        let tag = OrderTag::ALL[(m - 1).min(4)];
        let coeffs = SchemeCoefficients::new(beta, tag).unwrap();
        let grid = UniformGrid::from_values(m as f64 * h, values[..=m].to_vec()).unwrap();
        *slot = corrected_sum_i(&grid, &coeffs).unwrap();
    }
    out
}

#[test]
fn semigroup_property() {
    let n = 512;
    for (alpha, beta) in [(0.3, 0.5), (0.6, 0.7), (0.5, 1.25)] {
        let y = UniformGrid::sample(1.0, n, |t| t.powi(4)).unwrap();
        let inner = integrate_all_nodes(y.values(), 1.0, beta);
        let outer = integrate_all_nodes(&inner, 1.0, alpha);
        let exact = frac_integral_exact_power(4.0, alpha + beta, 1.0).unwrap();
        let err = (outer[n] - exact).abs();
        assert!(err <= 1e-4, "alpha={alpha} beta={beta}: {err:e}");
    }
}

fn all_problems() -> Vec<BenchmarkProblem> {
    let mut out = Vec::new();
    for alpha in ALPHAS.iter().copied().chain([0.3, 0.35, 0.4, 0.6, 0.65, 0.7, 1.3, 1.35, 1.65, 1.7]) {
        for p in [1.05, 2.0, 3.5, 4.0] {
            out.push(make_power_problem(p, alpha).unwrap());
        }
        for m in [0, 1, 2, 3, 4, 6] {
            out.push(make_exp_problem(m, alpha).unwrap());
        }
        for m in [2, 3, 4, 9] {
            out.push(make_ml_problem(m, alpha).unwrap());
        }
    }
    out
}

#[test]
fn every_problem_passes_residual_check() {
    for problem in all_problems() {
        let r = residual_check(&problem, 20).unwrap();
        assert!(r <= 1e-6, "{problem}: residual {r:e}");
    }
}

#[test]
fn vanishing_order_matches_small_argument_slope() {
    for problem in all_problems() {
        let v = problem.vanishing_order() as f64;
        let y = |d: f64| problem.exact(d).abs();
        let slope = (y(1e-2).ln() - y(1e-4).ln()) / (1e-2f64.ln() - 1e-4f64.ln());
        assert!(slope > v, "{problem}: slope {slope} vs vanishing order {v}");
        let integer_exponent = match problem.family {
            ProblemFamily::Power { p } => p.fract() == 0.0,
            ProblemFamily::Exp { .. } => true,
            _ => false,
        };
        if integer_exponent {
            assert!((slope - (v + 1.0)).abs() < 0.05, "{problem}: slope {slope}");
        }
    }
}

#[test]
fn stability_bounds_hold_on_uncorrected_sweeps() {
    let ns = [320, 640, 1280, 2560];
    for alpha in ALPHAS {
        let problem = make_power_problem(1.05, alpha).unwrap();
        let a = 2.0
            * truncation_errors(&problem, ns[0])
                .unwrap()
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
        let bound = if alpha > 1.0 {
            theorem6_bound(alpha, a).unwrap()
        } else {
            let c = theorem11_constants(alpha, a).unwrap();
            assert!(c.c0 > 0.0 && c.c2 > c.c0 && c.c2 > c.c1);
            c.c2
        };
        let mut stepper = Stepper::new(alpha, SchemeKind::SA, ns[3]).unwrap();
        for n in ns {
            let u = stepper.solve(&problem, n).unwrap();
            let scaled = max_error_from(&u, |x| problem.exact(x), 1) / u.h().powf(alpha);
            assert!(scaled < bound, "alpha={alpha} n={n}: {scaled} vs {bound}");
        }
    }
}

#[test]
fn published_sweeps_refine_monotonically() {
    for id in 1..=10 {
        for report in reproduce_table(id).unwrap() {
            for w in report.rows.windows(2) {
                assert!(
                    w[1].max_error <= w[0].max_error,
                    "table {id} {} alpha={}: {:e} then {:e}",
                    report.label,
                    report.alpha,
                    w[0].max_error,
                    w[1].max_error
                );
            }
        }
    }
}

#[test]
fn sum_of_powers_envelope() {
    for alpha in [0.25, 0.5, 1.5] {
        for n in [50usize, 100, 200] {
            let direct: f64 = (1..n).map(|k| (k as f64).powf(alpha)).sum();
            let err = (sum_of_powers(alpha, n, 4).unwrap() - direct).abs();
            let envelope = (n as f64).powf(alpha - 2.0 * 4.0 + 1.0);
            let rounding = 8.0 * f64::EPSILON * direct;
            assert!(err <= envelope + rounding, "alpha={alpha} n={n}: {err:e} vs {envelope:e}");
        }
    }
}

#[test]
fn sweeps_are_deterministic() {
    let spec = SweepSpec::new(
        SweepTarget::Scheme {
            problem: make_ml_problem(2, 0.7).unwrap(),
            scheme: SchemeKind::SA2,
        },
        halving(0.05, 4),
    );
    let a = fracrelax::bench::report_to_csv(&run_sweep(&spec).unwrap()).unwrap();
    let b = fracrelax::bench::report_to_csv(&run_sweep(&spec).unwrap()).unwrap();
    assert_eq!(a, b);
    let t1 = fracrelax::bench::reports_to_csv(&reproduce_table(7).unwrap()).unwrap();
    let t2 = fracrelax::bench::reports_to_csv(&reproduce_table(7).unwrap()).unwrap();
    assert_eq!(t1, t2);
}

/// `h^α/Γ(α)(Σ_{k=1}^{n−1} u_{n−k} k^{α−1} − ζ(1−α) u_n)`, written out directly.
fn uncorrected_plus_zeta(values: &[f64], h: f64, alpha: f64) -> f64 {
    let n = values.len() - 1;
    let sum: f64 = (1..n).map(|k| values[n - k] * (k as f64).powf(alpha - 1.0)).sum();
    h.powf(alpha) / gamma(alpha).unwrap() * (sum - zeta(1.0 - alpha).unwrap() * values[n])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn first_correction_is_uncorrected_sum_plus_zeta_term(
        alpha in prop_oneof![0.05f64..0.95, 1.05f64..1.95],
        history in prop::collection::vec(-1.0f64..1.0, 3..60),
    ) {
        let n = history.len() - 1;
        let grid = UniformGrid::from_values(1.0, history.clone()).unwrap();
        let direct = uncorrected_plus_zeta(&history, 1.0 / n as f64, alpha);
        let scale = history.iter().fold(1.0f64, |m, v| m.max(v.abs())) * (n as f64).powf(alpha.max(1.0));
        let a1 = SchemeCoefficients::new(alpha, OrderTag::A1).unwrap();
        prop_assert!((corrected_sum_i(&grid, &a1).unwrap() - direct).abs() <= 1e-14 * scale);

        // higher schemes with their extra corrections zeroed take the same path
        for tag in [OrderTag::A2, OrderTag::A3, OrderTag::A4] {
            if n <= tag.index() {
                continue;
            }
            let mut c = SchemeCoefficients::new(alpha, tag).unwrap();
            c.c = vec![-zeta(1.0 - alpha).unwrap(); 1].into_iter().chain(std::iter::repeat(0.0)).take(c.c.len()).collect();
            prop_assert!((corrected_sum_i(&grid, &c).unwrap() - direct).abs() <= 1e-14 * scale);
        }
    }
}
