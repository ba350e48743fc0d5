use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use fracrelax::bench::{
    emit_solution_curve, parse_h_list, render_reports, reproduce_table, resolve_output_path, run_sweep,
    OutputFormat, ProblemKind, SweepSettings,
};
use fracrelax::solver::SchemeKind;

#[derive(Parser)]
#[command(name = "fracrelax", version, about = "Convergence sweeps for end-corrected fractional integral schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error and empirical order over a list of step sizes
    Sweep(SweepArgs),
    /// Reproduce one of the published tables (1..=10) and compare
    Table {
        id: u8,
        #[arg(long, default_value = "markdown")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact and numerical solutions on one grid, as CSV
    Curve(CurveArgs),
}

#[derive(Args)]
struct ProblemArgs {
    /// power | exp | ml | zero | kernel-exp | kernel-log
    #[arg(long)]
    problem: Option<ProblemKind>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Interval end X
    #[arg(long)]
    x: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// Comma-separated, strictly decreasing
    #[arg(long)]
    h_list: Option<String>,
    #[arg(long)]
    format: Option<OutputFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value preset; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    /// Comma-separated scheme list
    #[arg(long, value_delimiter = ',', default_value = "S_A,S_A1")]
    scheme: Vec<SchemeKind>,
    #[arg(long, default_value_t = 0.05)]
    h: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl ProblemArgs {
    fn settings(&self) -> SweepSettings {
        SweepSettings {
            problem: self.problem,
            p: self.p,
            m: self.m,
            alpha: self.alpha,
            upper: self.x,
            ..Default::default()
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => {
            let path = resolve_output_path(path);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            }
            fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::Sweep(args) => {
            let base = match &args.config {
                Some(path) => {
                    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                    SweepSettings::from_config(&text).map_err(|e| e.to_string())?
                }
                None => SweepSettings::default(),
            };
            let flags = SweepSettings {
                scheme: args.scheme,
                h_list: args.h_list.as_deref().map(parse_h_list).transpose().map_err(|e| e.to_string())?,
                format: args.format,
                out: args.out,
                ..args.problem.settings()
            };
            let spec = base.overridden_by(flags).into_spec().map_err(|e| e.to_string())?;
            let report = run_sweep(&spec).map_err(|e| e.to_string())?;
            let text = render_reports(&[report], spec.format).map_err(|e| e.to_string())?;
            emit(&text, spec.out.as_ref())?;
            Ok(true)
        }
        Command::Table { id, format, out } => {
            let reports = reproduce_table(id).map_err(|e| e.to_string())?;
            let text = render_reports(&reports, format).map_err(|e| e.to_string())?;
            emit(&text, out.as_ref())?;
            let violations: Vec<String> = reports.iter().flat_map(|r| r.violations()).collect();
            for v in &violations {
                eprintln!("tolerance: {v}");
            }
            Ok(violations.is_empty())
        }
        Command::Curve(args) => {
            let problem = args.problem.settings().problem().map_err(|e| e.to_string())?;
            let curve = emit_solution_curve(&problem, &args.scheme, args.h).map_err(|e| e.to_string())?;
            emit(&curve.to_csv().map_err(|e| e.to_string())?, args.out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
