//! `entrofunc`: checks, reconstructs and fits solutions of entropy-type
//! functional equations and emits JSON reports.
//!
//! Exit codes: 0 pass, 1 violation or failed check, 2 input error.

mod commands;
mod csvio;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use entrofunc::equations::GridSpec;
use entrofunc::exactfield::DEFAULT_TAU;
use entrofunc::families::parse_real;

use commands::{CocycleSource, EquationKind, FitEquation};
use report::RunReport;

/// Environment variable overriding the evaluation point used to order Q(t).
const TAU_ENV: &str = "ENTROFUNC_TAU";

#[derive(Parser)]
#[command(
    name = "entrofunc",
    version,
    about = "Entropy functional equation toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn real_arg(s: &str) -> Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

fn grid_arg(s: &str) -> Result<GridSpec, String> {
    s.parse::<GridSpec>().map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Check an equation on a family literal (e.g. `power-affine:c_star=1,c=-1,q=2`)
    /// or on a CSV sample file.
    Check {
        #[arg(value_enum)]
        equation: EquationKind,
        /// Family literal or path to a CSV file (`x,f`, or `x_exact,f_exact` with --exact).
        target: String,
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        q: Option<f64>,
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        beta: Option<f64>,
        /// Interior grid `NxM` with points k/(N+1) × k/(M+1).
        #[arg(long, value_parser = grid_arg, default_value = "100x100")]
        grid: GridSpec,
        /// Scale-aware tolerance: residuals must not exceed tol·(1 + max|f|).
        #[arg(long, value_parser = real_arg, default_value = "1e-10")]
        tol: f64,
        /// Verify exactly over Q(t) (eq1, q = 1).
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random Q(t) pairs for exact checks of a family literal.
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Which two-variable map to build for cocycle checks.
        #[arg(long, value_enum, default_value = "cf")]
        map: CocycleSource,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover f from one value f(t1) and classify it.
    Reconstruct {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        beta: String,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
        #[arg(long = "f-t1", allow_hyphen_values = true)]
        f_t1: String,
        /// Number of interior points k/(N+1) in the output table.
        #[arg(long, default_value_t = 100)]
        grid: usize,
        /// Also reconstruct exactly (integer exponents, rational anchors).
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the regular solution family to CSV samples.
    Fit {
        #[arg(value_enum)]
        equation: FitEquation,
        file: PathBuf,
        /// Known q; omit to search q in [-8, 8].
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        q: Option<f64>,
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        alpha: Option<f64>,
        #[arg(long, value_parser = real_arg, allow_hyphen_values = true)]
        beta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify f = c*·x + d (d a derivation of Q(t)) exactly at random points.
    DemoPathological {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long = "c-star", default_value = "0", allow_hyphen_values = true)]
        c_star: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        scale: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write CSV samples of a family (float `x,f` or, with --exact, `x_exact,f_exact`).
    Sample {
        family: String,
        /// Number of samples (float: x = i/n; exact: random Q(t) pairs).
        #[arg(long, default_value_t = 64)]
        n: usize,
        /// Standard deviation of additive gaussian noise.
        #[arg(long, value_parser = real_arg, default_value = "0")]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        exact: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn tau() -> Result<f64, String> {
    match std::env::var(TAU_ENV) {
        Err(_) => Ok(DEFAULT_TAU),
        Ok(s) => {
            let t = parse_real(&s).map_err(|e| format!("{TAU_ENV}: {e}"))?;
            if t > 0.0 && t < 1.0 {
                Ok(t)
            } else {
                Err(format!("{TAU_ENV} must lie in ]0,1[, got {t}"))
            }
        }
    }
}

fn emit(report: &RunReport, out: Option<&PathBuf>) -> ExitCode {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    // a closed pipe on stdout is not an error of the run
    let _ = writeln!(std::io::stdout(), "{text}");
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, format!("{text}\n")) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code)
}

fn finish(
    command: &str,
    inputs: Value,
    result: commands::CmdResult,
    out: Option<&PathBuf>,
) -> ExitCode {
    let report = match result {
        Ok(r) => r,
        Err(message) => {
            eprintln!("error: {message}");
            RunReport::error(command, inputs, message)
        }
    };
    emit(&report, out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tau = match tau() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match cli.command {
        Command::Check {
            equation,
            target,
            q,
            alpha,
            beta,
            grid,
            tol,
            exact,
            seed,
            trials,
            map,
            out,
        } => {
            let args = commands::CheckArgs {
                equation,
                target,
                q,
                alpha,
                beta,
                grid,
                tol,
                exact,
                seed,
                trials,
                map,
                tau,
            };
            finish(
                "check",
                commands::check_inputs(&args),
                commands::check(&args),
                out.as_ref(),
            )
        }
        Command::Reconstruct {
            alpha,
            beta,
            t1,
            t2,
            f_t1,
            grid,
            exact,
            out,
        } => {
            let args = commands::ReconstructArgs {
                alpha,
                beta,
                t1,
                t2,
                f_t1,
                points: grid,
                exact,
            };
            finish(
                "reconstruct",
                commands::reconstruct_inputs(&args),
                commands::reconstruct(&args),
                out.as_ref(),
            )
        }
        Command::Fit {
            equation,
            file,
            q,
            alpha,
            beta,
            out,
        } => {
            let args = commands::FitArgs {
                equation,
                file,
                q,
                alpha,
                beta,
            };
            finish(
                "fit",
                commands::fit_inputs(&args),
                commands::fit(&args),
                out.as_ref(),
            )
        }
        Command::DemoPathological {
            seed,
            trials,
            c_star,
            scale,
            out,
        } => {
            let args = commands::DemoArgs {
                seed,
                trials,
                c_star,
                scale,
                tau,
            };
            finish(
                "demo-pathological",
                commands::demo_inputs(&args),
                commands::demo_pathological(&args),
                out.as_ref(),
            )
        }
        Command::Sample {
            family,
            n,
            noise,
            seed,
            exact,
            out,
        } => {
            let args = commands::SampleArgs {
                family,
                n,
                noise,
                seed,
                exact,
                tau,
            };
            let csv = match commands::sample_csv(&args) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let written = match out {
                Some(path) => std::fs::write(&path, &csv)
                    .map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().write_all(&csv).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}
