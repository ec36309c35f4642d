//! `wprox`: solve exact Wasserstein-2 transport, apply proximal steps, run
//! (cyclic) proximal point iterations and execute the property suites.
//!
//! Inputs are JSON (measures, functionals), traces are CSV, reports are
//! JSON. Runs are deterministic: the same inputs and seed produce
//! byte-identical outputs.
//!
//! Exit codes: 0 success, 1 a check suite found a violated inequality,
//! 2 input or solver error (a machine-readable record goes to stderr).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use wprox_core::functionals::{from_spec, Functional};
use wprox_core::iterate::{cyclic_ppa, cyclic_ppa_diminishing, ppa, StepSchedule, StopRule};
use wprox_core::measures::DiscreteMeasure;
use wprox_core::prox::{prox, ProxConfig};
use wprox_core::suites::{list_suites, run_all, run_suite, suite_names, SuiteReport};
use wprox_core::transport::{geodesic, solve_w2};

#[derive(Parser)]
#[command(name = "wprox", version, about = "Wasserstein-2 proximal toolbox on discrete measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Squared and plain Wasserstein-2 distance between two measures.
    W2 {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        /// Also write the optimal plan as JSON.
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// One proximal step of a functional.
    Prox {
        #[arg(long)]
        functional: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        mu: PathBuf,
        /// Output measure JSON (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Point on the constant-speed geodesic between two measures.
    Geodesic {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Proximal point iteration; emits the trace as CSV.
    Ppa {
        #[arg(long)]
        functional: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        mu0: PathBuf,
        /// Reference measures for per-step distances (repeatable).
        #[arg(long = "ref")]
        refs: Vec<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-8)]
        step_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cyclic proximal point iteration over several functionals.
    Cppa {
        /// Functional JSON files, cycled in order (repeatable).
        #[arg(long = "functional", required = true)]
        functionals: Vec<PathBuf>,
        /// Fixed step size per functional (repeat to match; one value is
        /// shared). Ignored under --diminishing.
        #[arg(long = "tau")]
        taus: Vec<f64>,
        /// Use the diminishing schedule tau0 / (k + 1).
        #[arg(long)]
        diminishing: bool,
        #[arg(long, default_value_t = 1.0)]
        tau0: f64,
        /// Cycles to run under --diminishing.
        #[arg(long, default_value_t = 500)]
        cycles: usize,
        #[arg(long)]
        mu0: PathBuf,
        #[arg(long = "ref")]
        refs: Vec<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property suites and report per-check slacks.
    Check {
        /// Suite name (see --list-checks); all suites when omitted.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the per-check tolerance (exploration only; the
        /// defaults are the pinned ones).
        #[arg(long, allow_negative_numbers = true)]
        tol: Option<f64>,
        /// List the available suites with the inequality each certifies.
        #[arg(long)]
        list_checks: bool,
    },
}

enum Failure {
    Parse(String),
    Solver(String),
}

impl Failure {
    fn emit(&self) -> ExitCode {
        let (kind, message) = match self {
            Failure::Parse(m) => ("parse", m),
            Failure::Solver(m) => ("solver", m),
        };
        eprintln!(
            "{}",
            serde_json::json!({ "error_kind": kind, "message": message })
        );
        ExitCode::from(2)
    }
}

impl From<wprox_core::Error> for Failure {
    fn from(e: wprox_core::Error) -> Self {
        match e {
            wprox_core::Error::Parse(_) => Failure::Parse(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(failure) => failure.emit(),
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::W2 { mu, nu, plan } => {
            let mu = load_measure(&mu)?;
            let nu = load_measure(&nu)?;
            let solved = solve_w2(&mu, &nu)?;
            println!("w2_squared {}", solved.cost());
            println!("w2 {}", solved.w2());
            if let Some(path) = plan {
                write_out(&path, &solved.to_json())?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Prox { functional, tau, mu, out } => {
            let f = load_functional(&functional)?;
            let cfg = ProxConfig::new(tau)?;
            let mu = load_measure(&mu)?;
            let result = prox(&f, &cfg, &mu)?;
            emit(out.as_deref(), &result.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Geodesic { mu, nu, t, out } => {
            let mu = load_measure(&mu)?;
            let nu = load_measure(&nu)?;
            let plan = solve_w2(&mu, &nu)?;
            let point = geodesic(&plan, t)?;
            emit(out.as_deref(), &point.to_json())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Ppa { functional, tau, mu0, refs, max_iter, step_tol, out } => {
            let f = load_functional(&functional)?;
            let cfg = ProxConfig::new(tau)?;
            let mu0 = load_measure(&mu0)?;
            let refs = load_measures(&refs)?;
            let stop = StopRule { max_iter, step_tol, ..StopRule::default() };
            let trace = ppa(&f, &cfg, &mu0, &refs, &stop)?;
            emit(out.as_deref(), &trace.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Cppa {
            functionals,
            taus,
            diminishing,
            tau0,
            cycles,
            mu0,
            refs,
            max_iter,
            out,
        } => {
            let fs = functionals
                .iter()
                .map(|p| load_functional(p))
                .collect::<Result<Vec<_>, _>>()?;
            let mu0 = load_measure(&mu0)?;
            let refs = load_measures(&refs)?;
            let trace = if diminishing {
                let schedule = StepSchedule::Diminishing { tau0 };
                cyclic_ppa_diminishing(&fs, &schedule, &mu0, &refs, cycles)?
            } else {
                let taus = match taus.len() {
                    0 => vec![1.0; fs.len()],
                    1 => vec![taus[0]; fs.len()],
                    n if n == fs.len() => taus,
                    n => {
                        return Err(Failure::Parse(format!(
                            "{n} step sizes for {} functionals",
                            fs.len()
                        )))
                    }
                };
                let cfgs = taus
                    .iter()
                    .map(|&t| ProxConfig::new(t))
                    .collect::<Result<Vec<_>, _>>()?;
                let stop = StopRule { max_iter, ..StopRule::default() };
                cyclic_ppa(&fs, &cfgs, &mu0, &refs, &stop)?
            };
            emit(out.as_deref(), &trace.to_csv())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { suite, seed, out, tol, list_checks } => {
            if list_checks {
                for (name, description) in list_suites() {
                    println!("{name}: {description}");
                }
                return Ok(ExitCode::SUCCESS);
            }
            let report = match suite.as_deref() {
                None | Some("all") => run_all(seed, tol)?,
                Some(name) => {
                    if !suite_names().contains(&name) {
                        return Err(Failure::Parse(format!(
                            "unknown suite `{name}`; see --list-checks"
                        )));
                    }
                    let outcome = run_suite(name, seed, tol)?;
                    let passed = outcome.passed;
                    SuiteReport { schema_version: 1, seed, outcomes: vec![outcome], passed }
                }
            };
            for outcome in &report.outcomes {
                println!(
                    "suite {}: {} ({} checks, {} failures, worst slack {:.3e})",
                    outcome.suite,
                    if outcome.passed { "pass" } else { "FAIL" },
                    outcome.instances,
                    outcome.failures,
                    outcome.worst_slack
                );
            }
            if let Some(path) = out {
                let json = serde_json::to_string_pretty(&report)
                    .map_err(|e| Failure::Solver(e.to_string()))?;
                write_out(&path, &json)?;
            }
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn load_measure(path: &Path) -> Result<DiscreteMeasure, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    DiscreteMeasure::from_json(&text).map_err(|e| match e {
        wprox_core::Error::Parse(m) => Failure::Parse(format!("{}: {m}", path.display())),
        other => Failure::Parse(format!("{}: {other}", path.display())),
    })
}

fn load_measures(paths: &[PathBuf]) -> Result<Vec<DiscreteMeasure>, Failure> {
    paths.iter().map(|p| load_measure(p)).collect()
}

fn load_functional(path: &Path) -> Result<Functional, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))?;
    from_spec(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn write_out(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn emit(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(path) => write_out(path, content),
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}
