use std::path::PathBuf;
use std::process::ExitCode;

use barricade::gallery::{self, NAMES};
use barricade::runner::{run, RunError, RunOptions};
use barricade::scenario::{parse_scenario, Scenario};
use barricade::Report;
use clap::{Args, Parser, Subcommand};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

/// Convex separation and existence analysis.
#[derive(Parser)]
#[command(name = "barricade", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Override the separation and solver tolerances.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the iteration budget.
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    /// Run independent tasks concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    /// Omit wall times so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_meta: bool,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario.
    Analyze { scenario: PathBuf },
    /// Run the solve and conditions tasks of a scenario.
    Solve { scenario: PathBuf },
    /// Run gallery items against their recorded expectations.
    Gallery {
        name: Option<String>,
        #[arg(long, conflicts_with = "name")]
        all: bool,
        /// Size of the truncated families.
        #[arg(long)]
        n: Option<usize>,
        /// Print the item's scenario instead of running it.
        #[arg(long, requires = "name")]
        manifest: bool,
    },
}

enum Failure {
    Usage(String),
    Resource(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Scenario(e) => Failure::Usage(e.to_string()),
            RunError::Resource(m) => Failure::Resource(m),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Resource(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_RESOURCE)
        }
    }
}

fn apply(common: &Common, s: &mut Scenario) -> Result<(), Failure> {
    if let Some(t) = common.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
        s.tolerances.tol = t;
        s.tolerances.solve_tol = t;
    }
    if let Some(k) = common.max_iter {
        if k == 0 {
            return Err(Failure::Usage("--max-iter must be positive".into()));
        }
        s.tolerances.max_iter = k;
    }
    if let Some(seed) = common.seed {
        s.seed = seed;
    }
    Ok(())
}

fn emit(common: &Common, text: &str) -> Result<(), Failure> {
    match &common.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Resource(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Failure> {
    let c = &cli.common;
    let opts = |solve_only| RunOptions {
        parallel: c.parallel,
        meta: !c.no_meta,
        solve_only,
    };
    match &cli.command {
        Command::Analyze { scenario } | Command::Solve { scenario } => {
            let mut s = parse_scenario(scenario).map_err(|e| Failure::Usage(e.to_string()))?;
            apply(c, &mut s)?;
            let solve_only = matches!(cli.command, Command::Solve { .. });
            let mut report = run(&s, opts(solve_only))?;
            report.scenario = scenario.file_stem().map(|n| n.to_string_lossy().into_owned());
            emit(c, &report.to_json())?;
            Ok(0)
        }
        Command::Gallery { name, all, n, manifest } => {
            let names: Vec<&str> = match (name, all) {
                (Some(n), false) => vec![n.as_str()],
                (None, true) => NAMES.to_vec(),
                _ => return Err(Failure::Usage("give a gallery item name or --all".into())),
            };
            let mut reports = Vec::new();
            for name in names {
                let item = gallery::item(name, *n).map_err(|e| Failure::Usage(format!("{e}; known: {}", NAMES.join(", "))))?;
                let mut s = item.scenario.clone();
                apply(c, &mut s)?;
                if *manifest {
                    let text = serde_json::to_string_pretty(&s).expect("scenario serializes");
                    emit(c, &(text + "\n"))?;
                    return Ok(0);
                }
                let r = gallery::run_item(&item, &s, opts(false))?;
                for t in r.tasks.iter().filter(|t| t.expected.is_some()) {
                    let verdict = if t.matches == Some(true) { "match" } else { "MISMATCH" };
                    eprintln!("{name}: {} -> {} (expected {}) {verdict}", t.task, t.status, item.expected);
                }
                reports.push(r);
            }
            let report: Report = if reports.len() == 1 { reports.pop().unwrap() } else { gallery::merge(reports) };
            emit(c, &report.to_json())?;
            Ok(if report.all_match() { 0 } else { EXIT_MISMATCH })
        }
    }
}
