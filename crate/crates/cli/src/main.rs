mod commands;
mod reproduce;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcosmo::optim::OptimizerKind;
use qcosmo::BasisKind;

use settings::{resolve, CliError, Command, Overrides, RunConfig};

pub const OUT_ENV: &str = "QCOSMO_OUT";
const DEFAULT_OUT: &str = "qcosmo-out";

#[derive(Parser)]
#[command(
    name = "qcosmo",
    version,
    about = "Quantum-simulation toolkit for cosmological Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact ground energy and Pauli decomposition of a model.
    Exact(Common),
    /// Variational ground-state search over one or more seeds.
    Vqe {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        optimizer: Option<OptimizerKind>,
        /// Maximum energy evaluations per run.
        #[arg(long)]
        budget: Option<usize>,
        /// Ansatz repetitions.
        #[arg(long)]
        reps: Option<usize>,
        /// Seeds to sweep, as an inclusive range `a..b` or a list `a,b,c`.
        #[arg(long, value_parser = parse_seeds)]
        seeds: Option<Seeds>,
        /// Record wall-clock times in the trace.
        #[arg(long)]
        timing: bool,
    },
    /// Trotterized evolution of a wavepacket on a grid basis.
    Eoh {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long)]
        order: Option<u8>,
        /// Comma-separated evolution times.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        tau: Option<Vec<f64>>,
        /// Start from a delta at this grid index.
        #[arg(long)]
        x0: Option<usize>,
        /// Use the exact propagator instead of the product formula.
        #[arg(long)]
        exact: bool,
    },
    /// Compare published values with computed ones.
    Reproduce {
        /// One of table1, table2, table3, table4, table5, tunneling.
        id: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to $QCOSMO_OUT, then ./qcosmo-out.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Qubits per mode, `n` or `n,n`.
    #[arg(long, value_delimiter = ',')]
    qubits: Option<Vec<usize>>,
    #[arg(long)]
    basis: Option<BasisKind>,
}

#[derive(Clone, Debug)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    let bad = |_| format!("invalid seed list '{s}'");
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse().map_err(bad)?, b.trim().parse().map_err(bad)?);
        if a > b {
            return Err(format!("empty seed range '{s}'"));
        }
        return Ok(Seeds((a..=b).collect()));
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(bad))
        .collect::<Result<_, _>>()
        .map(Seeds)
}

fn default_out() -> PathBuf {
    std::env::var_os(OUT_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn prepare(command: Command, common: Common, mut o: Overrides) -> Result<(settings::ResolvedRun, PathBuf), CliError> {
    let cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = common.out.or_else(|| cfg.output.clone()).unwrap_or_else(default_out);
    o.preset = common.preset;
    o.seed = common.seed;
    o.qubits = common.qubits;
    o.basis = common.basis;
    Ok((resolve(command, cfg, o)?, out))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Cmd::Exact(common) => {
            let (run, out) = prepare(Command::Exact, common, Overrides::default())?;
            commands::exact(&run, &out)
        }
        Cmd::Vqe {
            common,
            optimizer,
            budget,
            reps,
            seeds,
            timing,
        } => {
            let o = Overrides {
                optimizer,
                budget,
                reps,
                seeds: seeds.map(|s| s.0),
                timing: timing.then_some(true),
                ..Default::default()
            };
            let (run, out) = prepare(Command::Vqe, common, o)?;
            commands::vqe(&run, &out)
        }
        Cmd::Eoh {
            common,
            steps,
            order,
            tau,
            x0,
            exact,
        } => {
            let o = Overrides {
                steps,
                order,
                tau,
                x0,
                exact,
                ..Default::default()
            };
            let (mut run, out) = prepare(Command::Eoh, common, o)?;
            commands::eoh(&mut run, &out)
        }
        Cmd::Reproduce { id, out } => reproduce::run(&id, &out.unwrap_or_else(default_out)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..3").unwrap().0, vec![0, 1, 2, 3]);
        assert_eq!(parse_seeds("5,2").unwrap().0, vec![5, 2]);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("x").is_err());
    }
}
