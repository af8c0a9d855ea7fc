use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use onc_cli::demo::{packet_demo, parse_payload, Force};
use onc_cli::dmt::{dmt_table, ESTIMATE_GRID};
use onc_cli::sweep::{default_sir_grid, outage_sweep};
use onc_cli::validate::{validate, ValidateOptions};
use onc_cli::{load_config, CliError};
use onc_core::output::{write_dmt, write_sweep};
use onc_core::scenario::DEFAULT_SEED;
use onc_core::ScenarioConfig;

#[derive(Parser)]
#[command(
    name = "onc",
    version,
    about = "Outage, DMT and packet-level analysis of opportunistic network coding relays"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form and simulated outage of both schemes over an SIR grid.
    OutageSweep {
        #[arg(long)]
        config: PathBuf,
        /// SIR values in dB [default: 0,5,...,30].
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sir_grid: Option<Vec<f64>>,
        /// Target rates in bit/s/Hz [default: the config's rate_bits].
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Diversity-multiplexing tradeoff curves with optional slope estimates.
    Dmt {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 21)]
        n_points: usize,
        /// Multiplexing gains at which to estimate the relay scheme's diversity.
        #[arg(long, value_delimiter = ',')]
        estimate: Vec<f64>,
        #[arg(long, default_value_t = 7)]
        k_interferers: usize,
    },
    /// Check closed forms against simulation and the protocol against capacity.
    Validate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[arg(long, hide = true)]
        perturb_analytic: Option<f64>,
    },
    /// Trace one run of the relay protocol.
    PacketDemo {
        /// Payload for U1, hex.
        #[arg(long)]
        b1: String,
        /// Payload for U2, hex, same length as b1.
        #[arg(long)]
        b2: String,
        /// Seed for fading and corruption [default: the config's seed].
        #[arg(long)]
        seed: Option<u64>,
        /// Scenario for the fading draw [default: K=7, R=0.5, 10 dB].
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the channel instead of drawing it.
        #[arg(long, value_enum)]
        force: Option<Force>,
    },
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            let f = File::create(p).map_err(|e| CliError::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

fn finish(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    let io_err = |e| CliError::io(path.unwrap_or(Path::new("<stdout>")), e);
    let mut w = open_output(path)?;
    write(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::OutageSweep {
            config,
            sir_grid,
            rates,
            out,
            workers,
        } => {
            let cfg = load_config(&config)?;
            let grid = sir_grid.unwrap_or_else(default_sir_grid);
            let rates = rates.unwrap_or_else(|| vec![cfg.scenario.rate_bits]);
            let rows = outage_sweep(&cfg, &grid, &rates, workers)?;
            finish(out.as_deref(), |w| write_sweep(w, &cfg.metadata(), &rows))
        }
        Command::Dmt {
            out,
            n_points,
            estimate,
            k_interferers,
        } => {
            let rows = dmt_table(n_points, &estimate, k_interferers)?;
            let grid: Vec<String> = ESTIMATE_GRID.iter().map(|l| format!("{l:e}")).collect();
            let meta = [
                ("generator", format!("onc {}", env!("CARGO_PKG_VERSION"))),
                ("k_interferers", k_interferers.to_string()),
                ("estimate_sir_grid", grid.join(" ")),
            ];
            finish(out.as_deref(), |w| write_dmt(w, &meta, &rows))
        }
        Command::Validate {
            config,
            workers,
            perturb_analytic,
        } => {
            let cfg = load_config(&config)?;
            let s = &cfg.scenario;
            println!(
                "scenario {}: K={}, R={} bit/s/Hz, {}, {} trials, seed {}",
                config.display(),
                s.k_interferers,
                s.rate_bits,
                s.noise,
                s.trials,
                s.seed
            );
            let checks = validate(
                &cfg,
                ValidateOptions {
                    workers,
                    perturb_analytic,
                },
            )?;
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.pass).count();
            println!(
                "{} of {} checks passed",
                checks.len() - failed,
                checks.len()
            );
            if failed > 0 {
                return Err(CliError::Validation {
                    failed,
                    total: checks.len(),
                });
            }
            Ok(())
        }
        Command::PacketDemo {
            b1,
            b2,
            seed,
            config,
            force,
        } => {
            let b1 = parse_payload("b1", &b1)?;
            let b2 = parse_payload("b2", &b2)?;
            let (scenario, config_seed) = match config {
                Some(p) => {
                    let cfg = load_config(&p)?;
                    let seed = cfg.scenario.seed;
                    (cfg.scenario, seed)
                }
                None => (ScenarioConfig::equal(7, 0.5, 10.0)?, DEFAULT_SEED),
            };
            let (_, trace) = packet_demo(&b1, &b2, seed.unwrap_or(config_seed), force, &scenario)?;
            print!("{trace}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
