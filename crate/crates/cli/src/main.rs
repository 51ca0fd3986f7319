//! `widelink`: runs, sweeps and reports for the link simulator.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{ArgAction, Args, Parser, Subcommand};

use widelink_core::harness::{
    emit_outputs, report, single_run, sweep_cores, sweep_entropy, sweep_symbol_rate, LinkConfig,
    ResultTable, PRESETS,
};
use widelink_core::{Error, Stage};

#[derive(Parser)]
#[command(
    name = "widelink",
    version,
    about = "Seeded simulator of a band-interleaved >200-GBd IMDD link"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON configuration file, or a preset name (C-band-216G, O-band-216G).
    #[arg(long)]
    config: String,

    /// Directory for results.csv, plot.svg and manifest.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Single end-to-end run.
    Run {
        #[command(flatten)]
        common: Common,
        /// Overrides the configuration seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Entropy sweep of the shaped PAM12 format.
    SweepEntropy {
        #[command(flatten)]
        common: Common,
        /// Comma-separated entropies in bit/symbol.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        entropies: Vec<f64>,
    },
    /// Symbol-rate sweep.
    SweepBaud {
        #[command(flatten)]
        common: Common,
        /// Comma-separated symbol rates in GBd.
        #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
        rates: Vec<f64>,
    },
    /// Independent runs over the cores of an uncoupled multi-core fiber.
    Cores {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
    /// Re-renders plot.svg from the results.csv in a directory.
    Report { dir: PathBuf },
}

fn load_config(spec: &str) -> Result<LinkConfig, Error> {
    let path = Path::new(spec);
    if !path.exists() && PRESETS.contains(&spec) {
        return LinkConfig::preset(spec).map_err(|e| e.at(Stage::Config));
    }
    LinkConfig::load(path).map_err(|e| e.at(Stage::Config))
}

fn print_table(table: &ResultTable) {
    println!(
        "{:>12} {:>6} {:>8} {:>6} {:>10} {:>10} {:>10}",
        table.kind.as_str(),
        "seed",
        "NGMI",
        "rate",
        "BER",
        "achv Gb/s",
        "net Gb/s"
    );
    for row in &table.rows {
        match (&row.report, &row.error) {
            (Some(m), _) => println!(
                "{:>12} {:>6} {:>8.4} {:>6} {:>10.3e} {:>10.1} {:>10.1}",
                row.parameter,
                row.seed,
                m.ngmi,
                m.required_code_rate
                    .map(|r| format!("{r:.3}"))
                    .unwrap_or_else(|| "-".into()),
                m.ber,
                m.achievable_bitrate_gbps,
                m.net_bitrate_gbps
            ),
            (None, e) => println!(
                "{:>12} {:>6} failed: {}",
                row.parameter,
                row.seed,
                e.as_deref().unwrap_or("unknown error")
            ),
        }
    }
    for w in &table.warnings {
        log::warn!("{w}");
    }
}

fn finish(table: ResultTable, config: &LinkConfig, out: &Path) -> Result<()> {
    let files = emit_outputs(&table, config, out).map_err(|e| e.at(Stage::Output))?;
    print_table(&table);
    println!("wrote {}", files.csv.display());
    if table.reports().next().is_none() {
        let first = table
            .rows
            .iter()
            .find_map(|r| r.error.clone())
            .unwrap_or_default();
        return Err(anyhow!("every point failed; first failure: {first}"));
    }
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, seed } => {
            let mut cfg = load_config(&common.config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            finish(single_run(&cfg), &cfg, &common.out)
        }
        Command::SweepEntropy { common, entropies } => {
            let cfg = load_config(&common.config)?;
            let table = sweep_entropy(&cfg, &entropies).map_err(|e| e.at(Stage::Config))?;
            finish(table, &cfg, &common.out)
        }
        Command::SweepBaud { common, rates } => {
            let cfg = load_config(&common.config)?;
            let table = sweep_symbol_rate(&cfg, &rates).map_err(|e| e.at(Stage::Config))?;
            finish(table, &cfg, &common.out)
        }
        Command::Cores { common, n } => {
            let cfg = load_config(&common.config)?;
            let table = sweep_cores(&cfg, n).map_err(|e| e.at(Stage::Config))?;
            finish(table, &cfg, &common.out)
        }
        Command::Report { dir } => {
            let table = report(&dir)
                .map_err(|e| e.at(Stage::Output))
                .with_context(|| format!("reporting {}", dir.display()))?;
            print_table(&table);
            Ok(())
        }
    }
}

/// One-line message with causes; core errors already embed their sources.
fn describe(e: &anyhow::Error) -> String {
    let mut s = String::new();
    for cause in e.chain() {
        let m = cause.to_string();
        if !s.ends_with(&m) {
            if !s.is_empty() {
                s.push_str(": ");
            }
            s.push_str(&m);
        }
    }
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("widelink: error: {}", describe(&e));
            ExitCode::FAILURE
        }
    }
}
