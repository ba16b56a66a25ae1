use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cmpgeom::harness::{plot_bundle, run_file, Overrides};

/// Numerical comparison-geometry experiments.
#[derive(Debug, Parser)]
#[command(name = "cmpgeom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every suite, overriding the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Distance tolerance for inequality margins.
    #[arg(long, global = true)]
    tol_distance: Option<f64>,
    /// Tolerance for angle and premise matches.
    #[arg(long, global = true)]
    tol_angle: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the suites of a config file and write `report.json` and CSVs.
    Run { config: PathBuf },
    /// Write `margin.csv`, `peri.csv` and `defect.csv` from a bundle.
    Plot { bundle: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ov = Overrides { seed: cli.seed, tol_distance: cli.tol_distance, tol_angle: cli.tol_angle, out: cli.out.clone() };
    let code = match &cli.command {
        Command::Run { config } => match run_file(config, &ov) {
            Ok((bundle, out)) => {
                for s in &bundle.suites {
                    let m = &s.summary;
                    println!(
                        "{}: {} cases, {} pass, {} theorem-violated, {} hypothesis-violated, {} findings",
                        s.id, m.cases, m.pass, m.theorem_violated, m.hypothesis_violated, m.finding
                    );
                }
                println!("wrote {}", out.join("report.json").display());
                bundle.exit_code()
            }
            Err(e) => {
                eprintln!("cmpgeom: {e}");
                e.exit_code()
            }
        },
        Command::Plot { bundle } => {
            let out = cli.out.clone().unwrap_or_else(|| bundle.parent().map(PathBuf::from).unwrap_or_default());
            match plot_bundle(bundle, &out) {
                Ok(_) => {
                    println!("wrote margin.csv, peri.csv, defect.csv to {}", out.display());
                    0
                }
                Err(e) => {
                    eprintln!("cmpgeom: {e}");
                    e.exit_code()
                }
            }
        }
    };
    ExitCode::from(code as u8)
}
