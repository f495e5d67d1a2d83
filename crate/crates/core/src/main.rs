use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use isolab::cli::config::load_config;
use isolab::cli::export::Judged;
use isolab::cli::run::{run, write_outputs, RunResult};
use isolab::cli::scenarios::{self, SCENARIOS};
use isolab::expr::catalog;
use isolab::CatalogSurface;

/// Transformations of isothermic surfaces on conformal grids.
#[derive(Parser)]
#[command(name = "isolab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline described by a JSON config.
    Run { config: PathBuf },
    /// List catalog surfaces, Weierstrass data and verification scenarios.
    Catalog,
    /// Run a built-in verification scenario against its closed-form oracle.
    Verify {
        name: String,
        /// Number of grid levels; orders are estimated from the first two.
        #[arg(long, default_value_t = 2)]
        refine: usize,
    },
}

fn print_rows(result: &RunResult) {
    for Judged { report, tolerance } in &result.rows {
        let status = if report.max <= *tolerance {
            "ok  "
        } else {
            "FAIL"
        };
        println!("{status} {report} tol={tolerance:e}");
    }
}

fn verdict(result: &RunResult) -> ExitCode {
    print_rows(result);
    if result.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn execute(cli: Cli) -> isolab::Result<ExitCode> {
    match cli.command {
        Command::Run { config } => {
            let config = load_config(&config)?;
            let result = run(&config)?;
            write_outputs(&config, &result)?;
            Ok(verdict(&result))
        }
        Command::Catalog => {
            println!("surfaces:");
            for s in CatalogSurface::ALL {
                println!("  {}", s.name());
            }
            println!("weierstrass data:");
            for name in catalog::NAMES {
                let (g, h) = catalog::weierstrass(name).expect("catalog entry");
                println!("  {name}: g = {g}, h = {h}");
            }
            println!("scenarios:");
            for s in SCENARIOS {
                println!("  {}: {}", s.name, s.summary);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { name, refine } => {
            let scenario = scenarios::find(&name).ok_or_else(|| {
                let known: Vec<_> = SCENARIOS.iter().map(|s| s.name).collect();
                isolab::Error::InvalidParameter(format!(
                    "unknown scenario '{name}', expected one of {}",
                    known.join(", ")
                ))
            })?;
            if refine == 0 {
                return Err(isolab::Error::InvalidParameter(
                    "--refine must be at least 1".into(),
                ));
            }
            Ok(verdict(&scenario.run(refine)?))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = std::env::var("ISOLAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        // fails only if the pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
