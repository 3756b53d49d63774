use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use nullgeom_cli::{bundled, CliError, Overrides, EXIT_USAGE};

/// Verifies integral identities of spacelike 2-surfaces in static spacetimes.
#[derive(Debug, Parser)]
#[command(name = "nullgeom", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// A TOML configuration file or the name of a bundled scenario.
    config: String,
    /// Seed for random surfaces, overriding the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, overriding the configuration.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Factor applied to every tolerance.
    #[arg(long = "tol-scale")]
    tol_scale: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate every identity; exit 2 if any fails its tolerance.
    Run(RunArgs),
    /// Fit convergence orders over the resolutions; exit 2 if one falls short.
    Convergence(RunArgs),
    /// List the bundled scenarios.
    ListScenarios,
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    nullgeom_cli::init_threads()?;
    let (args, converge) = match cli.command {
        Command::ListScenarios => {
            for (name, description, _) in bundled::SCENARIOS {
                println!("{name:<22} {description}");
            }
            return Ok(0);
        }
        Command::Run(a) => (a, false),
        Command::Convergence(a) => (a, true),
    };
    let overrides = Overrides {
        seed: args.seed,
        out: args.out,
        tol_scale: args.tol_scale,
    };
    let (cfg, out) = nullgeom_cli::prepare(&args.config, &overrides)?;
    let outcome = if converge {
        nullgeom_cli::convergence(&cfg, &out)?
    } else {
        nullgeom_cli::run(&cfg, &out)?
    };
    eprintln!("wrote {}", outcome.report_path.display());
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE as u8)
        }
    }
}
