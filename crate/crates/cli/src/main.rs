use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weldfrac_cli::commands::{self, EXIT_OK, EXIT_WARNING};
use weldfrac_cli::config::LoadedConfig;

#[derive(Parser)]
#[command(name = "weldfrac", version, about = "Weld residual stress and hydrogen-assisted fracture of pipe seam welds")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the pipe-section mesh and write it with a VTK preview.
    Genmesh(Common),
    /// Multi-pass weld simulation; writes the residual-state file.
    Weld(Common),
    /// Rising-pressure run until cracking, yielding or the cap.
    Pressurize(Common),
    /// Boundary-layer crack growth resistance curve.
    Rcurve(Common),
    /// Degradation curves and analytic yield pressures.
    Screen(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(short, long, default_value = "out")]
    out: PathBuf,
    /// Overrides the configured RNG seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Exit with code 4 when validity warnings were raised.
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let (run, common): (fn(&LoadedConfig, &std::path::Path) -> _, &Common) = match &cli.command {
        Command::Genmesh(c) => (commands::genmesh, c),
        Command::Weld(c) => (commands::weld, c),
        Command::Pressurize(c) => (commands::pressurize, c),
        Command::Rcurve(c) => (commands::rcurve, c),
        Command::Screen(c) => (commands::screen, c),
    };
    let loaded = match &common.config {
        Some(p) => LoadedConfig::from_file(p),
        None => Ok(LoadedConfig::defaults()),
    };
    let mut loaded = match loaded {
        Ok(l) => l,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::from(commands::exit_code(&e) as u8);
        }
    };
    if let Some(s) = common.seed {
        loaded.config.seed = s;
    }
    let strict = common.strict || loaded.config.strict;
    match run(&loaded, &common.out) {
        Ok(w) if strict && !w.0.is_empty() => {
            log::error!("{} validity warning(s) escalated", w.0.len());
            ExitCode::from(EXIT_WARNING as u8)
        }
        Ok(_) => ExitCode::from(EXIT_OK as u8),
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(commands::exit_code(&e) as u8)
        }
    }
}
