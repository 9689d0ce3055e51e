use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::Parser;
use dipcone::Preset;
use dipcone_cli::{run_experiment, ConfigDoc};

/// Simulate a dipolar spin chain and measure its light-cone front.
#[derive(Debug, Parser)]
#[command(name = "dipcone", version)]
struct Args {
    /// Configuration file of key=value pairs.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Preset overriding the one in the configuration.
    #[arg(long)]
    preset: Option<String>,

    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn run(args: Args) -> anyhow::Result<bool> {
    let text = match &args.config {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let preset = args
        .preset
        .as_deref()
        .map(|name| Preset::from_name(name).ok_or_else(|| anyhow!("unknown preset `{name}`")))
        .transpose()?;
    let config = ConfigDoc::parse(&text)?.build(preset)?;
    let manifest = run_experiment(&config, &args.out)?;
    if !args.quiet {
        let report = std::fs::read_to_string(args.out.join(dipcone_cli::experiment::REPORT_FILE))?;
        print!("{report}");
        println!("wall time {:.3} s", manifest.wall_time.as_secs_f64());
    }
    if !manifest.conservation_ok() {
        eprintln!("conservation limits exceeded");
    }
    Ok(manifest.conservation_ok())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
