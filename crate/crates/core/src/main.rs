use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use sbp_momentum::harness::config::{parse_domain, parse_grid_list};
use sbp_momentum::harness::{
    exit_code_for, resolve, run_experiment, Experiment, OutputFormat, Overrides, EXIT_USAGE,
};
use sbp_momentum::Result;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    SbpCheck,
    Spectrum,
    Leakage,
    Well,
    Moments,
    Commutator,
    Dispersion,
    All,
}

impl From<Command> for Experiment {
    fn from(c: Command) -> Self {
        match c {
            Command::SbpCheck => Experiment::SbpCheck,
            Command::Spectrum => Experiment::Spectrum,
            Command::Leakage => Experiment::Leakage,
            Command::Well => Experiment::Well,
            Command::Moments => Experiment::Moments,
            Command::Commutator => Experiment::Commutator,
            Command::Dispersion => Experiment::Dispersion,
            Command::All => Experiment::All,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Grid-refinement experiments for the SBP momentum operator.
#[derive(Debug, Parser)]
#[command(name = "sbp-momentum", version)]
struct Cli {
    #[arg(value_enum)]
    experiment: Command,

    /// Single grid size; shorthand for `--grids N`.
    #[arg(long, conflicts_with = "grids")]
    nx: Option<usize>,

    /// Comma-separated grid sizes, e.g. 32,64,128.
    #[arg(long)]
    grids: Option<String>,

    /// Domain as `a,b`.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,

    #[arg(long)]
    hbar: Option<f64>,

    #[arg(long)]
    mass: Option<f64>,

    /// Height of the endpoint walls.
    #[arg(long)]
    wall: Option<f64>,

    /// Number of physical well levels to report.
    #[arg(long)]
    levels: Option<usize>,

    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum)]
    format: Option<Format>,

    /// TOML file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn overrides(cli: &Cli) -> Result<Overrides> {
    let grids = match (cli.nx, &cli.grids) {
        (Some(n), _) => Some(vec![n]),
        (None, Some(list)) => Some(parse_grid_list(list)?),
        (None, None) => None,
    };
    Ok(Overrides {
        experiment: Some(cli.experiment.into()),
        grids,
        domain: cli.domain.as_deref().map(parse_domain).transpose()?,
        hbar: cli.hbar,
        mass: cli.mass,
        wall: cli.wall,
        levels: cli.levels,
        out: cli.out.clone(),
        format: cli.format.map(|f| match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }),
    })
}

fn run(cli: &Cli) -> Result<i32> {
    let file = cli.config.as_deref().map(Overrides::from_file).transpose()?;
    let flags = overrides(cli)?;
    let cfg = resolve(cli.experiment.into(), file.as_ref(), &flags)?;
    let summary = run_experiment(&cfg)?;
    println!("# config_hash={}", summary.config_hash);
    for line in summary.summary_lines() {
        println!("{line}");
    }
    for path in &summary.artifacts {
        eprintln!("wrote {}", path.display());
    }
    println!("status {}", if summary.passed() { "pass" } else { "fail" });
    Ok(summary.exit_code())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
