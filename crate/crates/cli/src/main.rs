//! `bkvg`: batch front end for classifying and verifying accretive
//! extensions of the Hardy-type model operators.

mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Format, Outcome};
use config::{Config, FileConfig, FlagConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "bkvg", version, about = "Accretive extensions of Hardy-type model operators on (0,1)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exponents, kernels, certified bracket constants and χ for a family.
    Analyze(Common),
    /// Accretivity, closability, B-matrix and lower bound for a rank-one `d`.
    Check(Common),
    /// Form order of two extensions.
    Compare {
        #[command(flatten)]
        common: Common,
        /// First extension: "re,im" or "F" (default: --d-re/--d-im).
        #[arg(long, allow_hyphen_values = true)]
        d1: Option<String>,
        /// Second extension: "re,im" or "F" (default: F).
        #[arg(long, allow_hyphen_values = true)]
        d2: Option<String>,
    },
    /// Support function of the numerical range of the discretized `A₊`/`C₊`.
    Numrange(Common),
    /// Runs the oracle verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        level: Option<Level>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FamilyArg {
    #[value(name = "A", alias = "a")]
    A,
    #[value(name = "C", alias = "c")]
    C,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Level {
    Quick,
    Full,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d_re: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    d_im: Option<f64>,
    /// Number of mesh nodes including both endpoints.
    #[arg(long)]
    mesh: Option<usize>,
    #[arg(long)]
    theta_steps: Option<usize>,
    /// TOML file with any of the above keys (snake_case).
    #[arg(long, env = "BKVG_CONFIG")]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn flags(&self) -> FlagConfig {
        FlagConfig {
            family: self.family.map(|f| match f {
                FamilyArg::A => bkvg_core::Family::HardyImaginary,
                FamilyArg::C => bkvg_core::Family::HardyReal,
            }),
            gamma: self.gamma,
            d_re: self.d_re,
            d_im: self.d_im,
            mesh: self.mesh,
            theta_steps: self.theta_steps,
            ..Default::default()
        }
    }

    fn resolve(&self, flags: FlagConfig) -> Result<Config, CliError> {
        let file = match &self.config {
            Some(p) => Some((p.clone(), FileConfig::load(p)?)),
            None => None,
        };
        Config::resolve(flags, file)
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (common, flags, name) = match &cli.command {
        Command::Analyze(c) => (c, c.flags(), "analyze"),
        Command::Check(c) => (c, c.flags(), "check"),
        Command::Numrange(c) => (c, c.flags(), "numrange"),
        Command::Compare { common, d1, d2 } => (
            common,
            FlagConfig {
                d1: d1.clone(),
                d2: d2.clone(),
                ..common.flags()
            },
            "compare",
        ),
        Command::Verify { common, level } => (
            common,
            FlagConfig {
                level: level.map(|l| match l {
                    Level::Quick => "quick".into(),
                    Level::Full => "full".into(),
                }),
                ..common.flags()
            },
            "verify",
        ),
    };
    let cfg = common.resolve(flags)?;
    let format = match (common.json, common.csv, name) {
        (true, _, _) => Format::Json,
        (_, true, _) | (false, false, "numrange") => Format::Csv,
        _ => Format::Json,
    };
    let out = common.out.clone();
    match name {
        "analyze" => commands::analyze(&cfg, format, out),
        "check" => commands::check(&cfg, format, out),
        "compare" => commands::compare(&cfg, format, out),
        "numrange" => commands::numrange(&cfg, format, out),
        _ => commands::verify(&cfg, format, out),
    }
}

fn emit(outcome: &Outcome) -> Result<(), CliError> {
    if let Some((path, text)) = &outcome.file {
        std::fs::write(path, text).map_err(|source| CliError::Output {
            path: path.clone(),
            source,
        })?;
    }
    // A closed pipe on either stream is not worth a failure exit.
    let _ = std::io::stdout().lock().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().lock().write_all(outcome.stderr.as_bytes());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli).and_then(|outcome| emit(&outcome).map(|_| outcome.code));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
