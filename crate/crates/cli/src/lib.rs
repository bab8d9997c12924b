//! Command-line runner for korovkin experiments.
//!
//! ```text
//! korovkin run --config example1.toml --out example1.csv
//! korovkin check-operator --family max_kantorovich --phi "poly:[0,0,1]" --axioms
//! korovkin choquet --f "x" --a 0 --b 1 --g sqrt --resolution 10000
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod build;
pub mod config;
pub mod error;
pub mod runner;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use korovkin::choquet::{choquet_integral, DistortionFunction};
use korovkin::operators::Axiom;
use korovkin::{GridDomain, RealFunction};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::runner::{EXIT_CONVERGENCE_FAIL, EXIT_PASS, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(name = "korovkin", version, about = "Run Korovkin-type convergence experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the experiment in a config file; writes a CSV table and a JSON sidecar.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build one member of an operator family and check its axioms.
    CheckOperator {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "identity")]
        phi: String,
        #[arg(long, default_value = "identity")]
        distortion: String,
        /// Print the axiom reports as JSON.
        #[arg(long)]
        axioms: bool,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Choquet integral of `f` over `[a, b]` against the distortion `g`.
    Choquet {
        #[arg(long)]
        f: String,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        #[arg(long, default_value = "identity")]
        g: String,
        #[arg(long, default_value_t = korovkin::choquet::DEFAULT_RESOLUTION)]
        resolution: usize,
    },
}

/// The `SEED` environment variable, if set.
pub fn seed_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var("SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("SEED={s:?} is not an unsigned integer"))),
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Config(format!("SEED: {e}"))),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_PASS;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Run { config, out: csv } => {
            let record = runner::run(&config, &csv, seed_from_env()?)?;
            writeln!(
                out,
                "{}: {:?} (exit {}); wrote {} and {}",
                config.display(),
                record.verdict,
                record.exit_code,
                csv.display(),
                runner::sidecar_path(&csv).display()
            )?;
            Ok(record.exit_code)
        }
        Command::CheckOperator {
            family,
            phi,
            distortion,
            axioms,
            n,
            grid,
            samples,
            seed,
        } => {
            let seed = seed_from_env()?.unwrap_or(seed);
            let domain_line = if family.trim_start_matches("cesaro:") == "weyl" {
                "domain = \"circle\""
            } else {
                "domain = \"interval\""
            };
            let src = format!(
                "{domain_line}\ngrid = {grid}\nschedule = [{n}]\nfamily = {family:?}\nphi = {phi:?}\ndistortion = {distortion:?}\nseed = {seed}"
            );
            let cfg = ExperimentConfig::from_toml(&src)?;
            let domain = build::domain(&cfg)?;
            let phi_map = build::phi(&cfg.phi, &domain)?;
            let op = build::family(&cfg.family, &cfg, &domain, &phi_map)?.member(n)?;
            writeln!(out, "{}", op.label())?;
            if !axioms {
                return Ok(EXIT_PASS);
            }
            let reports = runner::axiom_suite(op.as_ref(), &domain, samples, seed)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?;
            let required_ok = reports
                .iter()
                .filter(|r| r.axiom != Axiom::ComonotoneAdditive)
                .all(|r| r.passed());
            Ok(if required_ok { EXIT_PASS } else { EXIT_CONVERGENCE_FAIL })
        }
        Command::Choquet { f, a, b, g, resolution } => {
            let f = RealFunction::parse(&f)?;
            if b > a {
                f.sample(&GridDomain::interval(a, b, resolution.max(2))?)?;
            }
            let g = DistortionFunction::from_spec(&g)?;
            writeln!(out, "{}", choquet_integral(&f, a, b, &g, resolution)?)?;
            Ok(EXIT_PASS)
        }
    }
}
