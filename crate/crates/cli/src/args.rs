//! Command-line arguments and their translation into a `RunConfig`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infra1d::dlog::KFilter;
use infra1d::infra::BackendConfig;
use infra1d::ScaledReal;

use crate::config::{Formula, Pipeline, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "infra1d", version, about = "Simulated Fourier sampling on one-dimensional infrastructures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Root seed; every random choice is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_parser = parse_count)]
    pub trials_cap: Option<u64>,
    /// Cap on cells of a two-dimensional transform.
    #[arg(long, global = true, value_parser = parse_count)]
    pub cell_cap: Option<u64>,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Write one outcome distribution here (binary, size capped).
    #[arg(long, global = true)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the circumference of an infrastructure.
    Circumference {
        /// Backend as JSON or shorthand such as `cyclic:12`.
        #[arg(long, value_parser = parse_backend)]
        backend: BackendConfig,
        #[arg(long, default_value = "1e-3", value_parser = parse_real)]
        delta: ScaledReal,
        /// Transform length override.
        #[arg(long, value_parser = parse_count)]
        q: Option<u64>,
        /// Use `q = M²` instead of the next power of two.
        #[arg(long)]
        no_pow2: bool,
    },
    /// Compute the distance of a target element.
    Dlog {
        #[arg(long, value_parser = parse_backend)]
        backend: BackendConfig,
        /// Element label, or `bs^k` for k baby steps from the origin.
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "1e-3", value_parser = parse_real)]
        delta: ScaledReal,
        /// Known circumference estimate; otherwise it is computed first.
        #[arg(long, value_parser = parse_real)]
        r_hat: Option<ScaledReal>,
        #[arg(long, value_parser = parse_count)]
        q_override: Option<u64>,
        #[arg(long, value_enum, default_value_t = KFilterArg::Auto)]
        k_filter: KFilterArg,
        /// Report the success bound at this κ.
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Regulator and fundamental solution of Pell's equation.
    Pell {
        #[arg(long = "D")]
        d: u64,
        #[arg(long, default_value = "1e-3", value_parser = parse_real)]
        delta: ScaledReal,
    },
    /// Randomized checks of the analytic lemmas.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Evaluate an analytic bound.
    Bounds {
        #[arg(long, value_enum)]
        formula: FormulaArg,
        #[arg(long = "S")]
        s: Option<f64>,
        #[arg(long)]
        q: Option<f64>,
        #[arg(long = "N")]
        n: Option<f64>,
        #[arg(long = "R")]
        r: Option<f64>,
        #[arg(long)]
        d_min: Option<f64>,
        #[arg(long = "B")]
        b: Option<u64>,
        #[arg(long, default_value_t = 0.5)]
        p_g: f64,
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Run a JSON `RunConfig`, such as the `config` field of a report.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Verify {
    Geomsum {
        #[arg(long, default_value = "100000", value_parser = parse_count)]
        trials: u64,
    },
    Coprime {
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        trials: u64,
        /// Pairs are drawn from `{1, …, n}²`.
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        n: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KFilterArg {
    Paper,
    All,
    Auto,
}

impl From<KFilterArg> for KFilter {
    fn from(k: KFilterArg) -> Self {
        match k {
            KFilterArg::Paper => KFilter::Paper,
            KFilterArg::All => KFilter::All,
            KFilterArg::Auto => KFilter::Auto,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormulaArg {
    Psuccess,
    Periodic,
    Dlog,
    DlogSimplified,
}

fn parse_backend(s: &str) -> Result<BackendConfig, String> {
    BackendConfig::parse(s).map_err(|e| e.to_string())
}

fn parse_real(s: &str) -> Result<ScaledReal, String> {
    ScaledReal::parse(s).map_err(|e| e.to_string())
}

/// Non-negative integer, also written as `1e5`.
fn parse_count(s: &str) -> Result<u64, String> {
    let v = ScaledReal::parse(s).map_err(|e| e.to_string())?;
    if v.is_negative() || v.floor() != v.ceil() {
        return Err(format!("`{s}` is not a non-negative integer"));
    }
    num_traits::ToPrimitive::to_u64(&v.floor()).ok_or_else(|| format!("`{s}` is too large"))
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("--{flag} is required for this formula"))
}

impl Cli {
    /// The run configuration this command line describes.
    pub fn into_config(self) -> Result<RunConfig, String> {
        let c = self.common;
        let pipeline = match self.command {
            Command::Run { config } => {
                let text = std::fs::read_to_string(&config).map_err(|e| format!("{}: {e}", config.display()))?;
                let mut cfg = RunConfig::parse(&text).map_err(|e| e.to_string())?;
                // outputs given on the command line take precedence
                if c.report.is_some() {
                    cfg.report = c.report;
                }
                if c.trace.is_some() {
                    cfg.trace = c.trace;
                }
                return Ok(cfg);
            }
            Command::Circumference { backend, delta, q, no_pow2 } => {
                Pipeline::Circumference { backend, delta, q, prefer_pow2: !no_pow2 }
            }
            Command::Dlog { backend, target, delta, r_hat, q_override, k_filter, kappa } => {
                Pipeline::Dlog { backend, target, delta, r_hat, q_override, k_filter: k_filter.into(), kappa }
            }
            Command::Pell { d, delta } => Pipeline::Pell { d, delta },
            Command::Verify { what: Verify::Geomsum { trials } } => Pipeline::Geomsum { trials },
            Command::Verify { what: Verify::Coprime { trials, n } } => Pipeline::Coprime { trials, n },
            Command::Bounds { formula, s, q, n, r, d_min, b, p_g, kappa } => Pipeline::Bounds {
                formula: match formula {
                    FormulaArg::Psuccess => Formula::Psuccess { s: need(s, "S")?, q },
                    FormulaArg::Periodic => Formula::Periodic {
                        n: need(n, "N")?,
                        r: need(r, "R")?,
                        d_min: need(d_min, "d-min")?,
                        q: need(q, "q")?,
                    },
                    FormulaArg::Dlog => Formula::Dlog { q: need(q, "q")? as u64, b: need(b, "B")?, p_g, kappa },
                    FormulaArg::DlogSimplified => Formula::DlogSimplified { p_g },
                },
            },
        };
        let defaults = RunConfig::parse(r#"{"pipeline":{"kind":"geomsum","trials":0}}"#).expect("valid defaults");
        Ok(RunConfig {
            seed: c.seed,
            trials_cap: c.trials_cap,
            cell_cap: c.cell_cap.unwrap_or(defaults.cell_cap),
            report: c.report,
            trace: c.trace,
            pipeline,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_accept_scientific_notation() {
        assert_eq!(parse_count("1e5"), Ok(100_000));
        assert_eq!(parse_count("42"), Ok(42));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
    }

    #[test]
    fn command_lines_map_to_configs() {
        let cli = Cli::parse_from(["infra1d", "circumference", "--backend", "cyclic:12", "--delta", "1e-3", "--seed", "7"]);
        let cfg = cli.into_config().unwrap();
        assert_eq!(cfg.seed, 7);
        assert!(matches!(cfg.pipeline, Pipeline::Circumference { prefer_pow2: true, .. }));
        let cli = Cli::parse_from(["infra1d", "bounds", "--formula", "psuccess", "--S", "80", "--q", "6561"]);
        assert_eq!(
            cli.into_config().unwrap().pipeline,
            Pipeline::Bounds { formula: Formula::Psuccess { s: 80.0, q: Some(6561.0) } }
        );
        let cli = Cli::parse_from(["infra1d", "bounds", "--formula", "periodic", "--N", "2"]);
        assert!(cli.into_config().is_err());
    }
}
