use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use tanprimes::{EvalConfig, Params};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand; unset ones fall back to the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct GlobalArgs {
    /// Exponent c, 1 < c < 12/11
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Exponent theta > 1
    #[arg(long, global = true)]
    pub theta: Option<f64>,
    /// Largest precision in bits before a floor is reported undecided
    #[arg(long, global = true)]
    pub precision_cap: Option<usize>,
    /// Absolute root tolerance of the inversion
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for the randomized verify suites
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report format (default csv)
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// TOML file with any of the keys above
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    c: Option<f64>,
    theta: Option<f64>,
    #[serde(alias = "precision_cap")]
    precision_cap: Option<usize>,
    tol: Option<f64>,
    seed: Option<u64>,
    format: Option<Format>,
    output: Option<PathBuf>,
    threads: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub c: f64,
    pub theta: f64,
    pub precision_cap: usize,
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn resolve(g: &GlobalArgs) -> Result<Self> {
        let file = match &g.config {
            Some(p) => load(p)?,
            None => FileConfig::default(),
        };
        let cfg = Self {
            c: g.c.or(file.c).unwrap_or(1.05),
            theta: g.theta.or(file.theta).unwrap_or(2.0),
            precision_cap: g.precision_cap.or(file.precision_cap).unwrap_or(4096),
            tol: g.tol.or(file.tol).unwrap_or(tanprimes::sequence::DEFAULT_TOL),
            seed: g.seed.or(file.seed).unwrap_or(7),
            format: g.format.or(file.format).unwrap_or(Format::Csv),
            output: g.output.clone().or(file.output),
            threads: g.threads.or(file.threads),
        };
        Ok(cfg)
    }

    /// The theorem-range parameters, validated.
    pub fn params(&self) -> tanprimes::Result<Params> {
        Params::new(self.c, self.theta)
    }

    pub fn eval(&self) -> tanprimes::Result<EvalConfig> {
        if self.precision_cap < 64 {
            return Err(tanprimes::Error::Domain(format!("precision cap {} below 64 bits", self.precision_cap)));
        }
        Ok(EvalConfig { start_prec: 64, cap: self.precision_cap })
    }
}

fn load(p: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", p.display()))
}
