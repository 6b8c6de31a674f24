//! Batch driver: every module as a subcommand, CSV or JSON on stdout or a file.

mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;
use tanprimes::report::{json_document, Table};
use tanprimes::Error;

use config::{Format, GlobalArgs, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "tanprimes", version, about = "Primes of the form [n^c tan^theta(log n)]")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Branch windows [Δ1, Δ2) for the given scales
    Windows(commands::WindowsArgs),
    /// Certified terms f(n) on the window of x
    Terms(commands::TermsArgs),
    /// Roots m'_t, m''_t of g(y) = t and g(y) = t + 1
    Invert(commands::InvertArgs),
    /// S_c(x) and its split into Γ + Σ
    Count(commands::CountArgs),
    /// π_c(x) = #{n ≤ x : [n^c] prime}
    PiC(commands::PiCArgs),
    /// Density series S_c(x) log x / x, optionally with a plot file
    Density(commands::DensityArgs),
    /// Coefficients of the trigonometric approximation of ψ
    Vaaler(commands::VaalerArgs),
    /// Direct exponential sums against the derivative-test bound
    Sweep(commands::SweepArgs),
    /// One Type I, I-log or II bilinear sum against its lemma bound
    Typesum(commands::TypesumArgs),
    /// Heath-Brown decomposition of Σ Λ(n) G(n)
    Hb(commands::HbArgs),
    /// Property suites: vaaler, weyl, vdc, typesums, hb, derivative or all
    Verify(commands::VerifyArgs),
}

/// How a command finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok = 0,
    Undecided = 1,
    CheckFailed = 2,
}

pub struct Outcome {
    pub kind: &'static str,
    pub table: Table,
    pub data: Value,
    pub status: Status,
    /// Extra plain-text files (path, contents).
    pub files: Vec<(std::path::PathBuf, String)>,
}

const EXIT_USAGE: u8 = 3;

fn error_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::FloorUndecidable { .. } | Error::PrecisionExhausted { .. }) => 1,
        Some(Error::Domain(_) | Error::InvalidParams(_) | Error::Param { .. } | Error::Range(_) | Error::Resource(_)) => {
            EXIT_USAGE
        }
        Some(_) => 2,
        None => EXIT_USAGE,
    }
}

fn emit(cfg: &RunConfig, out: &Outcome) -> anyhow::Result<()> {
    let text = match cfg.format {
        Format::Csv => out.table.to_csv(),
        Format::Json => {
            let mut doc = json_document(out.kind, &out.data);
            doc["config"] = serde_json::to_value(cfg)?;
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    match &cfg.output {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    for (p, s) in &out.files {
        std::fs::write(p, s)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Status, (anyhow::Error, u8)> {
    let cfg = RunConfig::resolve(&cli.global).map_err(|e| (e, EXIT_USAGE))?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| (anyhow::anyhow!(e), EXIT_USAGE))?;
    }
    let out = match &cli.cmd {
        Cmd::Windows(a) => commands::windows(&cfg, a),
        Cmd::Terms(a) => commands::terms(&cfg, a),
        Cmd::Invert(a) => commands::invert(&cfg, a),
        Cmd::Count(a) => commands::count(&cfg, a),
        Cmd::PiC(a) => commands::pi_c(&cfg, a),
        Cmd::Density(a) => commands::density(&cfg, a),
        Cmd::Vaaler(a) => commands::vaaler(&cfg, a),
        Cmd::Sweep(a) => commands::sweep(&cfg, a),
        Cmd::Typesum(a) => commands::typesum(&cfg, a),
        Cmd::Hb(a) => commands::hb(&cfg, a),
        Cmd::Verify(a) => commands::verify(&cfg, a),
    }
    .map_err(|e| {
        let code = error_code(&e);
        (e, code)
    })?;
    emit(&cfg, &out).map_err(|e| (e, 2))?;
    Ok(out.status)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(s) => ExitCode::from(s as u8),
        Err((e, code)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}
