//! `dtho`: run identity suites and dump finite sections of dual truncated
//! Hankel operators.
//!
//! Exit status: 0 when every check passes, 1 when a check fails (the report
//! is still written), 2 for configuration or usage errors.

mod config;
mod output;
mod suite;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dtho_core::analysis::{norm_convergence_study, spectrum};
use dtho_core::identities::SCHEMA_VERSION;
use dtho_core::operators::{build_compressed_shift, build_dtho, build_dtho_adjoint, build_dtto};
use dtho_core::{Basis, OperatorMatrix, ResidualReport};

use config::{FileConfig, Overrides, RunConfig};
use suite::Outcome;

#[derive(Parser, Debug)]
#[command(name = "dtho", version, about = "Finite-section checks for dual truncated Hankel operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run identity checks and write a JSON array of reports.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Pair each relation with the wrong right-hand side; every nonzero symbol must fail.
        #[arg(long)]
        self_test: bool,
    },
    /// Print the matrix of an operator as CSV.
    Matrix {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = OperatorKind::Dtho)]
        operator: OperatorKind,
    },
    /// Print finite-section norms of the DTHO against the sup norm as CSV.
    Norm {
        #[command(flatten)]
        common: Common,
        /// Truncation sizes N (N_neg = M_an = N).
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
    },
    /// Print the eigenvalues of an operator as CSV.
    Spectrum {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = OperatorKind::Dtho)]
        operator: OperatorKind,
    },
    /// Summarize a JSON report file written by `verify`.
    Report {
        /// Report file.
        input: PathBuf,
        /// Write a CSV summary here instead of printing lines.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inner function: `z^n` or `blaschke:zeros=a,b;c=u`. Repeatable.
    #[arg(long)]
    theta: Vec<String>,
    /// Symbol as `[(k,re,im),...]`. Repeatable.
    #[arg(long)]
    symbol: Vec<String>,
    /// Second symbol for pair checks.
    #[arg(long)]
    psi: Option<String>,
    #[arg(long)]
    nneg: Option<usize>,
    #[arg(long)]
    man: Option<usize>,
    #[arg(long)]
    expansion_order: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Check tags or groups, comma separated.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OperatorKind {
    Shift,
    ShiftAdjoint,
    Dtho,
    DthoAdjoint,
    Dtto,
    Identity,
}

/// An error that maps to exit status 1 rather than 2.
#[derive(Debug)]
struct ChecksFailed(usize);

impl std::fmt::Display for ChecksFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} check(s) failed", self.0)
    }
}

impl std::error::Error for ChecksFailed {}

fn resolve(common: Common, sizes: Vec<usize>, grid: bool) -> anyhow::Result<RunConfig> {
    let file = match &common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let mut flags = Overrides {
        theta: common.theta,
        symbol: common.symbol,
        psi: common.psi,
        nneg: common.nneg,
        man: common.man,
        expansion_order: common.expansion_order,
        tol: common.tol,
        suite: common.suite,
        out: common.out,
        sizes,
    };
    if !grid {
        // Single-operator commands default to one θ and one symbol.
        if flags.theta.is_empty() && file.theta.is_none() {
            flags.theta = vec!["z^2".into()];
        }
        if flags.symbol.is_empty() && file.symbol.is_none() {
            flags.symbol = vec![config::DEFAULT_SYMBOLS[0].into()];
        }
    }
    let config = RunConfig::resolve(flags, file)?;
    if !grid && (config.thetas.len() != 1 || config.symbols.len() != 1) {
        bail!("fields `theta` and `symbol`: this command takes exactly one of each");
    }
    Ok(config)
}

fn operator(config: &RunConfig, kind: OperatorKind) -> anyhow::Result<OperatorMatrix> {
    let basis = config.basis(&config.thetas[0].1)?;
    let phi = &config.symbols[0];
    Ok(match kind {
        OperatorKind::Shift => build_compressed_shift(&basis).0,
        OperatorKind::ShiftAdjoint => build_compressed_shift(&basis).1,
        OperatorKind::Dtho => build_dtho(phi, &basis),
        OperatorKind::DthoAdjoint => build_dtho_adjoint(phi, &basis),
        OperatorKind::Dtto => build_dtto(phi, &basis),
        OperatorKind::Identity => OperatorMatrix::identity(&Basis::KPerp(basis)),
    })
}

fn finish(outcomes: &[Outcome], out: Option<&std::path::Path>) -> anyhow::Result<()> {
    for o in outcomes {
        eprintln!("{}", output::summary_line(o));
    }
    let reports: Vec<ResidualReport> = outcomes
        .iter()
        .filter_map(|o| match o {
            Outcome::Report(r) => Some(r.clone()),
            Outcome::Skipped { .. } => None,
        })
        .collect();
    output::emit(out, &output::reports_json(&reports)?)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    eprintln!("{} report(s), {} failed", reports.len(), failed);
    if failed > 0 {
        return Err(ChecksFailed(failed).into());
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Verify { common, self_test } => {
            let config = resolve(common, Vec::new(), true)?;
            let outcomes = if self_test { suite::run_self_test(&config)? } else { suite::run_suite(&config)? };
            finish(&outcomes, config.out.as_deref())
        }
        Command::Matrix { common, operator: kind } => {
            let config = resolve(common, Vec::new(), false)?;
            output::emit(config.out.as_deref(), &operator(&config, kind)?.to_csv())
        }
        Command::Norm { common, sizes } => {
            let config = resolve(common, sizes, false)?;
            let table = norm_convergence_study(&config.symbols[0], &config.thetas[0].1, &config.sizes)?;
            output::emit(config.out.as_deref(), &table.to_csv())
        }
        Command::Spectrum { common, operator: kind } => {
            let config = resolve(common, Vec::new(), false)?;
            let ev = spectrum(&operator(&config, kind)?);
            output::emit(config.out.as_deref(), &output::spectrum_csv(&ev))
        }
        Command::Report { input, out } => {
            let text = std::fs::read_to_string(&input).with_context(|| format!("reading {}", input.display()))?;
            let reports: Vec<ResidualReport> =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", input.display()))?;
            if let Some(r) = reports.iter().find(|r| r.schema_version != SCHEMA_VERSION) {
                bail!("report `{}` has schema_version {}, expected {SCHEMA_VERSION}", r.tag, r.schema_version);
            }
            match &out {
                Some(path) => output::write_atomic(path, &output::summary_csv(&reports))?,
                None => {
                    for r in &reports {
                        println!("{}", output::summary_line(&Outcome::Report(r.clone())));
                    }
                }
            }
            let failed = reports.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                return Err(ChecksFailed(failed).into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<ChecksFailed>() => {
            eprintln!("dtho: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("dtho: {e:#}");
            ExitCode::from(2)
        }
    }
}
