//! Run configuration: a JSON file merged with command-line overrides.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use dtho_core::parse::{parse_inner, parse_symbol};
use dtho_core::{InnerFunction, KPerpBasis, LaurentSeries};
use serde::Deserialize;

use crate::suite::Check;

/// Accepts `"x"` or `["x", "y"]`.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<String> {
        match self {
            Self::One(s) => vec![s],
            Self::Many(v) => v,
        }
    }
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub theta: Option<OneOrMany>,
    pub symbol: Option<OneOrMany>,
    pub psi: Option<String>,
    pub nneg: Option<usize>,
    pub man: Option<usize>,
    pub expansion_order: Option<usize>,
    pub tol: Option<f64>,
    pub suite: Option<OneOrMany>,
    pub out: Option<PathBuf>,
    pub sizes: Option<Vec<usize>>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("config {}", path.display()))
    }
}

/// Raw command-line values; `None` defers to the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub theta: Vec<String>,
    pub symbol: Vec<String>,
    pub psi: Option<String>,
    pub nneg: Option<usize>,
    pub man: Option<usize>,
    pub expansion_order: Option<usize>,
    pub tol: Option<f64>,
    pub suite: Vec<String>,
    pub out: Option<PathBuf>,
    pub sizes: Vec<usize>,
}

pub const DEFAULT_THETAS: [&str; 5] =
    ["z^2", "z^3", "blaschke:zeros=0.5", "blaschke:zeros=0.5i", "blaschke:zeros=0,0.5"];
pub const DEFAULT_SYMBOLS: [&str; 3] = ["[(2,1),(-1,2)]", "[(-2,1)]", "[(1,1),(-1,1)]"];
pub const DEFAULT_PSI: &str = "[(1,1)]";
pub const DEFAULT_SIZES: [usize; 5] = [8, 16, 32, 64, 128];

/// A validated configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub thetas: Vec<(String, InnerFunction)>,
    pub symbols: Vec<LaurentSeries>,
    pub psi: LaurentSeries,
    pub nneg: Option<usize>,
    pub man: Option<usize>,
    pub expansion_order: Option<usize>,
    pub tol: Option<f64>,
    pub suite: Vec<Check>,
    pub out: Option<PathBuf>,
    pub sizes: Vec<usize>,
}

fn pick<T>(flag: Vec<T>, file: Option<Vec<T>>) -> Option<Vec<T>> {
    if flag.is_empty() {
        file
    } else {
        Some(flag)
    }
}

impl RunConfig {
    /// Merges flags over the file and validates every field.
    pub fn resolve(flags: Overrides, file: FileConfig) -> anyhow::Result<Self> {
        let theta_text = pick(flags.theta, file.theta.map(OneOrMany::into_vec))
            .unwrap_or_else(|| DEFAULT_THETAS.iter().map(|s| s.to_string()).collect());
        let thetas = theta_text
            .into_iter()
            .map(|t| parse_inner(&t).map(|f| (t.clone(), f)).with_context(|| format!("field `theta`: `{t}`")))
            .collect::<anyhow::Result<Vec<_>>>()?;

        let symbol_text = pick(flags.symbol, file.symbol.map(OneOrMany::into_vec))
            .unwrap_or_else(|| DEFAULT_SYMBOLS.iter().map(|s| s.to_string()).collect());
        let symbols = symbol_text
            .iter()
            .map(|s| parse_symbol(s).with_context(|| format!("field `symbol`: `{s}`")))
            .collect::<anyhow::Result<Vec<_>>>()?;

        let psi_text = flags.psi.or(file.psi).unwrap_or_else(|| DEFAULT_PSI.to_string());
        let psi = parse_symbol(&psi_text).with_context(|| format!("field `psi`: `{psi_text}`"))?;

        let suite_text = pick(flags.suite, file.suite.map(OneOrMany::into_vec)).unwrap_or_else(|| vec!["all".into()]);
        let mut suite = Vec::new();
        for tag in suite_text.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
            for check in Check::expand(tag).with_context(|| format!("field `suite`: unknown tag `{tag}`"))? {
                if !suite.contains(&check) {
                    suite.push(check);
                }
            }
        }

        let tol = flags.tol.or(file.tol);
        if let Some(t) = tol {
            if !(t.is_finite() && t > 0.0) {
                bail!("field `tol`: must be a positive finite number, got {t}");
            }
        }
        let sizes = pick(flags.sizes, file.sizes).unwrap_or_else(|| DEFAULT_SIZES.to_vec());
        if sizes.contains(&0) {
            bail!("field `sizes`: truncation sizes must be positive");
        }
        let config = Self {
            thetas,
            symbols,
            psi,
            nneg: flags.nneg.or(file.nneg),
            man: flags.man.or(file.man),
            expansion_order: flags.expansion_order.or(file.expansion_order),
            tol,
            suite,
            out: flags.out.or(file.out),
            sizes,
        };
        for (text, theta) in &config.thetas {
            config.basis(theta).with_context(|| format!("field `nneg`/`man` for theta `{text}`"))?;
        }
        Ok(config)
    }

    /// Truncation for `θ`: 32/32 for monomials, 64/16 for Blaschke products
    /// unless overridden.
    pub fn basis(&self, theta: &InnerFunction) -> dtho_core::Result<KPerpBasis> {
        let (n, m) = if theta.is_exact() { (32, 32) } else { (64, 16) };
        KPerpBasis::new(theta.clone(), self.nneg.unwrap_or(n), self.man.unwrap_or(m), self.expansion_order)
    }

    /// `--tol`, or `1e-12` in exact mode and `1e-10 + tail` otherwise.
    pub fn tol_for(&self, basis: &KPerpBasis) -> f64 {
        self.tol.unwrap_or_else(|| if basis.space().is_exact() { 1e-12 } else { 1e-10 + basis.space().tail_bound() })
    }
}
