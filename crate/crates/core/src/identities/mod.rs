//! Operator identities evaluated as finite-section residuals.
//!
//! Every check returns a [`ResidualReport`]: an interior-restricted residual,
//! a tolerance, optional structural assertions (numerical rank, an "iff"
//! direction) and named scalar diagnostics.

mod characterization;
mod defect;
mod otoeplitz;
mod shifts;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fourier::LaurentSeries;
use crate::linalg::{numerical_rank, RANK_TOL};
use crate::modelspace::KPerpBasis;
use crate::parse::format_symbol;

pub use characterization::{boundary_conditions, check_characterization, BoundaryCondition};
pub use defect::{check_defect, check_defect_against, defect_data, defect_rhs, DefectData};
pub use otoeplitz::{check_otoeplitz_laws, OtoeplitzWindow};
pub use shifts::{
    check_intertwining, check_shift_powers, check_unitary_defects, make_z_theta_symbol, z_theta_residual,
    MEMBERSHIP_TOL,
};

/// Version of the serialized report layout.
pub const SCHEMA_VERSION: u32 = 1;

/// How many leading singular values a report keeps.
pub const REPORTED_SIGMAS: usize = 6;

/// A structural claim attached to a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub claim: String,
    pub holds: bool,
}

/// Outcome of one identity check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub schema_version: u32,
    pub tag: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub case: String,
    /// Frobenius norm over the certified columns.
    pub residual: f64,
    pub interior_cols: usize,
    /// Leading singular values, when a rank is asserted.
    #[serde(default)]
    pub sigma: Vec<f64>,
    pub pass: bool,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assertions: Vec<Assertion>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
}

impl ResidualReport {
    pub fn new(tag: impl Into<String>, residual: f64, interior_cols: usize, tol: f64) -> Self {
        let mut report = Self {
            schema_version: SCHEMA_VERSION,
            tag: tag.into(),
            case: String::new(),
            residual,
            interior_cols,
            sigma: Vec::new(),
            pass: false,
            tol,
            assertions: Vec::new(),
            details: BTreeMap::new(),
        };
        report.refresh();
        report
    }

    pub fn with_case(mut self, case: impl Into<String>) -> Self {
        self.case = case.into();
        self
    }

    pub fn with_detail(mut self, key: &str, value: f64) -> Self {
        self.details.insert(key.to_string(), value);
        self
    }

    pub fn with_assertion(mut self, claim: impl Into<String>, holds: bool) -> Self {
        self.assertions.push(Assertion { claim: claim.into(), holds });
        self.refresh();
        self
    }

    /// Records the leading singular values and asserts `rank ≤ bound`, counting
    /// singular values above both `RANK_TOL·σ₁` and the report tolerance.
    pub fn with_rank_bound(mut self, sv: &[f64], bound: usize) -> Self {
        let rank = numerical_rank(sv, RANK_TOL).min(sv.iter().filter(|&&s| s > self.tol).count());
        self.sigma = sv.iter().take(REPORTED_SIGMAS).copied().collect();
        self.details.insert("rank".into(), rank as f64);
        self.with_assertion(format!("numerical rank <= {bound}"), rank <= bound)
    }

    pub fn detail(&self, key: &str) -> Option<f64> {
        self.details.get(key).copied()
    }

    fn refresh(&mut self) {
        self.pass = self.residual <= self.tol && self.assertions.iter().all(|a| a.holds);
    }
}

/// `theta=...; phi=...` style case label.
pub(crate) fn case_label(basis: &KPerpBasis, symbols: &[(&str, &LaurentSeries)]) -> String {
    let mut parts = vec![format!("theta={}", basis.theta()), format!("nneg={}, man={}", basis.n_neg(), basis.m_an())];
    parts.extend(symbols.iter().map(|(name, f)| format!("{name}={}", format_symbol(f))));
    parts.join("; ")
}
