//! Norms, products, commutation, the star-norm identity and symbol recovery
//! for finite sections of `𝓗_φ`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;
use crate::identities::{case_label, z_theta_residual, ResidualReport, MEMBERSHIP_TOL};
use crate::inner::InnerFunction;
use crate::linalg::{eigenvalues, hermitian_min_eigenvalue, singular_values, spectral_norm};
use crate::modelspace::{Basis, KPerpBasis};
use crate::operators::{
    build_compressed_shift, build_dtho, build_dtho_adjoint, rank_one, OperatorMatrix, RankOneSpec, THETA0_ZERO_TOL,
};

/// Grid used for sup-norm targets unless the band needs more points.
pub const SUP_GRID: usize = 4096;

/// Largest singular value of the section.
pub fn operator_norm(a: &OperatorMatrix) -> f64 {
    spectral_norm(&a.entries)
}

/// Eigenvalues of the section, sorted by modulus then argument.
pub fn spectrum(a: &OperatorMatrix) -> Vec<Complex64> {
    eigenvalues(&a.entries)
}

fn sup_norm(f: &LaurentSeries) -> Result<crate::fourier::SupNormEstimate> {
    f.sup_norm_estimate(SUP_GRID.max(2 * f.bandwidth() as usize + 1))
}

/// One truncation level of a norm study.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub norm: f64,
    pub target: f64,
    pub gap: f64,
}

/// Finite-section norms of `𝓗_φ` against `‖φ‖_∞`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Bound on `|target − ‖φ‖_∞|` from the sampling grid.
    pub target_error_bound: f64,
}

impl ConvergenceTable {
    /// Norms never decrease by more than `slack` as `N` grows.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].norm >= w[0].norm - slack)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,norm,target,gap\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.n, r.norm, r.target, r.gap);
        }
        out
    }
}

/// `‖𝓗_φ‖` on `N_neg = M_an = N` sections for each `N`.
pub fn norm_convergence_study(phi: &LaurentSeries, theta: &InnerFunction, ns: &[usize]) -> Result<ConvergenceTable> {
    let sup = sup_norm(phi)?;
    let rows = ns
        .iter()
        .map(|&n| {
            let basis = KPerpBasis::new(theta.clone(), n, n, None)?;
            let norm = operator_norm(&build_dtho(phi, &basis));
            Ok(ConvergenceRow { n, norm, target: sup.value, gap: sup.value - norm })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceTable { rows, target_error_bound: sup.error_bound })
}

/// `‖Σ 𝓗_{φᵢ}𝓗_{ψᵢ}‖ ≥ ‖Σ φ̆ᵢψᵢ‖_∞ − ε(N)` where
/// `ε(N) = Σ bandwidth(φᵢ)‖φᵢ‖₁‖ψᵢ‖₁ / interior width`.
pub fn product_lower_bound_check(
    pairs: &[(LaurentSeries, LaurentSeries)],
    basis: &KPerpBasis,
) -> Result<ResidualReport> {
    let b = Basis::KPerp(basis.clone());
    let mut sum = OperatorMatrix::zeros("product_sum", &b, &b);
    let mut symbol = LaurentSeries::zero();
    let mut budget = 0.0;
    for (phi, psi) in pairs {
        sum = sum.add(&build_dtho(phi, basis).compose(&build_dtho(psi, basis))?)?;
        symbol = symbol + phi.flip_j() * psi;
        budget += phi.bandwidth() as f64 * phi.l1_norm() * psi.l1_norm();
    }
    let width = sum.interior().len().max(1);
    let epsilon = budget / width as f64;
    let norm = operator_norm(&sum);
    let bound = sup_norm(&symbol)?;
    let tol = epsilon + 1e-12 * (1.0 + bound.value);
    let case = pairs
        .iter()
        .enumerate()
        .map(|(i, (phi, psi))| format!("pair{i}: phi={phi}, psi={psi}"))
        .collect::<Vec<_>>()
        .join("; ");
    Ok(ResidualReport::new("product-lower-bound", (bound.value - norm).max(0.0), sum.interior().len(), tol)
        .with_case(format!("{}; {case}", case_label(basis, &[])))
        .with_detail("norm", norm)
        .with_detail("bound", bound.value)
        .with_detail("epsilon", epsilon)
        .with_detail("sup-error-bound", bound.error_bound))
}

fn require_product_hypotheses(phi: &LaurentSeries, psi: &LaurentSeries, basis: &KPerpBasis) -> Result<()> {
    let space = basis.space();
    if !space.theta().is_symmetric(1e-12) {
        return Err(DthoError::Hypothesis(format!("{} is not symmetric", space.theta())));
    }
    if space.theta0().norm() > THETA0_ZERO_TOL {
        return Err(DthoError::Hypothesis("the rank-one product identity needs theta0 = 0".into()));
    }
    for (name, f) in [("phi", phi), ("psi", psi)] {
        let r = z_theta_residual(space, f);
        if r > MEMBERSHIP_TOL * (1.0 + f.l2_norm()) {
            return Err(DthoError::Hypothesis(format!("{name} = {f} is not in Z_theta (residual {r:e})")));
        }
    }
    Ok(())
}

fn qtj_theta(basis: &KPerpBasis, f: &LaurentSeries) -> LaurentSeries {
    let space = basis.space();
    space.proj_q_theta(&space.mul_theta(f).flip_j())
}

/// `Q_θJ(φθ) ⊗ Q_θJ(ψ*θ)`.
fn product_rank_one(phi: &LaurentSeries, psi: &LaurentSeries, basis: &KPerpBasis) -> OperatorMatrix {
    let spec = RankOneSpec::new(qtj_theta(basis, phi), qtj_theta(basis, &psi.star()));
    rank_one(&spec, &Basis::KPerp(basis.clone()))
}

/// `T − U*TU` for a section `T`.
fn shift_drift(t: &OperatorMatrix, basis: &KPerpBasis) -> Result<OperatorMatrix> {
    let (u, u_adj) = build_compressed_shift(basis);
    t.sub(&u_adj.compose(&t.compose(&u)?)?)
}

fn product(phi: &LaurentSeries, psi: &LaurentSeries, basis: &KPerpBasis) -> Result<OperatorMatrix> {
    build_dtho(phi, basis).compose(&build_dtho(psi, basis))
}

/// `𝓗_φ𝓗_ψ − U*𝓗_φ𝓗_ψU = Q_θJ(φθ) ⊗ Q_θJ(ψ*θ)` for symmetric `θ` with
/// `θ₀ = 0` and `φ, ψ ∈ Z_θ`; the left side has rank at most one.
pub fn check_rank_one_product(
    phi: &LaurentSeries,
    psi: &LaurentSeries,
    basis: &KPerpBasis,
    tol: f64,
) -> Result<ResidualReport> {
    require_product_hypotheses(phi, psi, basis)?;
    let lhs = shift_drift(&product(phi, psi, basis)?, basis)?;
    let diff = lhs.sub(&product_rank_one(phi, psi, basis))?;
    let sv = singular_values(&lhs.interior_block());
    Ok(ResidualReport::new("rank-one-product", diff.interior_frobenius(), diff.interior().len(), tol)
        .with_case(case_label(basis, &[("phi", phi), ("psi", psi)]))
        .with_rank_bound(&sv, 1))
}

/// Size of the Brown–Halmos defect of `𝓗_φ𝓗_ψ`; it vanishes exactly when a symbol does.
pub fn brown_halmos_product_test(
    phi: &LaurentSeries,
    psi: &LaurentSeries,
    basis: &KPerpBasis,
    tol: f64,
) -> Result<ResidualReport> {
    require_product_hypotheses(phi, psi, basis)?;
    let lhs = shift_drift(&product(phi, psi, basis)?, basis)?;
    let diff = lhs.sub(&product_rank_one(phi, psi, basis))?;
    let defect = lhs.interior_frobenius();
    let trivial = phi.is_zero() || psi.is_zero();
    Ok(ResidualReport::new("brown-halmos-product", diff.interior_frobenius(), diff.interior().len(), tol)
        .with_case(case_label(basis, &[("phi", phi), ("psi", psi)]))
        .with_detail("defect-norm", defect)
        .with_assertion("Brown-Halmos identity holds iff phi = 0 or psi = 0", (defect <= tol) == trivial))
}

fn proportional(phi: &LaurentSeries, psi: &LaurentSeries) -> bool {
    if phi.is_zero() || psi.is_zero() {
        return true;
    }
    let c = psi.inner(phi) / phi.inner(phi);
    (psi - &phi.scale(c)).l2_norm() <= 1e-12 * (1.0 + psi.l2_norm())
}

/// Commutator of `𝓗_φ` and `𝓗_ψ`: reports its size, checks
/// `C − U*CU` against the difference of the two rank-one products, and
/// asserts the commutator vanishes exactly when the symbols are proportional.
pub fn commutation_test(
    phi: &LaurentSeries,
    psi: &LaurentSeries,
    basis: &KPerpBasis,
    tol: f64,
) -> Result<ResidualReport> {
    require_product_hypotheses(phi, psi, basis)?;
    let commutator = product(phi, psi, basis)?.sub(&product(psi, phi, basis)?)?;
    let difference = product_rank_one(phi, psi, basis).sub(&product_rank_one(psi, phi, basis))?;
    let diff = shift_drift(&commutator, basis)?.sub(&difference)?;
    let norm = commutator.interior_frobenius();
    Ok(ResidualReport::new("commutation", diff.interior_frobenius(), diff.interior().len(), tol)
        .with_case(case_label(basis, &[("phi", phi), ("psi", psi)]))
        .with_detail("commutator-norm", norm)
        .with_detail("rank-one-difference-norm", difference.interior_frobenius())
        .with_assertion("commute iff proportional", (norm <= tol) == proportional(phi, psi)))
}

fn coords_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Star-norm identity `‖𝓗_φ* f*‖ = ‖𝓗_φ f‖` over every certified basis vector
/// and a few fixed complex combinations of them, with self-commutator
/// diagnostics. Needs `θ* = θ`.
pub fn hyponormality_analysis(phi: &LaurentSeries, basis: &KPerpBasis, tol: f64) -> Result<ResidualReport> {
    let theta = basis.theta();
    if !theta.is_symmetric(1e-12) {
        return Err(DthoError::Hypothesis(format!("{theta} is not symmetric")));
    }
    let b = Basis::KPerp(basis.clone());
    let h = build_dtho(phi, basis);
    let h_adj = build_dtho_adjoint(phi, basis);
    let common: Vec<usize> = h.interior().iter().copied().filter(|&j| h_adj.is_interior(j)).collect();
    let n = b.dim();

    let mut vectors: Vec<Vec<Complex64>> = common
        .iter()
        .map(|&j| {
            let mut v = vec![Complex64::new(0.0, 0.0); n];
            v[j] = Complex64::new(1.0, 0.0);
            v
        })
        .collect();
    for t in 1..=4 {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for (i, &j) in common.iter().enumerate() {
            v[j] = Complex64::from_polar(1.0 / (1.0 + i as f64), 0.7 * (t * (i + 1)) as f64);
        }
        vectors.push(v);
    }
    let mut worst = 0.0f64;
    for v in &vectors {
        let f = b.from_coords(v);
        let f_star = b.to_coords(&f.star());
        let lhs = coords_norm(&h_adj.apply_coords(&f_star.values));
        let rhs = coords_norm(&h.apply_coords(v));
        worst = worst.max((lhs - rhs).abs() + f_star.residual);
    }

    let commutator = h_adj.compose(&h)?.sub(&h.compose(&h_adj)?)?;
    let keep: Vec<usize> = commutator.interior().to_vec();
    let block = DMatrix::from_fn(keep.len(), keep.len(), |i, j| commutator.entries[(keep[i], keep[j])]);
    Ok(ResidualReport::new("star-norm-identity", worst, common.len(), tol)
        .with_case(case_label(basis, &[("phi", phi)]))
        .with_detail("vectors-checked", vectors.len() as f64)
        .with_detail("self-commutator-norm", commutator.interior_frobenius())
        .with_detail("self-commutator-min-eigenvalue", hermitian_min_eigenvalue(&block)))
}

/// A symbol read back from a section, with the spread of its redundant entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolRecovery {
    pub symbol: LaurentSeries,
    /// Largest disagreement between two entries that should be equal.
    pub inconsistency: f64,
    /// `sqrt(Σ |entry − mean|²)` over all entries.
    pub residual: f64,
}

/// Reads every entry of a section over a `z^n` basis as a Fourier coefficient
/// of the symbol and reconciles the redundant readings by their mean.
pub fn read_symbol(a: &OperatorMatrix) -> Result<SymbolRecovery> {
    let basis = match (&a.row_basis, &a.col_basis) {
        (Basis::KPerp(r), Basis::KPerp(c)) if r == c => r,
        _ => return Err(DthoError::BasisMismatch("symbol recovery needs a square K_theta-perp section".into())),
    };
    let n = match basis.theta() {
        InnerFunction::Monomial { n } => *n as i64,
        other => {
            return Err(DthoError::InvalidParameter {
                name: "theta",
                reason: format!("symbol recovery needs theta = z^n, got {other}"),
            })
        }
    };
    let n_neg = basis.n_neg();
    // z̄^k ↦ (true, k), θz^m ↦ (false, m).
    let position = |i: usize| if i < n_neg { (true, i as i64 + 1) } else { (false, (i - n_neg) as i64) };
    let mut groups: BTreeMap<i64, Vec<Complex64>> = BTreeMap::new();
    for col in 0..a.ncols() {
        for row in 0..a.nrows() {
            let index = match (position(row), position(col)) {
                ((true, j), (true, k)) => j + k,
                ((true, j), (false, m)) => j - m - n,
                ((false, i), (true, k)) => k - n - i,
                ((false, i), (false, m)) => -2 * n - i - m,
            };
            groups.entry(index).or_default().push(a.entries[(row, col)]);
        }
    }
    let mut inconsistency = 0.0f64;
    let mut sq = 0.0;
    let mut terms = Vec::with_capacity(groups.len());
    for (index, values) in &groups {
        let mean = values.iter().sum::<Complex64>() / values.len() as f64;
        for (i, x) in values.iter().enumerate() {
            sq += (x - mean).norm_sqr();
            for y in &values[i + 1..] {
                inconsistency = inconsistency.max((x - y).norm());
            }
        }
        terms.push((*index, mean));
    }
    Ok(SymbolRecovery { symbol: LaurentSeries::from_terms(terms), inconsistency, residual: sq.sqrt() })
}

/// Recovers `φ` from a section of `𝓗_φ` over a `z^n` basis; fails with
/// [`DthoError::NotADtho`] when redundant entries disagree by more than `tol`.
pub fn recover_symbol(a: &OperatorMatrix, tol: f64) -> Result<LaurentSeries> {
    let r = read_symbol(a)?;
    if r.inconsistency > tol {
        return Err(DthoError::NotADtho { inconsistency: r.inconsistency });
    }
    Ok(r.symbol)
}
