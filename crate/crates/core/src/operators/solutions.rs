//! Explicit solutions of the homogeneous shift equations on `K_θ^⊥`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;
use crate::modelspace::{Basis, KPerpBasis};

use super::builders::THETA0_ZERO_TOL;
use super::matrix::OperatorMatrix;

/// The four shift relations; each names a homogeneous equation `lhs(A) = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftRelation {
    /// `AU − U*A`.
    Intertwine,
    /// `A − U*AU*`.
    AdjointSandwich,
    /// `A − UAU`.
    Sandwich,
    /// `AU* − UA`.
    ReverseIntertwine,
}

impl ShiftRelation {
    pub const ALL: [ShiftRelation; 4] =
        [Self::Intertwine, Self::AdjointSandwich, Self::Sandwich, Self::ReverseIntertwine];

    pub fn name(self) -> &'static str {
        match self {
            Self::Intertwine => "intertwine",
            Self::AdjointSandwich => "adjoint-sandwich",
            Self::Sandwich => "sandwich",
            Self::ReverseIntertwine => "reverse-intertwine",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == name)
    }

    /// The equation as text.
    pub fn equation(self) -> &'static str {
        match self {
            Self::Intertwine => "U*A = AU",
            Self::AdjointSandwich => "A = U*AU*",
            Self::Sandwich => "A = UAU",
            Self::ReverseIntertwine => "UA = AU*",
        }
    }

    /// Evaluates the left-hand side for a finite section.
    pub fn lhs(self, a: &OperatorMatrix, u: &OperatorMatrix, u_adj: &OperatorMatrix) -> Result<OperatorMatrix> {
        match self {
            Self::Intertwine => a.compose(u)?.sub(&u_adj.compose(a)?),
            Self::AdjointSandwich => a.sub(&u_adj.compose(&a.compose(u_adj)?)?),
            Self::Sandwich => a.sub(&u.compose(&a.compose(u)?)?),
            Self::ReverseIntertwine => a.compose(u_adj)?.sub(&u.compose(a)?),
        }
    }
}

/// Free parameters of a solution family.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolutionParams {
    pub eta: LaurentSeries,
    pub psi: LaurentSeries,
    /// Needed by the `θ₀ = 0` branches of the two intertwining relations.
    pub big_phi: Option<LaurentSeries>,
}

impl SolutionParams {
    pub fn new(eta: LaurentSeries, psi: LaurentSeries, big_phi: Option<LaurentSeries>) -> Self {
        Self { eta, psi, big_phi }
    }

    pub fn is_zero(&self) -> bool {
        self.eta.is_zero() && self.psi.is_zero() && self.big_phi.as_ref().is_none_or(|p| p.is_zero())
    }
}

fn require_analytic(name: &'static str, f: &LaurentSeries) -> Result<()> {
    if f.is_analytic(0.0) {
        Ok(())
    } else {
        Err(DthoError::InvalidParameter { name, reason: format!("{f} must be analytic") })
    }
}

/// Builds a solution of `relation` from its parameters, column by column.
///
/// `θ₀ = 0` and `θ₀ ≠ 0` select different formulas; the intertwining relations
/// need `big_phi` when `θ₀ = 0`. Parameters must be analytic except `psi` in the
/// `θ₀ = 0` branches of the two sandwich relations.
pub fn build_equation_solution(
    relation: ShiftRelation,
    basis: &KPerpBasis,
    params: &SolutionParams,
) -> Result<OperatorMatrix> {
    let space = basis.space();
    let t0 = space.theta0();
    let t0c = t0.conj();
    let zero_branch = t0.norm() <= THETA0_ZERO_TOL;
    let theta = space.theta_series().clone();
    let theta_star = space.theta_star().clone();
    let theta_flip = theta.flip_j();
    let eta = &params.eta;
    let psi = &params.psi;
    // w = z̄·η̄, the conjugate of zη on the circle.
    let w = eta.conj_boundary().shift(-1);
    let one = Complex64::new(1.0, 0.0);

    let sandwich_psi_free = zero_branch && matches!(relation, ShiftRelation::AdjointSandwich | ShiftRelation::Sandwich);
    if !sandwich_psi_free {
        require_analytic("psi", psi)?;
    }
    require_analytic("eta", eta)?;
    let big_phi = match (relation, zero_branch) {
        (ShiftRelation::Intertwine | ShiftRelation::ReverseIntertwine, true) => {
            let p = params.big_phi.clone().ok_or(DthoError::MissingParameter("big_phi"))?;
            require_analytic("big_phi", &p)?;
            p
        }
        _ => LaurentSeries::zero(),
    };

    let mul_theta = |f: &LaurentSeries| space.mul_theta(f);
    let action = |h: &LaurentSeries| -> LaurentSeries {
        let (ph, qh) = (h.proj_p(), h.proj_q());
        let (jp, jq) = (ph.flip_j(), qh.flip_j());
        match (relation, zero_branch) {
            (ShiftRelation::AdjointSandwich, true) => {
                let symbol = psi * &theta_flip;
                space.proj_q_theta(&(&symbol * &qh).flip_j()).proj_p()
            }
            (ShiftRelation::AdjointSandwich, false) => {
                let zw = w.shift(-1);
                let f_eta = (&zw * &theta_star * &jp).scale(t0)
                    + (&zw * &jq).proj_q()
                    + mul_theta(&(&zw * &jq).proj_p()).scale(one / t0);
                let g = psi.shift(-1) * &theta_star * &jp;
                let g_psi =
                    mul_theta(&(psi.shift(-1) * &jq)) + (g.proj_q().scale(t0) + mul_theta(&g.proj_p())).scale(t0);
                f_eta + g_psi
            }
            (ShiftRelation::Sandwich, true) => (psi * &ph).flip_j().proj_q(),
            (ShiftRelation::Sandwich, false) => {
                let wq = &w * &jq;
                let f_eta = &w * &theta_star * &jp + (wq.proj_q() + mul_theta(&wq.proj_p()).scale(t0c)).scale(t0c);
                let g = psi * &theta_star * &jp;
                let g_psi = mul_theta(&(psi * &jq)).scale(t0c) + g.proj_q().scale(one / t0c) + mul_theta(&g.proj_p());
                f_eta + g_psi
            }
            (ShiftRelation::Intertwine, zero) => {
                let g = psi * &theta_star * &jp;
                let on_p = &w * &theta_star * &jp + g.proj_q().scale(t0) + mul_theta(&g.proj_p());
                let on_q = if zero {
                    mul_theta(&(&big_phi * &qh.shift(1)).flip_j().proj_p())
                } else {
                    let wq = &w * &jq;
                    (mul_theta(&(psi * &jq)) + wq.proj_q() + mul_theta(&wq.proj_p()).scale(one / t0)).scale(t0c)
                };
                on_p + on_q
            }
            (ShiftRelation::ReverseIntertwine, zero) => {
                let zwq = w.shift(-1) * &jq;
                let base = mul_theta(&(psi.shift(-1) * &jq)) + zwq.proj_q();
                if zero {
                    base + (&theta_star * &big_phi.shift(-1) * &jp).proj_q()
                } else {
                    let g = psi.shift(-1) * &theta_star * &jp;
                    base + mul_theta(&zwq.proj_p()).scale(t0c)
                        + (w.shift(-1) * &theta_star * &jp + g.proj_q().scale(one / t0c) + mul_theta(&g.proj_p()))
                            .scale(t0)
                }
            }
        }
    };
    let b = Basis::KPerp(basis.clone());
    let name = format!("solution[{}]", relation.name());
    Ok(OperatorMatrix::from_action(&name, &b, &b, action))
}
