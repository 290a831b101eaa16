//! Rank-two defects of `𝓗_φ` against the four shift relations.

use num_complex::Complex64;

use crate::error::Result;
use crate::fourier::LaurentSeries;
use crate::linalg::singular_values;
use crate::modelspace::{Basis, KPerpBasis, ModelSpace};
use crate::operators::{
    build_compressed_shift, build_dtho, rank_one, OperatorMatrix, RankOneSpec, ShiftRelation, THETA0_ZERO_TOL,
};

use super::{case_label, ResidualReport};

/// Ingredients of a defect right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectData {
    pub relation: ShiftRelation,
    /// Rank-one pieces `f ⊗ g`, summed.
    pub terms: Vec<RankOneSpec>,
    /// Coupling scalar, for the two sandwich relations.
    pub delta: Option<Complex64>,
    /// The same scalar along an independent route, when one is known.
    pub delta_check: Option<Complex64>,
}

fn qtj(space: &ModelSpace, f: &LaurentSeries) -> LaurentSeries {
    space.proj_q_theta(&f.flip_j())
}

/// Rank-one terms of `lhs(𝓗_φ)` for `relation`.
pub fn defect_data(relation: ShiftRelation, phi: &LaurentSeries, space: &ModelSpace) -> DefectData {
    let theta = space.theta_series();
    let t0 = space.theta0();
    let t0c = t0.conj();
    let one = LaurentSeries::one();
    let zbar = LaurentSeries::monomial(-1);
    let phi_star = phi.star();
    let theta_minus_t0 = theta - &LaurentSeries::constant(t0);
    let (terms, delta, delta_check) = match relation {
        ShiftRelation::Intertwine => {
            let alpha = |f: &LaurentSeries| f - &(f * theta).scale(t0c);
            let terms = vec![
                RankOneSpec::new(zbar.clone(), qtj(space, &alpha(&phi_star))),
                RankOneSpec::new(-qtj(space, &alpha(phi)), zbar),
            ];
            (terms, None, None)
        }
        ShiftRelation::AdjointSandwich => {
            let weight = &one - &theta.flip_j().scale(t0c);
            let beta = space.proj_q_theta(&(phi.conj_boundary().shift(1) * weight));
            let beta_perp = &beta - &theta.scale(beta.inner(theta));
            let eta = phi * &theta_minus_t0;
            let j_phi = phi.shift(-1).flip_j();
            let delta = t0 * (j_phi.coeff(0) - t0 * (space.theta_bar() * &j_phi).coeff(0));
            let delta_check = t0 * (phi.coeff(1) - t0 * (phi * space.theta_star()).coeff(1));
            let terms = vec![
                RankOneSpec::new(zbar.clone(), beta_perp),
                RankOneSpec::new(qtj(space, &eta) + zbar.scale(delta), theta.clone()),
            ];
            (terms, Some(delta), Some(delta_check))
        }
        ShiftRelation::Sandwich => {
            let a = qtj(space, &(&phi_star * &theta_minus_t0));
            let a_perp = &a - &zbar.scale(a.inner(&zbar));
            let theta_star_shifted = space.theta_star() - &LaurentSeries::constant(t0c);
            let delta = t0c * (phi * theta * theta_star_shifted).coeff(1);
            let weight = &one - &theta.scale(t0c);
            let left = qtj(space, &(phi.shift(-1) * weight)) + theta.scale(delta);
            let terms = vec![RankOneSpec::new(theta.clone(), a_perp), RankOneSpec::new(left, zbar)];
            (terms, Some(delta), None)
        }
        ShiftRelation::ReverseIntertwine => {
            let alpha = |f: &LaurentSeries| f.shift(-1) * &theta_minus_t0;
            let terms = vec![
                RankOneSpec::new(theta.clone(), qtj(space, &alpha(&phi_star))),
                RankOneSpec::new(-qtj(space, &alpha(phi)), theta.clone()),
            ];
            (terms, None, None)
        }
    };
    DefectData { relation, terms, delta, delta_check }
}

fn sum_rank_one(name: &str, terms: &[RankOneSpec], basis: &Basis) -> OperatorMatrix {
    let mut acc = OperatorMatrix::zeros(name, basis, basis);
    for spec in terms {
        let r = rank_one(spec, basis);
        acc.entries += &r.entries;
        acc.meta.interior.retain(|j| r.is_interior(*j));
    }
    acc
}

/// The rank-two right-hand side as a finite section.
pub fn defect_rhs(relation: ShiftRelation, phi: &LaurentSeries, basis: &KPerpBasis) -> OperatorMatrix {
    let data = defect_data(relation, phi, basis.space());
    let name = format!("defect_rhs[{}]", relation.name());
    sum_rank_one(&name, &data.terms, &Basis::KPerp(basis.clone())).with_symbol(phi)
}

/// Compares `lhs(𝓗_φ)` with the stated right-hand side and asserts rank at most two.
pub fn check_defect(
    relation: ShiftRelation,
    phi: &LaurentSeries,
    basis: &KPerpBasis,
    tol: f64,
) -> Result<ResidualReport> {
    check_defect_against(relation, relation, phi, basis, tol)
}

/// Like [`check_defect`] but pairs the left-hand side of `lhs_relation` with the
/// right-hand side of `rhs_relation`; mismatched pairs serve as negative controls.
pub fn check_defect_against(
    lhs_relation: ShiftRelation,
    rhs_relation: ShiftRelation,
    phi: &LaurentSeries,
    basis: &KPerpBasis,
    tol: f64,
) -> Result<ResidualReport> {
    let h = build_dtho(phi, basis);
    let (u, u_adj) = build_compressed_shift(basis);
    let lhs = lhs_relation.lhs(&h, &u, &u_adj)?;
    let data = defect_data(rhs_relation, phi, basis.space());
    let b = Basis::KPerp(basis.clone());
    let rhs = sum_rank_one("defect_rhs", &data.terms, &b);
    let diff = lhs.sub(&rhs)?;
    let tag = if lhs_relation == rhs_relation {
        format!("defect-{}", lhs_relation.name())
    } else {
        format!("defect-{}-vs-{}", lhs_relation.name(), rhs_relation.name())
    };
    let sv = singular_values(&lhs.interior_block());
    let mut report = ResidualReport::new(tag, diff.interior_frobenius(), diff.interior().len(), tol)
        .with_case(case_label(basis, &[("phi", phi)]))
        .with_detail("lhs-norm", lhs.interior_frobenius())
        .with_rank_bound(&sv, 2);
    if let Some(delta) = data.delta {
        report = report.with_detail("delta-re", delta.re).with_detail("delta-im", delta.im);
    }
    if let (Some(delta), Some(check)) = (data.delta, data.delta_check) {
        report = report.with_detail("delta-route-gap", (delta - check).norm());
    }
    let zero_branch = basis.space().theta0().norm() <= THETA0_ZERO_TOL;
    if rhs_relation == ShiftRelation::AdjointSandwich && zero_branch {
        // With θ₀ = 0 the second term collapses to Q_θJ(φθ) ⊗ θ.
        let space = basis.space();
        let theta = space.theta_series();
        let mut reduced = data.terms.clone();
        reduced[1] = RankOneSpec::new(qtj(space, &(phi * theta)), theta.clone());
        let reduced = sum_rank_one("reduced", &reduced, &b);
        report = report.with_detail("reduced-form-gap", crate::linalg::max_abs(&(&reduced.entries - &rhs.entries)));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::InnerFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn s(terms: &[(i64, f64)]) -> LaurentSeries {
        LaurentSeries::from_real_terms(terms.iter().copied())
    }

    fn monomial_basis(n: u32, size: usize) -> KPerpBasis {
        KPerpBasis::new(InnerFunction::monomial(n).unwrap(), size, size, None).unwrap()
    }

    fn symbols() -> Vec<LaurentSeries> {
        vec![
            s(&[(1, 1.0)]),
            s(&[(3, 1.0)]),
            s(&[(2, 1.0), (-1, 2.0)]),
            s(&[(-2, 1.0)]),
            LaurentSeries::from_terms([(-2, c(0.3, -0.2)), (0, c(1.0, 0.5)), (1, c(0.0, 0.7)), (3, c(-0.4, 0.1))]),
        ]
    }

    #[test]
    fn exact_defects_hold_with_rank_two() {
        for n in [1, 2, 3, 5] {
            let basis = monomial_basis(n, 20);
            for phi in symbols() {
                for relation in ShiftRelation::ALL {
                    let r = check_defect(relation, &phi, &basis, 1e-12).unwrap();
                    assert!(r.pass, "{relation:?} theta=z^{n} phi={phi}: {r:?}");
                    assert!(r.interior_cols >= basis.dim() / 2);
                }
            }
        }
    }

    #[test]
    fn blaschke_defects_hold_within_tail() {
        let thetas = [
            InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(),
            InnerFunction::blaschke(vec![c(0.3, 0.4), c(-0.5, 0.1)], c(0.0, 1.0)).unwrap(),
            InnerFunction::blaschke(vec![c(0.0, 0.0), c(0.4, 0.0)], c(1.0, 0.0)).unwrap(),
        ];
        for theta in thetas {
            let basis = KPerpBasis::new(theta, 64, 16, None).unwrap();
            let tail = basis.space().tail_bound();
            for phi in symbols() {
                for relation in ShiftRelation::ALL {
                    let r = check_defect(relation, &phi, &basis, 1e-10 + tail).unwrap();
                    assert!(r.pass, "{relation:?} {} phi={phi}: {r:?}", basis.theta());
                    assert!(r.interior_cols >= 8, "{relation:?}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn intertwine_rhs_examples() {
        let basis = monomial_basis(2, 8);
        assert_eq!(
            crate::linalg::max_abs(&defect_rhs(ShiftRelation::Intertwine, &s(&[(1, 1.0)]), &basis).entries),
            0.0
        );
        let rhs = defect_rhs(ShiftRelation::Intertwine, &s(&[(3, 1.0)]), &basis);
        // z̄ ⊗ z̄³ − z̄³ ⊗ z̄: entries (0, 2) = 1 and (2, 0) = −1.
        let mut expected = nalgebra::DMatrix::zeros(16, 16);
        expected[(0, 2)] = c(1.0, 0.0);
        expected[(2, 0)] = c(-1.0, 0.0);
        assert_eq!(rhs.entries, expected);
        for relation in ShiftRelation::ALL {
            let zero = check_defect(relation, &LaurentSeries::zero(), &basis, 1e-12).unwrap();
            assert_eq!(zero.residual, 0.0);
            assert_eq!(zero.detail("rank"), Some(0.0));
        }
    }

    #[test]
    fn adjoint_sandwich_scalar_agrees_along_both_routes() {
        let theta = InnerFunction::blaschke(vec![c(0.3, 0.4), c(-0.5, 0.1)], c(0.0, 1.0)).unwrap();
        let basis = KPerpBasis::new(theta, 40, 16, None).unwrap();
        for phi in symbols() {
            let r = check_defect(ShiftRelation::AdjointSandwich, &phi, &basis, 1e-10).unwrap();
            assert!(r.detail("delta-route-gap").unwrap() < 1e-13);
        }
    }

    #[test]
    fn zero_theta0_reduces_adjoint_sandwich_rhs() {
        let basis = monomial_basis(3, 16);
        let r = check_defect(ShiftRelation::AdjointSandwich, &s(&[(2, 1.0), (-1, 2.0)]), &basis, 1e-12).unwrap();
        assert!(r.pass);
        assert_eq!(r.detail("delta-re"), Some(0.0));
        assert!(r.detail("reduced-form-gap").unwrap() < 1e-15);
    }

    #[test]
    fn mismatched_rhs_fails() {
        let basis = monomial_basis(3, 16);
        let phi = s(&[(2, 1.0), (-1, 2.0)]);
        let r = check_defect_against(ShiftRelation::Intertwine, ShiftRelation::Sandwich, &phi, &basis, 1e-12).unwrap();
        assert!(!r.pass);
        assert_eq!(r.tag, "defect-intertwine-vs-sandwich");
    }
}
