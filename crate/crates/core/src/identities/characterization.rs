//! Boundary-condition characterizations of `𝓗_φ` among solutions of the
//! inhomogeneous shift equations.

use crate::error::Result;
use crate::fourier::LaurentSeries;
use crate::modelspace::KPerpBasis;
use crate::operators::{build_compressed_shift, build_dtho, OperatorMatrix, ShiftRelation, THETA0_ZERO_TOL};

use super::defect::defect_rhs;
use super::{case_label, ResidualReport};

/// One boundary condition: a column (`A b = 𝓗 b`) or a row (`A* b = 𝓗* b`)
/// at a basis index.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryCondition {
    Column(usize),
    Row(usize),
}

impl BoundaryCondition {
    /// `‖(A − 𝓗) b‖` or `‖(A − 𝓗)* b‖` for the difference `d = A − 𝓗`.
    pub fn defect(self, d: &OperatorMatrix) -> f64 {
        match self {
            Self::Column(j) => d.entries.column(j).norm(),
            Self::Row(i) => d.entries.row(i).norm(),
        }
    }

    pub fn name(self, basis: &KPerpBasis) -> String {
        match self {
            Self::Column(j) => format!("A({0}) = H({0})", basis.label(j)),
            Self::Row(i) => format!("A*({0}) = H*({0})", basis.label(i)),
        }
    }
}

/// Conditions that single out `𝓗_φ` among solutions for `relation`; the row
/// condition only applies when `θ₀ = 0`.
pub fn boundary_conditions(relation: ShiftRelation, basis: &KPerpBasis) -> Vec<BoundaryCondition> {
    let (zbar, theta) = (0, basis.n_neg());
    let (column, row) = match relation {
        ShiftRelation::AdjointSandwich => (zbar, theta),
        ShiftRelation::Sandwich => (theta, zbar),
        ShiftRelation::Intertwine => (theta, theta),
        ShiftRelation::ReverseIntertwine => (zbar, zbar),
    };
    let mut out = vec![BoundaryCondition::Column(column)];
    if basis.space().theta0().norm() <= THETA0_ZERO_TOL {
        out.push(BoundaryCondition::Row(row));
    }
    out
}

/// For `A = 𝓗_φ + perturbation`, with the perturbation a homogeneous solution:
/// checks that `A` satisfies the inhomogeneous equation, and that the boundary
/// conditions hold exactly when the perturbation vanishes.
pub fn check_characterization(
    relation: ShiftRelation,
    phi: &LaurentSeries,
    basis: &KPerpBasis,
    perturbation: &OperatorMatrix,
    tol: f64,
) -> Result<ResidualReport> {
    let h = build_dtho(phi, basis);
    let a = h.add(perturbation)?;
    let (u, u_adj) = build_compressed_shift(basis);
    let diff = relation.lhs(&a, &u, &u_adj)?.sub(&defect_rhs(relation, phi, basis))?;
    let perturbation_size = crate::linalg::max_abs(&perturbation.entries);
    let perturbation_zero = perturbation_size <= tol;
    let conditions = boundary_conditions(relation, basis);
    let defects: Vec<f64> = conditions.iter().map(|c| c.defect(perturbation)).collect();
    let conditions_hold = defects.iter().all(|&d| d <= tol);
    let mut report = ResidualReport::new(
        format!("characterization-{}", relation.name()),
        diff.interior_frobenius(),
        diff.interior().len(),
        tol,
    )
    .with_case(case_label(basis, &[("phi", phi)]))
    .with_detail("perturbation-max", perturbation_size)
    .with_assertion("boundary conditions hold iff A = H_phi", conditions_hold == perturbation_zero);
    for (c, d) in conditions.iter().zip(defects) {
        report = report.with_detail(&c.name(basis), d);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::inner::InnerFunction;
    use crate::modelspace::Basis;
    use crate::operators::{build_equation_solution, SolutionParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn s(terms: &[(i64, f64)]) -> LaurentSeries {
        LaurentSeries::from_real_terms(terms.iter().copied())
    }

    fn bases() -> Vec<KPerpBasis> {
        vec![
            KPerpBasis::new(InnerFunction::monomial(2).unwrap(), 32, 32, None).unwrap(),
            KPerpBasis::new(InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(), 64, 16, None).unwrap(),
        ]
    }

    fn tol(basis: &KPerpBasis) -> f64 {
        1e-10 + basis.space().tail_bound()
    }

    #[test]
    fn dtho_itself_passes() {
        let phi = s(&[(2, 1.0), (-1, 2.0)]);
        for basis in bases() {
            let b = Basis::KPerp(basis.clone());
            let zero = OperatorMatrix::zeros("zero", &b, &b);
            for relation in ShiftRelation::ALL {
                let r = check_characterization(relation, &phi, &basis, &zero, tol(&basis)).unwrap();
                assert!(r.pass, "{relation:?}: {r:?}");
            }
        }
    }

    #[test]
    fn perturbed_dtho_fails_a_boundary_condition() {
        let phi = s(&[(1, 1.0), (-2, 0.5)]);
        let params = SolutionParams::new(s(&[(0, 1.0), (1, 0.5)]), s(&[(0, 1.0)]), Some(s(&[(0, 1.0)])));
        for basis in bases() {
            for relation in ShiftRelation::ALL {
                let pert = build_equation_solution(relation, &basis, &params).unwrap();
                let r = check_characterization(relation, &phi, &basis, &pert, tol(&basis)).unwrap();
                assert!(r.pass, "{relation:?} {}: {r:?}", basis.theta());
                let worst = r.details.iter().filter(|(k, _)| k.starts_with('A')).map(|(_, v)| *v).fold(0.0, f64::max);
                assert!(worst > 1e-3, "{relation:?}: {r:?}");
            }
        }
    }

    #[test]
    fn psi_perturbation_breaks_the_zbar_column() {
        let basis = &bases()[1];
        let params = SolutionParams::new(LaurentSeries::zero(), LaurentSeries::one(), None);
        let pert = build_equation_solution(ShiftRelation::AdjointSandwich, basis, &params).unwrap();
        let defect = BoundaryCondition::Column(0).defect(&pert);
        assert!(defect > 0.1);
        let phi = s(&[(1, 1.0)]);
        let r = check_characterization(ShiftRelation::AdjointSandwich, &phi, basis, &pert, tol(basis)).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn intertwine_row_condition_detects_phi_perturbation() {
        let basis = &bases()[0];
        let params = SolutionParams::new(LaurentSeries::zero(), LaurentSeries::zero(), Some(LaurentSeries::one()));
        let pert = build_equation_solution(ShiftRelation::Intertwine, basis, &params).unwrap();
        let theta = basis.n_neg();
        assert_eq!(BoundaryCondition::Column(theta).defect(&pert), 0.0);
        assert!(BoundaryCondition::Row(theta).defect(&pert) > 0.5);
    }

    #[test]
    fn mismatched_claim_fails() {
        // A DTHO with a perturbation that does not solve the homogeneous equation.
        let basis = &bases()[0];
        let b = Basis::KPerp(basis.clone());
        let mut junk = OperatorMatrix::zeros("junk", &b, &b);
        junk.entries[(3, 3)] = c(1.0, 0.0);
        let r = check_characterization(ShiftRelation::Sandwich, &s(&[(1, 1.0)]), basis, &junk, 1e-10).unwrap();
        assert!(!r.pass);
    }
}
