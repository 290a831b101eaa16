//! Compressed-shift identities, homogeneous equations and `Z_θ` symbols.

use num_complex::Complex64;

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;
use crate::modelspace::{Basis, KPerpBasis, ModelSpace};
use crate::operators::{
    build_compressed_shift, build_shift_inverses, rank_one, OperatorMatrix, RankOneSpec, ShiftRelation, THETA0_ZERO_TOL,
};

use super::{case_label, ResidualReport};

/// Relative residual allowed for `J h̃ ∈ K_θ`.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// `I − U*U = (1−|θ₀|²) z̄⊗z̄` and `I − UU* = (1−|θ₀|²) θ⊗θ`.
pub fn check_unitary_defects(basis: &KPerpBasis, tol: f64) -> Result<ResidualReport> {
    let b = Basis::KPerp(basis.clone());
    let (u, u_adj) = build_compressed_shift(basis);
    let space = basis.space();
    let coefficient = 1.0 - space.theta0().norm_sqr();
    let id = OperatorMatrix::identity(&b);
    let zbar = LaurentSeries::monomial(-1);
    let theta = space.theta_series().clone();
    let weight = Complex64::new(coefficient, 0.0);
    let left = id.sub(&u_adj.compose(&u)?)?.sub(&rank_one(&RankOneSpec::new(zbar.clone(), zbar), &b).scale(weight))?;
    let right =
        id.sub(&u.compose(&u_adj)?)?.sub(&rank_one(&RankOneSpec::new(theta.clone(), theta), &b).scale(weight))?;
    let (r1, r2) = (left.interior_frobenius(), right.interior_frobenius());
    Ok(ResidualReport::new("unitary-defects", r1.hypot(r2), left.interior().len().min(right.interior().len()), tol)
        .with_case(case_label(basis, &[]))
        .with_detail("adjoint-times-shift", r1)
        .with_detail("shift-times-adjoint", r2)
        .with_detail("coefficient", coefficient))
}

fn apply_power(m: &OperatorMatrix, v: &[Complex64], n: usize) -> Vec<Complex64> {
    (0..n).fold(v.to_vec(), |acc, _| m.apply_coords(&acc))
}

fn gap(b: &Basis, got: &[Complex64], expected: &LaurentSeries) -> f64 {
    let coords = b.to_coords(expected);
    let diff: f64 = got.iter().zip(&coords.values).map(|(x, y)| (x - y).norm_sqr()).sum();
    diff.sqrt() + coords.residual
}

/// Power and inverse-power formulas for `U`, `U*` on `z̄η̄` and `θψ`
/// (`η`, `ψ` analytic), for `n = 1..=max_power`, plus the action of `(U*)⁻¹`
/// on every certified basis vector. Needs `θ₀ ≠ 0`.
pub fn check_shift_powers(
    basis: &KPerpBasis,
    eta: &LaurentSeries,
    psi: &LaurentSeries,
    max_power: usize,
    tol: f64,
) -> Result<ResidualReport> {
    let space = basis.space();
    let t0 = space.theta0();
    if t0.norm() <= THETA0_ZERO_TOL {
        return Err(DthoError::Hypothesis("shift inverse identities need theta0 != 0".into()));
    }
    for (name, f) in [("eta", eta), ("psi", psi)] {
        if !f.is_analytic(0.0) {
            return Err(DthoError::InvalidParameter { name, reason: format!("{f} must be analytic") });
        }
    }
    let b = Basis::KPerp(basis.clone());
    let (u, u_adj) = build_compressed_shift(basis);
    let (u_inv, u_adj_inv) = build_shift_inverses(basis)?;
    let t0c = t0.conj();
    let one = Complex64::new(1.0, 0.0);
    let x = eta.conj_boundary().shift(-1);
    let y = space.mul_theta(psi);
    let (xc, yc) = (b.to_coords(&x), b.to_coords(&y));
    let leak = xc.residual + yc.residual;

    let mut items = [0.0f64; 5];
    for n in 1..=max_power {
        let xs = x.shift(n as i64);
        let ys = psi.shift(-(n as i64));
        let expected = [
            xs.proj_q() + space.mul_theta(&xs.proj_p()).scale(t0c),
            ys.proj_q().scale(t0) + space.mul_theta(&ys.proj_p()),
            ys.proj_q().scale(one / t0c) + space.mul_theta(&ys.proj_p()),
            xs.proj_q() + space.mul_theta(&xs.proj_p()).scale(one / t0),
        ];
        let got = [
            apply_power(&u, &xc.values, n),
            apply_power(&u_adj, &yc.values, n),
            apply_power(&u_inv, &yc.values, n),
            apply_power(&u_adj_inv, &xc.values, n),
        ];
        for (slot, (g, e)) in items.iter_mut().zip(got.iter().zip(&expected)) {
            *slot = slot.max(gap(&b, g, e) + leak);
        }
    }
    let theta = space.theta_series();
    for &j in u_adj_inv.interior() {
        let expected = if j == 0 {
            theta.scale(one / t0)
        } else if j < basis.n_neg() {
            LaurentSeries::monomial(-(j as i64))
        } else {
            b.vector(j).shift(1)
        };
        let column: Vec<Complex64> = u_adj_inv.entries.column(j).iter().copied().collect();
        items[4] = items[4].max(gap(&b, &column, &expected));
    }
    let residual = items.iter().copied().fold(0.0, f64::max);
    let mut report = ResidualReport::new("shift-power-identities", residual, u_adj_inv.interior().len(), tol)
        .with_case(case_label(basis, &[("eta", eta), ("psi", psi)]))
        .with_detail("max-power", max_power as f64);
    for (name, value) in ["power", "adjoint-power", "inverse-power", "adjoint-inverse-power", "adjoint-inverse-basis"]
        .into_iter()
        .zip(items)
    {
        report = report.with_detail(name, value);
    }
    Ok(report)
}

/// Residual of a homogeneous shift equation for `a`.
pub fn check_intertwining(
    a: &OperatorMatrix,
    relation: ShiftRelation,
    basis: &KPerpBasis,
    tol: f64,
) -> Result<ResidualReport> {
    let (u, u_adj) = build_compressed_shift(basis);
    let lhs = relation.lhs(a, &u, &u_adj)?;
    Ok(ResidualReport::new(
        format!("homogeneous-{}", relation.name()),
        lhs.interior_frobenius(),
        lhs.interior().len(),
        tol,
    )
    .with_case(format!("{}; A={}", case_label(basis, &[]), a.meta.builder)))
}

/// `‖Q_θ J h̃‖` where `(1 − θ̄₀θ)φ = dz + h̃`; zero exactly when `φ ∈ Z_θ`.
pub fn z_theta_residual(space: &ModelSpace, phi: &LaurentSeries) -> f64 {
    let g = phi - &(phi * space.theta_series()).scale(space.theta0().conj());
    let h_tilde = &g - &LaurentSeries::term(1, g.coeff(1));
    space.proj_q_theta(&h_tilde.flip_j()).l2_norm()
}

/// `φ = (dz + h̃)/(1 − θ̄₀θ)` with the geometric series `Σ (θ̄₀θ)^k` kept to degree `order`.
pub fn make_z_theta_symbol(
    space: &ModelSpace,
    d: Complex64,
    h_tilde: &LaurentSeries,
    order: usize,
) -> Result<LaurentSeries> {
    let residual = space.proj_q_theta(&h_tilde.flip_j()).l2_norm();
    if residual > MEMBERSHIP_TOL * (1.0 + h_tilde.l2_norm()) {
        return Err(DthoError::InvalidParameter {
            name: "h_tilde",
            reason: format!("{h_tilde} is not in J(K_theta): projection residual {residual:e}"),
        });
    }
    let numerator = LaurentSeries::term(1, d) + h_tilde.clone();
    let c = space.theta0().conj();
    if c.norm() <= THETA0_ZERO_TOL {
        return Ok(numerator);
    }
    let ratio = space.theta_series().scale(c);
    let mut term = LaurentSeries::one();
    let mut series = LaurentSeries::one();
    let mut weight = 1.0;
    while weight > 1e-17 {
        term = (&term * &ratio).window(0, order as i64);
        series = series + &term;
        weight *= c.norm();
    }
    Ok(numerator * series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::InnerFunction;
    use crate::operators::{build_dtho, build_equation_solution, SolutionParams};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn s(terms: &[(i64, f64)]) -> LaurentSeries {
        LaurentSeries::from_real_terms(terms.iter().copied())
    }

    fn blaschke_basis() -> KPerpBasis {
        KPerpBasis::new(InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(), 32, 32, None).unwrap()
    }

    #[test]
    fn unitary_defects_vanish() {
        for n in [2, 5] {
            let basis = KPerpBasis::new(InnerFunction::monomial(n).unwrap(), 32, 32, None).unwrap();
            let r = check_unitary_defects(&basis, 1e-13).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.detail("coefficient"), Some(1.0));
        }
        let basis = blaschke_basis();
        let r = check_unitary_defects(&basis, 1e-10 + basis.space().tail_bound()).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.detail("coefficient").unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn shift_power_formulas() {
        let eta = LaurentSeries::from_terms([(0, c(1.0, 0.0)), (1, c(0.3, -0.2)), (2, c(0.0, 0.5))]);
        let psi = LaurentSeries::from_terms([(0, c(0.4, 0.1)), (1, c(-1.0, 0.0))]);
        let thetas = [
            InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(),
            InnerFunction::blaschke(vec![c(0.2, -0.3), c(0.5, 0.5)], c(0.6, 0.8)).unwrap(),
        ];
        for theta in thetas {
            let basis = KPerpBasis::new(theta, 32, 32, None).unwrap();
            let r = check_shift_powers(&basis, &eta, &psi, 4, 1e-10).unwrap();
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn shift_power_examples() {
        let basis = blaschke_basis();
        let (u, u_adj) = build_compressed_shift(&basis);
        let (_, u_adj_inv) = build_shift_inverses(&basis).unwrap();
        let t0 = basis.space().theta0();
        let theta = basis.space().theta_series();
        assert!(u_adj_inv.column_series(0).approx_eq(&theta.scale(Complex64::new(1.0, 0.0) / t0), 1e-14));
        assert!(u.column_series(0).approx_eq(&theta.scale(t0.conj()), 1e-15));
        assert!(u_adj.column_series(32).approx_eq(&LaurentSeries::monomial(-1).scale(t0), 1e-15));
    }

    #[test]
    fn shift_powers_reject_zero_theta0() {
        let basis = KPerpBasis::new(InnerFunction::monomial(2).unwrap(), 8, 8, None).unwrap();
        let one = LaurentSeries::one();
        assert!(matches!(check_shift_powers(&basis, &one, &one, 2, 1e-10), Err(DthoError::Hypothesis(_))));
    }

    #[test]
    fn z_theta_symbols() {
        let z2 = ModelSpace::new(InnerFunction::monomial(2).unwrap(), None);
        let zero = LaurentSeries::zero();
        assert_eq!(make_z_theta_symbol(&z2, c(1.0, 0.0), &zero, 40).unwrap(), LaurentSeries::monomial(1));
        let z3 = ModelSpace::new(InnerFunction::monomial(3).unwrap(), None);
        let hz = LaurentSeries::monomial(-2);
        assert_eq!(make_z_theta_symbol(&z3, c(0.0, 0.0), &hz, 40).unwrap(), hz);
        assert!(make_z_theta_symbol(&z2, c(0.0, 0.0), &LaurentSeries::monomial(-2), 40).is_err());
        assert!(make_z_theta_symbol(&z2, c(0.0, 0.0), &LaurentSeries::monomial(1), 40).is_err());

        let b = ModelSpace::new(InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(), None);
        let phi = make_z_theta_symbol(&b, c(1.0, 0.0), &zero, 40).unwrap();
        let back = &phi - &(&phi * b.theta_series()).scale(b.theta0().conj());
        assert!((&back - &LaurentSeries::monomial(1)).l2_norm() < 1e-10);
        assert!(z_theta_residual(&b, &phi) < 1e-10);
        assert!(z_theta_residual(&z2, &s(&[(1, 1.0), (-1, 2.0), (0, 0.5)])) == 0.0);
        assert!(z_theta_residual(&z2, &s(&[(3, 1.0)])) > 0.9);
    }

    #[test]
    fn z_theta_dtho_intertwines() {
        let basis = KPerpBasis::new(InnerFunction::monomial(2).unwrap(), 32, 32, None).unwrap();
        let phi = make_z_theta_symbol(basis.space(), c(1.0, 0.0), &LaurentSeries::zero(), 40).unwrap();
        let r = check_intertwining(&build_dtho(&phi, &basis), ShiftRelation::Intertwine, &basis, 1e-12).unwrap();
        assert!(r.pass);
        let outside =
            check_intertwining(&build_dtho(&s(&[(3, 1.0)]), &basis), ShiftRelation::Intertwine, &basis, 1e-12).unwrap();
        assert!((outside.residual - 2f64.sqrt()).abs() < 1e-10);
        let sol = build_equation_solution(
            ShiftRelation::Intertwine,
            &basis,
            &SolutionParams::new(s(&[(0, 1.0)]), s(&[(1, 1.0)]), Some(s(&[(0, 2.0)]))),
        )
        .unwrap();
        assert!(check_intertwining(&sol, ShiftRelation::Intertwine, &basis, 1e-10).unwrap().pass);
    }

    #[test]
    fn blaschke_z_theta_dtho_intertwines() {
        let basis = KPerpBasis::new(InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(), 64, 16, None).unwrap();
        let phi = make_z_theta_symbol(basis.space(), c(1.0, 0.0), &LaurentSeries::zero(), 60).unwrap();
        let r = check_intertwining(&build_dtho(&phi, &basis), ShiftRelation::Intertwine, &basis, 1e-10).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
