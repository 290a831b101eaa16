use num_complex::Complex64;

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;
use crate::inner::InnerFunction;
use crate::modelspace::{Basis, KPerpBasis, KThetaBasis};

use super::matrix::OperatorMatrix;

/// Which flip a Hankel-type operator uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FlipConvention {
    /// `J f = f(z̄)`.
    J,
    /// `𝒥 f = z̄ f(z̄)`.
    CurlyJ,
}

impl FlipConvention {
    pub fn apply(self, f: &LaurentSeries) -> LaurentSeries {
        match self {
            Self::J => f.flip_j(),
            Self::CurlyJ => f.flip_curly_j(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::J => "J",
            Self::CurlyJ => "curlyJ",
        }
    }
}

fn kperp(basis: &KPerpBasis) -> Basis {
    Basis::KPerp(basis.clone())
}

/// `T_φ h = P(φh)` on `1, …, z^n`.
pub fn build_toeplitz(phi: &LaurentSeries, n: usize) -> OperatorMatrix {
    let b = Basis::Hardy { len: n + 1 };
    OperatorMatrix::from_action("toeplitz", &b, &b, |h| (phi * h).proj_p()).with_symbol(phi)
}

/// `H_φ h = P·flip(φh)` from `1, …, z^{cols−1}` to `1, …, z^{rows−1}`.
pub fn build_hankel(phi: &LaurentSeries, convention: FlipConvention, rows: usize, cols: usize) -> OperatorMatrix {
    let name = format!("hankel[{}]", convention.name());
    OperatorMatrix::from_action(&name, &Basis::Hardy { len: rows }, &Basis::Hardy { len: cols }, |h| {
        convention.apply(&(phi * h)).proj_p()
    })
    .with_symbol(phi)
}

/// Truncated Toeplitz operator `P_θ(φh)` on `K_θ`.
pub fn build_tto(phi: &LaurentSeries, theta: &InnerFunction, order: Option<usize>) -> OperatorMatrix {
    let kb = KThetaBasis::new(theta.clone(), order);
    let space = kb.space().clone();
    let b = Basis::ModelSpace(kb);
    OperatorMatrix::from_action("tto", &b, &b, |h| space.proj_p_theta(&(phi * h))).with_symbol(phi)
}

/// Truncated Hankel operator `P_θ 𝒥(φh)` on `K_θ`.
pub fn build_tho(phi: &LaurentSeries, theta: &InnerFunction, order: Option<usize>) -> OperatorMatrix {
    let kb = KThetaBasis::new(theta.clone(), order);
    let space = kb.space().clone();
    let b = Basis::ModelSpace(kb);
    OperatorMatrix::from_action("tho", &b, &b, |h| space.proj_p_theta(&(phi * h).flip_curly_j())).with_symbol(phi)
}

/// Dual truncated Toeplitz operator `D_φ h = Q_θ(φh)`.
pub fn build_dtto(phi: &LaurentSeries, basis: &KPerpBasis) -> OperatorMatrix {
    let b = kperp(basis);
    let space = basis.space();
    OperatorMatrix::from_action("dtto", &b, &b, |h| space.proj_q_theta(&(phi * h))).with_symbol(phi)
}

/// Dual truncated Hankel operator `𝓗_φ h = Q_θ J(φh)`.
pub fn build_dtho(phi: &LaurentSeries, basis: &KPerpBasis) -> OperatorMatrix {
    let b = kperp(basis);
    let space = basis.space();
    OperatorMatrix::from_action("dtho", &b, &b, |h| space.proj_q_theta(&(phi * h).flip_j())).with_symbol(phi)
}

/// `𝓗_φ* = 𝓗_{φ*}`, built from its own action.
pub fn build_dtho_adjoint(phi: &LaurentSeries, basis: &KPerpBasis) -> OperatorMatrix {
    build_dtho(&phi.star(), basis).with_builder("dtho_adjoint")
}

/// `(U, U*)` from `Uh = zh + ⟨h, z̄⟩(θ̄₀θ − 1)` and `U*h = z̄h + ⟨h, θ⟩(θ₀ − θ)z̄`.
pub fn build_compressed_shift(basis: &KPerpBasis) -> (OperatorMatrix, OperatorMatrix) {
    let b = kperp(basis);
    let space = basis.space();
    let theta = space.theta_series().clone();
    let t0 = space.theta0();
    let zbar = LaurentSeries::monomial(-1);
    let z = LaurentSeries::monomial(1);
    let u_defect = &theta.scale(t0.conj()) - &LaurentSeries::one();
    let u_adj_defect = (&LaurentSeries::constant(t0) - &theta).shift(-1);
    let u = OperatorMatrix::from_action("shift", &b, &b, |h| &z * h + u_defect.scale(h.inner(&zbar)));
    let u_adj =
        OperatorMatrix::from_action("shift_adjoint", &b, &b, |h| &zbar * h + u_adj_defect.scale(h.inner(&theta)));
    (u, u_adj)
}

fn require_theta0(basis: &KPerpBasis, what: &str) -> Result<Complex64> {
    let t0 = basis.space().theta0();
    if t0.norm() <= THETA0_ZERO_TOL {
        return Err(DthoError::Hypothesis(format!("{what} needs theta0 != 0")));
    }
    Ok(t0)
}

/// `|θ₀|` at or below this is treated as `θ₀ = 0`.
pub const THETA0_ZERO_TOL: f64 = 1e-14;

/// `(U⁻¹, (U*)⁻¹)` from the closed forms
/// `U⁻¹h = z̄Qh + ⟨h,θ⟩/θ̄₀ z̄ + θP(z̄P(θ̄h))` and
/// `(U*)⁻¹h = Q(zh) + ⟨h,z̄⟩/θ₀ θ + θzP(θ̄h)`.
pub fn build_shift_inverses(basis: &KPerpBasis) -> Result<(OperatorMatrix, OperatorMatrix)> {
    let t0 = require_theta0(basis, "inverting the compressed shift")?;
    let b = kperp(basis);
    let space = basis.space();
    let theta = space.theta_series().clone();
    let zbar = LaurentSeries::monomial(-1);
    let inv = OperatorMatrix::from_action("shift_inverse", &b, &b, |h| {
        let analytic = (space.theta_bar() * h).proj_p();
        h.proj_q().shift(-1) + zbar.scale(h.inner(&theta) / t0.conj()) + space.mul_theta(&analytic.shift(-1).proj_p())
    });
    let adj_inv = OperatorMatrix::from_action("shift_adjoint_inverse", &b, &b, |h| {
        let analytic = (space.theta_bar() * h).proj_p();
        h.shift(1).proj_q() + theta.scale(h.inner(&zbar) / t0) + space.mul_theta(&analytic.shift(1))
    });
    Ok((inv, adj_inv))
}

/// O'Toeplitz operator `f ↦ P·flip(ψf)` from `z̄, …, z̄^K` to `1, …, z^M`.
pub fn build_otoeplitz(psi: &LaurentSeries, variant: FlipConvention, k: usize, m: usize) -> OperatorMatrix {
    let name = format!("otoeplitz[{}]", variant.name());
    OperatorMatrix::from_action(&name, &Basis::Hardy { len: m + 1 }, &Basis::AntiHardy { len: k }, |f| {
        variant.apply(&(psi * f)).proj_p()
    })
    .with_symbol(psi)
}

/// Adjoint `h ↦ Q·flip(ψ* h)` from `1, …, z^M` to `z̄, …, z̄^K`.
pub fn build_otoeplitz_adjoint(psi: &LaurentSeries, variant: FlipConvention, k: usize, m: usize) -> OperatorMatrix {
    let name = format!("otoeplitz_adjoint[{}]", variant.name());
    let psi_star = psi.star();
    OperatorMatrix::from_action(&name, &Basis::AntiHardy { len: k }, &Basis::Hardy { len: m + 1 }, |h| {
        variant.apply(&(&psi_star * h)).proj_q()
    })
    .with_symbol(psi)
}

/// `𝕊 f = z̄ f` on `z̄, …, z̄^K`.
pub fn build_sflat(k: usize) -> OperatorMatrix {
    let b = Basis::AntiHardy { len: k };
    OperatorMatrix::from_action("sflat", &b, &b, |f| f.shift(-1))
}

/// `𝕊* f = Q(z f)` on `z̄, …, z̄^K`.
pub fn build_sflat_adjoint(k: usize) -> OperatorMatrix {
    let b = Basis::AntiHardy { len: k };
    OperatorMatrix::from_action("sflat_adjoint", &b, &b, |f| f.shift(1).proj_q())
}

/// Backward shift `S* h = P(z̄h)` on `1, …, z^M`.
pub fn build_backward_shift(m: usize) -> OperatorMatrix {
    let b = Basis::Hardy { len: m + 1 };
    OperatorMatrix::from_action("backward_shift", &b, &b, |h| h.shift(-1).proj_p())
}

/// Forward shift `S h = zh` on `1, …, z^M`.
pub fn build_forward_shift(m: usize) -> OperatorMatrix {
    let b = Basis::Hardy { len: m + 1 };
    OperatorMatrix::from_action("forward_shift", &b, &b, |h| h.shift(1))
}

/// `f ⊗ g : h ↦ ⟨h, g⟩ f`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneSpec {
    pub left: LaurentSeries,
    pub right: LaurentSeries,
}

impl RankOneSpec {
    pub fn new(left: LaurentSeries, right: LaurentSeries) -> Self {
        Self { left, right }
    }
}

/// Outer product of `coords(f)` with `conj(coords(g))`. Every column is
/// certified when `f` lies in the span; otherwise only columns with `⟨b_j, g⟩ = 0`.
pub fn rank_one(spec: &RankOneSpec, basis: &Basis) -> OperatorMatrix {
    rank_one_between(spec, basis, basis)
}

/// `f ⊗ g` with `f` in `row_basis` and `g` in `col_basis`.
pub fn rank_one_between(spec: &RankOneSpec, row_basis: &Basis, col_basis: &Basis) -> OperatorMatrix {
    let f = row_basis.to_coords(&spec.left);
    let g = col_basis.to_coords(&spec.right);
    let entries = nalgebra::DMatrix::from_fn(row_basis.dim(), col_basis.dim(), |i, j| f.values[i] * g.values[j].conj());
    let n = col_basis.dim();
    let interior = if f.in_span(spec.left.l2_norm()) {
        (0..n).collect()
    } else {
        (0..n).filter(|&j| g.values[j] == Complex64::new(0.0, 0.0)).collect()
    };
    OperatorMatrix::from_entries("rank_one", row_basis, col_basis, entries, interior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one() -> Complex64 {
        c(1.0, 0.0)
    }

    fn s(terms: &[(i64, f64)]) -> LaurentSeries {
        LaurentSeries::from_real_terms(terms.iter().copied())
    }

    fn zn(n: u32, nneg: usize, man: usize) -> KPerpBasis {
        KPerpBasis::new(InnerFunction::monomial(n).unwrap(), nneg, man, None).unwrap()
    }

    fn half(nneg: usize, man: usize) -> KPerpBasis {
        KPerpBasis::new(InnerFunction::blaschke_factor(c(0.5, 0.0)).unwrap(), nneg, man, None).unwrap()
    }

    fn arb_series(band: i64) -> impl Strategy<Value = LaurentSeries> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), (2 * band + 1) as usize).prop_map(move |v| {
            LaurentSeries::from_terms(v.into_iter().enumerate().map(|(i, (re, im))| (i as i64 - band, c(re, im))))
        })
    }

    #[test]
    fn toeplitz_examples() {
        assert_eq!(build_toeplitz(&LaurentSeries::one(), 4).entries, DMatrix::identity(5, 5));
        let shift = build_toeplitz(&LaurentSeries::monomial(1), 3).entries;
        let expected = DMatrix::from_fn(4, 4, |i, j| if i == j + 1 { one() } else { c(0.0, 0.0) });
        assert_eq!(shift, expected);
    }

    #[test]
    fn hankel_examples() {
        let zbar = LaurentSeries::monomial(-1);
        let h = build_hankel(&zbar, FlipConvention::J, 3, 3).entries;
        assert_eq!(h[(0, 1)], one());
        assert_eq!(h[(1, 0)], one());
        assert_eq!(h.iter().filter(|v| v.norm() > 0.0).count(), 2);
        let h = build_hankel(&zbar, FlipConvention::CurlyJ, 3, 3).entries;
        assert_eq!(h[(0, 0)], one());
        assert_eq!(h.iter().filter(|v| v.norm() > 0.0).count(), 1);
    }

    #[test]
    fn tto_and_tho_examples() {
        let z2 = InnerFunction::monomial(2).unwrap();
        let a = build_tto(&LaurentSeries::monomial(1), &z2, None).entries;
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), one(), c(0.0, 0.0)]));
        assert_eq!(build_tto(&LaurentSeries::zero(), &z2, None).entries, DMatrix::zeros(2, 2));
        let b = build_tho(&LaurentSeries::monomial(-1), &z2, None);
        assert_eq!(b.entries[(0, 0)], one());
        assert_eq!(b.entries[(1, 0)], c(0.0, 0.0));
    }

    #[test]
    fn tto_on_blaschke_model_space_is_compression() {
        // K_θ for a single zero a is spanned by the normalized kernel k_a, and
        // ⟨φ k_a, k_a⟩ equals the Poisson average of φ at a.
        let a = c(0.4, 0.2);
        let theta = InnerFunction::blaschke_factor(a).unwrap();
        let phi = s(&[(1, 1.0), (-1, 0.5)]);
        let m = build_tto(&phi, &theta, None);
        let expected = a + a.conj() * 0.5;
        assert!((m.entries[(0, 0)] - expected).norm() < 1e-14);
    }

    #[test]
    fn dtto_examples() {
        let b = zn(2, 4, 4);
        assert_eq!(build_dtto(&LaurentSeries::one(), &b).entries, DMatrix::identity(8, 8));
        let d = build_dtto(&LaurentSeries::monomial(1), &b);
        assert!(d.entries.column(0).iter().all(|v| v.norm() == 0.0));
        for m in 0..3 {
            assert_eq!(d.entries[(4 + m + 1, 4 + m)], one());
        }
    }

    #[test]
    fn compressed_shift_examples() {
        let b = half(6, 6);
        let (u, ua) = build_compressed_shift(&b);
        let t0 = c(0.5, 0.0);
        let theta = b.space().theta_series().clone();
        assert!(u.column_series(0).approx_eq(&theta.scale(t0.conj()), 1e-15));
        assert!(ua.column_series(6).approx_eq(&LaurentSeries::term(-1, t0), 1e-15));

        let (u, ua) = build_compressed_shift(&zn(2, 4, 4));
        assert!(u.entries.column(0).iter().all(|v| v.norm() == 0.0));
        for k in 1..4 {
            assert_eq!(u.entries[(k - 1, k)], one());
            assert_eq!(ua.entries[(k, k - 1)], one());
        }
        for m in 0..3 {
            assert_eq!(u.entries[(4 + m + 1, 4 + m)], one());
        }
        assert!(!u.is_interior(7));
        assert!(!ua.is_interior(3));
    }

    #[test]
    fn compressed_shift_matches_dtto_of_z() {
        for b in [zn(2, 8, 8), half(24, 24)] {
            let (u, _) = build_compressed_shift(&b);
            let d = build_dtto(&LaurentSeries::monomial(1), &b);
            for &j in u.interior() {
                for i in 0..u.nrows() {
                    assert!((u.entries[(i, j)] - d.entries[(i, j)]).norm() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn adjoint_matrices_agree_with_conjugate_transpose_inside() {
        let b = half(24, 24);
        let (u, ua) = build_compressed_shift(&b);
        let t = u.entries.adjoint();
        for &j in ua.interior() {
            for i in 0..20 {
                assert!((ua.entries[(i, j)] - t[(i, j)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn dtho_examples() {
        let b = zn(2, 4, 4);
        let h = build_dtho(&LaurentSeries::monomial(1), &b);
        assert!(h.entries.column(0).iter().all(|v| v.norm() == 0.0));
        let h = build_dtho(&LaurentSeries::monomial(-1), &b);
        assert_eq!(h.entries[(0, 4)], one());
        assert_eq!(h.entries.column(4).iter().filter(|v| v.norm() > 0.0).count(), 1);
        assert_eq!(build_dtho(&LaurentSeries::zero(), &b).entries, DMatrix::zeros(8, 8));
    }

    #[test]
    fn shift_inverses_invert_inside() {
        let b = half(16, 16);
        let (u, ua) = build_compressed_shift(&b);
        let (ui, uai) = build_shift_inverses(&b).unwrap();
        for (x, y) in [(&u, &ui), (&ui, &u), (&ua, &uai), (&uai, &ua)] {
            let p = x.compose(y).unwrap();
            let id = OperatorMatrix::identity(&p.row_basis);
            assert!(p.sub(&id).unwrap().interior_frobenius() < 1e-13);
            assert!(p.interior().len() >= 30);
        }
        assert!(build_shift_inverses(&zn(2, 4, 4)).is_err());
    }

    #[test]
    fn otoeplitz_examples() {
        let b = build_otoeplitz(&LaurentSeries::one(), FlipConvention::J, 6, 6);
        for k in 1..=6 {
            assert_eq!(b.entries[(k, k - 1)], one());
        }
        let b = build_otoeplitz(&LaurentSeries::monomial(1), FlipConvention::J, 6, 6);
        for k in 1..=6 {
            assert_eq!(b.entries[(k - 1, k - 1)], one());
        }
        assert_eq!(b.entries.iter().filter(|v| v.norm() > 0.0).count(), 6);
    }

    #[test]
    fn sflat_is_isometric_inside() {
        let s = build_sflat(6);
        assert_eq!(s.entries[(1, 0)], one());
        let gram = s.entries.adjoint() * &s.entries;
        for &j in s.interior() {
            assert_eq!(gram[(j, j)], one());
        }
        assert!(!s.is_interior(5));
    }

    #[test]
    fn rank_one_examples() {
        let basis = Basis::KPerp(zn(2, 4, 4));
        let zbar = LaurentSeries::monomial(-1);
        let r = rank_one(&RankOneSpec::new(zbar.clone(), zbar.clone()), &basis);
        assert_eq!(r.entries[(0, 0)], one());
        assert!(r.entries.column(4).iter().all(|v| v.norm() == 0.0));
        let f = s(&[(-2, 1.0), (3, 2.0)]);
        let g = s(&[(-2, 0.5), (2, -1.0), (4, 3.0)]);
        let r = rank_one(&RankOneSpec::new(f.clone(), g.clone()), &basis);
        assert!((r.entries.trace() - f.inner(&g)).norm() < 1e-14);
    }

    proptest! {
        #[test]
        fn toeplitz_columns_match_projection(phi in arb_series(2)) {
            let t = build_toeplitz(&phi, 6);
            for j in 0..7 {
                let col = (&phi * &LaurentSeries::monomial(j)).proj_p();
                for i in 0..7 {
                    prop_assert_eq!(t.entries[(i, j as usize)], col.coeff(i as i64));
                }
            }
            for i in 1..7 {
                for j in 1..7 {
                    prop_assert_eq!(t.entries[(i, j)], t.entries[(i - 1, j - 1)]);
                }
            }
        }

        #[test]
        fn hankel_columns_match_flip_projection(phi in arb_series(3)) {
            let h = build_hankel(&phi, FlipConvention::J, 5, 5);
            let hc = build_hankel(&phi, FlipConvention::CurlyJ, 5, 5);
            for j in 0..5i64 {
                for i in 0..5i64 {
                    prop_assert_eq!(h.entries[(i as usize, j as usize)], phi.coeff(-(i + j)));
                    prop_assert_eq!(hc.entries[(i as usize, j as usize)], phi.coeff(-(i + j) - 1));
                }
            }
        }

        #[test]
        fn otoeplitz_adjoint_pairing(psi in arb_series(3)) {
            for v in [FlipConvention::J, FlipConvention::CurlyJ] {
                let b = build_otoeplitz(&psi, v, 6, 6);
                let bs = build_otoeplitz_adjoint(&psi, v, 6, 6);
                prop_assert!(crate::linalg::max_abs(&(b.entries.adjoint() - &bs.entries)) < 1e-15);
                for m in 0..7i64 {
                    for k in 1..7i64 {
                        let shift = if v == FlipConvention::J { 0 } else { 1 };
                        prop_assert_eq!(b.entries[(m as usize, k as usize - 1)], psi.coeff(k - m - shift));
                    }
                }
            }
        }

        #[test]
        fn builders_are_deterministic(phi in arb_series(2)) {
            let b = zn(3, 6, 6);
            prop_assert_eq!(build_dtho(&phi, &b), build_dtho(&phi, &b));
        }
    }
}
