//! Laws for the O'Toeplitz operators `B_ψ f = P·flip(ψf)` from `H̄₀²` to `H²`.
//!
//! Each law is checked as a residual. For the shift and product laws the report
//! also records whether the hypothesis holds, whether the law holds, and
//! asserts that the two agree; the residual is measured against the explicit
//! rank-one obstruction so hypothesis-violating inputs still pass.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::fourier::LaurentSeries;
use crate::modelspace::Basis;
use crate::operators::{
    build_backward_shift, build_forward_shift, build_otoeplitz, build_otoeplitz_adjoint, build_sflat,
    build_sflat_adjoint, build_toeplitz, rank_one_between, FlipConvention, OperatorMatrix, RankOneSpec,
};
use crate::parse::format_symbol;

use super::ResidualReport;

/// Truncation: `z̄, …, z̄^K` on the antiholomorphic side, `1, …, z^M` on the analytic side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OtoeplitzWindow {
    pub k: usize,
    pub m: usize,
}

impl Default for OtoeplitzWindow {
    fn default() -> Self {
        Self { k: 24, m: 24 }
    }
}

fn tag(law: &str, variant: FlipConvention) -> String {
    format!("otoeplitz-{law}[{}]", variant.name())
}

fn top(f: &LaurentSeries) -> Option<i64> {
    f.support().map(|(_, hi)| hi)
}

fn bottom(f: &LaurentSeries) -> Option<i64> {
    f.support().map(|(lo, _)| lo)
}

/// Runs the structure, Brown–Halmos, shift and product laws for one variant.
pub fn check_otoeplitz_laws(
    psi: &LaurentSeries,
    phi: &LaurentSeries,
    variant: FlipConvention,
    window: OtoeplitzWindow,
    tol: f64,
) -> Result<Vec<ResidualReport>> {
    let OtoeplitzWindow { k, m } = window;
    let case = format!("psi={}; phi={}; K={k}; M={m}", format_symbol(psi), format_symbol(phi));
    let hardy = Basis::Hardy { len: m + 1 };
    let anti = Basis::AntiHardy { len: k };
    // 𝒥 carries one extra z̄, which moves every support threshold down by one.
    let offset: i64 = match variant {
        FlipConvention::J => 1,
        FlipConvention::CurlyJ => 0,
    };
    let b = build_otoeplitz(psi, variant, k, m);
    let b_adj = build_otoeplitz_adjoint(psi, variant, k, m);
    let (s, s_adj) = (build_forward_shift(m), build_backward_shift(m));
    let (sf, sf_adj) = (build_sflat(k), build_sflat_adjoint(k));
    let mut reports = Vec::new();

    let formula = DMatrix::from_fn(m + 1, k, |row, col| psi.coeff(col as i64 - row as i64 + offset));
    let structure = OperatorMatrix::from_entries("formula", &hardy, &anti, &b.entries - formula, b.interior().to_vec());
    let adjoint_gap = crate::linalg::max_abs(&(b.entries.adjoint() - &b_adj.entries));
    reports.push(
        ResidualReport::new(tag("structure", variant), structure.interior_frobenius(), structure.interior().len(), tol)
            .with_case(case.clone())
            .with_detail("adjoint-gap", adjoint_gap)
            .with_assertion("matrix of the adjoint is the conjugate transpose", adjoint_gap <= tol),
    );

    let bh = s_adj.compose(&b)?.compose(&sf)?.sub(&b)?;
    reports.push(
        ResidualReport::new(tag("brown-halmos", variant), bh.interior_frobenius(), bh.interior().len(), tol)
            .with_case(case.clone()),
    );
    let bh_adj = sf_adj.compose(&b_adj)?.compose(&s)?.sub(&b_adj)?;
    reports.push(
        ResidualReport::new(
            tag("adjoint-brown-halmos", variant),
            bh_adj.interior_frobenius(),
            bh_adj.interior().len(),
            tol,
        )
        .with_case(case.clone()),
    );

    // S B − B 𝕊 = −1 ⊗ Q J(z̄^offset ψ*).
    let commutator = s.compose(&b)?.sub(&b.compose(&sf)?)?;
    let obstruction = rank_one_between(
        &RankOneSpec::new(-LaurentSeries::one(), psi.star().shift(-offset).flip_j().proj_q()),
        &hardy,
        &anti,
    );
    let hypothesis = top(psi).is_none_or(|hi| hi <= offset);
    reports.push(law_report(
        tag("shift", variant),
        &case,
        &commutator,
        &obstruction,
        hypothesis,
        &format!("S B = B SS iff supp psi <= {offset}"),
        tol,
    )?);

    // T_φ B_ψ against B_{φ̆ψ}; S* X 𝕊 − X = P(z̄φ) ⊗ Q·flip(z̄ψ*).
    let x = build_toeplitz(phi, m).compose(&b)?;
    let product = x.sub(&build_otoeplitz(&(phi.flip_j() * psi), variant, k, m))?;
    let drift = s_adj.compose(&x)?.compose(&sf)?.sub(&x)?;
    let obstruction = rank_one_between(
        &RankOneSpec::new(phi.shift(-1).proj_p(), variant.apply(&psi.star().shift(-1)).proj_q()),
        &hardy,
        &anti,
    );
    let hypothesis = top(phi).is_none_or(|hi| hi <= 0) || top(psi).is_none_or(|hi| hi <= offset);
    let claim = match variant {
        FlipConvention::J => "T_phi B_psi = B_(Jphi psi) iff phi coanalytic or supp psi <= 1",
        FlipConvention::CurlyJ => "T_phi B_psi = B_(Jphi psi) iff phi or psi coanalytic",
    };
    let product_holds = product.interior_frobenius() <= tol;
    reports.push(
        law_report(tag("product", variant), &case, &drift, &obstruction, hypothesis, claim, tol)?
            .with_detail("law-defect", product.interior_frobenius())
            .with_assertion("law holds iff hypothesis", product_holds == hypothesis),
    );

    // B_φ B_ψ* against T_{φ̆ψ*}; S* Y S − Y = f ⊗ g.
    let b_phi = build_otoeplitz(phi, variant, k, m);
    let y = b_phi.compose(&b_adj)?;
    let product = y.sub(&build_toeplitz(&(phi.flip_j() * psi.star()), m))?;
    let drift = s_adj.compose(&y)?.compose(&s)?.sub(&y)?;
    let shift = offset - 1;
    let obstruction = rank_one_between(
        &RankOneSpec::new(phi.flip_j().shift(shift).proj_p(), psi.flip_j().shift(shift).proj_p()),
        &hardy,
        &hardy,
    );
    let in_space = |f: &LaurentSeries| bottom(f).is_none_or(|lo| lo >= offset);
    let hypothesis = in_space(phi) || in_space(psi);
    let claim = match variant {
        FlipConvention::J => "B_phi B_psi* = T_(Jphi psi*) iff phi or psi in zH^2",
        FlipConvention::CurlyJ => "B_phi B_psi* = T_(Jphi psi*) iff phi or psi in H^2",
    };
    let product_holds = product.interior_frobenius() <= tol;
    reports.push(
        law_report(tag("adjoint-product", variant), &case, &drift, &obstruction, hypothesis, claim, tol)?
            .with_detail("law-defect", product.interior_frobenius())
            .with_assertion("law holds iff hypothesis", product_holds == hypothesis),
    );
    Ok(reports)
}

/// Residual of `defect = obstruction`; asserts the obstruction vanishes iff the hypothesis holds.
fn law_report(
    tag: String,
    case: &str,
    defect: &OperatorMatrix,
    obstruction: &OperatorMatrix,
    hypothesis: bool,
    claim: &str,
    tol: f64,
) -> Result<ResidualReport> {
    let diff = defect.sub(obstruction)?;
    let obstruction_norm = obstruction.interior_frobenius();
    Ok(ResidualReport::new(tag, diff.interior_frobenius(), diff.interior().len(), tol)
        .with_case(case)
        .with_detail("hypothesis", if hypothesis { 1.0 } else { 0.0 })
        .with_detail("obstruction-norm", obstruction_norm)
        .with_detail("defect-norm", defect.interior_frobenius())
        .with_assertion(claim, (defect.interior_frobenius() <= tol) == hypothesis))
}
