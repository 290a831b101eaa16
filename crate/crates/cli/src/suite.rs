//! Named checks and the grid runner behind `verify`.

use dtho_core::analysis::{
    brown_halmos_product_test, check_rank_one_product, commutation_test, hyponormality_analysis,
    product_lower_bound_check,
};
use dtho_core::identities::{
    check_characterization, check_defect, check_defect_against, check_intertwining, check_otoeplitz_laws,
    check_shift_powers, check_unitary_defects, OtoeplitzWindow,
};
use dtho_core::operators::{build_equation_solution, FlipConvention, THETA0_ZERO_TOL};
use dtho_core::{DthoError, KPerpBasis, LaurentSeries, ResidualReport, ShiftRelation, SolutionParams};

use crate::config::RunConfig;

/// One selectable check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Defect(ShiftRelation),
    Solution(ShiftRelation),
    Characterization(ShiftRelation),
    UnitaryDefects,
    ShiftPowers,
    Otoeplitz(FlipConvention),
    ProductLowerBound,
    RankOneProduct,
    BrownHalmosProduct,
    Commutation,
    StarNorm,
}

impl Check {
    pub fn all() -> Vec<Check> {
        let mut out = Vec::new();
        out.extend(ShiftRelation::ALL.map(Check::Defect));
        out.extend(ShiftRelation::ALL.map(Check::Solution));
        out.extend(ShiftRelation::ALL.map(Check::Characterization));
        out.extend([Check::UnitaryDefects, Check::ShiftPowers]);
        out.extend([FlipConvention::J, FlipConvention::CurlyJ].map(Check::Otoeplitz));
        out.extend([
            Check::ProductLowerBound,
            Check::RankOneProduct,
            Check::BrownHalmosProduct,
            Check::Commutation,
            Check::StarNorm,
        ]);
        out
    }

    pub fn tag(self) -> String {
        match self {
            Check::Defect(r) => format!("defect-{}", r.name()),
            Check::Solution(r) => format!("solution-{}", r.name()),
            Check::Characterization(r) => format!("characterization-{}", r.name()),
            Check::UnitaryDefects => "unitary-defects".into(),
            Check::ShiftPowers => "shift-power-identities".into(),
            Check::Otoeplitz(v) => format!("otoeplitz-{}", v.name()),
            Check::ProductLowerBound => "product-lower-bound".into(),
            Check::RankOneProduct => "rank-one-product".into(),
            Check::BrownHalmosProduct => "brown-halmos-product".into(),
            Check::Commutation => "commutation".into(),
            Check::StarNorm => "star-norm-identity".into(),
        }
    }

    /// A tag or a group name (`all`, `defect`, `solution`, `characterization`, `otoeplitz`).
    pub fn expand(tag: &str) -> Option<Vec<Check>> {
        let all = Check::all();
        let group: Vec<Check> = match tag {
            "all" => all,
            "defect" | "solution" | "characterization" | "otoeplitz" => {
                all.into_iter().filter(|c| c.tag().starts_with(&format!("{tag}-"))).collect()
            }
            _ => all.into_iter().filter(|c| c.tag() == tag).collect(),
        };
        (!group.is_empty()).then_some(group)
    }

    fn per_symbol(self) -> bool {
        !matches!(self, Check::Solution(_) | Check::UnitaryDefects | Check::ShiftPowers)
    }

    fn ignores_theta(self) -> bool {
        matches!(self, Check::Otoeplitz(_))
    }
}

/// Result of one scheduled check.
#[derive(Clone, Debug)]
pub enum Outcome {
    Report(ResidualReport),
    Skipped { tag: String, case: String, reason: String },
}

/// `η = 1 + z/2`, `ψ = 1`, `Φ = 1`.
fn solution_params() -> SolutionParams {
    let one = LaurentSeries::one();
    let eta = LaurentSeries::from_real_terms([(0, 1.0), (1, 0.5)]);
    SolutionParams::new(eta, one.clone(), Some(one))
}

fn run_check(
    check: Check,
    basis: &KPerpBasis,
    phi: &LaurentSeries,
    psi: &LaurentSeries,
    tol: f64,
) -> dtho_core::Result<Vec<ResidualReport>> {
    let one = |r: ResidualReport| vec![r];
    Ok(match check {
        Check::Defect(r) => one(check_defect(r, phi, basis, tol)?),
        Check::Solution(r) => {
            let a = build_equation_solution(r, basis, &solution_params())?;
            let zeros = SolutionParams::new(LaurentSeries::zero(), LaurentSeries::zero(), Some(LaurentSeries::zero()));
            let zero = build_equation_solution(r, basis, &zeros)?;
            let zero_max = zero.entries.iter().map(|c| c.norm()).fold(0.0, f64::max);
            one(check_intertwining(&a, r, basis, tol)?
                .with_detail("zero-parameter-max", zero_max)
                .with_assertion("zero parameters give the zero operator", zero_max == 0.0))
        }
        Check::Characterization(r) => {
            let perturbation = build_equation_solution(r, basis, &solution_params())?;
            one(check_characterization(r, phi, basis, &perturbation, tol)?)
        }
        Check::UnitaryDefects => one(check_unitary_defects(basis, tol)?),
        Check::ShiftPowers => {
            let eta = LaurentSeries::from_real_terms([(0, 1.0), (1, 0.5)]);
            one(check_shift_powers(basis, &eta, &LaurentSeries::one(), 3, tol)?)
        }
        Check::Otoeplitz(v) => check_otoeplitz_laws(psi, phi, v, OtoeplitzWindow::default(), tol)?,
        Check::ProductLowerBound => one(product_lower_bound_check(&[(phi.clone(), psi.clone())], basis)?),
        Check::RankOneProduct => one(check_rank_one_product(phi, psi, basis, tol)?),
        Check::BrownHalmosProduct => one(brown_halmos_product_test(phi, psi, basis, tol)?),
        Check::Commutation => one(commutation_test(phi, psi, basis, tol)?),
        Check::StarNorm => one(hyponormality_analysis(phi, basis, tol)?),
    })
}

fn describe(theta: &str, phi: Option<&LaurentSeries>) -> String {
    match phi {
        Some(p) => format!("theta={theta}; phi={}", dtho_core::parse::format_symbol(p)),
        None => format!("theta={theta}"),
    }
}

fn collect(
    check: Check,
    theta: &str,
    basis: &KPerpBasis,
    phi: Option<&LaurentSeries>,
    psi: &LaurentSeries,
    tol: f64,
    out: &mut Vec<Outcome>,
) -> anyhow::Result<()> {
    let zero = LaurentSeries::zero();
    let shift_powers_excluded = check == Check::ShiftPowers && basis.space().theta0().norm() <= THETA0_ZERO_TOL;
    if shift_powers_excluded {
        out.push(Outcome::Skipped { tag: check.tag(), case: describe(theta, phi), reason: "needs theta0 != 0".into() });
        return Ok(());
    }
    match run_check(check, basis, phi.unwrap_or(&zero), psi, tol) {
        Ok(reports) => out.extend(reports.into_iter().map(Outcome::Report)),
        Err(DthoError::Hypothesis(reason)) => {
            out.push(Outcome::Skipped { tag: check.tag(), case: describe(theta, phi), reason })
        }
        Err(e) => return Err(anyhow::Error::new(e).context(format!("{} on {}", check.tag(), describe(theta, phi)))),
    }
    Ok(())
}

fn run_theta(config: &RunConfig, index: usize) -> anyhow::Result<Vec<Outcome>> {
    let (text, theta) = &config.thetas[index];
    let basis = config.basis(theta)?;
    let tol = config.tol_for(&basis);
    let mut out = Vec::new();
    for &check in &config.suite {
        if check.ignores_theta() && index > 0 {
            continue;
        }
        if check.per_symbol() {
            for phi in &config.symbols {
                collect(check, text, &basis, Some(phi), &config.psi, tol, &mut out)?;
            }
        } else {
            collect(check, text, &basis, None, &config.psi, tol, &mut out)?;
        }
    }
    Ok(out)
}

/// Runs the selected checks over every `θ` in parallel, returning outcomes in
/// grid order.
pub fn run_suite(config: &RunConfig) -> anyhow::Result<Vec<Outcome>> {
    let per_theta: Vec<anyhow::Result<Vec<Outcome>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..config.thetas.len()).map(|i| scope.spawn(move || run_theta(config, i))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(anyhow::anyhow!("check thread panicked"))))
            .collect()
    });
    let mut out = Vec::new();
    for outcomes in per_theta {
        out.extend(outcomes?);
    }
    Ok(out)
}

/// Negative control: each relation's left side against the next relation's
/// right side. Every nonzero symbol should fail.
pub fn run_self_test(config: &RunConfig) -> anyhow::Result<Vec<Outcome>> {
    let mut out = Vec::new();
    for (_, theta) in &config.thetas {
        let basis = config.basis(theta)?;
        let tol = config.tol_for(&basis);
        for phi in &config.symbols {
            for (i, &lhs) in ShiftRelation::ALL.iter().enumerate() {
                let rhs = ShiftRelation::ALL[(i + 1) % ShiftRelation::ALL.len()];
                out.push(Outcome::Report(check_defect_against(lhs, rhs, phi, &basis, tol)?));
            }
        }
    }
    Ok(out)
}
