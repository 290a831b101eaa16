//! Shared fixtures for the criterion benchmarks.

use dtho_core::{Complex64, InnerFunction, KPerpBasis, LaurentSeries};

/// `z^2 + 2z̄ − 0.5 z̄^3`.
pub fn sample_symbol() -> LaurentSeries {
    LaurentSeries::from_real_terms([(2, 1.0), (-1, 2.0), (-3, -0.5)])
}

/// Basis of the given size for `z^3`.
pub fn exact_basis(n: usize) -> KPerpBasis {
    KPerpBasis::new(InnerFunction::Monomial { n: 3 }, n, n, None).expect("valid basis")
}

/// Basis of the given size for the Blaschke factor with zero `0.5`.
pub fn blaschke_basis(n: usize) -> KPerpBasis {
    let theta = InnerFunction::blaschke_factor(Complex64::new(0.5, 0.0)).expect("valid zero");
    KPerpBasis::new(theta, n, n, None).expect("valid basis")
}
