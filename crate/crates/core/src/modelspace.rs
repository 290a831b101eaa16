//! The decomposition `L² = H̄₀² ⊕ K_θ ⊕ θH²`, the projections `P_θ`, `Q_θ`,
//! and truncated orthonormal bases with coordinate maps.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;
use crate::inner::{Expansion, InnerFunction, AUTO_TAIL_TARGET};

/// Relative leakage below which an image counts as lying in the retained span.
pub const LEAK_TOL: f64 = 1e-13;

/// An inner function together with the truncated expansion used for arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpace {
    theta: InnerFunction,
    expansion: Expansion,
    theta_bar: LaurentSeries,
    theta_star: LaurentSeries,
}

impl ModelSpace {
    /// Uses `order` terms of the expansion, or enough for a `1e-17` tail when `None`.
    pub fn new(theta: InnerFunction, order: Option<usize>) -> Self {
        let order = order.unwrap_or_else(|| theta.order_for_tail(AUTO_TAIL_TARGET));
        let expansion = theta.expand(order);
        let theta_bar = expansion.series.conj_boundary();
        let theta_star = expansion.series.star();
        Self { theta, expansion, theta_bar, theta_star }
    }

    pub fn theta(&self) -> &InnerFunction {
        &self.theta
    }

    /// Truncated expansion `θ_N`.
    pub fn theta_series(&self) -> &LaurentSeries {
        &self.expansion.series
    }

    /// `θ̄_N`, the boundary conjugate of the expansion.
    pub fn theta_bar(&self) -> &LaurentSeries {
        &self.theta_bar
    }

    /// `θ*_N`.
    pub fn theta_star(&self) -> &LaurentSeries {
        &self.theta_star
    }

    pub fn theta0(&self) -> Complex64 {
        self.expansion.series.coeff(0)
    }

    pub fn expansion_order(&self) -> usize {
        self.expansion.order
    }

    pub fn tail_bound(&self) -> f64 {
        self.expansion.tail_bound
    }

    pub fn is_exact(&self) -> bool {
        self.theta.is_exact()
    }

    /// `Q_θ f = Q f + θ P(θ̄ f)`.
    pub fn proj_q_theta(&self, f: &LaurentSeries) -> LaurentSeries {
        let analytic = (&self.theta_bar * &f.proj_p()).proj_p();
        f.proj_q() + &self.expansion.series * &analytic
    }

    /// `P_θ f = f − Q_θ f`.
    pub fn proj_p_theta(&self, f: &LaurentSeries) -> LaurentSeries {
        f - self.proj_q_theta(f)
    }

    /// `θ·f` with the truncated expansion.
    pub fn mul_theta(&self, f: &LaurentSeries) -> LaurentSeries {
        &self.expansion.series * f
    }
}

/// `Q_θ f` with an expansion of the given order.
pub fn proj_q_theta(f: &LaurentSeries, theta: &InnerFunction, order: usize) -> LaurentSeries {
    ModelSpace::new(theta.clone(), Some(order)).proj_q_theta(f)
}

/// `P_θ f` with an expansion of the given order.
pub fn proj_p_theta(f: &LaurentSeries, theta: &InnerFunction, order: usize) -> LaurentSeries {
    ModelSpace::new(theta.clone(), Some(order)).proj_p_theta(f)
}

/// Coordinates of a series against a basis, with the synthesis residual.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordinateVector {
    pub values: Vec<Complex64>,
    /// `‖f − from_coords(values)‖₂`.
    pub residual: f64,
}

impl CoordinateVector {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// True when the input lay in the span up to [`LEAK_TOL`] relative to its size.
    pub fn in_span(&self, scale: f64) -> bool {
        self.residual <= LEAK_TOL * (1.0 + scale)
    }
}

/// Truncated orthonormal basis `z̄, …, z̄^{N_neg}, θ, θz, …, θz^{M_an−1}` of `K_θ^⊥`.
#[derive(Clone, Debug, PartialEq)]
pub struct KPerpBasis {
    space: ModelSpace,
    n_neg: usize,
    m_an: usize,
}

impl KPerpBasis {
    /// Expansion order defaults to the larger of `N_neg + M_an` and the `1e-17` tail order.
    pub fn new(theta: InnerFunction, n_neg: usize, m_an: usize, order: Option<usize>) -> Result<Self> {
        if n_neg == 0 || m_an == 0 {
            return Err(DthoError::InvalidParameter {
                name: "basis size",
                reason: format!("N_neg = {n_neg} and M_an = {m_an} must both be positive"),
            });
        }
        let order = order.unwrap_or_else(|| theta.order_for_tail(AUTO_TAIL_TARGET).max(n_neg + m_an));
        Ok(Self { space: ModelSpace::new(theta, Some(order)), n_neg, m_an })
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn theta(&self) -> &InnerFunction {
        self.space.theta()
    }

    pub fn n_neg(&self) -> usize {
        self.n_neg
    }

    pub fn m_an(&self) -> usize {
        self.m_an
    }

    pub fn dim(&self) -> usize {
        self.n_neg + self.m_an
    }

    /// Position of `z̄^k`, `1 <= k <= N_neg`.
    pub fn neg_index(&self, k: usize) -> Option<usize> {
        (1..=self.n_neg).contains(&k).then(|| k - 1)
    }

    /// Position of `θz^m`, `m < M_an`.
    pub fn analytic_index(&self, m: usize) -> Option<usize> {
        (m < self.m_an).then(|| self.n_neg + m)
    }

    pub fn vector(&self, i: usize) -> LaurentSeries {
        if i < self.n_neg {
            LaurentSeries::monomial(-(i as i64 + 1))
        } else {
            self.space.theta_series().shift((i - self.n_neg) as i64)
        }
    }

    pub fn label(&self, i: usize) -> String {
        if i < self.n_neg {
            format!("zbar^{}", i + 1)
        } else {
            format!("theta*z^{}", i - self.n_neg)
        }
    }

    fn coefficients(&self, f: &LaurentSeries) -> Vec<Complex64> {
        let mut values: Vec<Complex64> = (1..=self.n_neg as i64).map(|k| f.coeff(-k)).collect();
        let analytic = (self.space.theta_bar() * f).window(0, self.m_an as i64 - 1);
        values.extend((0..self.m_an as i64).map(|m| analytic.coeff(m)));
        values
    }

    pub fn from_coords(&self, values: &[Complex64]) -> LaurentSeries {
        let neg =
            LaurentSeries::from_terms(values[..self.n_neg].iter().enumerate().map(|(i, v)| (-(i as i64) - 1, *v)));
        let analytic = LaurentSeries::from_dense(0, values[self.n_neg..].to_vec());
        neg + self.space.mul_theta(&analytic)
    }
}

/// Orthonormal basis of `K_θ`: monomials for `z^n`, Takenaka–Malmquist functions otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct KThetaBasis {
    space: ModelSpace,
    vectors: Vec<LaurentSeries>,
}

impl KThetaBasis {
    pub fn new(theta: InnerFunction, order: Option<usize>) -> Self {
        let space = ModelSpace::new(theta, order);
        let n = space.expansion_order() as i64;
        let vectors = match space.theta() {
            InnerFunction::Monomial { n } => (0..*n as i64).map(LaurentSeries::monomial).collect(),
            InnerFunction::FiniteBlaschke { zeros, .. } => {
                let one = Complex64::new(1.0, 0.0);
                let mut prefix = LaurentSeries::one();
                let mut out = Vec::with_capacity(zeros.len());
                for a in zeros {
                    let kernel = LaurentSeries::from_dense(
                        0,
                        (0..=n).map(|k| a.conj().powi(k as i32) * (1.0 - a.norm_sqr()).sqrt()).collect(),
                    );
                    out.push((&prefix * &kernel).window(0, n));
                    let factor =
                        InnerFunction::blaschke(vec![*a], one).map(|b| b.expand(n as usize).series).unwrap_or_default();
                    prefix = (&prefix * &factor).window(0, n);
                }
                out
            }
        };
        Self { space, vectors }
    }

    pub fn space(&self) -> &ModelSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }
}

/// Row or column basis of a finite section.
#[derive(Clone, Debug, PartialEq)]
pub enum Basis {
    /// `K_θ^⊥` with the ordering of [`KPerpBasis`].
    KPerp(KPerpBasis),
    /// `1, z, …, z^{len−1}` in `H²`.
    Hardy { len: usize },
    /// `z̄, …, z̄^{len}` in `H̄₀²`.
    AntiHardy { len: usize },
    /// Orthonormal basis of `K_θ`.
    ModelSpace(KThetaBasis),
}

impl Basis {
    pub fn dim(&self) -> usize {
        match self {
            Self::KPerp(b) => b.dim(),
            Self::Hardy { len } | Self::AntiHardy { len } => *len,
            Self::ModelSpace(b) => b.dim(),
        }
    }

    pub fn vector(&self, i: usize) -> LaurentSeries {
        match self {
            Self::KPerp(b) => b.vector(i),
            Self::Hardy { .. } => LaurentSeries::monomial(i as i64),
            Self::AntiHardy { .. } => LaurentSeries::monomial(-(i as i64) - 1),
            Self::ModelSpace(b) => b.vectors[i].clone(),
        }
    }

    pub fn label(&self, i: usize) -> String {
        match self {
            Self::KPerp(b) => b.label(i),
            Self::Hardy { .. } => format!("z^{i}"),
            Self::AntiHardy { .. } => format!("zbar^{}", i + 1),
            Self::ModelSpace(b) if b.space.is_exact() => format!("z^{i}"),
            Self::ModelSpace(_) => format!("k_{i}"),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.dim()).map(|i| self.label(i)).collect()
    }

    /// Analysis `⟨f, b_i⟩` with the synthesis residual.
    pub fn to_coords(&self, f: &LaurentSeries) -> CoordinateVector {
        let values = match self {
            Self::KPerp(b) => b.coefficients(f),
            Self::Hardy { len } => (0..*len as i64).map(|k| f.coeff(k)).collect(),
            Self::AntiHardy { len } => (1..=*len as i64).map(|k| f.coeff(-k)).collect(),
            Self::ModelSpace(b) => b.vectors.iter().map(|v| f.inner(v)).collect(),
        };
        let residual = (f - self.from_coords(&values)).l2_norm();
        CoordinateVector { values, residual }
    }

    /// Synthesis `Σ v_i b_i`.
    pub fn from_coords(&self, values: &[Complex64]) -> LaurentSeries {
        match self {
            Self::KPerp(b) => b.from_coords(values),
            Self::Hardy { .. } => LaurentSeries::from_dense(0, values.to_vec()),
            Self::AntiHardy { .. } => {
                LaurentSeries::from_terms(values.iter().enumerate().map(|(i, v)| (-(i as i64) - 1, *v)))
            }
            Self::ModelSpace(b) => {
                b.vectors.iter().zip(values).fold(LaurentSeries::zero(), |acc, (v, c)| acc + v.scale(*c))
            }
        }
    }

    /// Gram matrix `⟨b_j, b_i⟩`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let vectors: Vec<_> = (0..self.dim()).map(|i| self.vector(i)).collect();
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| vectors[j].inner(&vectors[i]))
    }

    pub fn as_kperp(&self) -> Option<&KPerpBasis> {
        match self {
            Self::KPerp(b) => Some(b),
            _ => None,
        }
    }

    /// Short description for metadata.
    pub fn describe(&self) -> String {
        match self {
            Self::KPerp(b) => format!(
                "kperp(theta={}, nneg={}, man={}, order={})",
                b.theta(),
                b.n_neg,
                b.m_an,
                b.space.expansion_order()
            ),
            Self::Hardy { len } => format!("hardy(len={len})"),
            Self::AntiHardy { len } => format!("antihardy(len={len})"),
            Self::ModelSpace(b) => format!("ktheta(theta={})", b.space.theta()),
        }
    }
}

impl From<KPerpBasis> for Basis {
    fn from(b: KPerpBasis) -> Self {
        Self::KPerp(b)
    }
}
