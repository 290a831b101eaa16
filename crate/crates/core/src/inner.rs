//! Inner functions: monomials `z^n` and finite Blaschke products.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;

/// Tail target used when an expansion order is chosen automatically.
pub const AUTO_TAIL_TARGET: f64 = 1e-17;

const MAX_AUTO_ORDER: usize = 20_000;

/// An inner function on the unit disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InnerFunction {
    /// `z^n` with `n >= 1`.
    Monomial { n: u32 },
    /// `c · Π (a_j − z)/(1 − conj(a_j) z)` with `|a_j| < 1` and `|c| = 1`.
    FiniteBlaschke { zeros: Vec<Complex64>, constant: Complex64 },
}

/// Truncated Taylor expansion with a bound on the discarded `ℓ¹` mass.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub series: LaurentSeries,
    pub order: usize,
    /// Upper bound for `Σ_{k>order} |θ_k|`.
    pub tail_bound: f64,
}

impl InnerFunction {
    pub fn monomial(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(DthoError::InvalidInner("monomial degree must be positive".into()));
        }
        Ok(Self::Monomial { n })
    }

    pub fn blaschke(zeros: Vec<Complex64>, constant: Complex64) -> Result<Self> {
        if zeros.is_empty() {
            return Err(DthoError::InvalidInner("a Blaschke product needs at least one zero".into()));
        }
        if let Some(a) = zeros.iter().find(|a| a.norm() >= 1.0 || a.norm().is_nan()) {
            return Err(DthoError::InvalidInner(format!("zero {a} is not inside the unit disc")));
        }
        if (constant.norm() - 1.0).abs() > 1e-14 {
            return Err(DthoError::InvalidInner(format!("constant {constant} is not unimodular")));
        }
        Ok(Self::FiniteBlaschke { zeros, constant })
    }

    /// Single-factor Blaschke product with constant 1.
    pub fn blaschke_factor(a: Complex64) -> Result<Self> {
        Self::blaschke(vec![a], Complex64::new(1.0, 0.0))
    }

    /// True for monomials, whose expansions are exact and finite.
    pub fn is_exact(&self) -> bool {
        matches!(self, Self::Monomial { .. })
    }

    /// Number of zeros counted with multiplicity.
    pub fn degree(&self) -> usize {
        match self {
            Self::Monomial { n } => *n as usize,
            Self::FiniteBlaschke { zeros, .. } => zeros.len(),
        }
    }

    /// Geometric decay rate of the Taylor coefficients.
    pub fn decay_rate(&self) -> f64 {
        match self {
            Self::Monomial { .. } => 0.0,
            Self::FiniteBlaschke { zeros, .. } => zeros.iter().map(|a| a.norm()).fold(0.0, f64::max),
        }
    }

    /// Taylor coefficients on `[0, order]` and a rigorous bound on the rest.
    pub fn expand(&self, order: usize) -> Expansion {
        match self {
            Self::Monomial { n } => {
                let n = *n as usize;
                if order >= n {
                    Expansion { series: LaurentSeries::monomial(n as i64), order, tail_bound: 0.0 }
                } else {
                    Expansion { series: LaurentSeries::zero(), order, tail_bound: 1.0 }
                }
            }
            Self::FiniteBlaschke { zeros, constant } => {
                let mut acc = vec![Complex64::new(0.0, 0.0); order + 1];
                acc[0] = *constant;
                let mut tail = 0.0;
                for a in zeros {
                    let factor = factor_coefficients(*a, order);
                    let r = a.norm();
                    // Σ_i |f_i| T_g(order − i) + T_f · ‖g‖₁ bounds the tail of f·g.
                    let new_tail =
                        acc.iter().enumerate().map(|(i, c)| c.norm() * factor_tail(r, order - i)).sum::<f64>()
                            + tail * (1.0 + 2.0 * r);
                    let mut next = vec![Complex64::new(0.0, 0.0); order + 1];
                    for (i, x) in acc.iter().enumerate() {
                        for (j, y) in factor.iter().take(order + 1 - i).enumerate() {
                            next[i + j] += x * y;
                        }
                    }
                    acc = next;
                    tail = new_tail;
                }
                Expansion { series: LaurentSeries::from_dense(0, acc), order, tail_bound: tail }
            }
        }
    }

    /// Smallest order whose tail bound is at most `target`.
    pub fn order_for_tail(&self, target: f64) -> usize {
        match self {
            Self::Monomial { n } => *n as usize,
            Self::FiniteBlaschke { .. } => {
                let mut order = 8;
                while order < MAX_AUTO_ORDER && self.expand(order).tail_bound > target {
                    order *= 2;
                }
                let (mut lo, mut hi) = (order / 2, order);
                while lo + 1 < hi {
                    let mid = (lo + hi) / 2;
                    if self.expand(mid).tail_bound > target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    /// The zeroth Taylor coefficient, read off the expansion.
    pub fn theta0(&self) -> Complex64 {
        self.expand(0).series.coeff(0)
    }

    /// `c · Π a_j`, or zero for monomials.
    pub fn theta0_closed_form(&self) -> Complex64 {
        match self {
            Self::Monomial { .. } => Complex64::new(0.0, 0.0),
            Self::FiniteBlaschke { zeros, constant } => zeros.iter().fold(*constant, |p, a| p * a),
        }
    }

    /// True when every Taylor coefficient is real within `tol`, i.e. `θ* = θ`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        let order = self.order_for_tail(AUTO_TAIL_TARGET);
        self.expand(order).series.terms().all(|(_, c)| c.im.abs() <= tol)
    }

    /// `max | |θ_N(z)| − 1 |` over `grid_size` roots of unity.
    pub fn unimodularity_residual(&self, order: usize, grid_size: usize) -> f64 {
        let series = self.expand(order).series;
        let step = std::f64::consts::TAU / grid_size.max(1) as f64;
        (0..grid_size).map(|j| (series.eval_angle(j as f64 * step).norm() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Value of `θ` at a point of the closed disc, from the closed form.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            Self::Monomial { n } => z.powu(*n),
            Self::FiniteBlaschke { zeros, constant } => {
                zeros.iter().fold(*constant, |p, a| p * (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z))
            }
        }
    }

    /// Zeros counted with multiplicity.
    pub fn zeros(&self) -> Vec<Complex64> {
        match self {
            Self::Monomial { n } => vec![Complex64::new(0.0, 0.0); *n as usize],
            Self::FiniteBlaschke { zeros, .. } => zeros.clone(),
        }
    }
}

/// Coefficients of `(a − z)/(1 − ā z)` on `[0, order]`.
fn factor_coefficients(a: Complex64, order: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(order + 1);
    out.push(a);
    let scale = Complex64::new(a.norm_sqr() - 1.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    for _ in 1..=order {
        out.push(power * scale);
        power *= a.conj();
    }
    out
}

/// `Σ_{k>m} |b_k|` for a single factor with `|a| = r`.
fn factor_tail(r: f64, m: usize) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    (1.0 - r * r) * r.powi(m as i32) / (1.0 - r)
}

impl fmt::Display for InnerFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Monomial { n } => write!(f, "z^{n}"),
            Self::FiniteBlaschke { zeros, constant } => {
                write!(f, "blaschke:c={};zeros=", crate::parse::format_complex(*constant))?;
                for (i, a) in zeros.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", crate::parse::format_complex(*a))?;
                }
                Ok(())
            }
        }
    }
}
