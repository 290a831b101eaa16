//! Finitely supported Laurent series on the unit circle.
//!
//! A series is stored as a contiguous coefficient vector over its trimmed
//! support window `[lo, hi]`; every index outside the window is exactly zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DthoError, Result};

/// Default absolute tolerance for coefficient comparisons.
pub const DEFAULT_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A Laurent polynomial `Σ f_k z^k` with finitely many nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct LaurentSeries {
    lo: i64,
    coeffs: Vec<Complex64>,
}

/// Result of sampling `|f|` on roots of unity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupNormEstimate {
    /// Largest sampled modulus; a lower bound for the sup norm.
    pub value: f64,
    /// Additive bound: the true sup norm lies in `[value, value + error_bound]`.
    pub error_bound: f64,
}

impl LaurentSeries {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::term(0, c)
    }

    /// `z^k`.
    pub fn monomial(k: i64) -> Self {
        Self::term(k, Complex64::new(1.0, 0.0))
    }

    /// `c z^k`.
    pub fn term(k: i64, c: Complex64) -> Self {
        Self::from_dense(k, vec![c])
    }

    /// Builds a series from `(index, coefficient)` pairs; repeated indices add up.
    pub fn from_terms<I: IntoIterator<Item = (i64, Complex64)>>(terms: I) -> Self {
        let terms: Vec<_> = terms.into_iter().collect();
        let (Some(lo), Some(hi)) = (terms.iter().map(|t| t.0).min(), terms.iter().map(|t| t.0).max()) else {
            return Self::zero();
        };
        let mut coeffs = vec![ZERO; (hi - lo + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Self::from_dense(lo, coeffs)
    }

    /// Real-coefficient convenience constructor.
    pub fn from_real_terms<I: IntoIterator<Item = (i64, f64)>>(terms: I) -> Self {
        Self::from_terms(terms.into_iter().map(|(k, re)| (k, Complex64::new(re, 0.0))))
    }

    /// Series whose coefficient at `lo + i` is `coeffs[i]`.
    pub fn from_dense(lo: i64, coeffs: Vec<Complex64>) -> Self {
        let mut s = Self { lo, coeffs };
        s.trim();
        s
    }

    fn trim(&mut self) {
        let Some(first) = self.coeffs.iter().position(|c| *c != ZERO) else {
            self.coeffs.clear();
            self.lo = 0;
            return;
        };
        let last = self.coeffs.iter().rposition(|c| *c != ZERO).unwrap_or(first);
        self.coeffs.truncate(last + 1);
        self.coeffs.drain(..first);
        self.lo += first as i64;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Support window `(lo, hi)`, or `None` for the zero series.
    pub fn support(&self) -> Option<(i64, i64)> {
        (!self.is_zero()).then(|| (self.lo, self.lo + self.coeffs.len() as i64 - 1))
    }

    /// Largest `|k|` over the support; zero for the zero series.
    pub fn bandwidth(&self) -> u64 {
        self.support().map(|(lo, hi)| lo.unsigned_abs().max(hi.unsigned_abs())).unwrap_or(0)
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let i = k - self.lo;
        if i < 0 {
            return ZERO;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(ZERO)
    }

    /// Nonzero `(index, coefficient)` pairs in increasing index order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs.iter().enumerate().filter(|(_, c)| **c != ZERO).map(move |(i, c)| (self.lo + i as i64, *c))
    }

    /// Coefficient convolution: the pointwise product on the circle.
    pub fn multiply(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_dense(self.lo + other.lo, out)
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) = (self.support(), other.support()) else {
            return if self.is_zero() { other.scale_re(sign) } else { self.clone() };
        };
        let lo = a_lo.min(b_lo);
        let hi = a_hi.max(b_hi);
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k) * sign).collect();
        Self::from_dense(lo, coeffs)
    }

    fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_dense(self.lo, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Multiplication by `z^k`.
    pub fn shift(&self, k: i64) -> Self {
        Self { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    /// `(Jf)_k = f_{-k}`, i.e. `f(z̄)`.
    pub fn flip_j(&self) -> Self {
        match self.support() {
            None => Self::zero(),
            Some((_, hi)) => {
                let coeffs = self.coeffs.iter().rev().copied().collect();
                Self { lo: -hi, coeffs }
            }
        }
    }

    /// `(𝒥f)_k = f_{-k-1}`, i.e. `z̄ f(z̄)`.
    pub fn flip_curly_j(&self) -> Self {
        self.flip_j().shift(-1)
    }

    /// `(f*)_k = conj(f_k)`, i.e. `conj(f(z̄))`.
    pub fn star(&self) -> Self {
        Self { lo: self.lo, coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    /// Pointwise complex conjugate on the circle: `(f̄)_k = conj(f_{-k})`.
    pub fn conj_boundary(&self) -> Self {
        self.star().flip_j()
    }

    /// Keeps indices `k >= 0`.
    pub fn proj_p(&self) -> Self {
        self.window(0, i64::MAX)
    }

    /// Keeps indices `k <= -1`.
    pub fn proj_q(&self) -> Self {
        self.window(i64::MIN, -1)
    }

    /// Restriction to indices in `[lo, hi]`.
    pub fn window(&self, lo: i64, hi: i64) -> Self {
        let Some((s_lo, s_hi)) = self.support() else {
            return Self::zero();
        };
        let lo = lo.max(s_lo);
        let hi = hi.min(s_hi);
        if lo > hi {
            return Self::zero();
        }
        let a = (lo - self.lo) as usize;
        let b = (hi - self.lo) as usize;
        Self::from_dense(lo, self.coeffs[a..=b].to_vec())
    }

    /// `⟨f, g⟩ = Σ f_k conj(g_k)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let (Some((a_lo, a_hi)), Some((b_lo, b_hi))) = (self.support(), other.support()) else {
            return ZERO;
        };
        (a_lo.max(b_lo)..=a_hi.min(b_hi)).map(|k| self.coeff(k) * other.coeff(k).conj()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `Σ |k| |f_k|`, an upper bound for the sup norm of the derivative in `t`.
    pub fn derivative_l1(&self) -> f64 {
        self.terms().map(|(k, c)| k.unsigned_abs() as f64 * c.norm()).sum()
    }

    /// Largest coefficient difference against `other`.
    pub fn distance_max(&self, other: &Self) -> f64 {
        (self - other).max_abs()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.distance_max(other) <= tol
    }

    /// True when no index below zero carries a coefficient above `tol`.
    pub fn is_analytic(&self, tol: f64) -> bool {
        self.proj_q().max_abs() <= tol
    }

    /// True when no index above zero carries a coefficient above `tol`.
    pub fn is_coanalytic(&self, tol: f64) -> bool {
        self.window(1, i64::MAX).max_abs() <= tol
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms().map(|(k, c)| c * z.powi(k as i32)).sum()
    }

    /// Value at `e^{it}`.
    pub fn eval_angle(&self, t: f64) -> Complex64 {
        self.terms().map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * t)).sum()
    }

    /// Samples `|f|` at `grid_size` roots of unity and bounds the gap to the true
    /// sup norm by `(Σ|k||f_k|)·π/grid_size`.
    pub fn sup_norm_estimate(&self, grid_size: usize) -> Result<SupNormEstimate> {
        let bandwidth = self.bandwidth();
        let needed = (2 * bandwidth + 1) as usize;
        if grid_size < needed || grid_size == 0 {
            return Err(DthoError::GridTooSmall { grid: grid_size, bandwidth, needed });
        }
        let step = std::f64::consts::TAU / grid_size as f64;
        let value = (0..grid_size).map(|j| self.eval_angle(j as f64 * step).norm()).fold(0.0, f64::max);
        let error_bound = self.derivative_l1() * std::f64::consts::PI / grid_size as f64;
        Ok(SupNormEstimate { value, error_bound })
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let c = if c.im == 0.0 { format!("{}", c.re) } else { format!("({c})") };
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}z")?,
                -1 => write!(f, "{c}zbar")?,
                k if k > 0 => write!(f, "{c}z^{k}")?,
                k => write!(f, "{c}zbar^{}", -k)?,
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&LaurentSeries> for &LaurentSeries {
            type Output = LaurentSeries;
            fn $method(self, rhs: &LaurentSeries) -> LaurentSeries {
                $body(self, rhs)
            }
        }
        impl $trait<LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $method(self, rhs: LaurentSeries) -> LaurentSeries {
                $body(&self, &rhs)
            }
        }
        impl $trait<&LaurentSeries> for LaurentSeries {
            type Output = LaurentSeries;
            fn $method(self, rhs: &LaurentSeries) -> LaurentSeries {
                $body(&self, rhs)
            }
        }
        impl $trait<LaurentSeries> for &LaurentSeries {
            type Output = LaurentSeries;
            fn $method(self, rhs: LaurentSeries) -> LaurentSeries {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a: &LaurentSeries, b: &LaurentSeries| a.combine(b, 1.0));
binop!(Sub, sub, |a: &LaurentSeries, b: &LaurentSeries| a.combine(b, -1.0));
binop!(Mul, mul, |a: &LaurentSeries, b: &LaurentSeries| a.multiply(b));

impl Mul<Complex64> for &LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: Complex64) -> LaurentSeries {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for LaurentSeries {
    type Output = LaurentSeries;
    fn mul(self, rhs: Complex64) -> LaurentSeries {
        self.scale(rhs)
    }
}

impl Neg for &LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale_re(-1.0)
    }
}

impl Neg for LaurentSeries {
    type Output = LaurentSeries;
    fn neg(self) -> LaurentSeries {
        self.scale_re(-1.0)
    }
}
