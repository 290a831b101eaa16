//! Dense singular values, numerical rank and eigenvalues.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Default relative threshold for numerical rank.
pub const RANK_TOL: f64 = 1e-10;

/// Singular values in decreasing order.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Largest singular value, zero for empty matrices.
pub fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// `#{σ_i > rank_tol·σ₁}`; zero when `σ₁ = 0`.
pub fn numerical_rank(sv: &[f64], rank_tol: f64) -> usize {
    match sv.first() {
        Some(&s1) if s1 > 0.0 => sv.iter().filter(|&&s| s > rank_tol * s1).count(),
        _ => 0,
    }
}

/// Eigenvalues from the complex Schur form, sorted by modulus then argument.
pub fn eigenvalues(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let n = m.nrows();
    let max_iter = 200 * n.max(10);
    let t = match m.clone().try_schur(f64::EPSILON, max_iter) {
        Some(s) => s.unpack().1,
        None => {
            // Reflecting through a fixed generic vector breaks exact structure
            // that stalls the QR iteration without moving the spectrum.
            let v = DVector::from_fn(n, |i, _| {
                Complex64::from_polar(1.0, 0.37 * (i as f64 + 1.0)).scale(1.0 + 0.1 * i as f64)
            });
            let v = &v / Complex64::new(v.norm(), 0.0);
            let h = DMatrix::identity(n, n) - (&v * v.adjoint()).scale(2.0);
            let conj = &h * m * &h;
            match conj.try_schur(1e3 * f64::EPSILON, 10 * max_iter) {
                Some(s) => s.unpack().1,
                None => return vec![Complex64::new(f64::NAN, f64::NAN); n],
            }
        }
    };
    let mut ev: Vec<Complex64> = t.diagonal().iter().copied().collect();
    sort_spectrum(&mut ev);
    ev
}

/// Orders by modulus, then argument in `(-π, π]`, with `1e-12` rounding so that
/// numerically equal values sort deterministically.
pub fn sort_spectrum(ev: &mut [Complex64]) {
    let key = |z: &Complex64| {
        let r = (z.norm() * 1e12).round();
        let a = if z.norm() < 1e-12 { 0.0 } else { (z.arg() * 1e12).round() };
        (r, a)
    };
    ev.sort_by(|x, y| {
        let (a, b) = (key(x), key(y));
        a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
    });
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn hermitian_min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
