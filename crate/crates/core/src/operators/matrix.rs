use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;
use crate::modelspace::Basis;
use crate::parse::{format_complex, format_symbol};

/// Entries of magnitude at or below this count as structural zeros when
/// deciding whether a product column stays inside the certified window.
pub const SUPPORT_TOL: f64 = 1e-15;

/// Provenance of a finite section.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixMeta {
    pub builder: String,
    /// FNV-1a hash of the symbol literal, when the builder takes a symbol.
    pub symbol_hash: Option<u64>,
    /// Sorted column indices whose images lie in the row span.
    pub interior: Vec<usize>,
    /// Per-column synthesis residual; empty for derived matrices.
    pub leakage: Vec<f64>,
    pub truncation: String,
}

/// Finite section of an operator between two truncated bases.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<Complex64>,
    pub row_basis: Basis,
    pub col_basis: Basis,
    pub meta: MatrixMeta,
}

/// FNV-1a hash of a symbol's literal form.
pub fn symbol_hash(f: &LaurentSeries) -> u64 {
    format_symbol(f).bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

impl OperatorMatrix {
    /// Assembles columns `coords(action(b_j))`; a column is interior when its
    /// image is reproduced by the row basis up to [`crate::modelspace::LEAK_TOL`].
    pub fn from_action<F>(builder: &str, row_basis: &Basis, col_basis: &Basis, action: F) -> Self
    where
        F: Fn(&LaurentSeries) -> LaurentSeries,
    {
        let (rows, cols) = (row_basis.dim(), col_basis.dim());
        let mut entries = DMatrix::zeros(rows, cols);
        let mut interior = Vec::new();
        let mut leakage = Vec::with_capacity(cols);
        for j in 0..cols {
            let image = action(&col_basis.vector(j));
            let coords = row_basis.to_coords(&image);
            if coords.in_span(image.l2_norm()) {
                interior.push(j);
            }
            leakage.push(coords.residual);
            for (i, v) in coords.values.into_iter().enumerate() {
                entries[(i, j)] = v;
            }
        }
        Self {
            entries,
            row_basis: row_basis.clone(),
            col_basis: col_basis.clone(),
            meta: MatrixMeta {
                builder: builder.to_string(),
                symbol_hash: None,
                interior,
                leakage,
                truncation: format!("{} <- {}", row_basis.describe(), col_basis.describe()),
            },
        }
    }

    /// Wraps precomputed entries with an explicit interior.
    pub fn from_entries(
        builder: &str,
        row_basis: &Basis,
        col_basis: &Basis,
        entries: DMatrix<Complex64>,
        interior: Vec<usize>,
    ) -> Self {
        Self {
            entries,
            row_basis: row_basis.clone(),
            col_basis: col_basis.clone(),
            meta: MatrixMeta {
                builder: builder.to_string(),
                symbol_hash: None,
                interior,
                leakage: Vec::new(),
                truncation: format!("{} <- {}", row_basis.describe(), col_basis.describe()),
            },
        }
    }

    pub fn identity(basis: &Basis) -> Self {
        let n = basis.dim();
        Self::from_entries("identity", basis, basis, DMatrix::identity(n, n), (0..n).collect())
    }

    pub fn zeros(builder: &str, row_basis: &Basis, col_basis: &Basis) -> Self {
        let entries = DMatrix::zeros(row_basis.dim(), col_basis.dim());
        Self::from_entries(builder, row_basis, col_basis, entries, (0..col_basis.dim()).collect())
    }

    pub fn with_symbol(mut self, symbol: &LaurentSeries) -> Self {
        self.meta.symbol_hash = Some(symbol_hash(symbol));
        self
    }

    pub fn with_builder(mut self, builder: impl Into<String>) -> Self {
        self.meta.builder = builder.into();
        self
    }

    pub fn nrows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn interior(&self) -> &[usize] {
        &self.meta.interior
    }

    pub fn is_interior(&self, j: usize) -> bool {
        self.meta.interior.binary_search(&j).is_ok()
    }

    /// `self ∘ rhs`. Column `j` stays interior when it is interior for `rhs`
    /// and every row it touches is an interior column of `self`.
    pub fn compose(&self, rhs: &Self) -> Result<Self> {
        if self.col_basis != rhs.row_basis {
            return Err(DthoError::BasisMismatch(format!(
                "cannot compose {} after {}: {} vs {}",
                self.meta.builder,
                rhs.meta.builder,
                self.col_basis.describe(),
                rhs.row_basis.describe()
            )));
        }
        let interior = rhs
            .meta
            .interior
            .iter()
            .copied()
            .filter(|&j| {
                let col = rhs.entries.column(j);
                let scale = SUPPORT_TOL * col.iter().map(|c| c.norm()).fold(1.0, f64::max);
                col.iter().enumerate().all(|(i, c)| c.norm() <= scale || self.is_interior(i))
            })
            .collect();
        Ok(Self::from_entries(
            &format!("({})*({})", self.meta.builder, rhs.meta.builder),
            &self.row_basis,
            &rhs.col_basis,
            &self.entries * &rhs.entries,
            interior,
        ))
    }

    fn check_same_shape(&self, rhs: &Self) -> Result<()> {
        if self.row_basis != rhs.row_basis || self.col_basis != rhs.col_basis {
            return Err(DthoError::BasisMismatch(format!(
                "{} and {} act between different bases",
                self.meta.builder, rhs.meta.builder
            )));
        }
        Ok(())
    }

    fn intersect(&self, rhs: &Self) -> Vec<usize> {
        self.meta.interior.iter().copied().filter(|j| rhs.is_interior(*j)).collect()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self::from_entries(
            &format!("{}+{}", self.meta.builder, rhs.meta.builder),
            &self.row_basis,
            &self.col_basis,
            &self.entries + &rhs.entries,
            self.intersect(rhs),
        ))
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.check_same_shape(rhs)?;
        Ok(Self::from_entries(
            &format!("{}-{}", self.meta.builder, rhs.meta.builder),
            &self.row_basis,
            &self.col_basis,
            &self.entries - &rhs.entries,
            self.intersect(rhs),
        ))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.entries *= c;
        out
    }

    /// Restricts the certified window to `keep`.
    pub fn restrict_interior(mut self, keep: &[usize]) -> Self {
        self.meta.interior.retain(|j| keep.contains(j));
        self
    }

    /// Conjugate transpose. Entries are exact, but a column of the transpose
    /// is certified only if the caller knows the matching row is complete,
    /// so the window is inherited from `rows_complete`.
    pub fn conj_transpose(&self, rows_complete: Vec<usize>) -> Self {
        Self::from_entries(
            &format!("({})^H", self.meta.builder),
            &self.col_basis,
            &self.row_basis,
            self.entries.adjoint(),
            rows_complete,
        )
    }

    /// Columns in the interior window, all rows.
    pub fn interior_block(&self) -> DMatrix<Complex64> {
        let cols: Vec<_> = self.meta.interior.iter().map(|&j| self.entries.column(j)).collect();
        if cols.is_empty() {
            return DMatrix::zeros(self.nrows(), 0);
        }
        DMatrix::from_columns(&cols)
    }

    /// Frobenius norm over interior columns.
    pub fn interior_frobenius(&self) -> f64 {
        self.meta
            .interior
            .iter()
            .map(|&j| self.entries.column(j).iter().map(|c| c.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest entry modulus over interior columns.
    pub fn interior_max_abs(&self) -> f64 {
        self.meta
            .interior
            .iter()
            .flat_map(|&j| self.entries.column(j).iter().map(|c| c.norm()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// Column `j` as a series in the row basis.
    pub fn column_series(&self, j: usize) -> LaurentSeries {
        let v: Vec<_> = self.entries.column(j).iter().copied().collect();
        self.row_basis.from_coords(&v)
    }

    /// Applies the section to a coordinate vector.
    pub fn apply_coords(&self, v: &[Complex64]) -> Vec<Complex64> {
        let x = nalgebra::DVector::from_column_slice(v);
        (&self.entries * x).iter().copied().collect()
    }

    /// CSV with labelled header row and column, entries as `re+imi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("row\\col");
        for label in self.col_basis.labels() {
            let _ = write!(out, ",{label}");
        }
        out.push('\n');
        for (i, label) in self.row_basis.labels().into_iter().enumerate() {
            out.push_str(&label);
            for j in 0..self.ncols() {
                let _ = write!(out, ",{}", format_complex(self.entries[(i, j)]));
            }
            out.push('\n');
        }
        out
    }
}
