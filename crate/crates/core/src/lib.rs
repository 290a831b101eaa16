//! Dual truncated Hankel operators on `K_θ^⊥ = H̄₀² ⊕ θH²`.
//!
//! Symbols are finitely supported Laurent series, inner functions are
//! monomials or finite Blaschke products, and every operator is realised as a
//! finite section over a truncated orthonormal basis with a certified window
//! of columns whose images are exactly representable.

pub mod analysis;
pub mod error;
pub mod fourier;
pub mod identities;
pub mod inner;
pub mod linalg;
pub mod modelspace;
pub mod operators;
pub mod parse;

pub use analysis::{ConvergenceTable, SymbolRecovery};
pub use error::{DthoError, Result};
pub use fourier::{LaurentSeries, SupNormEstimate, DEFAULT_TOL};
pub use identities::ResidualReport;
pub use inner::{Expansion, InnerFunction};
pub use modelspace::{Basis, CoordinateVector, KPerpBasis, KThetaBasis, ModelSpace};
pub use num_complex::Complex64;
pub use operators::{OperatorMatrix, ShiftRelation, SolutionParams};
