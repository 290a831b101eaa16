//! Finite-section builders for Toeplitz, Hankel, truncated, dual truncated and
//! O'Toeplitz operators, plus explicit solutions of the shift equations.

mod builders;
mod matrix;
mod solutions;

pub use builders::{
    build_backward_shift, build_compressed_shift, build_dtho, build_dtho_adjoint, build_dtto, build_forward_shift,
    build_hankel, build_otoeplitz, build_otoeplitz_adjoint, build_sflat, build_sflat_adjoint, build_shift_inverses,
    build_tho, build_toeplitz, build_tto, rank_one, rank_one_between, FlipConvention, RankOneSpec, THETA0_ZERO_TOL,
};
pub use matrix::{symbol_hash, MatrixMeta, OperatorMatrix, SUPPORT_TOL};
pub use solutions::{build_equation_solution, ShiftRelation, SolutionParams};
