//! Dense complex matrices, Hermitian eigendecomposition, functional calculus
//! and order predicates.

mod eig;
mod hermitian;
mod matrix;

pub use eig::{MAX_SWEEPS, OFF_DIAGONAL_RTOL};
pub use hermitian::{
    compress, hermitian_eig, loewner_le, min_eig, rank_above, rank_positive_part, HermitianMatrix,
    Isometry, LoewnerWitness, SpectralDecomposition, UnitaryMatrix,
};
pub use matrix::{ComplexMatrix, C64};

use crate::convex::ConvexFunction;
use crate::error::Result;

/// `f(A)` by spectral calculus.
pub fn apply_fn(a: &HermitianMatrix, f: &ConvexFunction) -> Result<HermitianMatrix> {
    hermitian_eig(a)?.map(|l| f.eval(l))
}
