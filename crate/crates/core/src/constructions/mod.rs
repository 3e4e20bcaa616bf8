//! Certificate unitaries for the matrix Jensen inequalities.
//!
//! Every construction produces `x`, `y` and a unitary pair `(U, V)` with
//! `x ≤ (U y U* + V y V*)/2`. All of them go through one compression kernel
//! ([`compression_kernel`]); contractions and isometric columns are first
//! dilated into a compression problem on a larger space.

mod dilation;
mod kernel;

pub use dilation::{
    clip_contraction, column_dilate, column_unitaries, contraction_dilate, contraction_unitaries,
    midpoint_unitaries, IsometricColumn,
};
#[cfg(test)]
pub(crate) use dilation::operator_norm;
pub use kernel::{compression_kernel, monotone_unitary, theorem1_unitaries, KernelOutput, MonotoneInstance};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{loewner_le, HermitianMatrix, LoewnerWitness, UnitaryMatrix};

/// Which inequality an instance certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// `f(A_𝓔) ≤ ½(U f(A)_𝓔 U* + V f(A)_𝓔 V*)`
    #[serde(rename = "thm1")]
    Compression,
    /// `f(Z*AZ) ≤ ½(U Z*f(A)Z U* + V Z*f(A)Z V*)`, `Z` a contraction, `f(0) ≤ 0`.
    #[serde(rename = "thm21")]
    Contraction,
    /// Isometric column `Σ Zᵢ*Zᵢ = I`.
    #[serde(rename = "thm22")]
    Column,
    /// `f((A+B)/2)` against `(f(A)+f(B))/2`.
    #[serde(rename = "cor23")]
    Midpoint,
    /// Single unitary for monotone `f`: `f(A_𝓔) ≤ U f(A)_𝓔 U*`.
    #[serde(rename = "monotone")]
    Monotone,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPair {
    pub u: UnitaryMatrix,
    pub v: UnitaryMatrix,
}

impl UnitaryPair {
    pub fn new(u: UnitaryMatrix, v: UnitaryMatrix) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(Error::DimensionMismatch(format!("pair dims {} and {}", u.dim(), v.dim())));
        }
        Ok(UnitaryPair { u, v })
    }

    pub fn identity(n: usize) -> Self {
        UnitaryPair { u: UnitaryMatrix::identity(n), v: UnitaryMatrix::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.u.dim()
    }

    /// `(U y U* + V y V*)/2`
    pub fn average(&self, y: &HermitianMatrix) -> Result<HermitianMatrix> {
        let a = y.conjugate_by(self.u.matrix())?;
        let b = y.conjugate_by(self.v.matrix())?;
        Ok(a.add(&b)?.scale(0.5))
    }
}

/// How an instance was built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub theorem: Theorem,
    /// Size of `x`, `y`, `U`, `V`.
    pub dim: usize,
    /// Size of the matrix the compression kernel ran on (after dilation).
    pub ambient_dim: usize,
    pub function: String,
    /// Split point used by the kernel.
    pub split: f64,
    /// Dimension of the block with spectrum `≤ split`.
    pub lower_dim: usize,
    /// Dimension of the block with spectrum `> split`.
    pub upper_dim: usize,
    /// Relative margin of the certificate at construction time.
    pub certificate_margin: f64,
}

/// `x`, `y` and a pair `(U, V)` with `x ≤ (U y U* + V y V*)/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CertifiedInstance {
    pub x: HermitianMatrix,
    pub y: HermitianMatrix,
    pub pair: UnitaryPair,
    pub meta: Provenance,
}

impl CertifiedInstance {
    /// Re-checks `x ≤ (U y U* + V y V*)/2` at relative tolerance `tol`.
    pub fn certificate(&self, tol: f64) -> Result<LoewnerWitness> {
        let avg = self.pair.average(&self.y)?;
        loewner_le(&self.x, &avg, tol)
    }
}

/// Checks a freshly built instance and fails loudly when it does not hold.
pub(crate) fn certify(
    x: HermitianMatrix,
    y: HermitianMatrix,
    pair: UnitaryPair,
    mut meta: Provenance,
    tol: f64,
) -> Result<CertifiedInstance> {
    if x.dim() != y.dim() || x.dim() != pair.dim() {
        return Err(Error::DimensionMismatch(format!(
            "x {}, y {}, pair {}",
            x.dim(),
            y.dim(),
            pair.dim()
        )));
    }
    let mut inst = CertifiedInstance { x, y, pair, meta: meta.clone() };
    let w = inst.certificate(tol)?;
    meta.certificate_margin = w.relative_margin();
    if !w.holds {
        return Err(Error::CertificateFailed {
            margin: w.relative_margin(),
            diagnostic: format!(
                "{:?} on dim {} (ambient {}), f = {}, split {}, blocks {}+{}",
                meta.theorem, meta.dim, meta.ambient_dim, meta.function, meta.split, meta.lower_dim, meta.upper_dim
            ),
        });
    }
    inst.meta = meta;
    Ok(inst)
}
