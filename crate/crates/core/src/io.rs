//! JSON matrix files: `{"rows": n, "cols": n, "entries": [[re, im], ...]}`
//! with entries row-major and an optional `"kind"`.
//!
//! Numbers are written in the shortest decimal form that parses back to the
//! same `f64`, so save → load is bit-exact.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constructions::clip_contraction;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, Isometry, UnitaryMatrix, C64};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Hermitian,
    Contraction,
    Isometry,
    Unitary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<MatrixKind>,
}

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: String, source: std::io::Error },
    #[error("malformed JSON in {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("{path}: {source}")]
    Invalid { path: String, source: Error },
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix, kind: Option<MatrixKind>) -> Self {
        MatrixFile {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.entries().iter().map(|z| [z.re, z.im]).collect(),
            kind,
        }
    }

    pub fn hermitian(h: &HermitianMatrix) -> Self {
        Self::from_matrix(h.matrix(), Some(MatrixKind::Hermitian))
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let data = self.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
        ComplexMatrix::from_vec(self.rows, self.cols, data)
    }

    /// Checks shape, finiteness and the declared kind.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
        let m = self.to_matrix()?;
        match self.kind {
            Some(MatrixKind::Hermitian) => {
                HermitianMatrix::new(m.clone(), tol.herm)?;
            }
            Some(MatrixKind::Contraction) => {
                clip_contraction(&m, tol.unitary)?;
            }
            Some(MatrixKind::Isometry) => {
                Isometry::new(m.clone(), tol.unitary)?;
            }
            Some(MatrixKind::Unitary) => {
                UnitaryMatrix::new(m.clone(), tol.unitary)?;
            }
            None => {}
        }
        Ok(m)
    }

    pub fn to_hermitian(&self, tol: &ToleranceConfig) -> Result<HermitianMatrix> {
        HermitianMatrix::new(self.validate(tol)?, tol.herm)
    }

    pub fn to_isometry(&self, tol: &ToleranceConfig) -> Result<Isometry> {
        Isometry::new(self.validate(tol)?, tol.unitary)
    }

    pub fn to_unitary(&self, tol: &ToleranceConfig) -> Result<UnitaryMatrix> {
        UnitaryMatrix::new(self.validate(tol)?, tol.unitary)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix file serializes")
    }

    pub fn load(path: &Path) -> std::result::Result<Self, IoError> {
        let p = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: p.clone(), source })?;
        serde_json::from_str(&text).map_err(|source| IoError::Parse { path: p, source })
    }

    pub fn save(&self, path: &Path) -> std::result::Result<(), IoError> {
        write_text(path, &self.to_json())
    }
}

pub(crate) fn write_text(path: &Path, text: &str) -> std::result::Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::Write { path: path.display().to_string(), source })
}
