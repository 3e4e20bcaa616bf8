//! Numerical tolerances shared by every module.
//!
//! All thresholds are relative: a check against `tol` compares with
//! `tol * max(1, norm)` for the norms involved, so large-norm instances do not
//! fail spuriously.

use serde::{Deserialize, Serialize};

/// Centralized tolerance set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Allowed `‖A − A*‖_F / max(1, ‖A‖_F)` for a matrix to be accepted as Hermitian.
    pub herm: f64,
    /// Allowed `‖U*U − I‖_F / dim` for unitaries and isometries.
    pub unitary: f64,
    /// Allowed relative reconstruction error of an eigendecomposition.
    pub eig: f64,
    /// Relative slack for Loewner-order and eigenvalue comparisons.
    pub order: f64,
    /// Absolute slack for scalar convexity and monotonicity checks.
    pub cvx: f64,
}

impl ToleranceConfig {
    pub const DEFAULT: ToleranceConfig = ToleranceConfig {
        herm: 1e-10,
        unitary: 1e-9,
        eig: 1e-9,
        order: 1e-8,
        cvx: 1e-9,
    };

    /// Override one tolerance by key (`herm`, `unitary`, `eig`, `order`, `cvx`).
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), String> {
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("tolerance {key} must be positive and finite, got {value}"));
        }
        match key {
            "herm" => self.herm = value,
            "unitary" => self.unitary = value,
            "eig" => self.eig = value,
            "order" => self.order = value,
            "cvx" => self.cvx = value,
            other => return Err(format!("unknown tolerance key `{other}`")),
        }
        Ok(())
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// `max(1, a, b, ...)`, the scale used by all relative comparisons.
pub fn scale_of(norms: &[f64]) -> f64 {
    norms.iter().copied().fold(1.0, f64::max)
}
