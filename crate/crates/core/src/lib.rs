//! Constructive matrix versions of Jensen's midpoint inequality.
//!
//! For Hermitian `A`, `B` and convex `f` there are unitaries `U`, `V` with
//!
//! ```text
//! f((A+B)/2) ≤ ½ (U Y U* + V Y V*),    Y = (f(A) + f(B))/2,
//! ```
//!
//! and analogous statements for compressions, contractions and isometric
//! columns. This crate builds those unitaries explicitly
//! ([`constructions`]), checks the eigenvalue, trace and rank consequences
//! numerically ([`verifiers`]) and searches random instances for
//! counterexamples to related open inequalities ([`fuzz`]).
//!
//! ```
//! use opjensen::prelude::*;
//!
//! let a = HermitianMatrix::diag(&[1.0, -1.0]);
//! let b = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
//! let f = ConvexFunction::parse("abs").unwrap();
//! let tol = ToleranceConfig::default();
//!
//! let inst = midpoint_unitaries(&a, &b, &f, &tol).unwrap();
//! assert!(inst.certificate(tol.order).unwrap().holds);
//! assert!(staircase_check(&inst.x, &inst.y, tol.order).unwrap().passed);
//! ```

pub mod cli;
pub mod constructions;
pub mod convex;
pub mod error;
pub mod fuzz;
pub mod io;
pub mod linalg;
pub mod tolerance;
pub mod verifiers;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::constructions::{
        column_unitaries, contraction_unitaries, midpoint_unitaries, monotone_unitary, theorem1_unitaries,
        CertifiedInstance, IsometricColumn, UnitaryPair,
    };
    pub use crate::convex::{ConvexFunction, Curvature, Monotonicity};
    pub use crate::linalg::{
        apply_fn, compress, hermitian_eig, loewner_le, ComplexMatrix, HermitianMatrix, Isometry, UnitaryMatrix, C64,
    };
    pub use crate::tolerance::ToleranceConfig;
    pub use crate::verifiers::{fan_sums_check, pair_certificate_check, staircase_check, weyl_check, CheckReport};
}

#[cfg(doctest)]
mod book;
