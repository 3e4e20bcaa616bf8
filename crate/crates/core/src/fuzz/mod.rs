//! Seeded random instances and counterexample search.
//!
//! Theorem targets (`thm1`, `thm21`, `thm22`, `cor23`) build certificates on
//! random inputs and must never report a violation. The open targets (`q15`,
//! `ineq5`) only evaluate spectral conditions that any certifying pair would
//! imply: a failure refutes the instance, a pass decides nothing.

mod campaign;
mod generate;

pub use campaign::{
    evaluate, generate_instance, probe_ineq5_general, probe_question15, reverify, run_campaign,
    stress_theorems, Flagged, FuzzReport, Instance, RandomSpec, Target, TrialError, DILATION_RTOL,
    NEAR_MISSES, OPEN_NOTE,
};
pub use generate::{
    random_contraction, random_hermitian, random_isometric_column, random_isometry, trial_rng,
};
