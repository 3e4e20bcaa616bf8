use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generate::{random_contraction, random_hermitian, random_isometric_column, random_isometry, trial_rng};
use crate::constructions::{
    clip_contraction, column_dilate, column_unitaries, contraction_dilate, contraction_unitaries,
    midpoint_unitaries, theorem1_unitaries, CertifiedInstance, IsometricColumn,
};
use crate::convex::{ConvexFunction, Curvature};
use crate::error::{Error, Result};
use crate::io::{MatrixFile, MatrixKind};
use crate::linalg::{apply_fn, compress, hermitian_eig, HermitianMatrix, Isometry};
use crate::tolerance::{scale_of, ToleranceConfig};
use crate::verifiers::{
    fan_from_spectra, mixed_weyl_from_spectra, pair_certificate_check, staircase_check, fan_sums_check,
    trace_order_check, weyl_check, CheckReport,
};

/// Relative bound on `‖W*ÃW − Σ Zᵢ*AᵢZᵢ‖_F`.
pub const DILATION_RTOL: f64 = 1e-10;
/// Number of tightest trials kept in a report.
pub const NEAR_MISSES: usize = 10;
pub const OPEN_NOTE: &str = "OPEN QUESTION — necessary conditions only";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Thm1,
    Thm21,
    Thm22,
    Cor23,
    Q15,
    Ineq5,
}

impl Target {
    pub fn is_open(self) -> bool {
        matches!(self, Target::Q15 | Target::Ineq5)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Target::Thm1 => "thm1",
            Target::Thm21 => "thm21",
            Target::Thm22 => "thm22",
            Target::Cor23 => "cor23",
            Target::Q15 => "q15",
            Target::Ineq5 => "ineq5",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Ok(match s {
            "thm1" => Target::Thm1,
            "thm21" => Target::Thm21,
            "thm22" => Target::Thm22,
            "cor23" => Target::Cor23,
            "q15" => Target::Q15,
            "ineq5" => Target::Ineq5,
            other => return Err(format!("unknown target `{other}`")),
        })
    }
}

/// Parameters of a campaign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomSpec {
    pub seed: u64,
    pub dim: usize,
    /// Compression target dimension (`thm1`, `q15`).
    pub subspace_dim: usize,
    /// Column length (`thm22`).
    pub m: usize,
    /// Function spec string, e.g. `power_p:p=1.5`.
    pub function: String,
    pub trials: usize,
    pub target: Target,
}

impl RandomSpec {
    pub fn validate(&self) -> Result<ConvexFunction> {
        let bad = |msg: String| Err(Error::DimensionMismatch(msg));
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if matches!(self.target, Target::Thm1 | Target::Q15)
            && (self.subspace_dim == 0 || self.subspace_dim > self.dim)
        {
            return bad(format!("subspace dim {} must be in 1..={}", self.subspace_dim, self.dim));
        }
        if self.target == Target::Thm22 && self.m == 0 {
            return bad("column length m must be at least 1".into());
        }
        let f = ConvexFunction::parse(&self.function)?;
        let want = if self.target == Target::Q15 { Curvature::Concave } else { Curvature::Convex };
        if f.curvature() != want {
            return Err(Error::WrongKind(f.spec_string()));
        }
        if self.target == Target::Thm21 {
            match f.at_zero() {
                Some(v) if v <= ToleranceConfig::DEFAULT.cvx => {}
                Some(v) => return Err(Error::PositiveAtZero { value: v }),
                None => return Err(Error::Domain { name: f.spec_string(), at: 0.0 }),
            }
        }
        Ok(f)
    }
}

/// Serialized inputs of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Instance {
    Compression { a: MatrixFile, w: MatrixFile },
    Contraction { a: MatrixFile, z: MatrixFile },
    Column { a: Vec<MatrixFile>, z: Vec<MatrixFile> },
    Pair { a: MatrixFile, b: MatrixFile },
}

/// Violation or near miss, with enough data to recompute it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flagged {
    pub trial: usize,
    pub check: String,
    pub margin: f64,
    pub target: Target,
    pub function: String,
    pub instance: Instance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialError {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub spec: RandomSpec,
    pub tolerances: ToleranceConfig,
    /// `PASS` / `FAIL` for theorem targets, `OPEN` for open questions.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub trials_run: usize,
    pub violations: Vec<Flagged>,
    pub near_misses: Vec<Flagged>,
    pub errors: Vec<TrialError>,
    /// Smallest margin seen per check.
    pub worst_margins: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl FuzzReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn herm_file(h: &HermitianMatrix) -> MatrixFile {
    MatrixFile::hermitian(h)
}

/// Draws the inputs of trial `trial`.
pub fn generate_instance(spec: &RandomSpec, trial: usize) -> Result<Instance> {
    let mut rng = trial_rng(spec.seed, trial as u64);
    let n = spec.dim;
    Ok(match spec.target {
        Target::Thm1 | Target::Q15 => {
            let a = random_hermitian(&mut rng, n, 1.0);
            let w = random_isometry(&mut rng, n, spec.subspace_dim)?;
            Instance::Compression {
                a: herm_file(&a),
                w: MatrixFile::from_matrix(w.matrix(), Some(MatrixKind::Isometry)),
            }
        }
        Target::Thm21 => {
            let a = random_hermitian(&mut rng, n, 1.0);
            let z = random_contraction(&mut rng, n);
            Instance::Contraction { a: herm_file(&a), z: MatrixFile::from_matrix(&z, Some(MatrixKind::Contraction)) }
        }
        Target::Thm22 => {
            let a: Vec<MatrixFile> = (0..spec.m).map(|_| herm_file(&random_hermitian(&mut rng, n, 1.0))).collect();
            let col = random_isometric_column(&mut rng, n, spec.m)?;
            let z = col.blocks().iter().map(|b| MatrixFile::from_matrix(b, None)).collect();
            Instance::Column { a, z }
        }
        Target::Cor23 | Target::Ineq5 => {
            let a = random_hermitian(&mut rng, n, 1.0);
            let b = random_hermitian(&mut rng, n, 1.0);
            Instance::Pair { a: herm_file(&a), b: herm_file(&b) }
        }
    })
}

fn structural(check: &str) -> bool {
    matches!(check, "unitarity" | "dilation")
}

fn unitarity_report(inst: &CertifiedInstance, tol: &ToleranceConfig) -> CheckReport {
    let n = inst.pair.dim().max(1) as f64;
    let defect = inst.pair.u.defect().max(inst.pair.v.defect()) / n;
    CheckReport {
        name: "unitarity".into(),
        passed: defect <= tol.unitary,
        worst_margin: -defect,
        location: "pair".into(),
        details: format!("max ‖U*U − I‖_F / n = {defect:e}"),
        scale: 1.0,
    }
}

fn dilation_report(a_tilde: &HermitianMatrix, w: &Isometry, direct: &HermitianMatrix) -> Result<CheckReport> {
    let via = compress(a_tilde, w)?;
    let err = via.sub(direct)?.frobenius_norm() / scale_of(&[direct.frobenius_norm()]);
    Ok(CheckReport {
        name: "dilation".into(),
        passed: err <= DILATION_RTOL,
        worst_margin: -err,
        location: "W*ÃW".into(),
        details: format!("relative error {err:e} (dilated dim {})", a_tilde.dim()),
        scale: scale_of(&[direct.frobenius_norm()]),
    })
}

fn certificate_battery(inst: &CertifiedInstance, tol: &ToleranceConfig) -> Result<Vec<CheckReport>> {
    let t = tol.order;
    Ok(vec![
        pair_certificate_check(inst, t)?,
        unitarity_report(inst, tol),
        staircase_check(&inst.x, &inst.y, t)?,
        fan_sums_check(&inst.x, &inst.y, t)?,
        weyl_check(&inst.x, &inst.y, t)?,
    ])
}

fn failed_certificate(margin: f64, diagnostic: String) -> Vec<CheckReport> {
    vec![CheckReport {
        name: "certificate".into(),
        passed: false,
        worst_margin: margin,
        location: "construction".into(),
        details: diagnostic,
        scale: 1.0,
    }]
}

fn hermitians(files: &[MatrixFile], tol: &ToleranceConfig) -> Result<Vec<HermitianMatrix>> {
    files.iter().map(|f| f.to_hermitian(tol)).collect()
}

/// Runs every check for `target` on one instance.
///
/// A construction that fails its own certificate is reported as a failed
/// `certificate` check rather than an error.
pub fn evaluate(
    target: Target,
    f: &ConvexFunction,
    instance: &Instance,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckReport>> {
    let t = tol.order;
    let built = match (target, instance) {
        (Target::Thm1, Instance::Compression { a, w }) => {
            let a = a.to_hermitian(tol)?;
            let w = w.to_isometry(tol)?;
            theorem1_unitaries(&a, &w, f, tol).map(|inst| (inst, None))
        }
        (Target::Thm21, Instance::Contraction { a, z }) => {
            let a = a.to_hermitian(tol)?;
            let z = z.validate(tol)?;
            let zc = clip_contraction(&z, tol.unitary)?;
            let (a_tilde, w) = contraction_dilate(&a, &z, tol)?;
            let dil = dilation_report(&a_tilde, &w, &a.congruence(&zc)?)?;
            contraction_unitaries(&a, &z, f, tol).map(|inst| (inst, Some(dil)))
        }
        (Target::Thm22 | Target::Cor23, Instance::Column { .. } | Instance::Pair { .. }) => {
            let (as_, zs) = match instance {
                Instance::Column { a, z } => {
                    let blocks = z.iter().map(|b| b.validate(tol)).collect::<Result<Vec<_>>>()?;
                    (hermitians(a, tol)?, IsometricColumn::new(blocks, tol.unitary)?)
                }
                Instance::Pair { a, b } => {
                    let a = a.to_hermitian(tol)?;
                    let n = a.dim();
                    (vec![a, b.to_hermitian(tol)?], IsometricColumn::midpoint(n))
                }
                _ => unreachable!(),
            };
            let (a_tilde, w) = column_dilate(&as_, &zs, tol)?;
            let dil = dilation_report(&a_tilde, &w, &zs.combine(&as_)?)?;
            let inst = if target == Target::Cor23 {
                midpoint_unitaries(&as_[0], &as_[1], f, tol)
            } else {
                column_unitaries(&as_, &zs, f, tol)
            };
            inst.map(|inst| (inst, Some(dil)))
        }
        (Target::Q15, Instance::Compression { a, w }) => return question15_checks(f, a, w, tol),
        (Target::Ineq5, Instance::Pair { a, b }) => return ineq5_checks(f, a, b, tol),
        (target, _) => {
            return Err(Error::DimensionMismatch(format!("instance kind does not match target {target}")))
        }
    };
    match built {
        Ok((inst, dilation)) => {
            let mut reports = certificate_battery(&inst, tol)?;
            let trace_name = match target {
                Target::Thm1 => "trace_compression",
                Target::Thm21 => "trace_bk",
                _ => "trace_hp",
            };
            reports.push(trace_order_check(trace_name, &inst.x, &inst.y, t));
            reports.extend(dilation);
            Ok(reports)
        }
        Err(Error::CertificateFailed { margin, diagnostic }) => Ok(failed_certificate(margin, diagnostic)),
        Err(e) => Err(e),
    }
}

fn question15_checks(
    g: &ConvexFunction,
    a: &MatrixFile,
    w: &MatrixFile,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckReport>> {
    let a = a.to_hermitian(tol)?;
    let w = w.to_isometry(tol)?;
    // Any pair with g(A)_𝓔 ≤ ½(U g(A_𝓔) U* + V g(A_𝓔) V*) forces these.
    let x = compress(&apply_fn(&a, g)?, &w)?;
    let y = apply_fn(&compress(&a, &w)?, g)?;
    let t = tol.order;
    Ok(vec![staircase_check(&x, &y, t)?, fan_sums_check(&x, &y, t)?, weyl_check(&x, &y, t)?])
}

fn ineq5_checks(
    f: &ConvexFunction,
    a: &MatrixFile,
    b: &MatrixFile,
    tol: &ToleranceConfig,
) -> Result<Vec<CheckReport>> {
    let a = a.to_hermitian(tol)?;
    let b = b.to_hermitian(tol)?;
    let x = apply_fn(&a.add(&b)?.scale(0.5), f)?;
    let fa = apply_fn(&a, f)?;
    let fb = apply_fn(&b, f)?;
    let lx = hermitian_eig(&x)?.eigenvalues;
    let la = hermitian_eig(&fa)?.eigenvalues;
    let lb = hermitian_eig(&fb)?.eigenvalues;
    let scale = scale_of(&[x.frobenius_norm(), fa.frobenius_norm(), fb.frobenius_norm()]);
    let t = tol.order;
    // X ≤ ½(U f(A) U* + V f(B) V*) forces Weyl and Fan bounds against the
    // two spectra separately, and the trace bound.
    let weyl = mixed_weyl_from_spectra("mixed_weyl", &lx, &la, &lb, scale, t);
    let avg: Vec<f64> = la.iter().zip(&lb).map(|(p, q)| 0.5 * (p + q)).collect();
    let mut fan = fan_from_spectra(&lx, &avg, scale, t);
    fan.name = "mixed_fan".into();
    let trace = trace_order_check("trace_midpoint", &x, &fa.add(&fb)?.scale(0.5), t);
    Ok(vec![weyl, fan, trace])
}

struct TrialOutcome {
    trial: usize,
    result: Result<(Instance, Vec<CheckReport>)>,
}

fn run_trials(spec: &RandomSpec, f: &ConvexFunction, tol: &ToleranceConfig) -> Vec<TrialOutcome> {
    (0..spec.trials)
        .into_par_iter()
        .map(|trial| {
            let result = generate_instance(spec, trial)
                .and_then(|inst| evaluate(spec.target, f, &inst, tol).map(|r| (inst, r)));
            TrialOutcome { trial, result }
        })
        .collect()
}

fn assemble(spec: &RandomSpec, tol: &ToleranceConfig, outcomes: Vec<TrialOutcome>, started: Option<Instant>) -> FuzzReport {
    let mut violations = Vec::new();
    let mut errors = Vec::new();
    let mut worst_margins: BTreeMap<String, f64> = BTreeMap::new();
    let mut tightest: Vec<(f64, usize, String)> = Vec::new();
    let mut instances: BTreeMap<usize, Instance> = BTreeMap::new();

    for TrialOutcome { trial, result } in outcomes {
        match result {
            Err(e) => errors.push(TrialError { trial, message: e.to_string() }),
            Ok((instance, reports)) => {
                let mut best: Option<(f64, String)> = None;
                for r in &reports {
                    let w = worst_margins.entry(r.name.clone()).or_insert(f64::INFINITY);
                    *w = w.min(r.worst_margin);
                    if !r.passed {
                        violations.push(Flagged {
                            trial,
                            check: r.name.clone(),
                            margin: r.worst_margin,
                            target: spec.target,
                            function: spec.function.clone(),
                            instance: instance.clone(),
                        });
                    }
                    if !structural(&r.name) && best.as_ref().is_none_or(|(m, _)| r.worst_margin < *m) {
                        best = Some((r.worst_margin, r.name.clone()));
                    }
                }
                if let Some((m, name)) = best {
                    tightest.push((m, trial, name));
                    if tightest.len() >= 4 * NEAR_MISSES {
                        prune(&mut tightest, &mut instances);
                    }
                    if tightest.iter().any(|&(_, t, _)| t == trial) {
                        instances.insert(trial, instance);
                    }
                }
            }
        }
    }
    prune(&mut tightest, &mut instances);
    let near_misses = tightest
        .into_iter()
        .map(|(margin, trial, check)| Flagged {
            trial,
            check,
            margin,
            target: spec.target,
            function: spec.function.clone(),
            instance: instances.remove(&trial).expect("kept with its entry"),
        })
        .collect();

    let (status, note) = if spec.target.is_open() {
        ("OPEN".to_string(), Some(OPEN_NOTE.to_string()))
    } else if violations.is_empty() && errors.is_empty() {
        ("PASS".to_string(), None)
    } else {
        ("FAIL".to_string(), None)
    };
    FuzzReport {
        spec: spec.clone(),
        tolerances: *tol,
        status,
        note,
        trials_run: spec.trials,
        violations,
        near_misses,
        errors,
        worst_margins,
        wall_time_seconds: started.map(|s| s.elapsed().as_secs_f64()),
    }
}

fn prune(tightest: &mut Vec<(f64, usize, String)>, instances: &mut BTreeMap<usize, Instance>) {
    tightest.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    tightest.truncate(NEAR_MISSES);
    instances.retain(|t, _| tightest.iter().any(|&(_, k, _)| k == *t));
}

fn campaign(spec: &RandomSpec, f: &ConvexFunction, tol: &ToleranceConfig, timing: bool) -> FuzzReport {
    let started = timing.then(Instant::now);
    let outcomes = run_trials(spec, f, tol);
    assemble(spec, tol, outcomes, started)
}

/// Stress run of a theorem target; every violation is a defect.
pub fn stress_theorems(spec: &RandomSpec, tol: &ToleranceConfig, timing: bool) -> Result<FuzzReport> {
    if spec.target.is_open() {
        return Err(Error::DimensionMismatch(format!("{} is not a theorem target", spec.target)));
    }
    let f = spec.validate()?;
    Ok(campaign(spec, &f, tol, timing))
}

/// Necessary-condition probe for the concave reverse compression inequality.
pub fn probe_question15(spec: &RandomSpec, tol: &ToleranceConfig, timing: bool) -> Result<FuzzReport> {
    if spec.target != Target::Q15 {
        return Err(Error::DimensionMismatch(format!("probe_question15 needs target q15, got {}", spec.target)));
    }
    let g = spec.validate()?;
    Ok(campaign(spec, &g, tol, timing))
}

/// Necessary-condition probe for `f((A+B)/2) ≤ ½(U f(A) U* + V f(B) V*)`.
pub fn probe_ineq5_general(spec: &RandomSpec, tol: &ToleranceConfig, timing: bool) -> Result<FuzzReport> {
    if spec.target != Target::Ineq5 {
        return Err(Error::DimensionMismatch(format!("probe_ineq5_general needs target ineq5, got {}", spec.target)));
    }
    let f = spec.validate()?;
    Ok(campaign(spec, &f, tol, timing))
}

pub fn run_campaign(spec: &RandomSpec, tol: &ToleranceConfig, timing: bool) -> Result<FuzzReport> {
    match spec.target {
        Target::Q15 => probe_question15(spec, tol, timing),
        Target::Ineq5 => probe_ineq5_general(spec, tol, timing),
        _ => stress_theorems(spec, tol, timing),
    }
}

/// Recomputes the margin of a flagged check from its serialized instance.
pub fn reverify(flag: &Flagged, tol: &ToleranceConfig) -> Result<f64> {
    let f = ConvexFunction::parse(&flag.function)?;
    let reports = evaluate(flag.target, &f, &flag.instance, tol)?;
    reports
        .into_iter()
        .find(|r| r.name == flag.check)
        .map(|r| r.worst_margin)
        .ok_or_else(|| Error::DimensionMismatch(format!("check `{}` not produced", flag.check)))
}
