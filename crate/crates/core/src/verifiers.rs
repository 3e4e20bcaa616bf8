//! Independent numerical checks of the eigenvalue, trace and rank
//! inequalities implied by a unitary-average certificate.
//!
//! Every margin is relative: the signed slack divided by
//! `max(1, ‖x‖_F, ‖y‖_F)`. A check passes when its worst margin is at least
//! `−tol`.

use serde::{Deserialize, Serialize};

use crate::constructions::{clip_contraction, CertifiedInstance, IsometricColumn, UnitaryPair};
use crate::convex::ConvexFunction;
use crate::error::{Error, Result};
use crate::linalg::{apply_fn, hermitian_eig, loewner_le, rank_above, ComplexMatrix, HermitianMatrix};
use crate::tolerance::scale_of;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    /// Signed relative slack at the tightest index; negative is a violation.
    pub worst_margin: f64,
    /// Index of the tightest comparison, e.g. `j=2`.
    pub location: String,
    pub details: String,
    /// Normalizer used for `worst_margin`.
    pub scale: f64,
}

impl CheckReport {
    fn from_margins(
        name: &str,
        margins: impl IntoIterator<Item = (f64, String)>,
        scale: f64,
        tol: f64,
        details: String,
    ) -> Self {
        let mut worst = f64::INFINITY;
        let mut location = String::new();
        for (m, loc) in margins {
            let m = m / scale;
            if m < worst {
                worst = m;
                location = loc;
            }
        }
        if worst == f64::INFINITY {
            worst = 0.0;
        }
        CheckReport {
            name: name.to_string(),
            passed: worst >= -tol,
            worst_margin: worst,
            location,
            details,
            scale,
        }
    }
}

fn same_dim(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(format!("dims {} and {}", x.dim(), y.dim())));
    }
    Ok(())
}

fn spectra(x: &HermitianMatrix, y: &HermitianMatrix) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    same_dim(x, y)?;
    let lx = hermitian_eig(x)?.eigenvalues;
    let ly = hermitian_eig(y)?.eigenvalues;
    Ok((lx, ly, scale_of(&[x.frobenius_norm(), y.frobenius_norm()])))
}

/// `λ_{2j−1}(x) ≤ λ_j(y)` for descending spectra (1-based `j`).
pub fn staircase_from_spectra(lx: &[f64], ly: &[f64], scale: f64, tol: f64) -> CheckReport {
    let n = lx.len();
    let margins = (1..=n.div_ceil(2)).map(|j| (ly[j - 1] - lx[2 * j - 2], format!("j={j}")));
    CheckReport::from_margins("staircase", margins, scale, tol, format!("n={n}"))
}

/// `Σ_{j≤k} λ_j(x) ≤ Σ_{j≤k} λ_j(y)` for all `k`.
pub fn fan_from_spectra(lx: &[f64], ly: &[f64], scale: f64, tol: f64) -> CheckReport {
    let mut sx = 0.0;
    let mut sy = 0.0;
    let margins: Vec<_> = lx
        .iter()
        .zip(ly)
        .enumerate()
        .map(|(k, (a, b))| {
            sx += a;
            sy += b;
            (sy - sx, format!("k={}", k + 1))
        })
        .collect();
    CheckReport::from_margins("fan_sums", margins, scale, tol, format!("n={}", lx.len()))
}

/// `λ_{i+j+1}(x) ≤ ½(λ_{i+1}(y) + λ_{j+1}(y))` for `i, j ≥ 0`, `i + j + 1 ≤ n`.
pub fn weyl_from_spectra(lx: &[f64], ly: &[f64], scale: f64, tol: f64) -> CheckReport {
    mixed_weyl_from_spectra("weyl", lx, ly, ly, scale, tol)
}

/// `λ_{i+j+1}(x) ≤ ½(λ_{i+1}(s) + λ_{j+1}(t))`.
pub fn mixed_weyl_from_spectra(
    name: &str,
    lx: &[f64],
    ls: &[f64],
    lt: &[f64],
    scale: f64,
    tol: f64,
) -> CheckReport {
    let n = lx.len();
    let mut margins = Vec::new();
    for i in 0..n {
        for j in 0..n - i {
            let m = 0.5 * (ls[i] + lt[j]) - lx[i + j];
            margins.push((m, format!("i={i},j={j}")));
        }
    }
    CheckReport::from_margins(name, margins, scale, tol, format!("n={n}"))
}

pub fn staircase_check(x: &HermitianMatrix, y: &HermitianMatrix, tol: f64) -> Result<CheckReport> {
    let (lx, ly, scale) = spectra(x, y)?;
    Ok(staircase_from_spectra(&lx, &ly, scale, tol))
}

pub fn fan_sums_check(x: &HermitianMatrix, y: &HermitianMatrix, tol: f64) -> Result<CheckReport> {
    let (lx, ly, scale) = spectra(x, y)?;
    Ok(fan_from_spectra(&lx, &ly, scale, tol))
}

pub fn weyl_check(x: &HermitianMatrix, y: &HermitianMatrix, tol: f64) -> Result<CheckReport> {
    let (lx, ly, scale) = spectra(x, y)?;
    Ok(weyl_from_spectra(&lx, &ly, scale, tol))
}

/// Recomputes `(U y U* + V y V*)/2 − x` and reports its smallest eigenvalue.
pub fn pair_certificate_check(inst: &CertifiedInstance, tol: f64) -> Result<CheckReport> {
    certificate_check(&inst.x, &inst.y, &inst.pair, tol)
}

/// [`pair_certificate_check`] on loose parts.
pub fn certificate_check(x: &HermitianMatrix, y: &HermitianMatrix, pair: &UnitaryPair, tol: f64) -> Result<CheckReport> {
    same_dim(x, y)?;
    let w = loewner_le(x, &pair.average(y)?, tol)?;
    Ok(CheckReport {
        name: "certificate".into(),
        passed: w.holds,
        worst_margin: w.relative_margin(),
        location: "min_eig".into(),
        details: format!("min eigenvalue {:e}", w.min_eigenvalue),
        scale: w.scale,
    })
}

/// `Tr x ≤ Tr y` as a report named `name`.
pub fn trace_order_check(name: &str, x: &HermitianMatrix, y: &HermitianMatrix, tol: f64) -> CheckReport {
    let scale = scale_of(&[x.frobenius_norm(), y.frobenius_norm()]);
    let (tx, ty) = (x.trace(), y.trace());
    CheckReport::from_margins(name, [(ty - tx, "trace".to_string())], scale, tol, format!("Tr X = {tx:e}, Tr Y = {ty:e}"))
}

/// `Tr f(Z*AZ) ≤ Tr Z*f(A)Z` for a contraction `Z` and `f(0) ≤ 0`.
pub fn trace_bk_check(
    a: &HermitianMatrix,
    z: &ComplexMatrix,
    f: &ConvexFunction,
    tol: f64,
) -> Result<CheckReport> {
    let cvx = crate::tolerance::ToleranceConfig::DEFAULT.cvx;
    match f.at_zero() {
        Some(v) if v <= cvx => {}
        Some(v) => return Err(Error::PositiveAtZero { value: v }),
        None => return Err(Error::Domain { name: f.spec_string(), at: 0.0 }),
    }
    if z.rows() != a.dim() || z.cols() != a.dim() {
        return Err(Error::DimensionMismatch("contraction does not match matrix".into()));
    }
    let z = clip_contraction(z, crate::tolerance::ToleranceConfig::DEFAULT.unitary)?;
    let x = apply_fn(&a.congruence(&z)?, f)?;
    let y = apply_fn(a, f)?.congruence(&z)?;
    Ok(trace_order_check("trace_bk", &x, &y, tol))
}

/// `Tr f(Σ Zᵢ*AᵢZᵢ) ≤ Tr Σ Zᵢ*f(Aᵢ)Zᵢ` for an isometric column.
pub fn trace_hp_check(
    as_: &[HermitianMatrix],
    zs: &IsometricColumn,
    f: &ConvexFunction,
    tol: f64,
) -> Result<CheckReport> {
    let x = apply_fn(&zs.combine(as_)?, f)?;
    let fa: Vec<HermitianMatrix> = as_.iter().map(|a| apply_fn(a, f)).collect::<Result<_>>()?;
    let y = zs.combine(&fa)?;
    Ok(trace_order_check("trace_hp", &x, &y, tol))
}

/// `rank (a+b)₊ ≤ rank a₊ + rank b₊`, eigenvalues counted above
/// `tol · max(1, ‖a‖_F, ‖b‖_F, ‖a+b‖_F)` for all three matrices.
pub fn rank_positive_part_check(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> Result<CheckReport> {
    same_dim(a, b)?;
    let sum = a.add(b)?;
    let scale = scale_of(&[a.frobenius_norm(), b.frobenius_norm(), sum.frobenius_norm()]);
    let t = tol * scale;
    let (rs, ra, rb) = (rank_above(&sum, t)?, rank_above(a, t)?, rank_above(b, t)?);
    let margin = (ra + rb) as f64 - rs as f64;
    Ok(CheckReport {
        name: "rank_positive_part".into(),
        passed: margin >= 0.0,
        worst_margin: margin,
        location: "rank".into(),
        details: format!("rank(A+B)+ = {rs}, rank A+ = {ra}, rank B+ = {rb}"),
        scale: 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{midpoint_unitaries, Provenance, Theorem};
    use crate::tolerance::ToleranceConfig;

    const TOL: f64 = ToleranceConfig::DEFAULT.order;

    fn d(v: &[f64]) -> HermitianMatrix {
        HermitianMatrix::diag(v)
    }

    fn hand_instance(x: HermitianMatrix, y: HermitianMatrix) -> CertifiedInstance {
        let n = x.dim();
        CertifiedInstance {
            x,
            y,
            pair: UnitaryPair::identity(n),
            meta: Provenance {
                theorem: Theorem::Compression,
                dim: n,
                ambient_dim: n,
                function: "abs".into(),
                split: 0.0,
                lower_dim: n,
                upper_dim: 0,
                certificate_margin: 0.0,
            },
        }
    }

    #[test]
    fn staircase_examples() {
        let r = staircase_check(&d(&[5.0, 4.0, 3.0]), &d(&[5.0, 2.0, 0.0]), TOL).unwrap();
        assert!(!r.passed);
        assert_eq!(r.location, "j=2");
        let scale = (50f64).sqrt().max((29f64).sqrt());
        assert!((r.worst_margin + 1.0 / scale).abs() < 1e-15);

        let a = d(&[3.0, -1.0, 2.0, 0.5]);
        assert!(staircase_check(&a, &a, TOL).unwrap().passed);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(staircase_check(&d(&[h, h]), &d(&[1.0, 1.0]), TOL).unwrap().passed);
    }

    #[test]
    fn fan_examples() {
        assert!(fan_sums_check(&d(&[0.0, 0.0]), &d(&[2.0, 0.5]), TOL).unwrap().passed);
        let r = fan_sums_check(&d(&[2.0, 0.0]), &d(&[1.0, 1.0]), TOL).unwrap();
        assert!(!r.passed);
        assert_eq!(r.location, "k=1");
    }

    #[test]
    fn weyl_examples() {
        assert!(weyl_check(&HermitianMatrix::identity(2), &HermitianMatrix::identity(2).scale(2.0), TOL)
            .unwrap()
            .passed);
        let r = weyl_check(&d(&[3.0, 3.0, 3.0]), &d(&[4.0, 2.0, 0.0]), TOL).unwrap();
        assert!(!r.passed);
        // i=1,j=1 gives 3 ≤ 2; i=0,j=2 and i=2,j=0 tie with it.
        assert!((r.worst_margin + 1.0 / 27f64.sqrt()).abs() < 1e-15);
        assert!(["i=0,j=2", "i=1,j=1", "i=2,j=0"].contains(&r.location.as_str()));
        // i=0, j=1 sits exactly on the boundary.
        let lx = [3.0, 3.0, 3.0];
        let ly = [4.0, 2.0, 0.0];
        assert_eq!(0.5 * (ly[0] + ly[1]) - lx[1], 0.0);
    }

    #[test]
    fn certificate_examples() {
        let a = HermitianMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 0.0]]).unwrap();
        let ok = pair_certificate_check(&hand_instance(a.clone(), a), TOL).unwrap();
        assert!(ok.passed);
        assert_eq!(ok.worst_margin, 0.0);

        let bad = pair_certificate_check(&hand_instance(d(&[1.0]), d(&[0.0])), TOL).unwrap();
        assert!(!bad.passed);
        assert_eq!(bad.worst_margin, -1.0);
    }

    #[test]
    fn certificate_implies_spectral_consequences() {
        let a = d(&[1.0, -1.0]);
        let b = HermitianMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let f = ConvexFunction::parse("abs").unwrap();
        let inst = midpoint_unitaries(&a, &b, &f, &ToleranceConfig::DEFAULT).unwrap();
        assert!(pair_certificate_check(&inst, TOL).unwrap().passed);
        for rep in [
            staircase_check(&inst.x, &inst.y, TOL).unwrap(),
            fan_sums_check(&inst.x, &inst.y, TOL).unwrap(),
            weyl_check(&inst.x, &inst.y, TOL).unwrap(),
        ] {
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn trace_examples() {
        let a = HermitianMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -3.0]]).unwrap();
        let sq = ConvexFunction::parse("square").unwrap();
        let eq = trace_bk_check(&a, &ComplexMatrix::identity(2), &sq, TOL).unwrap();
        assert!(eq.passed && eq.worst_margin.abs() < 1e-14);

        // Tr A²/16 ≤ Tr A²/4
        let half = ComplexMatrix::identity(2).scale(0.5);
        let r = trace_bk_check(&a, &half, &sq, TOL).unwrap();
        let tr_a2: f64 = 1.0 + 4.0 + 4.0 + 9.0;
        assert!((r.worst_margin * r.scale - (tr_a2 / 4.0 - tr_a2 / 16.0)).abs() < 1e-12);

        let exp = ConvexFunction::parse("exp").unwrap();
        assert!(matches!(trace_bk_check(&a, &half, &exp, TOL), Err(Error::PositiveAtZero { .. })));
        let big = ComplexMatrix::identity(2).scale(1.5);
        assert!(matches!(trace_bk_check(&a, &big, &sq, TOL), Err(Error::NotContraction { .. })));

        let col = IsometricColumn::uniform(2, 1);
        let hp = trace_hp_check(&[a.clone()], &col, &sq, TOL).unwrap();
        assert!(hp.passed && hp.worst_margin.abs() < 1e-14);
        let b = d(&[2.0, -0.5]);
        let mid = trace_hp_check(&[a, b], &IsometricColumn::midpoint(2), &sq, TOL).unwrap();
        assert!(mid.passed);
    }

    #[test]
    fn rank_examples() {
        let a = HermitianMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 0.5]]).unwrap();
        let r = rank_positive_part_check(&a, &a.scale(-1.0), TOL).unwrap();
        assert!(r.passed);
        assert_eq!(r.details, "rank(A+B)+ = 0, rank A+ = 1, rank B+ = 1");
        let r = rank_positive_part_check(&d(&[1.0, -1.0]), &d(&[-1.0, 1.0]), TOL).unwrap();
        assert_eq!(r.worst_margin, 2.0);
    }

    #[test]
    fn checks_reject_mismatched_dims() {
        assert!(staircase_check(&d(&[1.0]), &d(&[1.0, 2.0]), TOL).is_err());
        assert!(rank_positive_part_check(&d(&[1.0]), &d(&[1.0, 2.0]), TOL).is_err());
    }
}
