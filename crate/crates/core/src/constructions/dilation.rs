use super::{certify, compression_kernel, CertifiedInstance, Provenance, Theorem};
use crate::convex::ConvexFunction;
use crate::error::{Error, Result};
use crate::linalg::{apply_fn, hermitian_eig, ComplexMatrix, HermitianMatrix, Isometry};
use crate::tolerance::ToleranceConfig;

/// Family `Z₁…Z_m` of `n × n` blocks with `Σ Zᵢ*Zᵢ = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometricColumn {
    blocks: Vec<ComplexMatrix>,
}

impl IsometricColumn {
    pub fn new(blocks: Vec<ComplexMatrix>, unitary_tol: f64) -> Result<Self> {
        let n = blocks.first().map(|b| b.rows()).ok_or_else(|| {
            Error::DimensionMismatch("isometric column needs at least one block".into())
        })?;
        if blocks.iter().any(|b| b.rows() != n || b.cols() != n) {
            return Err(Error::DimensionMismatch(format!("all blocks must be {n}x{n}")));
        }
        let refs: Vec<&ComplexMatrix> = blocks.iter().collect();
        let defect = ComplexMatrix::vstack(&refs)?.isometry_defect();
        if defect > unitary_tol * n as f64 {
            return Err(Error::NotIsometricColumn { defect });
        }
        Ok(IsometricColumn { blocks })
    }

    /// `Zᵢ = I/√m` for `i = 1…m`; with `m = 2` this is the midpoint case.
    pub fn uniform(n: usize, m: usize) -> Self {
        let z = ComplexMatrix::identity(n).scale(1.0 / (m as f64).sqrt());
        IsometricColumn { blocks: vec![z; m] }
    }

    pub fn midpoint(n: usize) -> Self {
        Self::uniform(n, 2)
    }

    pub(crate) fn trusted(blocks: Vec<ComplexMatrix>) -> Self {
        IsometricColumn { blocks }
    }

    pub fn blocks(&self) -> &[ComplexMatrix] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.blocks[0].rows()
    }

    /// `Σ Zᵢ* Aᵢ Zᵢ`
    pub fn combine(&self, as_: &[HermitianMatrix]) -> Result<HermitianMatrix> {
        check_column_shapes(as_, self)?;
        let mut acc = HermitianMatrix::zeros(self.dim());
        for (a, z) in as_.iter().zip(&self.blocks) {
            acc = acc.add(&a.congruence(z)?)?;
        }
        Ok(acc)
    }
}

fn check_column_shapes(as_: &[HermitianMatrix], zs: &IsometricColumn) -> Result<()> {
    if as_.len() != zs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} matrices for a column of {} blocks",
            as_.len(),
            zs.len()
        )));
    }
    if let Some(a) = as_.iter().find(|a| a.dim() != zs.dim()) {
        return Err(Error::DimensionMismatch(format!(
            "matrix of dim {} in a column of {}x{} blocks",
            a.dim(),
            zs.dim(),
            zs.dim()
        )));
    }
    Ok(())
}

/// Largest singular value of `z`.
pub(crate) fn operator_norm(z: &ComplexMatrix) -> Result<f64> {
    let gram = HermitianMatrix::from_product(z.adjoint().mul(z));
    Ok(hermitian_eig(&gram)?.max().max(0.0).sqrt())
}

/// Returns `z` with singular values above 1 replaced by 1, provided none
/// exceeds `1 + unitary_tol`.
pub fn clip_contraction(z: &ComplexMatrix, unitary_tol: f64) -> Result<ComplexMatrix> {
    if !z.is_square() {
        return Err(Error::DimensionMismatch("contraction must be square".into()));
    }
    let norm = operator_norm(z)?;
    if norm > 1.0 + unitary_tol {
        return Err(Error::NotContraction { norm });
    }
    if norm <= 1.0 {
        return Ok(z.clone());
    }
    // Z · g(Z*Z) with g(t) = min(1, t^(-1/2)) maps each singular value s to min(s, 1).
    let gram = HermitianMatrix::from_product(z.adjoint().mul(z));
    let g = hermitian_eig(&gram)?.map(|t| Ok(if t > 1.0 { 1.0 / t.sqrt() } else { 1.0 }))?;
    Ok(z.mul(g.matrix()))
}

/// `(Ã, W)` with `Ã = diag(A, 0)` and `W = [Z; (I − Z*Z)^{1/2}]`, so that
/// `W*W = I` and `W* Ã W = Z* A Z`.
pub fn contraction_dilate(
    a: &HermitianMatrix,
    z: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(HermitianMatrix, Isometry)> {
    if z.rows() != a.dim() || z.cols() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "contraction must be {n}x{n}, got {}x{}",
            z.rows(),
            z.cols(),
            n = a.dim()
        )));
    }
    let z = clip_contraction(z, tol.unitary)?;
    dilate_clipped(a, &z, tol)
}

fn dilate_clipped(
    a: &HermitianMatrix,
    z: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<(HermitianMatrix, Isometry)> {
    let n = a.dim();
    let defect = HermitianMatrix::identity(n).sub(&HermitianMatrix::from_product(z.adjoint().mul(z)))?;
    let root = hermitian_eig(&defect)?.map(|t| Ok(t.max(0.0).sqrt()))?;
    let w = ComplexMatrix::vstack(&[z, root.matrix()])?;
    let a_tilde = HermitianMatrix::block_diag(&[a, &HermitianMatrix::zeros(n)]);
    Ok((a_tilde, Isometry::new(w, tol.unitary)?))
}

/// Certified pair for `X = f(Z*AZ) ≤ ½(U Y U* + V Y V*)`, `Y = Z* f(A) Z`.
///
/// The kernel runs on the dilation, where it dominates
/// `W* f(Ã) W = Z*f(A)Z + (I − Z*Z)^{1/2} f(0) (I − Z*Z)^{1/2}`; this is `≤ Y`
/// because `f(0) ≤ 0`, so the pair also certifies against `Y`.
pub fn contraction_unitaries(
    a: &HermitianMatrix,
    z: &ComplexMatrix,
    f: &ConvexFunction,
    tol: &ToleranceConfig,
) -> Result<CertifiedInstance> {
    match f.at_zero() {
        Some(v) if v <= tol.cvx => {}
        Some(v) => return Err(Error::PositiveAtZero { value: v }),
        None => return Err(Error::Domain { name: f.spec_string(), at: 0.0 }),
    }
    if z.rows() != a.dim() || z.cols() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "contraction must be {n}x{n}, got {}x{}",
            z.rows(),
            z.cols(),
            n = a.dim()
        )));
    }
    let z = clip_contraction(z, tol.unitary)?;
    let (a_tilde, w) = dilate_clipped(a, &z, tol)?;
    let out = compression_kernel(&a_tilde, &w, f)?;
    let y = apply_fn(a, f)?.congruence(&z)?;
    let meta = Provenance {
        theorem: Theorem::Contraction,
        dim: a.dim(),
        ambient_dim: a_tilde.dim(),
        function: f.spec_string(),
        split: out.split,
        lower_dim: out.lower_dim,
        upper_dim: out.upper_dim(),
        certificate_margin: f64::NAN,
    };
    certify(out.x, y, out.pair, meta, tol.order)
}

/// `(Ã, W)` with `Ã = diag(A₁, …, A_m)` and `W = [Z₁; …; Z_m]`, so that
/// `W* Ã W = Σ Zᵢ* Aᵢ Zᵢ`.
pub fn column_dilate(
    as_: &[HermitianMatrix],
    zs: &IsometricColumn,
    tol: &ToleranceConfig,
) -> Result<(HermitianMatrix, Isometry)> {
    check_column_shapes(as_, zs)?;
    let blocks: Vec<&HermitianMatrix> = as_.iter().collect();
    let a_tilde = HermitianMatrix::block_diag(&blocks);
    let zb: Vec<&ComplexMatrix> = zs.blocks().iter().collect();
    let w = Isometry::new(ComplexMatrix::vstack(&zb)?, tol.unitary)?;
    Ok((a_tilde, w))
}

fn column_instance(
    as_: &[HermitianMatrix],
    zs: &IsometricColumn,
    f: &ConvexFunction,
    tol: &ToleranceConfig,
    theorem: Theorem,
) -> Result<CertifiedInstance> {
    let (a_tilde, w) = column_dilate(as_, zs, tol)?;
    let out = compression_kernel(&a_tilde, &w, f)?;
    let fa: Vec<HermitianMatrix> = as_.iter().map(|a| apply_fn(a, f)).collect::<Result<_>>()?;
    let y = zs.combine(&fa)?;
    let meta = Provenance {
        theorem,
        dim: zs.dim(),
        ambient_dim: a_tilde.dim(),
        function: f.spec_string(),
        split: out.split,
        lower_dim: out.lower_dim,
        upper_dim: out.upper_dim(),
        certificate_margin: f64::NAN,
    };
    certify(out.x, y, out.pair, meta, tol.order)
}

/// Certified pair for `X = f(Σ Zᵢ*AᵢZᵢ)` against `Y = Σ Zᵢ*f(Aᵢ)Zᵢ`.
pub fn column_unitaries(
    as_: &[HermitianMatrix],
    zs: &IsometricColumn,
    f: &ConvexFunction,
    tol: &ToleranceConfig,
) -> Result<CertifiedInstance> {
    column_instance(as_, zs, f, tol, Theorem::Column)
}

/// Certified pair for `X = f((A+B)/2)` against `Y = (f(A)+f(B))/2`.
pub fn midpoint_unitaries(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    f: &ConvexFunction,
    tol: &ToleranceConfig,
) -> Result<CertifiedInstance> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("midpoint of dims {} and {}", a.dim(), b.dim())));
    }
    column_instance(&[a.clone(), b.clone()], &IsometricColumn::midpoint(a.dim()), f, tol, Theorem::Midpoint)
}
