use super::{certify, CertifiedInstance, Provenance, Theorem, UnitaryPair};
use crate::convex::{effective_split, ConvexFunction, Curvature};
use crate::error::{Error, Result};
use crate::linalg::{
    apply_fn, compress, hermitian_eig, loewner_le, ComplexMatrix, HermitianMatrix, Isometry,
    UnitaryMatrix,
};
use crate::tolerance::ToleranceConfig;

/// Everything the compression construction produces, before certification.
#[derive(Debug, Clone)]
pub struct KernelOutput {
    /// `f(A_𝓔)`
    pub x: HermitianMatrix,
    /// `f(A)_𝓔`
    pub y: HermitianMatrix,
    pub pair: UnitaryPair,
    /// Eigenvectors of `A_𝓔`, lower block (spectrum `≤ split`) first.
    pub basis: UnitaryMatrix,
    /// Eigenvalues of `A_𝓔` in the order of `basis` columns.
    pub spectrum: Vec<f64>,
    pub lower_dim: usize,
    pub split: f64,
}

impl KernelOutput {
    pub fn upper_dim(&self) -> usize {
        self.spectrum.len() - self.lower_dim
    }
}

/// `Q_X Q_Y*` for a block: maps the descending eigenbasis of `yb` onto that
/// of `xb`, so that `U yb U* = Q_X diag(λ(yb)) Q_X*`.
fn block_unitary(xb: &HermitianMatrix, yb: &HermitianMatrix) -> Result<ComplexMatrix> {
    let qx = hermitian_eig(xb)?.eigenvectors.into_matrix();
    let qy = hermitian_eig(yb)?.eigenvectors.into_matrix();
    Ok(qx.mul(&qy.adjoint()))
}

/// Builds `(U, V)` for `f(A_𝓔) ≤ ½(U f(A)_𝓔 U* + V f(A)_𝓔 V*)`.
///
/// `A_𝓔` is split into spectral blocks below and above the split point of
/// `f`, on each of which `f` is monotone. Each block of `f(A_𝓔)` is dominated
/// eigenvalue by eigenvalue by the matching block of `f(A)_𝓔`, giving
/// unitaries `U₀`, `V₀`. The block-diagonal part of `f(A)_𝓔` is the average
/// of its conjugates by `diag(I, I)` and `diag(I, −I)`, hence
/// `U = diag(U₀, V₀)` and `V = diag(U₀, −V₀)` in the split basis.
pub fn compression_kernel(a: &HermitianMatrix, w: &Isometry, f: &ConvexFunction) -> Result<KernelOutput> {
    if f.curvature() != Curvature::Convex {
        return Err(Error::WrongKind(f.spec_string()));
    }
    let ae = compress(a, w)?;
    let dec = hermitian_eig(&ae)?;
    let k = dec.dim();
    let split = effective_split(f, dec.min(), dec.max());

    // Descending order puts the lower block (μ ≤ split) at the end.
    let upper: Vec<usize> = (0..k).filter(|&j| dec.eigenvalues[j] > split).collect();
    let lower: Vec<usize> = (0..k).filter(|&j| dec.eigenvalues[j] <= split).collect();
    let order: Vec<usize> = lower.iter().chain(&upper).copied().collect();
    let l = lower.len();

    let p = dec.eigenvectors.matrix().select_columns(&order);
    let spectrum: Vec<f64> = order.iter().map(|&j| dec.eigenvalues[j]).collect();
    let fx: Vec<f64> = spectrum.iter().map(|&mu| f.eval(mu)).collect::<Result<_>>()?;

    let x = dec.map(|mu| f.eval(mu))?;
    let y = compress(&apply_fn(a, f)?, w)?;

    // f(A)_𝓔 in the split basis; the blocks of f(A_𝓔) there are diagonal.
    let y_split = y.congruence(&p)?.into_matrix();
    let mut u_blocks = Vec::with_capacity(2);
    for (r0, r1) in [(0, l), (l, k)] {
        if r0 == r1 {
            continue;
        }
        let xb = HermitianMatrix::diag(&fx[r0..r1]);
        let yb = HermitianMatrix::from_product(y_split.submatrix(r0, r1, r0, r1));
        u_blocks.push(block_unitary(&xb, &yb)?);
    }

    let (u_split, v_split) = if u_blocks.len() == 2 {
        let (u0, v0) = (&u_blocks[0], &u_blocks[1]);
        let neg_v0 = v0.scale(-1.0);
        (ComplexMatrix::block_diag(&[u0, v0]), ComplexMatrix::block_diag(&[u0, &neg_v0]))
    } else {
        (u_blocks[0].clone(), u_blocks[0].clone())
    };

    let u = p.mul(&u_split).mul(&p.adjoint());
    let v = p.mul(&v_split).mul(&p.adjoint());
    Ok(KernelOutput {
        x,
        y,
        pair: UnitaryPair { u: UnitaryMatrix::trusted(u), v: UnitaryMatrix::trusted(v) },
        basis: UnitaryMatrix::trusted(p),
        spectrum,
        lower_dim: l,
        split,
    })
}

/// Certified pair for `f(A_𝓔) ≤ ½(U f(A)_𝓔 U* + V f(A)_𝓔 V*)`, where `𝓔` is the
/// range of `w`.
pub fn theorem1_unitaries(
    a: &HermitianMatrix,
    w: &Isometry,
    f: &ConvexFunction,
    tol: &ToleranceConfig,
) -> Result<CertifiedInstance> {
    let out = compression_kernel(a, w, f)?;
    let meta = Provenance {
        theorem: Theorem::Compression,
        dim: out.x.dim(),
        ambient_dim: a.dim(),
        function: f.spec_string(),
        split: out.split,
        lower_dim: out.lower_dim,
        upper_dim: out.upper_dim(),
        certificate_margin: f64::NAN,
    };
    certify(out.x, out.y, out.pair, meta, tol.order)
}

/// Single-unitary certificate `f(A_𝓔) ≤ U f(A)_𝓔 U*`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneInstance {
    pub x: HermitianMatrix,
    pub y: HermitianMatrix,
    pub u: UnitaryMatrix,
    pub meta: Provenance,
}

/// For `f` monotone on the spectral hull of `A_𝓔` the kernel yields one empty
/// block and `U = V`; fails with [`Error::NotMonotone`] otherwise.
pub fn monotone_unitary(
    a: &HermitianMatrix,
    w: &Isometry,
    f: &ConvexFunction,
    tol: &ToleranceConfig,
) -> Result<MonotoneInstance> {
    let out = compression_kernel(a, w, f)?;
    if out.lower_dim != 0 && out.upper_dim() != 0 {
        let lo = out.spectrum.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = out.spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::NotMonotone { name: f.spec_string(), lo, hi });
    }
    let u = out.pair.u;
    let rhs = out.y.conjugate_by(u.matrix())?;
    let wit = loewner_le(&out.x, &rhs, tol.order)?;
    let meta = Provenance {
        theorem: Theorem::Monotone,
        dim: out.x.dim(),
        ambient_dim: a.dim(),
        function: f.spec_string(),
        split: out.split,
        lower_dim: out.lower_dim,
        upper_dim: out.spectrum.len() - out.lower_dim,
        certificate_margin: wit.relative_margin(),
    };
    if !wit.holds {
        return Err(Error::CertificateFailed {
            margin: wit.relative_margin(),
            diagnostic: format!("monotone certificate for {} on dim {}", meta.function, meta.dim),
        });
    }
    Ok(MonotoneInstance { x: out.x, y: out.y, u, meta })
}
