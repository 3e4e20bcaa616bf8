use super::eig;
use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};
use crate::tolerance::{scale_of, ToleranceConfig};

/// Square complex matrix with `A = A*` enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
    defect: f64,
}

impl HermitianMatrix {
    /// Accepts `m` if its relative Hermitian defect is within `herm_tol`,
    /// then stores the symmetrized `(m + m*)/2`.
    pub fn new(m: ComplexMatrix, herm_tol: f64) -> Result<Self> {
        let h = Self::symmetrize(m)?;
        if h.defect > herm_tol {
            return Err(Error::NotHermitian { defect: h.defect });
        }
        Ok(h)
    }

    /// Symmetrizes unconditionally, recording the relative defect
    /// `‖m − m*‖_F / max(1, ‖m‖_F)`.
    pub fn symmetrize(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let adj = m.adjoint();
        let defect = m.sub(&adj)?.frobenius_norm() / scale_of(&[m.frobenius_norm()]);
        let inner = m.add(&adj)?.scale(0.5);
        Ok(HermitianMatrix { inner, defect })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_rows(rows), ToleranceConfig::DEFAULT.herm)
    }

    pub fn diag(values: &[f64]) -> Self {
        HermitianMatrix { inner: ComplexMatrix::diag_real(values), defect: 0.0 }
    }

    pub fn zeros(n: usize) -> Self {
        Self::diag(&vec![0.0; n])
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    /// Internal: wraps a product that is Hermitian up to rounding.
    pub(crate) fn from_product(m: ComplexMatrix) -> Self {
        Self::symmetrize(m).expect("square product")
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    /// Relative Hermitian defect of the matrix this value was built from.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.inner.frobenius_norm()
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn add(&self, rhs: &HermitianMatrix) -> Result<Self> {
        Ok(Self::from_product(self.inner.add(&rhs.inner)?))
    }

    pub fn sub(&self, rhs: &HermitianMatrix) -> Result<Self> {
        Ok(Self::from_product(self.inner.sub(&rhs.inner)?))
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix { inner: self.inner.scale(s), defect: self.defect }
    }

    /// `self + c·I`
    pub fn shift(&self, c: f64) -> Self {
        let mut inner = self.inner.clone();
        for i in 0..self.dim() {
            inner[(i, i)] += C64::new(c, 0.0);
        }
        HermitianMatrix { inner, defect: self.defect }
    }

    /// `u · self · u*` for any square `u` of matching size.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.cols() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch("conjugating unitary has wrong size".into()));
        }
        Ok(Self::from_product(u.conjugate(&self.inner)))
    }

    /// `z* · self · z` for any `z` with `dim` rows.
    pub fn congruence(&self, z: &ComplexMatrix) -> Result<Self> {
        if z.rows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "congruence by a {}x{} matrix on dim {}",
                z.rows(),
                z.cols(),
                self.dim()
            )));
        }
        Ok(Self::from_product(z.congruence(&self.inner)))
    }

    pub fn block_diag(blocks: &[&HermitianMatrix]) -> Self {
        let inner: Vec<&ComplexMatrix> = blocks.iter().map(|b| &b.inner).collect();
        HermitianMatrix { inner: ComplexMatrix::block_diag(&inner), defect: 0.0 }
    }

    /// Spectral decomposition with descending eigenvalues.
    pub fn eig(&self) -> Result<SpectralDecomposition> {
        hermitian_eig(self)
    }
}

/// Square matrix with `‖U*U − I‖_F ≤ unitary_tol · dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix, unitary_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch("unitary must be square".into()));
        }
        let defect = m.isometry_defect();
        if defect > unitary_tol * (m.rows().max(1) as f64) {
            return Err(Error::NotUnitary { defect });
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix(ComplexMatrix::identity(n))
    }

    pub(crate) fn trusted(m: ComplexMatrix) -> Self {
        UnitaryMatrix(m)
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn defect(&self) -> f64 {
        self.0.isometry_defect()
    }

    pub fn adjoint(&self) -> Self {
        UnitaryMatrix(self.0.adjoint())
    }
}

/// Rectangular `W` (ambient × range) with orthonormal columns; the columns
/// span the subspace onto which matrices are compressed.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry(ComplexMatrix);

impl Isometry {
    pub fn new(m: ComplexMatrix, unitary_tol: f64) -> Result<Self> {
        if m.cols() > m.rows() || m.cols() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "isometry must be ambient x range with 1 <= range <= ambient, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        let defect = m.isometry_defect();
        if defect > unitary_tol * m.cols() as f64 {
            return Err(Error::NotIsometry { defect });
        }
        Ok(Isometry(m))
    }

    pub fn identity(n: usize) -> Self {
        Isometry(ComplexMatrix::identity(n))
    }

    pub(crate) fn trusted(m: ComplexMatrix) -> Self {
        Isometry(m)
    }

    pub fn ambient_dim(&self) -> usize {
        self.0.rows()
    }

    pub fn range_dim(&self) -> usize {
        self.0.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }
}

impl From<UnitaryMatrix> for Isometry {
    fn from(u: UnitaryMatrix) -> Self {
        Isometry(u.0)
    }
}

/// Eigenvalues in non-increasing order with the unitary whose column `j` is
/// an eigenvector for eigenvalue `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: UnitaryMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `Q diag(g(λ)) Q*`; fails on the first eigenvalue where `g` does.
    pub fn map(&self, g: impl Fn(f64) -> Result<f64>) -> Result<HermitianMatrix> {
        let values = self.eigenvalues.iter().map(|&l| g(l)).collect::<Result<Vec<_>>>()?;
        Ok(self.with_values(&values))
    }

    /// `Q diag(values) Q*`
    pub fn with_values(&self, values: &[f64]) -> HermitianMatrix {
        let q = self.eigenvectors.matrix();
        let n = self.dim();
        // Q diag(v) Q*, written out to avoid forming diag(v).
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * values[j]);
        HermitianMatrix::from_product(scaled.mul(&q.adjoint()))
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.with_values(&self.eigenvalues)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(f64::NAN)
    }
}

/// Jacobi eigendecomposition, eigenvalues sorted by (value desc, sweep index
/// asc), each eigenvector rotated so its first largest-modulus entry is real
/// and nonnegative.
pub fn hermitian_eig(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let eig::JacobiOutput { values, vectors } = eig::jacobi(a.matrix())?;
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    // sort_by is stable, so equal values keep sweep order.
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));

    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let mut q = vectors.select_columns(&order);
    for j in 0..n {
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..n {
            let m = q[(i, j)].norm();
            if m > best {
                best = m;
                pivot = i;
            }
        }
        let z = q[(pivot, j)];
        if z.norm() > 0.0 {
            let phase = z.conj() / z.norm();
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: UnitaryMatrix::trusted(q) })
}

/// Compression `W* A W` of `a` onto the range of `w`.
pub fn compress(a: &HermitianMatrix, w: &Isometry) -> Result<HermitianMatrix> {
    if w.ambient_dim() != a.dim() {
        return Err(Error::DimensionMismatch(format!(
            "isometry ambient dim {} vs matrix dim {}",
            w.ambient_dim(),
            a.dim()
        )));
    }
    a.congruence(w.matrix())
}

pub fn min_eig(a: &HermitianMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.min())
}

/// Outcome of a Loewner-order comparison `x ≤ y`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoewnerWitness {
    pub holds: bool,
    /// Smallest eigenvalue of `y − x` (absolute units).
    pub min_eigenvalue: f64,
    /// Corresponding unit eigenvector.
    pub eigenvector: Vec<C64>,
    /// `max(1, ‖x‖_F, ‖y‖_F)`
    pub scale: f64,
}

impl LoewnerWitness {
    /// `min_eigenvalue / scale`
    pub fn relative_margin(&self) -> f64 {
        self.min_eigenvalue / self.scale
    }
}

/// `x ≤ y` in the Loewner order, up to `tol · max(1, ‖x‖_F, ‖y‖_F)`.
pub fn loewner_le(x: &HermitianMatrix, y: &HermitianMatrix, tol: f64) -> Result<LoewnerWitness> {
    let diff = y.sub(x)?;
    let dec = hermitian_eig(&diff)?;
    let scale = scale_of(&[x.frobenius_norm(), y.frobenius_norm()]);
    let n = dec.dim();
    let (min_eigenvalue, eigenvector) = if n == 0 {
        (0.0, Vec::new())
    } else {
        (dec.min(), dec.eigenvectors.matrix().column(n - 1))
    };
    Ok(LoewnerWitness { holds: min_eigenvalue >= -tol * scale, min_eigenvalue, eigenvector, scale })
}

/// Number of eigenvalues above `tol · max(1, ‖a‖_F)`.
pub fn rank_positive_part(a: &HermitianMatrix, tol: f64) -> Result<usize> {
    let threshold = tol * scale_of(&[a.frobenius_norm()]);
    rank_above(a, threshold)
}

/// Number of eigenvalues strictly above an absolute threshold.
pub fn rank_above(a: &HermitianMatrix, threshold: f64) -> Result<usize> {
    Ok(hermitian_eig(a)?.eigenvalues.iter().filter(|&&l| l > threshold).count())
}
