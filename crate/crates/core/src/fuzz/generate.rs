use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rand::SeedableRng;

use crate::constructions::IsometricColumn;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianMatrix, Isometry, C64};

/// Generator for trial `trial` of a campaign seeded with `seed`.
///
/// Each trial gets its own ChaCha20 stream: the key is derived from `seed`
/// by `ChaCha20Rng::seed_from_u64`, the 64-bit stream id is the trial index.
/// Streams are independent of execution order, so parallel and serial runs
/// draw identical instances.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, sd: f64) -> C64 {
    // E|z|² = sd², split evenly between the two components.
    let s = sd * std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, sd: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, sd))
}

/// `(M + M*)/2` for `M` with i.i.d. complex Gaussian entries of standard deviation `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> HermitianMatrix {
    HermitianMatrix::from_product(gaussian_matrix(rng, dim, dim, scale))
}

const MGS_ATTEMPTS: usize = 3;

/// Orthonormal columns by modified Gram-Schmidt with one re-orthogonalization pass.
fn orthonormalize(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut q: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = m.column(j);
        let original: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for _pass in 0..2 {
            for u in &q {
                let dot: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= dot * ui;
                }
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 1e-10 * original) {
            return None;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        q.push(v);
    }
    Some(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}

/// Random `ambient × range` isometry from a Gaussian matrix.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, ambient: usize, range: usize) -> Result<Isometry> {
    if range == 0 || range > ambient {
        return Err(Error::DimensionMismatch(format!("isometry {ambient}x{range}")));
    }
    for _ in 0..MGS_ATTEMPTS {
        if let Some(q) = orthonormalize(&gaussian_matrix(rng, ambient, range, 1.0)) {
            return Ok(Isometry::trusted(q));
        }
    }
    Err(Error::RankDeficient(MGS_ATTEMPTS))
}

/// Random contraction: a Gaussian `G` with singular values `s ↦ s/(1+s)`,
/// rescaled so the largest is uniform in `[0, 1]`.
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, dim, dim, 1.0);
    let target: f64 = rng.random_range(0.0..=1.0);
    let gram = HermitianMatrix::from_product(g.adjoint().mul(&g));
    let dec = hermitian_eig(&gram).expect("Jacobi converges on Gaussian gram matrices");
    let s_max = dec.max().max(0.0).sqrt();
    let top = s_max / (1.0 + s_max);
    if top == 0.0 {
        return ComplexMatrix::zeros(dim, dim);
    }
    // G · (I + |G|)^{-1} has singular values s/(1+s).
    let c = target / top;
    let h = dec
        .map(|t| Ok(c / (1.0 + t.max(0.0).sqrt())))
        .expect("finite map");
    g.mul(h.matrix())
}

/// Random isometric column: an `mn × n` isometry cut into `m` blocks.
pub fn random_isometric_column<R: Rng + ?Sized>(rng: &mut R, n: usize, m: usize) -> Result<IsometricColumn> {
    if n == 0 || m == 0 {
        return Err(Error::DimensionMismatch(format!("isometric column n={n}, m={m}")));
    }
    let w = random_isometry(rng, m * n, n)?.into_matrix();
    Ok(IsometricColumn::trusted((0..m).map(|i| w.rows_range(i * n, (i + 1) * n)).collect()))
}
