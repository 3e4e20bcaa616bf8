//! Cyclic-by-row Jacobi eigensolver for Hermitian matrices.

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 100;
/// Convergence when the off-diagonal Frobenius norm drops below this
/// fraction of `‖A‖_F`.
pub const OFF_DIAGONAL_RTOL: f64 = 1e-13;

/// Raw Jacobi output: eigenvalues in sweep (diagonal) order and the
/// accumulated rotation, column `j` paired with eigenvalue `j`.
pub(crate) struct JacobiOutput {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Diagonalizes `a` (assumed exactly Hermitian) by complex Jacobi rotations.
pub(crate) fn jacobi(a: &ComplexMatrix) -> Result<JacobiOutput> {
    let n = a.rows();
    let mut m = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_RTOL * a.frobenius_norm();

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&m);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off_norm: off });
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
    }

    let values = (0..n).map(|i| m[(i, i)].re).collect();
    Ok(JacobiOutput { values, vectors: v })
}

/// Annihilates `m[p][q]` with `m ← G* m G`, `v ← v G` where
/// `G = [[c, s], [−s·ē, c·ē]]` on the `(p, q)` plane and `e` is the phase of
/// `m[p][q]`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = m[(p, q)];
    let r = g.norm();
    if r == 0.0 {
        return;
    }
    let e = g / r;
    let alpha = m[(p, p)].re;
    let beta = m[(q, q)].re;
    let theta = (beta - alpha) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e_bar = e.conj();
    let n = m.rows();

    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * c - akq * e_bar * s;
        m[(k, q)] = akp * s + akq * e_bar * c;
    }
    for k in 0..n {
        let bpk = m[(p, k)];
        let bqk = m[(q, k)];
        m[(p, k)] = bpk * c - bqk * e * s;
        m[(q, k)] = bpk * s + bqk * e * c;
    }
    m[(p, q)] = C64::new(0.0, 0.0);
    m[(q, p)] = C64::new(0.0, 0.0);
    m[(p, p)] = C64::new(alpha - t * r, 0.0);
    m[(q, q)] = C64::new(beta + t * r, 0.0);

    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c - vkq * e_bar * s;
        v[(k, q)] = vkp * s + vkq * e_bar * c;
    }
}
