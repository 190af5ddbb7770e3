use num_complex::Complex64;

use super::householder::sym_tridiagonalize;
use super::tridiag::{tridiag_eig, Which};
use crate::embeddings::embed_hermitian;
use crate::error::{BseError, Result};
use crate::matrix::{dot_conj, ComplexMatrix};
use crate::operator::DEFAULT_SYMMETRY_TOL;

/// Eigenvalues (descending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

/// Hermitian eigensolver running entirely in real arithmetic.
///
/// The `2n x 2n` real embedding has every eigenvalue of `A` twice. Sorted
/// values are paired `(2j, 2j+1)`; pairs closer than a few hundred ulps of
/// `‖A‖` are grouped, and each group of `k` pairs yields `2k` candidate
/// complex vectors `p - i q` spanning a `k`-dimensional space, from which `k`
/// orthonormal vectors are picked by pivoted Gram-Schmidt after projecting out
/// every previously accepted vector.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(BseError::DimensionMismatch(format!(
            "hermitian_eig expects a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.all_finite() {
        return Err(BseError::NonFinite("Hermitian input".into()));
    }
    let defect = a.hermitian_defect();
    if defect > DEFAULT_SYMMETRY_TOL * a.frobenius_norm().max(1.0) {
        return Err(BseError::Structure(format!(
            "matrix is not Hermitian: ‖A - Aᴴ‖_F = {defect:e}"
        )));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEig {
            values: vec![],
            vectors: ComplexMatrix::zeros(0, 0),
        });
    }
    let tri = sym_tridiagonalize(&embed_hermitian(a))?;
    let eig = tridiag_eig(&tri, Which::All)?;
    let mut vecs = eig.vectors;
    if let Some(q) = &tri.q {
        q.apply(&mut vecs);
    }
    let vals = eig.values;
    let scale = vals.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let merge_tol = 1e3 * f64::EPSILON * scale;

    let candidate = |col: usize| -> Vec<Complex64> {
        let c = vecs.col(col);
        (0..n).map(|i| Complex64::new(c[i], -c[i + n])).collect()
    };

    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut out = 0;
    let mut pair = 0;
    while pair < n {
        let mut end = pair + 1;
        while end < n && vals[2 * end - 1] - vals[2 * end] <= merge_tol {
            end += 1;
        }
        let k = end - pair;
        // (candidate vector, pair value)
        let mut cands: Vec<(Vec<Complex64>, f64)> = (2 * pair..2 * end)
            .map(|col| (candidate(col), 0.5 * (vals[2 * (col / 2)] + vals[2 * (col / 2) + 1])))
            .collect();
        // the real solver only guarantees orthogonality of the real vectors;
        // orthogonality of the complex ones is enforced here
        for (c, _) in cands.iter_mut() {
            for prev in 0..out {
                let v = vectors.col(prev);
                let proj = dot_conj(v, c);
                c.iter_mut().zip(v).for_each(|(ci, vi)| *ci -= proj * vi);
            }
        }
        let mut picked: Vec<(Vec<Complex64>, f64)> = Vec::with_capacity(k);
        for _ in 0..k {
            let (best, _) = cands
                .iter()
                .enumerate()
                .map(|(i, (v, _))| (i, dot_conj(v, v).re))
                .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            let (mut v, val) = cands.swap_remove(best);
            let nrm = dot_conj(&v, &v).re.sqrt();
            v.iter_mut().for_each(|z| *z /= nrm);
            for (c, _) in cands.iter_mut() {
                let proj = dot_conj(&v, c);
                c.iter_mut().zip(&v).for_each(|(ci, vi)| *ci -= proj * vi);
            }
            picked.push((v, val));
        }
        picked.sort_by(|x, y| y.1.total_cmp(&x.1));
        for (v, val) in picked {
            vectors.col_mut(out).copy_from_slice(&v);
            values.push(val);
            out += 1;
        }
        pair = end;
    }
    Ok(HermitianEig { values, vectors })
}
