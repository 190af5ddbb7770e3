use crate::error::{BseError, FactorTarget, Result};
use crate::matrix::{DenseMatrix, Scalar};

/// Lower-triangular factor of `S = L Lᴴ` together with the smallest pivot seen.
#[derive(Debug, Clone)]
pub struct Cholesky<T: Scalar> {
    pub l: DenseMatrix<T>,
    /// Smallest `L_jj²` encountered; a cheap definiteness margin.
    pub min_pivot: f64,
}

/// Left-looking Cholesky factorization `S = L Lᴴ` reading only the lower triangle of `S`.
///
/// Fails with [`BseError::NotPositiveDefinite`] at the first pivot that is not
/// strictly positive (or not finite).
pub fn cholesky<T: Scalar>(s: &DenseMatrix<T>) -> Result<Cholesky<T>> {
    if !s.is_square() {
        return Err(BseError::DimensionMismatch(format!(
            "cholesky needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let m = s.rows();
    let mut l = DenseMatrix::<T>::zeros(m, m);
    let mut min_pivot = f64::INFINITY;
    let mut work = vec![T::ZERO; m];

    for j in 0..m {
        work[j..].copy_from_slice(&s.col(j)[j..]);
        for k in 0..j {
            let lk = l.col(k);
            let coef = lk[j].conj();
            if coef == T::ZERO {
                continue;
            }
            for i in j..m {
                work[i] = work[i] - lk[i] * coef;
            }
        }
        let pivot = work[j].re();
        min_pivot = min_pivot.min(pivot);
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(BseError::NotPositiveDefinite {
                target: FactorTarget::Input,
                index: j,
                pivot_value: pivot,
            });
        }
        let d = pivot.sqrt();
        let inv = 1.0 / d;
        let col = l.col_mut(j);
        col[j] = T::from_real(d);
        for i in j + 1..m {
            col[i] = work[i].scale(inv);
        }
    }
    if m == 0 {
        min_pivot = 0.0;
    }
    Ok(Cholesky { l, min_pivot })
}

/// `L * X` for lower-triangular `L`, skipping the structural zeros.
pub fn lower_matmul(l: &DenseMatrix<f64>, x: &DenseMatrix<f64>) -> Result<DenseMatrix<f64>> {
    if l.cols() != x.rows() || !l.is_square() {
        return Err(BseError::DimensionMismatch(format!(
            "lower product {}x{} by {}x{}",
            l.rows(),
            l.cols(),
            x.rows(),
            x.cols()
        )));
    }
    let m = l.rows();
    let mut out = DenseMatrix::<f64>::zeros(m, x.cols());
    if m == 0 {
        return Ok(out);
    }
    crate::par::for_each_chunk_mut(out.as_mut_slice(), m, |j, col| {
        let xj = x.col(j);
        for k in 0..m {
            let c = xj[k];
            if c == 0.0 {
                continue;
            }
            let lk = &l.col(k)[k..];
            for (o, &v) in col[k..].iter_mut().zip(lk) {
                *o += v * c;
            }
        }
    });
    Ok(out)
}
