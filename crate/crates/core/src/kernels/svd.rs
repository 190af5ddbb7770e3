use crate::error::{BseError, Result};
use crate::matrix::{dot, norm2, RealMatrix};

pub const MAX_SWEEPS: usize = 30;

/// `C = U diag(sigma) Vᵀ` with `sigma` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: RealMatrix,
    pub sigma: Vec<f64>,
    pub v: RealMatrix,
}

/// One-sided (Hestenes) Jacobi SVD of a square matrix.
///
/// Columns of a working copy of `C` are rotated pairwise until every pair is
/// numerically orthogonal; the rotations accumulate into `V`. Singular values
/// are the final column norms. Equal singular values keep their original
/// column order.
pub fn jacobi_svd(c: &RealMatrix) -> Result<Svd> {
    if !c.is_square() {
        return Err(BseError::DimensionMismatch(format!(
            "jacobi_svd expects a square matrix, got {}x{}",
            c.rows(),
            c.cols()
        )));
    }
    if !c.all_finite() {
        return Err(BseError::NonFinite("SVD input".into()));
    }
    let m = c.rows();
    let mut g = c.clone();
    let mut v = RealMatrix::identity(m);
    let tol = f64::EPSILON * (m as f64).sqrt().max(1.0);
    let mut norms: Vec<f64> = (0..m).map(|j| dot(g.col(j), g.col(j))).collect();

    let mut converged = m < 2;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..m.saturating_sub(1) {
            for q in p + 1..m {
                let alpha = norms[p];
                let beta = norms[q];
                if alpha == 0.0 || beta == 0.0 {
                    continue;
                }
                let gamma = dot(g.col(p), g.col(q));
                if gamma.abs() <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let cs = 1.0 / t.hypot(1.0);
                let sn = cs * t;
                rotate_columns(&mut g, p, q, cs, sn);
                rotate_columns(&mut v, p, q, cs, sn);
                norms[p] = dot(g.col(p), g.col(p));
                norms[q] = dot(g.col(q), g.col(q));
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(BseError::SvdNoConvergence { sweeps: MAX_SWEEPS });
    }

    let sig: Vec<f64> = (0..m).map(|j| norm2(g.col(j))).collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| sig[b].total_cmp(&sig[a]).then(a.cmp(&b)));

    let mut u = RealMatrix::zeros(m, m);
    let mut vs = RealMatrix::zeros(m, m);
    let mut sigma = Vec::with_capacity(m);
    let mut null_cols = Vec::new();
    for (k, &j) in order.iter().enumerate() {
        let s = sig[j];
        sigma.push(s);
        vs.col_mut(k).copy_from_slice(v.col(j));
        if s > 0.0 {
            for (dst, &x) in u.col_mut(k).iter_mut().zip(g.col(j)) {
                *dst = x / s;
            }
        } else {
            null_cols.push(k);
        }
    }
    complete_basis(&mut u, &null_cols);
    Ok(Svd { u, sigma, v: vs })
}

fn rotate_columns(a: &mut RealMatrix, p: usize, q: usize, c: f64, s: f64) {
    let m = a.rows();
    let data = a.as_mut_slice();
    let (left, right) = data.split_at_mut(q * m);
    let cp = &mut left[p * m..(p + 1) * m];
    let cq = &mut right[..m];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// Fills the listed zero columns of `u` with unit vectors orthogonal to the rest.
fn complete_basis(u: &mut RealMatrix, cols: &[usize]) {
    let m = u.rows();
    for &k in cols {
        for e in 0..m {
            let mut cand = vec![0.0; m];
            cand[e] = 1.0;
            for _ in 0..2 {
                for j in 0..m {
                    if j == k || (cols.contains(&j) && norm2(u.col(j)) == 0.0) {
                        continue;
                    }
                    let c = dot(u.col(j), &cand);
                    cand.iter_mut().zip(u.col(j)).for_each(|(x, &y)| *x -= c * y);
                }
            }
            let n = norm2(&cand);
            if n > 0.5 {
                cand.iter_mut().for_each(|x| *x /= n);
                u.col_mut(k).copy_from_slice(&cand);
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &Svd) -> RealMatrix {
        let m = s.sigma.len();
        let us = RealMatrix::from_fn(m, m, |i, j| s.u[(i, j)] * s.sigma[j]);
        us.matmul(&s.v.transpose()).unwrap()
    }

    #[test]
    fn diagonal() {
        let c = RealMatrix::from_diag(&[3.0, 2.0]);
        let s = jacobi_svd(&c).unwrap();
        assert_eq!(s.sigma, vec![3.0, 2.0]);
        for i in 0..2 {
            assert_eq!(s.u[(i, i)].abs(), 1.0);
            assert_eq!(s.v[(i, i)].abs(), 1.0);
        }
    }

    #[test]
    fn golden_ratio_pair() {
        let c = RealMatrix::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let s = jacobi_svd(&c).unwrap();
        let r5 = 5f64.sqrt();
        assert!((s.sigma[0] - (r5 + 1.0) / 2.0).abs() < 1e-15);
        assert!((s.sigma[1] - (r5 - 1.0) / 2.0).abs() < 1e-15);
        assert!(reconstruct(&s).try_sub(&c).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn permutation_has_unit_values() {
        let c = RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let s = jacobi_svd(&c).unwrap();
        assert_eq!(s.sigma, vec![1.0, 1.0]);
        assert!(reconstruct(&s).try_sub(&c).unwrap().frobenius_norm() < 1e-15);
    }

    #[test]
    fn rank_deficient_input_gets_orthogonal_u() {
        let c = RealMatrix::from_rows(&[&[1.0, 2.0, 0.0], &[2.0, 4.0, 0.0], &[0.0, 0.0, 0.0]]);
        let s = jacobi_svd(&c).unwrap();
        assert!((s.sigma[0] - 5.0).abs() < 1e-14);
        assert!(s.sigma[1].abs() < 1e-15 && s.sigma[2] == 0.0);
        let o = s.u.transpose().matmul(&s.u).unwrap().try_sub(&RealMatrix::identity(3)).unwrap();
        assert!(o.frobenius_norm() < 1e-14);
        assert!(reconstruct(&s).try_sub(&c).unwrap().frobenius_norm() < 1e-14);
    }

    #[test]
    fn rejects_rectangular() {
        assert!(jacobi_svd(&RealMatrix::zeros(2, 3)).is_err());
    }
}
