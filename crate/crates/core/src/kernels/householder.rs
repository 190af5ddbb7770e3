//! Householder reduction of dense symmetric and skew-symmetric matrices to
//! tridiagonal form.
//!
//! Both reductions keep the full square in storage and update it with a
//! rank-2 correction per step, one column at a time. For skew input the two
//! halves of the correction are exact negatives of each other, so the working
//! matrix stays bitwise skew-symmetric throughout.

use crate::error::{BseError, Result};
use crate::matrix::{dot, norm2, RealMatrix};
use crate::par;

/// Number of right-hand-side columns a single task pushes through the reflectors.
const APPLY_BLOCK: usize = 8;

/// Elementary reflector `I - tau v vᵀ` acting on indices `offset..`, with `v[0] = 1`.
#[derive(Debug, Clone)]
struct Reflector {
    offset: usize,
    tau: f64,
    v: Vec<f64>,
}

/// Orthogonal factor `U = H_0 H_1 ... H_{m-3}` kept as reflectors.
#[derive(Debug, Clone)]
pub struct Reflectors {
    dim: usize,
    list: Vec<Reflector>,
}

impl Reflectors {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            list: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Overwrites `x` with `U x`.
    pub fn apply(&self, x: &mut RealMatrix) {
        self.apply_impl(x, false)
    }

    /// Overwrites `x` with `Uᵀ x`.
    pub fn apply_transpose(&self, x: &mut RealMatrix) {
        self.apply_impl(x, true)
    }

    fn apply_impl(&self, x: &mut RealMatrix, transpose: bool) {
        assert_eq!(x.rows(), self.dim, "reflector dimension mismatch");
        let m = self.dim;
        if m == 0 || x.cols() == 0 || self.list.is_empty() {
            return;
        }
        par::for_each_chunk_mut(x.as_mut_slice(), m * APPLY_BLOCK, |_, chunk| {
            let apply_one = |r: &Reflector, chunk: &mut [f64]| {
                if r.tau == 0.0 {
                    return;
                }
                for col in chunk.chunks_mut(m) {
                    let seg = &mut col[r.offset..];
                    let s = r.tau * dot(&r.v, seg);
                    if s != 0.0 {
                        for (y, &vi) in seg.iter_mut().zip(&r.v) {
                            *y -= s * vi;
                        }
                    }
                }
            };
            if transpose {
                self.list.iter().for_each(|r| apply_one(r, chunk));
            } else {
                self.list.iter().rev().for_each(|r| apply_one(r, chunk));
            }
        });
    }

    /// Forms `U` explicitly.
    pub fn to_matrix(&self) -> RealMatrix {
        let mut u = RealMatrix::identity(self.dim);
        self.apply(&mut u);
        u
    }
}

/// Computes the reflector mapping `x` onto `beta e_1`; returns `(tau, v, beta)` with `v[0] = 1`.
fn make_reflector(x: &[f64]) -> (f64, Vec<f64>, f64) {
    let alpha = x[0];
    let xnorm = norm2(&x[1..]);
    let mut v = vec![0.0; x.len()];
    v[0] = 1.0;
    if xnorm == 0.0 {
        return (0.0, v, alpha);
    }
    let beta = -alpha.signum() * alpha.hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for (vi, &xi) in v[1..].iter_mut().zip(&x[1..]) {
        *vi = xi * scale;
    }
    (tau, v, beta)
}

/// `W = U T Uᵀ` with `T` skew-symmetric tridiagonal: superdiagonal `alphas`,
/// subdiagonal `-alphas`, zero diagonal.
#[derive(Debug, Clone)]
pub struct SkewTridiagonal {
    pub alphas: Vec<f64>,
    pub q: Reflectors,
}

impl SkewTridiagonal {
    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    /// Dense `T`.
    pub fn t_matrix(&self) -> RealMatrix {
        let m = self.dim();
        let mut t = RealMatrix::zeros(m, m);
        for (k, &a) in self.alphas.iter().enumerate() {
            t[(k, k + 1)] = a;
            t[(k + 1, k)] = -a;
        }
        t
    }

    /// Dense `U T Uᵀ`.
    pub fn reconstruct(&self) -> RealMatrix {
        reconstruct(&self.q, self.t_matrix())
    }
}

/// Real symmetric tridiagonal matrix, optionally with the orthogonal factor of
/// the reduction that produced it.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub q: Option<Reflectors>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.len() != offdiag.len() + 1 && !(diag.is_empty() && offdiag.is_empty()) {
            return Err(BseError::DimensionMismatch(format!(
                "tridiagonal with {} diagonal and {} off-diagonal entries",
                diag.len(),
                offdiag.len()
            )));
        }
        if diag.iter().chain(&offdiag).any(|x| !x.is_finite()) {
            return Err(BseError::NonFinite("tridiagonal matrix".into()));
        }
        Ok(Self {
            diag,
            offdiag,
            q: None,
        })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn t_matrix(&self) -> RealMatrix {
        let m = self.dim();
        let mut t = RealMatrix::from_diag(&self.diag);
        for (k, &e) in self.offdiag.iter().enumerate() {
            t[(k, k + 1)] = e;
            t[(k + 1, k)] = e;
        }
        let _ = m;
        t
    }

    /// Dense `U T Uᵀ`, or `T` when no factor is attached.
    pub fn reconstruct(&self) -> RealMatrix {
        match &self.q {
            Some(q) => reconstruct(q, self.t_matrix()),
            None => self.t_matrix(),
        }
    }

    /// Infinity norm of `T`, an upper bound on `‖T‖₂`.
    pub fn norm_bound(&self) -> f64 {
        let m = self.dim();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.offdiag[i - 1].abs();
                }
                if i + 1 < m {
                    s += self.offdiag[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }
}

fn reconstruct(q: &Reflectors, mut t: RealMatrix) -> RealMatrix {
    // U T Uᵀ = U (U Tᵀ)ᵀ
    q.apply(&mut t);
    let mut tt = t.transpose();
    q.apply(&mut tt);
    tt.transpose()
}

fn structure_tolerance(norm: f64) -> f64 {
    100.0 * f64::EPSILON * norm.max(1.0)
}

/// Reduces a real skew-symmetric matrix of even order to tridiagonal form.
pub fn skew_tridiagonalize(w: &RealMatrix) -> Result<SkewTridiagonal> {
    if !w.is_square() {
        return Err(BseError::DimensionMismatch(format!(
            "skew reduction needs a square matrix, got {}x{}",
            w.rows(),
            w.cols()
        )));
    }
    let m = w.rows();
    if !m.is_multiple_of(2) {
        return Err(BseError::DimensionMismatch(format!(
            "skew reduction expects even order, got {m}"
        )));
    }
    if !w.all_finite() {
        return Err(BseError::NonFinite("skew-symmetric input".into()));
    }
    let defect = w.skew_defect();
    if defect > structure_tolerance(w.frobenius_norm()) {
        return Err(BseError::Structure(format!(
            "matrix is not skew-symmetric: ‖W + Wᵀ‖_F = {defect:e}"
        )));
    }
    let mut a = RealMatrix::from_fn(m, m, |i, j| 0.5 * (w[(i, j)] - w[(j, i)]));
    let (alphas, q) = reduce(&mut a, Structure::Skew);
    Ok(SkewTridiagonal { alphas, q })
}

/// Reduces a real symmetric matrix to tridiagonal form.
pub fn sym_tridiagonalize(s: &RealMatrix) -> Result<SymTridiagonal> {
    if !s.is_square() {
        return Err(BseError::DimensionMismatch(format!(
            "symmetric reduction needs a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    if !s.all_finite() {
        return Err(BseError::NonFinite("symmetric input".into()));
    }
    let defect = s.symmetric_defect();
    if defect > structure_tolerance(s.frobenius_norm()) {
        return Err(BseError::Structure(format!(
            "matrix is not symmetric: ‖S - Sᵀ‖_F = {defect:e}"
        )));
    }
    let m = s.rows();
    let mut a = RealMatrix::from_fn(m, m, |i, j| {
        if i == j {
            s[(i, i)]
        } else {
            0.5 * (s[(i, j)] + s[(j, i)])
        }
    });
    let (offdiag, q) = reduce(&mut a, Structure::Symmetric);
    let diag = (0..m).map(|i| a[(i, i)]).collect();
    Ok(SymTridiagonal {
        diag,
        offdiag,
        q: Some(q),
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Structure {
    Symmetric,
    Skew,
}

/// In-place reduction; returns the superdiagonal of `T` and the reflectors.
fn reduce(a: &mut RealMatrix, structure: Structure) -> (Vec<f64>, Reflectors) {
    let m = a.rows();
    let mut q = Reflectors::new(m);
    let mut sup = Vec::with_capacity(m.saturating_sub(1));
    if m < 2 {
        return (sup, q);
    }
    for k in 0..m - 1 {
        let start = k + 1;
        let (tau, v, beta) = make_reflector(&a.col(k)[start..]);
        // Subdiagonal entry of T is beta.
        sup.push(match structure {
            Structure::Symmetric => beta,
            Structure::Skew => -beta,
        });
        if k + 2 >= m {
            // last 2x2 block is already tridiagonal; no reflector recorded
            break;
        }
        if tau != 0.0 {
            // p = tau * A22 v using column dots (A22 symmetric or skew)
            let sign = match structure {
                Structure::Symmetric => 1.0,
                Structure::Skew => -1.0,
            };
            let a_ref: &RealMatrix = a;
            let mut p = par::map_range(m - start, |t| {
                sign * tau * dot(&a_ref.col(start + t)[start..], &v)
            });
            if structure == Structure::Symmetric {
                // w = p - (tau/2)(pᵀv) v, update A22 -= v wᵀ + w vᵀ
                let half = 0.5 * tau * dot(&p, &v);
                for (pi, &vi) in p.iter_mut().zip(&v) {
                    *pi -= half * vi;
                }
            }
            let p = p;
            let v_ref = &v;
            par::for_each_chunk_mut(a.as_mut_slice(), m, |j, col| {
                if j < start {
                    return;
                }
                let t = j - start;
                let seg = &mut col[start..];
                match structure {
                    Structure::Skew => {
                        // A22 += v pᵀ - p vᵀ
                        let (pj, vj) = (p[t], v_ref[t]);
                        for ((x, &vi), &pi) in seg.iter_mut().zip(v_ref).zip(&p) {
                            *x += vi * pj - pi * vj;
                        }
                    }
                    Structure::Symmetric => {
                        let (wj, vj) = (p[t], v_ref[t]);
                        for ((x, &vi), &wi) in seg.iter_mut().zip(v_ref).zip(&p) {
                            *x -= vi * wj + wi * vj;
                        }
                    }
                }
            });
        }
        q.list.push(Reflector {
            offset: start,
            tau,
            v,
        });
    }
    (sup, q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg_matrix(m: usize, seed: u64) -> RealMatrix {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        RealMatrix::from_fn(m, m, |_, _| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    fn random_skew(m: usize, seed: u64) -> RealMatrix {
        let g = lcg_matrix(m, seed);
        RealMatrix::from_fn(m, m, |i, j| g[(i, j)] - g[(j, i)])
    }

    fn random_sym(m: usize, seed: u64) -> RealMatrix {
        let g = lcg_matrix(m, seed);
        RealMatrix::from_fn(m, m, |i, j| g[(i, j)] + g[(j, i)])
    }

    #[test]
    fn two_by_two_skew_is_already_reduced() {
        let w = RealMatrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        let t = skew_tridiagonalize(&w).unwrap();
        assert_eq!(t.alphas, vec![1.0]);
        assert_eq!(t.q.to_matrix(), RealMatrix::identity(2));
    }

    #[test]
    fn random_skew_reconstructs() {
        let w = random_skew(8, 3);
        let t = skew_tridiagonalize(&w).unwrap();
        let r = t.reconstruct().try_sub(&w).unwrap().frobenius_norm() / w.frobenius_norm();
        assert!(r <= 1e-14, "relative reconstruction {r:e}");
        let u = t.q.to_matrix();
        let o = u.transpose().matmul(&u).unwrap().try_sub(&RealMatrix::identity(8)).unwrap();
        assert!(o.frobenius_norm() <= 1e-14 * 8.0);
    }

    #[test]
    fn random_sym_reconstructs() {
        let s = random_sym(8, 11);
        let t = sym_tridiagonalize(&s).unwrap();
        let r = t.reconstruct().try_sub(&s).unwrap().frobenius_norm() / s.frobenius_norm();
        assert!(r <= 1e-14, "relative reconstruction {r:e}");
    }

    #[test]
    fn diagonal_input_is_untouched() {
        let d = RealMatrix::from_diag(&[3.0, -1.0, 2.0, 5.0]);
        let t = sym_tridiagonalize(&d).unwrap();
        assert_eq!(t.diag, vec![3.0, -1.0, 2.0, 5.0]);
        assert!(t.offdiag.iter().all(|&e| e == 0.0));
        assert_eq!(t.q.as_ref().unwrap().to_matrix(), RealMatrix::identity(4));
    }

    #[test]
    fn tridiagonal_input_keeps_entries() {
        let s = RealMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let t = sym_tridiagonalize(&s).unwrap();
        assert_eq!(t.diag, vec![2.0, 2.0]);
        assert_eq!(t.offdiag.iter().map(|e| e.abs()).collect::<Vec<_>>(), vec![1.0]);
    }

    #[test]
    fn rejects_bad_structure() {
        let not_skew = RealMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(skew_tridiagonalize(&not_skew), Err(BseError::Structure(_))));
        let odd = RealMatrix::zeros(3, 3);
        assert!(matches!(skew_tridiagonalize(&odd), Err(BseError::DimensionMismatch(_))));
        let not_sym = RealMatrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(sym_tridiagonalize(&not_sym), Err(BseError::Structure(_))));
    }

    #[test]
    fn transpose_application_inverts() {
        let w = random_skew(10, 5);
        let t = skew_tridiagonalize(&w).unwrap();
        let x0 = lcg_matrix(10, 9);
        let mut x = x0.clone();
        t.q.apply(&mut x);
        t.q.apply_transpose(&mut x);
        assert!(x.try_sub(&x0).unwrap().max_abs() < 1e-14);
    }
}
