//! Reference routines for tests. Deliberately naive and independent of the
//! library kernels: cyclic two-sided Jacobi for symmetric eigenproblems and an
//! unblocked Cholesky, both on plain row-major `Vec<f64>`.

#![allow(dead_code)]

use bse_core::{ComplexMatrix, RealMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense row-major symmetric matrix.
#[derive(Clone, Debug)]
pub struct Sym {
    pub n: usize,
    pub a: Vec<f64>,
}

impl Sym {
    pub fn from_real(m: &RealMatrix) -> Self {
        let n = m.rows();
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        Sym { n, a }
    }

    /// `[[Re Z, -Im Z], [Im Z, Re Z]]` for Hermitian `Z`; each eigenvalue of `Z` appears twice.
    pub fn from_hermitian(z: &ComplexMatrix) -> Self {
        let n = z.rows();
        let m = 2 * n;
        let mut a = vec![0.0; m * m];
        for i in 0..n {
            for j in 0..n {
                let h = 0.5 * (z[(i, j)] + z[(j, i)].conj());
                a[i * m + j] = h.re;
                a[(i + n) * m + j + n] = h.re;
                a[i * m + j + n] = -h.im;
                a[(i + n) * m + j] = h.im;
            }
        }
        Sym { n: m, a }
    }
}

/// Eigenvalues of a real symmetric matrix, descending, by cyclic Jacobi.
pub fn jacobi_eigenvalues(s: &Sym) -> Vec<f64> {
    let n = s.n;
    let mut a = s.a.clone();
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let floor = 1e-3 * f64::EPSILON * norm / n.max(1) as f64;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let local = 1e-3 * f64::EPSILON * (a[p * n + p] * a[q * n + q]).abs().sqrt();
                if apq.abs() <= local.max(floor) {
                    continue;
                }
                rotated = true;
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - sn * akq;
                    a[k * n + q] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - sn * aqk;
                    a[q * n + k] = sn * apk + c * aqk;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut v: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(z: &ComplexMatrix) -> Vec<f64> {
    jacobi_eigenvalues(&Sym::from_hermitian(z)).into_iter().step_by(2).collect()
}

/// Lower Cholesky factor of a symmetric positive definite matrix, row-major.
pub fn cholesky(s: &Sym) -> Vec<f64> {
    let n = s.n;
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = s.a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                assert!(sum > 0.0, "reference Cholesky: not positive definite");
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    l
}

/// Eigenvalues (descending) of `-i J S` for symmetric positive definite `S` of
/// order `2m`, through the similar Hermitian matrix `-i Lᵀ J L`, `S = L Lᵀ`.
pub fn minus_i_j_times(s: &Sym) -> Vec<f64> {
    let n = s.n;
    let m = n / 2;
    let l = cholesky(s);
    // (J L)[r][c] = L[r+m][c] for r < m, -L[r-m][c] otherwise
    let jl = |r: usize, c: usize| if r < m { l[(r + m) * n + c] } else { -l[(r - m) * n + c] };
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            w[i * n + j] = (0..n).map(|r| l[r * n + i] * jl(r, j)).sum();
        }
    }
    // -i W = 0 + i(-W): embedding [[0, W], [-W, 0]]
    let z = ComplexMatrix::from_fn(n, n, |i, j| bse_core::Complex64::new(0.0, -0.5 * (w[i * n + j] - w[j * n + i])));
    hermitian_eigenvalues(&z)
}

/// Random symmetric positive definite matrix `G Gᵀ + shift I`.
pub fn random_spd(n: usize, rng: &mut ChaCha8Rng, shift: f64) -> RealMatrix {
    let g = RealMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut a = g.matmul(&g.transpose()).unwrap();
    for i in 0..n {
        a[(i, i)] += shift;
    }
    RealMatrix::from_fn(n, n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]))
}

pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> RealMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    RealMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `‖H‖₂ = λ_max(Ω)`, since `HᴴH = Ω²` when `H = diag(I, -I) Ω`.
pub fn h_norm2(op: &bse_core::BseOperator) -> f64 {
    hermitian_eigenvalues(&op.omega())[0]
}

pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

/// Random complex operator with a small definiteness margin: `A = A₀ + s I`,
/// `B = B₀` where `s` lifts the smallest eigenvalue of `Ω₀` to 5% of its spread.
/// Off-diagonal coupling is much stronger than in `random_bse`.
pub fn tight_bse(n: usize, seed: u64) -> bse_core::BseOperator {
    use bse_core::Complex64;
    let mut r = rng(seed);
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for i in 0..=j {
            let im = if i == j { 0.0 } else { r.gen_range(-1.0..1.0) };
            let z = Complex64::new(r.gen_range(-1.0..1.0), im);
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
            let w = Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
            b[(i, j)] = w;
            b[(j, i)] = w;
        }
    }
    let op0 = bse_core::BseOperator::from_blocks(a.clone(), b.clone()).unwrap();
    let ev = hermitian_eigenvalues(&op0.omega());
    let (hi, lo) = (ev[0], ev[ev.len() - 1]);
    let shift = -lo + 0.05 * (hi - lo).max(1.0);
    for i in 0..n {
        a[(i, i)].re += shift;
    }
    bse_core::BseOperator::from_blocks(a, b).unwrap()
}
