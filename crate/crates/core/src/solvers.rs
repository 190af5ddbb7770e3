//! Eigensolvers for the Bethe-Salpeter Hamiltonian.
//!
//! * [`solve_complex`]: structure preserving, via the real embedding `M = L Lᵀ`
//!   and the skew-symmetric matrix `W = Lᵀ J L`.
//! * [`solve_real`]: real operators, via the SVD of `L₂ᵀ L₁` where
//!   `A + B = L₁L₁ᵀ` and `A - B = L₂L₂ᵀ`.
//! * [`solve_tda`]: the Tamm-Dancoff approximation (diagonalize `A` alone).
//! * [`solve_oracle`]: the generalized Hermitian-definite route through a
//!   complex Cholesky factor of `Ω`; correct but not structure preserving,
//!   kept as an independent cross-check.

use num_complex::Complex64;

use crate::eigensystem::{PositiveEigensystem, SolverWarning};
use crate::embeddings::build_m;
use crate::error::{BseError, FactorTarget, Result};
use crate::kernels::{
    cholesky, hermitian_eig, jacobi_svd, lower_matmul, phase, phase_fold, skew_tridiagonalize, tridiag_eig,
    HermitianEig, Which,
};
use crate::matrix::{dot, ComplexMatrix, RealMatrix};
use crate::operator::{BseOperator, FieldKind, DEFAULT_SYMMETRY_TOL};
use crate::par;

/// Ratio `λ_min / λ_max` below which a solve carries an ill-conditioning warning.
pub const CONDITION_WARNING_RATIO: f64 = 1e-8;

fn require_structure(op: &BseOperator) -> Result<()> {
    let da = op.a().hermitian_defect() / op.a().frobenius_norm().max(1.0);
    let db = op.b().symmetric_defect() / op.b().frobenius_norm().max(1.0);
    if da > DEFAULT_SYMMETRY_TOL || db > DEFAULT_SYMMETRY_TOL {
        return Err(BseError::Structure(format!(
            "operator is not Hermitian/symmetric (relative defects {da:e}, {db:e})"
        )));
    }
    Ok(())
}

fn conditioning(lambda: &[f64]) -> Vec<SolverWarning> {
    match (lambda.first(), lambda.last()) {
        (Some(&max), Some(&min)) if min < CONDITION_WARNING_RATIO * max => {
            vec![SolverWarning::IllConditioned {
                lambda_min: min,
                lambda_max: max,
            }]
        }
        _ => vec![],
    }
}

/// `W = Lᵀ J L`, assembled column by column from dot products of the halves of
/// the columns of `L`; exactly skew-symmetric.
fn skew_product(l: &RealMatrix) -> RealMatrix {
    let m = l.rows();
    let n = m / 2;
    let mut w = RealMatrix::zeros(m, m);
    if m == 0 {
        return w;
    }
    par::for_each_chunk_mut(w.as_mut_slice(), m, |j, col| {
        let lj = l.col(j);
        let (top_j, bot_j) = lj.split_at(n);
        for (i, out) in col.iter_mut().enumerate().skip(j + 1) {
            let li = l.col(i);
            let (top_i, bot_i) = li.split_at(n);
            *out = dot(top_i, bot_j) - dot(bot_i, top_j);
        }
    });
    for j in 0..m {
        for i in j + 1..m {
            w[(j, i)] = -w[(i, j)];
        }
    }
    w
}

/// Positive eigenvalues and right eigenvectors of `H`, structure preserving.
///
/// Requires `[[A, B], [conj B, conj A]]` positive definite; a failing Cholesky
/// factorization of `M` is reported as [`BseError::NotPositiveDefinite`].
pub fn solve_complex(op: &BseOperator) -> Result<PositiveEigensystem> {
    require_structure(op)?;
    let n = op.n();
    if n == 0 {
        return Err(BseError::InvalidArgument("empty operator".into()));
    }
    let m = build_m(op);
    let l = cholesky(&m).map_err(|e| e.retarget(FactorTarget::Embedding))?.l;
    let w = skew_product(&l);
    let tri = skew_tridiagonalize(&w)?;
    let eig = tridiag_eig(&phase_fold(&tri), Which::Positive)?;
    let lambda = eig.values;
    if let Some(&bad) = lambda.iter().find(|&&v| !(v > 0.0)) {
        return Err(BseError::Structure(format!(
            "non-positive eigenvalue {bad:e}: the embedding is numerically singular"
        )));
    }

    // D V split into real and imaginary parts: row k picks up i^k.
    let v = &eig.vectors;
    let mut re = RealMatrix::zeros(2 * n, n);
    let mut im = RealMatrix::zeros(2 * n, n);
    for j in 0..n {
        for k in 0..2 * n {
            let p = phase(k);
            re[(k, j)] = p.re * v[(k, j)];
            im[(k, j)] = p.im * v[(k, j)];
        }
    }
    tri.q.apply(&mut re);
    tri.q.apply(&mut im);
    let p = lower_matmul(&l, &re)?;
    let r = lower_matmul(&l, &im)?;

    // Q [p + i r] with Q = (1/√2)[[I, -iI], [I, iI]], then X = diag(I, -I) (...) Λ^{-1/2}
    let mut x1 = ComplexMatrix::zeros(n, n);
    let mut x2 = ComplexMatrix::zeros(n, n);
    for (j, &lam) in lambda.iter().enumerate() {
        let s = std::f64::consts::FRAC_1_SQRT_2 / lam.sqrt();
        for i in 0..n {
            let (pt, pb) = (p[(i, j)], p[(i + n, j)]);
            let (rt, rb) = (r[(i, j)], r[(i + n, j)]);
            x1[(i, j)] = Complex64::new(pt + rb, rt - pb) * s;
            x2[(i, j)] = -Complex64::new(pt - rb, rt + pb) * s;
        }
    }
    Ok(PositiveEigensystem {
        warnings: conditioning(&lambda),
        lambda_plus: lambda,
        x1,
        x2,
    })
}

/// Positive eigenpairs of a real operator from the SVD of `L₂ᵀ L₁`.
pub fn solve_real(op: &BseOperator) -> Result<PositiveEigensystem> {
    if op.kind() != FieldKind::Real {
        return Err(BseError::InvalidArgument(
            "solve_real needs a real operator".into(),
        ));
    }
    require_structure(op)?;
    let n = op.n();
    if n == 0 {
        return Err(BseError::InvalidArgument("empty operator".into()));
    }
    let a = op.a().real_part();
    let b = op.b().real_part();
    let l1 = cholesky(&a.try_add(&b)?).map_err(|e| e.retarget(FactorTarget::APlusB))?.l;
    let l2 = cholesky(&a.try_sub(&b)?).map_err(|e| e.retarget(FactorTarget::AMinusB))?.l;
    let c = l2.transpose().matmul(&l1)?;
    let svd = jacobi_svd(&c)?;
    let lambda = svd.sigma;
    if let Some(&bad) = lambda.iter().find(|&&v| !(v > 0.0)) {
        return Err(BseError::Structure(format!(
            "zero singular value {bad:e} in L₂ᵀL₁"
        )));
    }
    let l2u = lower_matmul(&l2, &svd.u)?;
    let l1v = lower_matmul(&l1, &svd.v)?;
    let mut x1 = ComplexMatrix::zeros(n, n);
    let mut x2 = ComplexMatrix::zeros(n, n);
    for (j, &lam) in lambda.iter().enumerate() {
        let s = 0.5 / lam.sqrt();
        for i in 0..n {
            x1[(i, j)] = Complex64::new((l2u[(i, j)] + l1v[(i, j)]) * s, 0.0);
            x2[(i, j)] = Complex64::new((l2u[(i, j)] - l1v[(i, j)]) * s, 0.0);
        }
    }
    Ok(PositiveEigensystem {
        warnings: conditioning(&lambda),
        lambda_plus: lambda,
        x1,
        x2,
    })
}

/// Tamm-Dancoff approximation: eigenpairs of `A` alone, descending.
pub fn solve_tda(a: &ComplexMatrix) -> Result<HermitianEig> {
    hermitian_eig(a)
}

/// All `2n` eigenvalues of `H` (descending) from the Hermitian matrix
/// `Lᴴ diag(I, -I) L`, where `Ω = L Lᴴ`; this is similar to `H = diag(I, -I) Ω`.
///
/// Nothing forces the computed values into `±` pairs; see [`pairing_defect`].
pub fn solve_oracle(op: &BseOperator) -> Result<Vec<f64>> {
    require_structure(op)?;
    let n = op.n();
    let l = cholesky(&op.omega())
        .map_err(|e| e.retarget(FactorTarget::Omega))?
        .l;
    let mut sl = l.clone();
    for j in 0..2 * n {
        for i in n..2 * n {
            sl[(i, j)] = -sl[(i, j)];
        }
    }
    let k = l.adjoint_matmul(&sl)?;
    let k = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| (k[(i, j)] + k[(j, i)].conj()) * 0.5);
    Ok(hermitian_eig(&k)?.values)
}

/// `max_j |λ_j + λ_{2n-1-j}|` over a descending spectrum; zero for exact `±` pairs.
pub fn pairing_defect(values: &[f64]) -> f64 {
    let m = values.len();
    (0..m / 2)
        .map(|j| (values[j] + values[m - 1 - j]).abs())
        .fold(0.0, f64::max)
}

/// Per-index comparison of the Tamm-Dancoff and full positive spectra.
#[derive(Debug, Clone)]
pub struct TdaGapReport {
    /// `λ_j(A)`, descending.
    pub lambda_tda: Vec<f64>,
    /// `λ_j(H)` for `j = 1..n`, descending.
    pub lambda_full: Vec<f64>,
    /// `g_j = λ_j(A) - λ_j(H)`.
    pub gaps: Vec<f64>,
    pub min_gap: f64,
    /// `max_j g_j / λ_j(H)`.
    pub max_relative_gap: f64,
    /// `10⁻¹² ‖A‖₂`.
    pub tolerance: f64,
    /// `min_gap ≥ -tolerance`.
    pub bound_holds: bool,
}

/// Compares TDA eigenvalues with the structure-preserving solve.
pub fn tda_gap_report(op: &BseOperator) -> Result<TdaGapReport> {
    let full = solve_complex(op)?;
    let tda = solve_tda(op.a())?;
    let gaps: Vec<f64> = tda
        .values
        .iter()
        .zip(&full.lambda_plus)
        .map(|(a, h)| a - h)
        .collect();
    let min_gap = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let max_relative_gap = gaps
        .iter()
        .zip(&full.lambda_plus)
        .map(|(g, h)| g / h)
        .fold(f64::NEG_INFINITY, f64::max);
    let norm_a = tda.values.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let tolerance = 1e-12 * norm_a;
    Ok(TdaGapReport {
        lambda_tda: tda.values,
        lambda_full: full.lambda_plus,
        bound_holds: min_gap >= -tolerance,
        gaps,
        min_gap,
        max_relative_gap,
        tolerance,
    })
}
