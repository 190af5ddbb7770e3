use num_complex::Complex64;

use crate::error::{BseError, Result};
use crate::matrix::ComplexMatrix;
use crate::operator::{assemble_h, BseOperator};

/// Non-fatal conditions a solver noticed.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverWarning {
    /// `λ_min < 1e-8 λ_max`: the `Λ^{-1/2}` scaling amplifies rounding errors.
    IllConditioned { lambda_min: f64, lambda_max: f64 },
}

impl std::fmt::Display for SolverWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolverWarning::IllConditioned {
                lambda_min,
                lambda_max,
            } => write!(
                f,
                "ill-conditioned: smallest positive eigenvalue {lambda_min:e} is below 1e-8 x largest {lambda_max:e}"
            ),
        }
    }
}

/// Positive eigenvalues (descending) with right eigenvector blocks normalized so
/// that `X₁ᴴX₁ - X₂ᴴX₂ = I`.
#[derive(Debug, Clone)]
pub struct PositiveEigensystem {
    pub lambda_plus: Vec<f64>,
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    pub warnings: Vec<SolverWarning>,
}

impl PositiveEigensystem {
    pub fn n(&self) -> usize {
        self.lambda_plus.len()
    }

    /// `‖X₁ᴴX₁ - X₂ᴴX₂ - I‖_F`.
    pub fn normalization_defect(&self) -> f64 {
        let g1 = self.x1.adjoint_matmul(&self.x1).expect("square blocks");
        let g2 = self.x2.adjoint_matmul(&self.x2).expect("square blocks");
        let mut d = g1.try_sub(&g2).expect("same shape");
        for i in 0..self.n() {
            d[(i, i)] -= Complex64::new(1.0, 0.0);
        }
        d.frobenius_norm()
    }

    /// `‖H [X₁; X₂] - [X₁; X₂] Λ₊‖_F`.
    pub fn residual_norm(&self, op: &BseOperator) -> f64 {
        let x = self.right_vectors();
        let hx = assemble_h(op).matmul(&x).expect("consistent shapes");
        let mut s = 0.0;
        for (j, &l) in self.lambda_plus.iter().enumerate() {
            for i in 0..x.rows() {
                s += (hx[(i, j)] - x[(i, j)] * l).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// `[X₁; X₂]`.
    pub fn right_vectors(&self) -> ComplexMatrix {
        let n = self.n();
        let mut x = ComplexMatrix::zeros(2 * n, n);
        x.set_block(0, 0, &self.x1);
        x.set_block(n, 0, &self.x2);
        x
    }
}

/// All `2n` right and left eigenvectors with eigenvalues `(Λ₊, -Λ₊)`.
#[derive(Debug, Clone)]
pub struct FullEigensystem {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub lambda: Vec<f64>,
}

/// `r1 = ‖YᴴHX - Λ‖_F / ‖H‖_F` and `r2 = ‖YᴴX - I‖_F / √(2n)`.
pub fn residual_metrics(op: &BseOperator, full: &FullEigensystem) -> Result<(f64, f64)> {
    let m = 2 * op.n();
    if full.x.rows() != m || full.x.cols() != m || full.y.rows() != m || full.y.cols() != m || full.lambda.len() != m {
        return Err(BseError::DimensionMismatch(format!(
            "eigensystem shapes do not match a {m}x{m} Hamiltonian"
        )));
    }
    let h = assemble_h(op);
    let hx = h.matmul(&full.x)?;
    let mut yhx = full.y.adjoint_matmul(&hx)?;
    let mut yx = full.y.adjoint_matmul(&full.x)?;
    for (i, &l) in full.lambda.iter().enumerate() {
        yhx[(i, i)] -= Complex64::new(l, 0.0);
        yx[(i, i)] -= Complex64::new(1.0, 0.0);
    }
    let hn = h.frobenius_norm();
    let r1 = if hn > 0.0 { yhx.frobenius_norm() / hn } else { yhx.frobenius_norm() };
    let r2 = if m > 0 { yx.frobenius_norm() / (m as f64).sqrt() } else { 0.0 };
    Ok((r1, r2))
}
