//! Real/complex structural transforms of the Bethe-Salpeter operator.
//!
//! With the unitary `Q = (1/√2) [[I, -iI], [I, iI]]`,
//!
//! ```text
//! Qᴴ H Q = -i J M = i H_r,    J = [[0, I], [-I, 0]]
//! M   = [[Re(A+B),  Im(A-B)], [-Im(A+B), Re(A-B)]]      (real symmetric)
//! H_r = [[Im(A+B), -Re(A-B)], [ Re(A+B), Im(A-B)]]      (real Hamiltonian)
//! ```
//!
//! `Q` and `J` are never formed; they are applied by index arithmetic.

use num_complex::Complex64;

use crate::eigensystem::{FullEigensystem, PositiveEigensystem};
use crate::error::{BseError, Result};
use crate::matrix::{ComplexMatrix, RealMatrix};
use crate::operator::{BseOperator, DEFAULT_SYMMETRY_TOL};

/// `M = [[Re(A+B), Im(A-B)], [-Im(A+B), Re(A-B)]]`, symmetrized as `(M + Mᵀ)/2`.
pub fn build_m(op: &BseOperator) -> RealMatrix {
    let n = op.n();
    let (a, b) = (op.a(), op.b());
    let raw = RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n.max(1), j / n.max(1));
        let (r, c) = (i % n.max(1), j % n.max(1));
        let s = a[(r, c)] + b[(r, c)];
        let d = a[(r, c)] - b[(r, c)];
        match (bi, bj) {
            (0, 0) => s.re,
            (0, 1) => d.im,
            (1, 0) => -s.im,
            _ => d.re,
        }
    });
    RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        if i == j {
            raw[(i, i)]
        } else {
            0.5 * (raw[(i, j)] + raw[(j, i)])
        }
    })
}

/// `H_r = [[Im(A+B), -Re(A-B)], [Re(A+B), Im(A-B)]]`; `Λ(i H_r) = Λ(H)`.
pub fn build_hr(op: &BseOperator) -> RealMatrix {
    let n = op.n();
    let (a, b) = (op.a(), op.b());
    RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n.max(1), j / n.max(1));
        let (r, c) = (i % n.max(1), j % n.max(1));
        let s = a[(r, c)] + b[(r, c)];
        let d = a[(r, c)] - b[(r, c)];
        match (bi, bj) {
            (0, 0) => s.im,
            (0, 1) => -d.re,
            (1, 0) => s.re,
            _ => d.im,
        }
    })
}

/// `J X` for `J = [[0, I], [-I, 0]]`.
pub fn apply_j(x: &RealMatrix) -> RealMatrix {
    let m = x.rows();
    assert!(m.is_multiple_of(2), "J needs an even number of rows");
    let n = m / 2;
    RealMatrix::from_fn(m, x.cols(), |i, j| if i < n { x[(i + n, j)] } else { -x[(i - n, j)] })
}

/// Real Hamiltonian `[[H₁₁, H₁₂], [H₂₁, -H₁₁ᵀ]]` with `H₁₂`, `H₂₁` symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct RealHamiltonian {
    pub h11: RealMatrix,
    pub h12: RealMatrix,
    pub h21: RealMatrix,
}

impl RealHamiltonian {
    pub fn new(h11: RealMatrix, h12: RealMatrix, h21: RealMatrix) -> Result<Self> {
        let n = h11.rows();
        for (name, m) in [("H11", &h11), ("H12", &h12), ("H21", &h21)] {
            if m.rows() != n || m.cols() != n {
                return Err(BseError::DimensionMismatch(format!("{name} must be {n}x{n}")));
            }
            if !m.all_finite() {
                return Err(BseError::NonFinite(name.into()));
            }
        }
        for (name, m) in [("H12", &h12), ("H21", &h21)] {
            let defect = m.symmetric_defect();
            if defect > DEFAULT_SYMMETRY_TOL * m.frobenius_norm().max(1.0) {
                return Err(BseError::Structure(format!(
                    "{name} is not symmetric: defect {defect:e}"
                )));
            }
        }
        Ok(Self { h11, h12, h21 })
    }

    /// Splits a dense `2n x 2n` matrix, checking the Hamiltonian block structure.
    pub fn from_matrix(h: &RealMatrix) -> Result<Self> {
        if !h.is_square() || !h.rows().is_multiple_of(2) {
            return Err(BseError::DimensionMismatch(format!(
                "real Hamiltonian must be 2n x 2n, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        let n = h.rows() / 2;
        let h11 = h.block(0, 0, n, n);
        let h22 = h.block(n, n, n, n);
        let defect = h22.try_add(&h11.transpose())?.frobenius_norm();
        if defect > DEFAULT_SYMMETRY_TOL * h11.frobenius_norm().max(1.0) {
            return Err(BseError::Structure(format!(
                "lower-right block is not -H11ᵀ: defect {defect:e}"
            )));
        }
        Self::new(h11, h.block(0, n, n, n), h.block(n, 0, n, n))
    }

    pub fn n(&self) -> usize {
        self.h11.rows()
    }

    pub fn to_matrix(&self) -> RealMatrix {
        RealMatrix::from_blocks(&self.h11, &self.h12, &self.h21, &self.h11.transpose().scaled(-1.0))
            .expect("n x n blocks")
    }
}

/// Converts a real Hamiltonian to the operator with `Q H_r Qᴴ = i H`:
///
/// `A = (H₁₂ - H₂₁)/2 + i (H₁₁ᵀ - H₁₁)/2`, `B = -(H₁₂ + H₂₁)/2 - i (H₁₁ᵀ + H₁₁)/2`.
pub fn real_hamiltonian_to_bse(hr: &RealHamiltonian) -> Result<BseOperator> {
    let n = hr.n();
    let a = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            0.5 * (hr.h12[(i, j)] - hr.h21[(i, j)]),
            0.5 * (hr.h11[(j, i)] - hr.h11[(i, j)]),
        )
    });
    let b = ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            -0.5 * (hr.h12[(i, j)] + hr.h21[(i, j)]),
            -0.5 * (hr.h11[(j, i)] + hr.h11[(i, j)]),
        )
    });
    BseOperator::from_blocks(a, b)
}

/// Inverse of [`real_hamiltonian_to_bse`]: the real Hamiltonian `-i Qᴴ H Q`
/// read in the convention `Q H_r Qᴴ = i H`, which is `-build_hr(op)`.
pub fn bse_to_real_hamiltonian(op: &BseOperator) -> RealHamiltonian {
    let n = op.n();
    let h = build_hr(op).scaled(-1.0);
    RealHamiltonian {
        h11: h.block(0, 0, n, n),
        h12: h.block(0, n, n, n),
        h21: h.block(n, 0, n, n),
    }
}

/// `Ã = [[Re A, Im A], [-Im A, Re A]]`; each eigenvalue of `A` appears twice in `Ã`.
///
/// A real eigenvector `[p; q]` of `Ã` gives the eigenvector `p - i q` of `A`.
pub fn embed_hermitian(a: &ComplexMatrix) -> RealMatrix {
    let n = a.rows();
    RealMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let (bi, bj) = (i / n.max(1), j / n.max(1));
        let z = a[(i % n.max(1), j % n.max(1))];
        match (bi, bj) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => z.im,
            _ => -z.im,
        }
    })
}

/// Builds all right (`X`) and left (`Y`) eigenvectors from the positive half:
///
/// `X = [[X₁, conj X₂], [X₂, conj X₁]]`, `Y = [[X₁, -conj X₂], [-X₂, conj X₁]]`,
/// eigenvalues `(Λ₊, -Λ₊)` with the negative half negated exactly.
pub fn expand_full(op: &BseOperator, pos: &PositiveEigensystem) -> Result<FullEigensystem> {
    let n = op.n();
    if pos.n() != n || pos.x1.rows() != n || pos.x1.cols() != n || pos.x2.rows() != n || pos.x2.cols() != n {
        return Err(BseError::DimensionMismatch(format!(
            "positive eigensystem does not match operator of order {n}"
        )));
    }
    let (x1, x2) = (&pos.x1, &pos.x2);
    let (cx1, cx2) = (x1.conj(), x2.conj());
    let x = ComplexMatrix::from_blocks(x1, &cx2, x2, &cx1)?;
    let y = ComplexMatrix::from_blocks(x1, &cx2.scaled(-1.0), &x2.scaled(-1.0), &cx1)?;
    let mut lambda = pos.lambda_plus.clone();
    lambda.extend(pos.lambda_plus.iter().map(|&l| -l));
    Ok(FullEigensystem { x, y, lambda })
}
