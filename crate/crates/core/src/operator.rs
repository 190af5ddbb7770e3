//! The Bethe-Salpeter operator `H = [[A, B], [-conj B, -conj A]]` with `A`
//! Hermitian and `B` complex symmetric, plus the checks its solvers rely on.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embeddings::build_m;
use crate::error::{BseError, Result};
use crate::kernels::cholesky::cholesky;
use crate::matrix::ComplexMatrix;

/// Default relative tolerance for the Hermitian/symmetric checks: `100 ε`.
pub const DEFAULT_SYMMETRY_TOL: f64 = 100.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Real,
    Complex,
}

/// The pair `(A, B)` defining a Bethe-Salpeter Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct BseOperator {
    a: ComplexMatrix,
    b: ComplexMatrix,
    kind: FieldKind,
}

impl BseOperator {
    /// Checks shapes, finiteness and (for [`FieldKind::Real`]) that every
    /// imaginary part is exactly zero. Hermitian/symmetric structure is left to
    /// [`validate`] so that defective input can still be inspected.
    pub fn new(a: ComplexMatrix, b: ComplexMatrix, kind: FieldKind) -> Result<Self> {
        if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
            return Err(BseError::DimensionMismatch(format!(
                "A is {}x{}, B is {}x{}; both must be n x n",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols()
            )));
        }
        if !a.all_finite() {
            return Err(BseError::NonFinite("A".into()));
        }
        if !b.all_finite() {
            return Err(BseError::NonFinite("B".into()));
        }
        if kind == FieldKind::Real && !(a.is_real() && b.is_real()) {
            return Err(BseError::Structure(
                "real operator has nonzero imaginary parts".into(),
            ));
        }
        Ok(Self { a, b, kind })
    }

    /// Builds an operator whose kind is inferred: real iff both blocks are real.
    pub fn from_blocks(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        let kind = if a.is_real() && b.is_real() {
            FieldKind::Real
        } else {
            FieldKind::Complex
        };
        Self::new(a, b, kind)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.b
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    /// Returns a copy with `A ← (A + Aᴴ)/2`, `B ← (B + Bᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        let n = self.n();
        let a = ComplexMatrix::from_fn(n, n, |i, j| (self.a[(i, j)] + self.a[(j, i)].conj()) * 0.5);
        let b = ComplexMatrix::from_fn(n, n, |i, j| (self.b[(i, j)] + self.b[(j, i)]) * 0.5);
        Self {
            a,
            b,
            kind: self.kind,
        }
    }

    /// `s·(A, B)`; scales every eigenvalue of `H` by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a.scaled(s),
            b: self.b.scaled(s),
            kind: self.kind,
        }
    }

    /// `Ω = [[A, B], [conj B, conj A]]`, the Hermitian factor of `H = diag(I, -I) Ω`.
    pub fn omega(&self) -> ComplexMatrix {
        ComplexMatrix::from_blocks(&self.a, &self.b, &self.b.conj(), &self.a.conj())
            .expect("blocks are n x n")
    }
}

/// `[[A, B], [-conj B, -conj A]]`.
pub fn assemble_h(op: &BseOperator) -> ComplexMatrix {
    let nb = op.b.conj().scaled(-1.0);
    let na = op.a.conj().scaled(-1.0);
    ComplexMatrix::from_blocks(&op.a, &op.b, &nb, &na).expect("blocks are n x n")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub symmetry_ok: bool,
    pub definiteness_ok: bool,
    /// `‖A - Aᴴ‖_F / max(1, ‖A‖_F)` and `‖B - Bᵀ‖_F / max(1, ‖B‖_F)`.
    pub sym_defects: (f64, f64),
    /// Smallest Cholesky pivot of `M` seen by the probe (the failing one if it failed).
    pub margin: f64,
    /// Zero-based index and value of the failing pivot, if any.
    pub failed_pivot: Option<(usize, f64)>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.symmetry_ok && self.definiteness_ok
    }
}

/// Checks `A = Aᴴ`, `B = Bᵀ` to relative tolerance `tol` and probes positive
/// definiteness of `[[A, B], [conj B, conj A]]` through a real Cholesky
/// factorization of its embedding `M`.
pub fn validate(op: &BseOperator, tol: f64) -> ValidationReport {
    let da = op.a.hermitian_defect() / op.a.frobenius_norm().max(1.0);
    let db = op.b.symmetric_defect() / op.b.frobenius_norm().max(1.0);
    let symmetry_ok = da <= tol && db <= tol;
    let m = build_m(op);
    let (definiteness_ok, margin, failed_pivot) = match cholesky(&m) {
        Ok(f) => (true, f.min_pivot, None),
        Err(BseError::NotPositiveDefinite {
            index, pivot_value, ..
        }) => (false, pivot_value, Some((index, pivot_value))),
        Err(_) => (false, f64::NAN, None),
    };
    ValidationReport {
        symmetry_ok,
        definiteness_ok,
        sym_defects: (da, db),
        margin,
        failed_pivot,
    }
}

/// Deterministic random operator satisfying the definiteness condition.
///
/// `A₀` (Hermitian) and `B₀` (symmetric) get entries uniform in `[-1, 1]`
/// (real and imaginary parts independently for complex kind), then
/// `A = A₀ + (‖A₀‖_F + ‖B₀‖_F + margin) I`. The Frobenius norms bound the
/// spectral norms, so the smallest eigenvalue of the embedding is at least
/// `margin`.
pub fn random_bse(n: usize, seed: u64, margin: f64, kind: FieldKind) -> Result<BseOperator> {
    if n == 0 {
        return Err(BseError::InvalidArgument("n must be at least 1".into()));
    }
    if !(margin > 0.0) {
        return Err(BseError::InvalidArgument("margin must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n);
    let complex = kind == FieldKind::Complex;
    let draw = |rng: &mut ChaCha8Rng, imag: bool| {
        let re = rng.gen_range(-1.0..=1.0);
        let im = if imag { rng.gen_range(-1.0..=1.0) } else { 0.0 };
        Complex64::new(re, im)
    };
    for j in 0..n {
        for i in 0..=j {
            let z = draw(&mut rng, complex && i != j);
            a[(i, j)] = z;
            if i != j {
                a[(j, i)] = z.conj();
            }
        }
    }
    for j in 0..n {
        for i in 0..=j {
            let z = draw(&mut rng, complex);
            b[(i, j)] = z;
            b[(j, i)] = z;
        }
    }
    let mut shift = a.frobenius_norm() + b.frobenius_norm() + margin;
    loop {
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)].re += shift;
        }
        let op = BseOperator::new(shifted, b.clone(), kind)?;
        if validate(&op, DEFAULT_SYMMETRY_TOL).ok() {
            return Ok(op);
        }
        shift *= 2.0;
    }
}
