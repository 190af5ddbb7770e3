//! Structure-preserving dense eigensolvers for Bethe-Salpeter Hamiltonians
//!
//! ```text
//! H = [[A, B], [-conj B, -conj A]],   A = Aᴴ,  B = Bᵀ,
//! ```
//!
//! under the condition that `Ω = [[A, B], [conj B, conj A]]` is positive
//! definite. The spectrum of `H` is then real and comes in `±λ` pairs; the
//! solvers here return only the positive half, so pairing is exact.
//!
//! Every kernel (Cholesky, Householder tridiagonalization, bisection with
//! inverse iteration, one-sided Jacobi SVD) is implemented in this crate.
//! With the `parallel` feature (on by default) independent columns, clusters
//! and grid points are processed with rayon; results are bitwise identical to
//! the sequential build.

// `!(x > 0.0)` is how NaN gets rejected alongside non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigensystem;
pub mod embeddings;
pub mod error;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod operator;
pub mod par;
pub mod solvers;
pub mod spectra;

pub use eigensystem::{residual_metrics, FullEigensystem, PositiveEigensystem, SolverWarning};
pub use embeddings::{
    bse_to_real_hamiltonian, build_hr, build_m, embed_hermitian, expand_full, real_hamiltonian_to_bse,
    RealHamiltonian,
};
pub use error::{BseError, FactorTarget, Result};
pub use matrix::{ComplexMatrix, DenseMatrix, RealMatrix, Scalar};
pub use operator::{assemble_h, random_bse, validate, BseOperator, FieldKind, ValidationReport, DEFAULT_SYMMETRY_TOL};
pub use solvers::{pairing_defect, solve_complex, solve_oracle, solve_real, solve_tda, tda_gap_report, TdaGapReport};
pub use spectra::{absorption_spectrum, dos_dominance, spectral_density, DipoleData, SpectrumCurve, SpectrumKind};

pub use num_complex::Complex64;
