//! Dense factorization and eigensolver primitives.

pub mod cholesky;
pub mod hermitian;
pub mod householder;
pub mod svd;
pub mod tridiag;

pub use cholesky::{cholesky, lower_matmul, Cholesky};
pub use hermitian::{hermitian_eig, HermitianEig};
pub use householder::{skew_tridiagonalize, sym_tridiagonalize, Reflectors, SkewTridiagonal, SymTridiagonal};
pub use svd::{jacobi_svd, Svd};
pub use tridiag::{phase, phase_fold, sturm_count, tridiag_eig, TridiagEig, Which};
