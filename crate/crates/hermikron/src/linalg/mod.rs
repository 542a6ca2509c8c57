//! Dense numeric kernels: LU factorization, Hermitian eigendecomposition,
//! singular values with right vectors, general complex eigenvalues, and an
//! exact rational characteristic-polynomial path for small pencils.

mod eig;
pub mod exact;
mod hermitian;
mod lu;
mod svd;

pub use eig::eigenvalues;
pub use exact::{det_poly_exact, poly_degree_exact, refine_root, RationalComplex};
pub use hermitian::hermitian_eigen;
pub use lu::Lu;
pub use svd::{gap_ratio, jacobi_svd, numerical_rank, singular_values_real, Svd};
