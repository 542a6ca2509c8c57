//! Toolkit for complex Hermitian matrix pencils `A + lambda B`.
//!
//! The crate builds canonical block structures under *-congruence, enumerates
//! the generic complete eigenstructures of regular and bounded-rank Hermitian
//! pencils, computes congruence-orbit and bundle codimensions both in closed
//! form and by brute force, constructs structured perturbation families with
//! predictable eigenstructure, and infers the complete eigenstructure of a
//! numeric Hermitian pencil.

pub mod bundles;
pub mod canonical;
pub mod codim;
pub mod experiment;
pub mod infer;
pub mod linalg;
pub mod matrix;
pub mod pencil;
pub mod perturb;
pub mod rng;

pub use matrix::ComplexMatrix;
pub use pencil::{HermitianPencil, Inertia, MatrixPencil};

/// Relative Hermitian-symmetry tolerance; scaled by `max(|A|_F, |B|_F, 1)`.
pub const HERM_TOL: f64 = 1e-12;
/// Relative singular-value threshold for rank decisions; scaled by
/// `max(rows, cols) * sigma_1`.
pub const RANK_TOL: f64 = 1e-10;
/// Number of evaluation points used by normal-rank sampling.
pub const N_SAMPLE: usize = 7;
/// Inner and outer radii of the annulus used by normal-rank sampling.
pub const ANNULUS: (f64, f64) = (0.5, 2.0);
/// Largest condition number accepted for a random congruence transform.
pub const COND_MAX: f64 = 1e6;
/// Smallest singular-value gap ratio certifying an integer rank decision.
pub const GAP_MIN: f64 = 1e6;
/// Smallest imaginary part for sampled non-real eigenvalue pairs.
pub const IM_MIN: f64 = 0.05;
/// Relative magnitude of the rank-completing regularization; scaled by
/// `max(|A|_F, |B|_F)`.
pub const TAU_FACTOR: f64 = 1e-2;
/// Relative tolerance for matching eigenvalues across regularization runs.
pub const MATCH_TOL: f64 = 1e-6;
/// Relative tolerance for pairing a non-real eigenvalue with its conjugate.
pub const PAIR_TOL: f64 = 1e-6;
/// Relative tolerance deciding that an eigenvalue is real; scaled by
/// `1 + |re|`.
pub const REALNESS_TOL: f64 = 1e-8;
/// Largest pencil size accepted by the dense determinant and by the
/// full-system brute-force codimension path.
pub const DENSE_MAX_N: usize = 12;
/// Rejection budget for random congruence sampling.
pub const SAMPLE_REJECT_LIMIT: usize = 16;
/// Environment variable capping worker parallelism.
pub const THREADS_ENV: &str = "HERMIKRON_THREADS";

/// Errors reported by the toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not Hermitian (asymmetry {asym:.3e} exceeds tolerance {tol:.3e})")]
    NotHermitian { asym: f64, tol: f64 },
    #[error("pencil is not skew-Hermitian (asymmetry {asym:.3e} exceeds tolerance {tol:.3e})")]
    NotSkewHermitian { asym: f64, tol: f64 },
    #[error("transform is numerically singular (condition estimate {cond:.3e} exceeds {max:.3e})")]
    SingularTransform { cond: f64, max: f64 },
    #[error("problem too large for the dense path (n = {n}, limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("invalid canonical block: {0}")]
    InvalidBlock(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("eigenvalue value {0} repeats across blocks")]
    EigenvalueCollision(String),
    #[error("sampling failed after {0} rejected transforms")]
    SamplingFailed(usize),
    #[error("floating rank decision is ambiguous (gap ratio {gap:.3e} below {min:.3e})")]
    AmbiguousRank { gap: f64, min: f64 },
    #[error("rank decision ambiguous in the minimal-index scan (gap ratio {gap:.3e} below {min:.3e})")]
    RankAmbiguity { gap: f64, min: f64 },
    #[error("pencil is not regular")]
    NotRegular,
    #[error("matched eigenvalue sets disagree across confirmation runs ({0} vs {1})")]
    InferenceUnstable(usize, usize),
    #[error("non-real eigenvalue {0} has no conjugate partner within tolerance")]
    UnpairedComplex(String),
    #[error("sign of eigenvalue {eig} unresolved (form magnitude {magnitude:.3e} below {tol:.3e})")]
    AmbiguousSign { eig: f64, magnitude: f64, tol: f64 },
    #[error("eigenvalue iteration failed to converge")]
    EigNoConverge,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
