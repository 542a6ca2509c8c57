//! Matrix pencils `A + lambda B` and the Hermitian refinement used across the
//! crate.

use crate::linalg::{gap_ratio, hermitian_eigen, jacobi_svd, Lu};
use crate::matrix::ComplexMatrix;
use crate::rng::SeededRng;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A general (possibly rectangular) matrix pencil `A + lambda B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixPencil {
    #[serde(rename = "A")]
    pub a: ComplexMatrix,
    #[serde(rename = "B")]
    pub b: ComplexMatrix,
}

impl MatrixPencil {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Self {
        assert_eq!((a.rows(), a.cols()), (b.rows(), b.cols()), "coefficient shapes differ");
        Self { a, b }
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.a.transpose(), self.b.transpose())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self::new(self.a.direct_sum(&other.a), self.b.direct_sum(&other.b))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.a.scale(s), self.b.scale(s))
    }

    pub fn norm_scale(&self) -> f64 {
        self.a.frob_norm().max(self.b.frob_norm())
    }
}

/// Signs of the eigenvalues of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inertia {
    pub pos: usize,
    pub neg: usize,
    pub zero: usize,
}

impl Inertia {
    pub fn new(pos: usize, neg: usize, zero: usize) -> Self {
        Self { pos, neg, zero }
    }
}

/// A square pencil with Hermitian coefficients, validated on construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixPencil", into = "MatrixPencil")]
pub struct HermitianPencil {
    pencil: MatrixPencil,
}

impl HermitianPencil {
    pub fn new(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
            return Err(Error::InvalidParams("Hermitian pencil coefficients must be square and equally sized".into()));
        }
        if a.rows() == 0 {
            return Err(Error::InvalidParams("Hermitian pencil must have positive size".into()));
        }
        let scale = a.frob_norm().max(b.frob_norm()).max(1.0);
        let tol = crate::HERM_TOL * scale;
        let defect = a.hermitian_defect().max(b.hermitian_defect());
        if defect > tol {
            return Err(Error::NotHermitian { asym: defect, tol });
        }
        Ok(Self { pencil: MatrixPencil::new(a, b) })
    }

    pub fn n(&self) -> usize {
        self.pencil.rows()
    }

    pub fn a(&self) -> &ComplexMatrix {
        &self.pencil.a
    }

    pub fn b(&self) -> &ComplexMatrix {
        &self.pencil.b
    }

    pub fn pencil(&self) -> &MatrixPencil {
        &self.pencil
    }

    pub fn into_pencil(self) -> MatrixPencil {
        self.pencil
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self { pencil: self.pencil.direct_sum(&other.pencil) }
    }
}

impl TryFrom<MatrixPencil> for HermitianPencil {
    type Error = Error;
    fn try_from(p: MatrixPencil) -> Result<Self> {
        Self::new(p.a, p.b)
    }
}

impl From<HermitianPencil> for MatrixPencil {
    fn from(h: HermitianPencil) -> MatrixPencil {
        h.pencil
    }
}

/// `A + lambda0 B`.
pub fn evaluate(p: &MatrixPencil, lambda: Complex64) -> ComplexMatrix {
    p.a.add(&p.b.scale(lambda))
}

/// `Q* (A + lambda B) Q`, resymmetrized entrywise to keep the Hermitian
/// invariant exact under roundoff. Rejects transforms whose condition number
/// exceeds `COND_MAX`.
pub fn congruence(h: &HermitianPencil, q: &ComplexMatrix) -> Result<HermitianPencil> {
    if !q.is_square() || q.rows() != h.n() {
        return Err(Error::InvalidParams("congruence transform shape mismatch".into()));
    }
    let sv = jacobi_svd(q).sv;
    let smin = sv.last().copied().unwrap_or(0.0);
    let smax = sv.first().copied().unwrap_or(0.0);
    let cond = if smin == 0.0 { f64::INFINITY } else { smax / smin };
    if cond > crate::COND_MAX {
        return Err(Error::SingularTransform { cond, max: crate::COND_MAX });
    }
    let qs = q.adjoint();
    let a = qs.mul(h.a()).mul(q).hermitian_part();
    let b = qs.mul(h.b()).mul(q).hermitian_part();
    HermitianPencil::new(a, b)
}

/// Default absolute-relative tolerance for inertia decisions.
pub const INERTIA_TOL: f64 = 1e-10;

/// Eigenvalue sign counts of a Hermitian matrix. The zero band is
/// `tol * max(|eig|_max, 1)` wide.
pub fn inertia_of(m: &ComplexMatrix, tol: f64) -> Result<Inertia> {
    if !m.is_square() {
        return Err(Error::InvalidParams("inertia requires a square matrix".into()));
    }
    let scale = m.frob_norm().max(1.0);
    let defect = m.hermitian_defect();
    let htol = crate::HERM_TOL * scale;
    if defect > htol {
        return Err(Error::NotHermitian { asym: defect, tol: htol });
    }
    let (eigs, _) = hermitian_eigen(m);
    let band = tol * eigs.iter().map(|e| e.abs()).fold(1.0, f64::max);
    let mut inertia = Inertia::new(0, 0, 0);
    for e in eigs {
        if e > band {
            inertia.pos += 1;
        } else if e < -band {
            inertia.neg += 1;
        } else {
            inertia.zero += 1;
        }
    }
    Ok(inertia)
}

/// Maximum rank of `A + lambda B` over seeded sample points drawn from the
/// annulus `ANNULUS.0 <= |lambda| <= ANNULUS.1`.
pub fn normal_rank(p: &MatrixPencil, seed: u64) -> usize {
    if p.rows() == 0 || p.cols() == 0 {
        return 0;
    }
    let mut rng = SeededRng::new(seed);
    let (r0, r1) = crate::ANNULUS;
    let mut best = 0;
    for _ in 0..crate::N_SAMPLE {
        let radius = rng.uniform_in(r0 * r0, r1 * r1).sqrt();
        let theta = rng.uniform_in(0.0, std::f64::consts::TAU);
        let lambda = Complex64::from_polar(radius, theta);
        let m = evaluate(p, lambda);
        let svd = jacobi_svd(&m);
        best = best.max(svd.rank(m.rows(), m.cols()));
    }
    best
}

/// Coefficients of `det(A + lambda B)`, degree low to high, length `n + 1`.
/// Computed by evaluation at the `(n + 1)`-st roots of unity followed by an
/// inverse discrete Fourier transform; exact for polynomials of degree `<= n`.
pub fn determinant(p: &MatrixPencil) -> Result<Vec<Complex64>> {
    if !p.a.is_square() {
        return Err(Error::InvalidParams("determinant requires a square pencil".into()));
    }
    let n = p.rows();
    if n > crate::DENSE_MAX_N {
        return Err(Error::TooLarge { n, limit: crate::DENSE_MAX_N });
    }
    if n == 0 {
        return Ok(vec![Complex64::ONE]);
    }
    let points = n + 1;
    let values: Vec<Complex64> = (0..points)
        .map(|j| {
            let omega = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / points as f64);
            Lu::factor(&evaluate(p, omega)).det()
        })
        .collect();
    let mut coeffs = Vec::with_capacity(points);
    for k in 0..points {
        let mut acc = Complex64::ZERO;
        for (j, v) in values.iter().enumerate() {
            let angle = -std::f64::consts::TAU * (j * k % points) as f64 / points as f64;
            acc += v * Complex64::from_polar(1.0, angle);
        }
        coeffs.push(acc / points as f64);
    }
    Ok(coeffs)
}

/// Evaluates a coefficient list at `lambda` (Horner).
pub fn poly_eval(coeffs: &[Complex64], lambda: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::ZERO, |acc, &c| acc * lambda + c)
}

/// Degree of a coefficient list under a relative threshold: the largest index
/// whose coefficient exceeds `rel * max|coeff|`. Returns `None` for the zero
/// polynomial.
pub fn poly_degree(coeffs: &[Complex64], rel: f64) -> Option<usize> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    coeffs
        .iter()
        .enumerate()
        .rev()
        .find(|(_, c)| c.norm() > rel * scale)
        .map(|(k, _)| k)
}

/// Numerical rank of a single matrix together with its gap certificate.
pub fn rank_with_gap(m: &ComplexMatrix) -> (usize, f64) {
    let svd = jacobi_svd(m);
    let rank = svd.rank(m.rows(), m.cols());
    (rank, gap_ratio(&svd.sv, rank))
}
