//! Exact characteristic polynomials for small pencils. Stored `f64` entries
//! are exact dyadic rationals, so the determinant polynomial of A + lambda B
//! can be interpolated without rounding. Two consumers: infinite-eigenvalue
//! counts become exact degree decisions, and Newton refinement against the
//! exact polynomial reaches full f64 accuracy even when the eigenvector
//! basis is too ill conditioned for a backward-stable solver alone.

use crate::matrix::ComplexMatrix;
use crate::pencil::MatrixPencil;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalComplex {
    pub re: BigRational,
    pub im: BigRational,
}

impl RationalComplex {
    pub fn zero() -> Self {
        Self { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self { re: BigRational::from_integer(BigInt::from(n)), im: BigRational::zero() }
    }

    /// Exact conversion; fails only on non-finite input.
    pub fn from_c64(z: Complex64) -> Result<Self> {
        let part = |x: f64| {
            BigRational::from_float(x)
                .ok_or_else(|| Error::InvalidParams(format!("non-finite entry {x}")))
        };
        Ok(Self { re: part(z.re)?, im: part(z.im)? })
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        let denom = &o.re * &o.re + &o.im * &o.im;
        let re = (&self.re * &o.re + &self.im * &o.im) / &denom;
        let im = (&self.im * &o.re - &self.re * &o.im) / &denom;
        Self { re, im }
    }

    pub fn neg(&self) -> Self {
        Self { re: -self.re.clone(), im: -self.im.clone() }
    }

    fn scale_rat(&self, r: &BigRational) -> Self {
        Self { re: &self.re * r, im: &self.im * r }
    }
}

/// Exact determinant by Gaussian elimination with row swaps.
fn det_exact(mut m: Vec<Vec<RationalComplex>>) -> RationalComplex {
    let n = m.len();
    let mut det = RationalComplex::from_int(1);
    for col in 0..n {
        let pivot = match (col..n).find(|&r| !m[r][col].is_zero()) {
            Some(r) => r,
            None => return RationalComplex::zero(),
        };
        if pivot != col {
            m.swap(pivot, col);
            det = det.neg();
        }
        let p = m[col][col].clone();
        det = det.mul(&p);
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].div(&p);
            for c in col..n {
                let delta = factor.mul(&m[col][c]);
                m[r][c] = m[r][c].sub(&delta);
            }
        }
    }
    det
}

fn evaluate_exact(a: &ComplexMatrix, b: &ComplexMatrix, t: i64) -> Result<Vec<Vec<RationalComplex>>> {
    let n = a.rows();
    let tv = RationalComplex::from_int(t);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let av = RationalComplex::from_c64(a[(i, j)])?;
            let bv = RationalComplex::from_c64(b[(i, j)])?;
            row.push(av.add(&tv.mul(&bv)));
        }
        out.push(row);
    }
    Ok(out)
}

/// Node sequence 0, 1, -1, 2, -2, ...
fn node(i: usize) -> i64 {
    if i % 2 == 1 {
        ((i + 1) / 2) as i64
    } else {
        -((i / 2) as i64)
    }
}

/// Exact coefficients of det(A + lambda B), low to high, length n + 1.
/// Guarded by the same size cap as the floating interpolation.
pub fn det_poly_exact(p: &MatrixPencil) -> Result<Vec<RationalComplex>> {
    let n = p.rows();
    if n != p.cols() {
        return Err(Error::InvalidParams("determinant needs a square pencil".into()));
    }
    if n > crate::DENSE_MAX_N {
        return Err(Error::TooLarge { n, limit: crate::DENSE_MAX_N });
    }
    let nodes: Vec<i64> = (0..=n).map(node).collect();
    let values: Vec<RationalComplex> = nodes
        .iter()
        .map(|&t| Ok(det_exact(evaluate_exact(&p.a, &p.b, t)?)))
        .collect::<Result<_>>()?;
    // Lagrange interpolation with integer nodes keeps everything rational.
    let mut coeffs = vec![RationalComplex::zero(); n + 1];
    for (i, &ti) in nodes.iter().enumerate() {
        if values[i].is_zero() {
            continue;
        }
        // Basis polynomial prod_{j != i} (x - t_j) as rational coefficients.
        let mut basis = vec![BigRational::from_integer(BigInt::from(1))];
        let mut denom = BigRational::from_integer(BigInt::from(1));
        for (j, &tj) in nodes.iter().enumerate() {
            if j == i {
                continue;
            }
            denom *= BigRational::from_integer(BigInt::from(ti - tj));
            basis.push(BigRational::zero());
            for k in (0..basis.len()).rev() {
                let lower = if k > 0 { basis[k - 1].clone() } else { BigRational::zero() };
                basis[k] = lower - BigRational::from_integer(BigInt::from(tj)) * &basis[k];
            }
        }
        let weight = values[i].scale_rat(&(BigRational::from_integer(BigInt::from(1)) / denom));
        for (k, b) in basis.iter().enumerate() {
            let term = weight.scale_rat(b);
            coeffs[k] = coeffs[k].add(&term);
        }
    }
    Ok(coeffs)
}

/// Index of the highest exactly nonzero coefficient; None for the zero
/// polynomial (a singular pencil).
pub fn poly_degree_exact(coeffs: &[RationalComplex]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

fn magnitude_bound(r: &BigRational) -> f64 {
    r.to_f64().map_or(f64::INFINITY, f64::abs)
}

/// Largest coefficient magnitude, for relative comparisons.
pub fn poly_scale(coeffs: &[RationalComplex]) -> f64 {
    coeffs
        .iter()
        .map(|c| magnitude_bound(&c.re).hypot(magnitude_bound(&c.im)))
        .fold(0.0, f64::max)
}

/// Evaluates the polynomial and its derivative exactly at z, rounding only
/// the final results.
fn eval_with_derivative(coeffs: &[RationalComplex], z: Complex64) -> Result<(Complex64, Complex64)> {
    let zr = RationalComplex::from_c64(z)?;
    let mut value = RationalComplex::zero();
    let mut deriv = RationalComplex::zero();
    for c in coeffs.iter().rev() {
        deriv = deriv.mul(&zr).add(&value);
        value = value.mul(&zr).add(c);
    }
    Ok((value.to_c64(), deriv.to_c64()))
}

/// Newton refinement against the exact polynomial. Converges to full f64
/// accuracy at simple roots; at multiple roots it stalls harmlessly near the
/// cluster and returns the best iterate seen.
pub fn refine_root(coeffs: &[RationalComplex], seed: Complex64) -> Complex64 {
    let mut z = seed;
    let mut best = seed;
    let mut best_norm = f64::INFINITY;
    for _ in 0..16 {
        let (value, deriv) = match eval_with_derivative(coeffs, z) {
            Ok(v) => v,
            Err(_) => return best,
        };
        if !value.is_finite() || !deriv.is_finite() {
            return best;
        }
        if value.norm() < best_norm {
            best_norm = value.norm();
            best = z;
        }
        if deriv.norm() == 0.0 {
            return best;
        }
        let step = value / deriv;
        z -= step;
        if step.norm() <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    if let Ok((value, _)) = eval_with_derivative(coeffs, z) {
        if value.is_finite() && value.norm() <= best_norm {
            return z;
        }
    }
    best
}

/// Aberth refinement of every root at once against the exact polynomial.
/// The mutual repulsion term keeps clustered simple roots on distinct
/// iterates; independent Newton runs can collapse two seeds into one basin
/// when the cluster diameter is below the seed error.
pub fn refine_roots_simultaneous(
    coeffs: &[RationalComplex],
    seeds: &[Complex64],
) -> Vec<Complex64> {
    let mut z: Vec<Complex64> = seeds.to_vec();
    for i in 0..z.len() {
        for j in 0..i {
            if (z[i] - z[j]).norm() <= 1e-12 * (1.0 + z[i].norm()) {
                let off = 1e-8 * (1.0 + z[i].norm()) * (i as f64 + 1.0);
                z[i] += Complex64::new(off, off);
            }
        }
    }
    let mut frozen = vec![false; z.len()];
    for _ in 0..40 {
        let mut moved = false;
        for i in 0..z.len() {
            if frozen[i] {
                continue;
            }
            let (value, deriv) = match eval_with_derivative(coeffs, z[i]) {
                Ok(v) => v,
                Err(_) => {
                    frozen[i] = true;
                    continue;
                }
            };
            if !value.is_finite() || !deriv.is_finite() || value.norm() == 0.0 {
                frozen[i] = true;
                continue;
            }
            if deriv.norm() == 0.0 {
                // Exact critical point; nudge off it and retry next sweep.
                let off = 1e-8 * (1.0 + z[i].norm());
                z[i] += Complex64::new(off, 0.0);
                moved = true;
                continue;
            }
            let w = value / deriv;
            let mut repulsion = Complex64::new(0.0, 0.0);
            for (j, other) in z.iter().enumerate() {
                if j != i {
                    let gap = z[i] - other;
                    if gap.norm() > 0.0 {
                        repulsion += gap.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * repulsion;
            let step = if denom.norm() > 1e-12 { w / denom } else { w };
            z[i] -= step;
            if step.norm() <= 1e-16 * (1.0 + z[i].norm()) {
                frozen[i] = true;
            } else {
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    z
}
