//! Complex LU factorization with partial pivoting.

use crate::matrix::ComplexMatrix;
use num_complex::Complex64;

pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl Lu {
    pub fn factor(m: &ComplexMatrix) -> Self {
        assert!(m.is_square());
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        let mut singular = false;
        for k in 0..n {
            let mut pivot = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let mag = lu[(i, k)].norm();
                if mag > best {
                    best = mag;
                    pivot = i;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if pivot != k {
                for j in 0..n {
                    let tmp = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot, j)];
                    lu[(pivot, j)] = tmp;
                }
                perm.swap(k, pivot);
                swaps += 1;
            }
            let diag = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / diag;
                lu[(i, k)] = factor;
                if factor != Complex64::ZERO {
                    for j in k + 1..n {
                        let sub = factor * lu[(k, j)];
                        lu[(i, j)] -= sub;
                    }
                }
            }
        }
        Self { lu, perm, swaps, singular }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex64 {
        if self.singular {
            return Complex64::ZERO;
        }
        let mut det = if self.swaps % 2 == 0 { Complex64::ONE } else { -Complex64::ONE };
        for k in 0..self.lu.rows() {
            det *= self.lu[(k, k)];
        }
        det
    }

    /// Ratio of the smallest to the largest pivot magnitude; a cheap proxy
    /// for detecting numerically singular factors.
    pub fn pivot_ratio(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        let mags: Vec<f64> = (0..self.lu.rows()).map(|k| self.lu[(k, k)].norm()).collect();
        let hi = mags.iter().copied().fold(0.0, f64::max);
        let lo = mags.iter().copied().fold(f64::INFINITY, f64::min);
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }

    /// Solves `A X = B` for every column of `B`. Returns `None` when the
    /// factorization is exactly singular.
    pub fn solve_mat(&self, b: &ComplexMatrix) -> Option<ComplexMatrix> {
        if self.singular {
            return None;
        }
        let n = self.lu.rows();
        assert_eq!(b.rows(), n);
        let mut x = ComplexMatrix::zeros(n, b.cols());
        for col in 0..b.cols() {
            let mut y = vec![Complex64::ZERO; n];
            for i in 0..n {
                let mut acc = b[(self.perm[i], col)];
                for j in 0..i {
                    acc -= self.lu[(i, j)] * y[j];
                }
                y[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = y[i];
                for j in i + 1..n {
                    acc -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = acc / self.lu[(i, i)];
            }
        }
        Some(x)
    }
}
