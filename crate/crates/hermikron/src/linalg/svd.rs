//! Singular values and right singular vectors by one-sided Jacobi
//! orthogonalization. Chosen for its high accuracy on tiny singular values,
//! which rank certificates here depend on.

use crate::matrix::ComplexMatrix;
use num_complex::Complex64;

pub struct Svd {
    /// Singular values, descending.
    pub sv: Vec<f64>,
    /// Right singular vectors as columns; `m v_j` has norm `sv[j]`.
    pub v: ComplexMatrix,
}

pub fn jacobi_svd(m: &ComplexMatrix) -> Svd {
    let rows = m.rows();
    let cols = m.cols();
    if rows == 0 || cols == 0 {
        return Svd { sv: vec![0.0; cols], v: ComplexMatrix::identity(cols) };
    }
    let mut w = m.clone();
    let mut v = ComplexMatrix::identity(cols);
    // Columns whose squared norm falls below this fraction of the total mass
    // are numerically zero; rotating them only churns V with rounding noise.
    let floor = 1e-30 * w.data().iter().map(|z| z.norm_sqr()).sum::<f64>();
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut a = 0.0f64;
                let mut b = 0.0f64;
                let mut g = Complex64::ZERO;
                for i in 0..rows {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    a += wp.norm_sqr();
                    b += wq.norm_sqr();
                    g += wp.conj() * wq;
                }
                let mag = g.norm();
                if a <= floor || b <= floor || mag <= 1e-15 * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = g / mag;
                let tau = (b - a) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let u10 = -phase.conj() * s;
                let u11 = phase.conj() * c;
                for i in 0..rows {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = wp * c + wq * u10;
                    w[(i, q)] = wp * s + wq * u11;
                }
                for i in 0..cols {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c + vq * u10;
                    v[(i, q)] = vp * s + vq * u11;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..cols)
        .map(|j| (0..rows).map(|i| w[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| sv[y].partial_cmp(&sv[x]).unwrap());
    sv = order.iter().map(|&j| sv[j]).collect();
    let v = ComplexMatrix::from_fn(cols, cols, |i, j| v[(i, order[j])]);
    Svd { sv, v }
}

/// Singular values (descending) of a real row-major matrix, without vector
/// accumulation. Serves the large realified congruence systems, where only
/// the rank decision matters and the complex path would double the work.
pub fn singular_values_real(rows: usize, cols: usize, data: &[f64]) -> Vec<f64> {
    assert_eq!(data.len(), rows * cols);
    if rows == 0 || cols == 0 {
        return vec![0.0; cols];
    }
    // Column-major work buffer keeps the inner loops contiguous.
    let mut w: Vec<Vec<f64>> =
        (0..cols).map(|j| (0..rows).map(|i| data[i * cols + j]).collect()).collect();
    // Same numerically-zero-column floor as the complex path; it also stops
    // the sweep loop from spinning on rank-deficient systems.
    let floor = 1e-30 * data.iter().map(|x| x * x).sum::<f64>();
    for _ in 0..60 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let mut a = 0.0f64;
                let mut b = 0.0f64;
                let mut g = 0.0f64;
                for i in 0..rows {
                    a += w[p][i] * w[p][i];
                    b += w[q][i] * w[q][i];
                    g += w[p][i] * w[q][i];
                }
                if a <= floor || b <= floor || g.abs() <= 1e-15 * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * g);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let (left, right) = w.split_at_mut(q);
                let wp = &mut left[p];
                let wq = &mut right[0];
                for i in 0..rows {
                    let up = wp[i];
                    let uq = wq[i];
                    wp[i] = c * up - s * uq;
                    wq[i] = s * up + c * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> =
        w.iter().map(|col| col.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Number of singular values above `max(rows, cols) * sv[0] * RANK_TOL`.
pub fn numerical_rank(sv: &[f64], rows: usize, cols: usize) -> usize {
    let s1 = sv.first().copied().unwrap_or(0.0);
    if s1 == 0.0 {
        return 0;
    }
    let thresh = rows.max(cols) as f64 * s1 * crate::RANK_TOL;
    sv.iter().take_while(|&&s| s > thresh).count()
}

/// Ratio of the smallest retained to the largest discarded singular value;
/// infinite when nothing is discarded or the discarded part is exactly zero.
pub fn gap_ratio(sv: &[f64], rank: usize) -> f64 {
    if rank == 0 || rank >= sv.len() {
        return f64::INFINITY;
    }
    if sv[rank] == 0.0 {
        f64::INFINITY
    } else {
        sv[rank - 1] / sv[rank]
    }
}

impl Svd {
    pub fn rank(&self, rows: usize, cols: usize) -> usize {
        numerical_rank(&self.sv, rows, cols)
    }

    /// Columns of `v` spanning the numerical kernel.
    pub fn kernel(&self, rows: usize, cols: usize) -> Vec<Vec<Complex64>> {
        let rank = self.rank(rows, cols);
        (rank..cols).map(|j| self.v.column(j)).collect()
    }
}
