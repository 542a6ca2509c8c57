//! Eigenvalues of general complex matrices: Householder reduction to upper
//! Hessenberg form followed by a single-shift QR iteration with Wilkinson
//! shifts. Eigenvalues only; deflated blocks are never revisited, so updates
//! stay inside the active diagonal block.

use crate::matrix::ComplexMatrix;
use crate::{Error, Result};
use num_complex::Complex64;

pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<Complex64>> {
    assert!(m.is_square());
    let n = m.rows();
    if n == 0 {
        return Ok(vec![]);
    }
    if n == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    let mut h = hessenberg(m);
    let scale = h.frob_norm().max(1e-300);
    let mut eigs = Vec::with_capacity(n);
    let mut end = n - 1;
    let mut its = 0usize;
    let mut total = 0usize;
    loop {
        // Find the start of the trailing irreducible block.
        let mut lo = end;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let sref = if s == 0.0 { scale } else { s };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * sref {
                h[(lo, lo - 1)] = Complex64::ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == end {
            eigs.push(h[(end, end)]);
            if end == 0 {
                break;
            }
            end -= 1;
            its = 0;
            continue;
        }
        if lo + 1 == end {
            let (e1, e2) = eig2(h[(lo, lo)], h[(lo, end)], h[(end, lo)], h[(end, end)]);
            eigs.push(e1);
            eigs.push(e2);
            if lo == 0 {
                break;
            }
            end = lo - 1;
            its = 0;
            continue;
        }
        its += 1;
        total += 1;
        if its > 60 || total > 120 * n {
            return Err(Error::EigNoConverge);
        }
        let shift = if its % 16 == 0 {
            let kick = h[(end, end - 1)].norm() + h[(end - 1, end - 2)].norm();
            h[(end, end)] + Complex64::new(0.75, 0.1) * kick
        } else {
            let (e1, e2) = eig2(
                h[(end - 1, end - 1)],
                h[(end - 1, end)],
                h[(end, end - 1)],
                h[(end, end)],
            );
            let target = h[(end, end)];
            if (e1 - target).norm() <= (e2 - target).norm() {
                e1
            } else {
                e2
            }
        };
        qr_step(&mut h, lo, end, shift);
    }
    debug_assert_eq!(eigs.len(), n);
    Ok(eigs)
}

fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let mut v: Vec<Complex64> = (0..len).map(|i| h[(k + 1 + i, k)]).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tail: f64 = v.iter().skip(1).map(|z| z.norm_sqr()).sum();
        if norm == 0.0 || tail == 0.0 {
            continue;
        }
        let x0 = v[0];
        let alpha = if x0 == Complex64::ZERO {
            Complex64::new(-norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        v[0] = x0 - alpha;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let beta = 2.0 / vv;
        // Left: rows k+1..n over columns k..n.
        for j in k..n {
            let mut w = Complex64::ZERO;
            for i in 0..len {
                w += v[i].conj() * h[(k + 1 + i, j)];
            }
            let w = w * beta;
            for i in 0..len {
                let sub = w * v[i];
                h[(k + 1 + i, j)] -= sub;
            }
        }
        // Right: columns k+1..n over all rows.
        for i in 0..n {
            let mut w = Complex64::ZERO;
            for j in 0..len {
                w += h[(i, k + 1 + j)] * v[j];
            }
            let w = w * beta;
            for j in 0..len {
                let sub = w * v[j].conj();
                h[(i, k + 1 + j)] -= sub;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Complex64::ZERO;
        }
    }
    h
}

/// Eigenvalues of `[[a, b], [c, d]]`.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let mid = (a + d) * 0.5;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    (mid + disc, mid - disc)
}

/// Complex Givens rotation `G = [[c, s], [-conj(s), c]]` with real `c`
/// zeroing the second component of `(a, b)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, Complex64::ZERO);
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let r = (an * an + bn * bn).sqrt();
    ((an / r), (a / an) * b.conj() / r)
}

fn qr_step(h: &mut ComplexMatrix, lo: usize, end: usize, shift: Complex64) {
    for i in lo..=end {
        h[(i, i)] -= shift;
    }
    let mut rot = Vec::with_capacity(end - lo);
    for i in lo..end {
        let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
        for j in i..=end {
            let hi = h[(i, j)];
            let hk = h[(i + 1, j)];
            h[(i, j)] = hi * c + s * hk;
            h[(i + 1, j)] = -s.conj() * hi + hk * c;
        }
        rot.push((c, s));
    }
    for (idx, (c, s)) in rot.iter().enumerate() {
        let i = lo + idx;
        let top = (i + 2).min(end);
        for row in lo..=top {
            let ci = h[(row, i)];
            let cj = h[(row, i + 1)];
            h[(row, i)] = ci * *c + s.conj() * cj;
            h[(row, i + 1)] = -*s * ci + cj * *c;
        }
    }
    for i in lo..=end {
        h[(i, i)] += shift;
    }
}
