//! Eigendecomposition of Hermitian matrices by cyclic complex Jacobi
//! rotations. Small dense problems only; accuracy is what matters here.

use crate::matrix::ComplexMatrix;
use num_complex::Complex64;

/// Returns eigenvalues in ascending order and a unitary matrix whose columns
/// are the matching eigenvectors.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    assert!(m.is_square());
    let n = m.rows();
    let mut h = m.clone();
    let mut v = ComplexMatrix::identity(n);
    if n <= 1 {
        let eig = if n == 1 { vec![h[(0, 0)].re] } else { vec![] };
        return (eig, v);
    }
    let scale = h.frob_norm().max(1e-300);
    let stop = 1e-15 * scale;
    for _ in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += h[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let gamma = h[(p, q)];
                let mag = gamma.norm();
                if mag <= 1e-300 {
                    continue;
                }
                // Phase factor making the off-diagonal entry real, then a
                // classic symmetric Jacobi rotation on the 2x2 block.
                let phase = gamma / mag;
                let alpha = h[(p, p)].re;
                let beta = h[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = [[c, s], [-conj(phase) s, conj(phase) c]] on the (p, q) plane.
                let u10 = -phase.conj() * s;
                let u11 = phase.conj() * c;
                for i in 0..n {
                    let hp = h[(i, p)];
                    let hq = h[(i, q)];
                    h[(i, p)] = hp * c + hq * u10;
                    h[(i, q)] = hp * s + hq * u11;
                }
                let u10c = u10.conj();
                let u11c = u11.conj();
                for j in 0..n {
                    let rp = h[(p, j)];
                    let rq = h[(q, j)];
                    h[(p, j)] = rp * c + rq * u10c;
                    h[(q, j)] = rp * s + rq * u11c;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * c + vq * u10;
                    v[(i, q)] = vp * s + vq * u11;
                }
                h[(p, q)] = Complex64::ZERO;
                h[(q, p)] = Complex64::ZERO;
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let eigs: Vec<f64> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&a, &b| eigs[a].partial_cmp(&eigs[b]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| eigs[i]).collect();
    let vs = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    (sorted, vs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    #[test]
    fn anti_diagonal_three() {
        // [[0,0,1],[0,0,0],[1,0,0]] has eigenvalues -1, 0, 1.
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]]);
        let (eigs, _) = hermitian_eigen(&m);
        assert!((eigs[0] + 1.0).abs() < 1e-12);
        assert!(eigs[1].abs() < 1e-12);
        assert!((eigs[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complex_pauli_like() {
        // [[0, -i],[i, 0]] has eigenvalues -1 and 1.
        let m = ComplexMatrix::from_rows(&[
            &[Complex64::ZERO, Complex64::new(0.0, -1.0)],
            &[Complex64::new(0.0, 1.0), Complex64::ZERO],
        ]);
        let (eigs, v) = hermitian_eigen(&m);
        assert!((eigs[0] + 1.0).abs() < 1e-12 && (eigs[1] - 1.0).abs() < 1e-12);
        let residual = m.mul(&v).sub(&v.mul(&ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j { Complex64::new(eigs[i], 0.0) } else { Complex64::ZERO }
        })));
        assert!(residual.frob_norm() < 1e-12);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = SeededRng::new(0xA11CE);
        for trial in 0..10 {
            let n = 2 + trial % 7;
            let raw = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
            let h = raw.hermitian_part();
            let (eigs, v) = hermitian_eigen(&h);
            let d = ComplexMatrix::from_fn(n, n, |i, j| {
                if i == j { Complex64::new(eigs[i], 0.0) } else { Complex64::ZERO }
            });
            let residual = h.mul(&v).sub(&v.mul(&d)).frob_norm();
            assert!(residual < 1e-11 * h.frob_norm().max(1.0), "residual {residual}");
            let gram = v.adjoint().mul(&v).sub(&ComplexMatrix::identity(n)).frob_norm();
            assert!(gram < 1e-12, "gram defect {gram}");
            for w in eigs.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }
}
