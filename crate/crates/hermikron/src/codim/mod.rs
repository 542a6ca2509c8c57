//! Orbit and bundle codimensions by brute force: the codimension of the
//! congruence orbit of A + lambda B equals the real dimension of the
//! solution space of X*A + AX = 0, X*B + BX = 0. The module realifies that
//! system in the unknowns (Re X_ij, Im X_ij) and measures its nullity with
//! an exact rational backend or a gap-certified floating backend.
//!
//! For direct sums with disjoint eigenvalue supports the system decouples
//! into per-block systems plus one pair system per unordered block pair:
//! dim(b1 + b2) = dim(b1) + dim(b2) + pair(b1, b2). Table assembly sums
//! those parts and is the only path offered past the full-system size guard.

pub mod exact;

use crate::canonical::{build_block, build_hkcf, CanonicalBlock, Hkcf};
use crate::linalg::{gap_ratio, numerical_rank, singular_values_real};
use crate::pencil::{HermitianPencil, MatrixPencil};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dense real row-major matrix holding a realified linear system.
#[derive(Clone, Debug)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    /// Applies the system to a realified unknown vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.at(i, j) * x[j]).sum())
            .collect()
    }
}

/// The realified congruence system of one Hermitian pencil: 4n^2 equations
/// over 2n^2 real unknowns laid out as (Re X_ij, Im X_ij) at column pairs
/// 2(i n + j), 2(i n + j) + 1.
pub struct CongruenceSystem {
    n: usize,
    matrix: RealMatrix,
}

impl CongruenceSystem {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn unknown_count(&self) -> usize {
        2 * self.n * self.n
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }
}

/// Accumulates `coeff * x` (x a complex unknown at column pair `col`) into
/// the real/imag equation rows `row` and `row + 1`.
fn add_linear(m: &mut RealMatrix, row: usize, col: usize, coeff: Complex64) {
    m.add(row, col, coeff.re);
    m.add(row, col + 1, -coeff.im);
    m.add(row + 1, col, coeff.im);
    m.add(row + 1, col + 1, coeff.re);
}

/// Same for `coeff * conj(x)`.
fn add_antilinear(m: &mut RealMatrix, row: usize, col: usize, coeff: Complex64) {
    m.add(row, col, coeff.re);
    m.add(row, col + 1, coeff.im);
    m.add(row + 1, col, coeff.im);
    m.add(row + 1, col + 1, -coeff.re);
}

/// Builds the realified system X*A + AX = 0, X*B + BX = 0.
pub fn realify(p: &HermitianPencil) -> CongruenceSystem {
    let n = p.n();
    let mut m = RealMatrix::zeros(4 * n * n, 2 * n * n);
    for (which, coefm) in [p.a(), p.b()].into_iter().enumerate() {
        let base = which * 2 * n * n;
        for i in 0..n {
            for j in 0..n {
                let col = 2 * (i * n + j);
                // conj(X_ij) enters equation (j, l) with weight A_il.
                for l in 0..n {
                    let row = base + 2 * (j * n + l);
                    add_antilinear(&mut m, row, col, coefm[(i, l)]);
                }
                // X_ij enters equation (k, j) with weight A_ki.
                for k in 0..n {
                    let row = base + 2 * (k * n + j);
                    add_linear(&mut m, row, col, coefm[(k, i)]);
                }
            }
        }
    }
    CongruenceSystem { n, matrix: m }
}

/// Realifies the pair system Z A2 + A1 Y = 0, Z B2 + B1 Y = 0 in the complex
/// unknowns Y, Z (both n1 x n2); 4 n1 n2 real equations and unknowns.
fn realify_pair(p1: &MatrixPencil, p2: &MatrixPencil) -> RealMatrix {
    let n1 = p1.rows();
    let n2 = p2.rows();
    let unknowns = 4 * n1 * n2;
    let mut m = RealMatrix::zeros(unknowns, unknowns);
    let zoff = 2 * n1 * n2;
    for (which, (m1, m2)) in [(&p1.a, &p2.a), (&p1.b, &p2.b)].into_iter().enumerate() {
        let base = which * 2 * n1 * n2;
        for k in 0..n1 {
            for l in 0..n2 {
                let row = base + 2 * (k * n2 + l);
                for i in 0..n1 {
                    add_linear(&mut m, row, 2 * (i * n2 + l), m1[(k, i)]);
                }
                for i in 0..n2 {
                    add_linear(&mut m, row, zoff + 2 * (k * n2 + i), m2[(i, l)]);
                }
            }
        }
    }
    m
}

/// Which nullity engine decides the rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Float,
}

/// Brute-force codimension outcome.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodimResult {
    pub orbit: usize,
    pub bundle: usize,
    pub backend: Backend,
    #[serde(rename = "gapRatio")]
    pub gap_ratio: Option<f64>,
}

fn nullity_with_gap(m: &RealMatrix, backend: Backend) -> Result<(usize, Option<f64>)> {
    match backend {
        Backend::Float => {
            let sv = singular_values_real(m.rows, m.cols, &m.data);
            let rank = numerical_rank(&sv, m.rows, m.cols);
            let gap = gap_ratio(&sv, rank);
            if gap < crate::GAP_MIN {
                return Err(Error::AmbiguousRank { gap, min: crate::GAP_MIN });
            }
            Ok((m.cols - rank, Some(gap)))
        }
        Backend::Exact => {
            let rows = exact::sparse_rows_from_f64(m.rows, m.cols, &m.data);
            Ok((exact::exact_nullity(rows, m.cols), None))
        }
    }
}

/// Real dimension of the solution space of a congruence system.
pub fn solution_space_dim(sys: &CongruenceSystem, backend: Backend) -> Result<usize> {
    nullity_with_gap(&sys.matrix, backend).map(|(dim, _)| dim)
}

/// Real dimension of the pair system of two realized blocks. The blocks must
/// not share an eigenvalue (the generic-form constraint).
pub fn pair_system_dim(b1: &CanonicalBlock, b2: &CanonicalBlock, backend: Backend) -> Result<usize> {
    let p1 = build_block(b1)?;
    let p2 = build_block(b2)?;
    let m = realify_pair(p1.pencil(), p2.pencil());
    nullity_with_gap(&m, backend).map(|(dim, _)| dim)
}

fn shared_eigenvalue(blocks: &[CanonicalBlock]) -> Option<String> {
    let mut finite: Vec<Complex64> = Vec::new();
    let mut infinite = 0usize;
    for b in blocks {
        match *b {
            CanonicalBlock::RealJordan { a, .. } => finite.push(Complex64::new(a, 0.0)),
            CanonicalBlock::ConjPair { mu, .. } => {
                finite.push(mu);
                finite.push(mu.conj());
            }
            CanonicalBlock::InfJordan { .. } => infinite += 1,
            CanonicalBlock::Singular { .. } => {}
        }
    }
    if infinite > 1 {
        return Some("eigenvalue at infinity".into());
    }
    for (i, z) in finite.iter().enumerate() {
        if finite[..i].contains(z) {
            return Some(format!("eigenvalue {z}"));
        }
    }
    None
}

/// Full-system brute force: realizes the canonical form, measures the
/// nullity of the whole congruence system, and subtracts the distinct
/// finite eigenvalue count for the bundle codimension.
pub fn orbit_codim_bruteforce(h: &Hkcf, backend: Backend) -> Result<CodimResult> {
    let n = h.n();
    if n > crate::DENSE_MAX_N {
        return Err(Error::TooLarge { n, limit: crate::DENSE_MAX_N });
    }
    let p = build_hkcf(h)?;
    let sys = realify(&p);
    let (orbit, gap) = nullity_with_gap(&sys.matrix, backend)?;
    Ok(CodimResult {
        orbit,
        bundle: orbit - h.distinct_finite_eigenvalues(),
        backend,
        gap_ratio: gap,
    })
}

/// Table assembly: per-block system dimensions plus one pair system per
/// unordered block pair. Valid only when no eigenvalue is shared between
/// blocks; not subject to the full-system size guard.
pub fn orbit_codim_assembled(h: &Hkcf, backend: Backend) -> Result<CodimResult> {
    if let Some(what) = shared_eigenvalue(h.blocks()) {
        return Err(Error::InvalidParams(format!(
            "table assembly requires disjoint block eigenvalues; {what} repeats"
        )));
    }
    let mut orbit = 0usize;
    let mut worst_gap: Option<f64> = None;
    let fold_gap = |g: Option<f64>, worst: &mut Option<f64>| {
        if let Some(g) = g {
            *worst = Some(worst.map_or(g, |w: f64| w.min(g)));
        }
    };
    for b in h.blocks() {
        let p = build_block(b)?;
        let sys = realify(&p);
        let (dim, gap) = nullity_with_gap(&sys.matrix, backend)?;
        orbit += dim;
        fold_gap(gap, &mut worst_gap);
    }
    for (i, b1) in h.blocks().iter().enumerate() {
        for b2 in &h.blocks()[i + 1..] {
            let p1 = build_block(b1)?;
            let p2 = build_block(b2)?;
            let m = realify_pair(p1.pencil(), p2.pencil());
            let (dim, gap) = nullity_with_gap(&m, backend)?;
            orbit += dim;
            fold_gap(gap, &mut worst_gap);
        }
    }
    Ok(CodimResult {
        orbit,
        bundle: orbit - h.distinct_finite_eigenvalues(),
        backend,
        gap_ratio: if backend == Backend::Float { worst_gap } else { None },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundles::BundleDescriptor;
    use crate::matrix::ComplexMatrix;
    use crate::rng::SeededRng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn jordan(a: f64, sign: i8) -> CanonicalBlock {
        CanonicalBlock::RealJordan { k: 1, a, sign }
    }

    fn syst_dim(b: &CanonicalBlock, backend: Backend) -> usize {
        let p = build_block(b).unwrap();
        solution_space_dim(&realify(&p), backend).unwrap()
    }

    #[test]
    fn scalar_system_shapes() {
        let p = build_block(&jordan(2.0, 1)).unwrap();
        let sys = realify(&p);
        assert_eq!((sys.matrix().rows(), sys.matrix().cols()), (4, 2));
        for backend in [Backend::Exact, Backend::Float] {
            assert_eq!(solution_space_dim(&sys, backend).unwrap(), 1);
        }
        let zero = HermitianPencil::new(ComplexMatrix::zeros(1, 1), ComplexMatrix::zeros(1, 1))
            .unwrap();
        assert_eq!(solution_space_dim(&realify(&zero), Backend::Exact).unwrap(), 2);
    }

    #[test]
    fn realified_solutions_are_solutions() {
        // iA-scaled Hermitian X solves the J_1(a) system: X = i t gives
        // X* A + A X = -itA + itA = 0 when X is a scalar. Feed the realified
        // map that vector and expect zero.
        let p = build_block(&jordan(3.0, -1)).unwrap();
        let sys = realify(&p);
        let out = sys.matrix().apply(&[0.0, 5.0]);
        assert!(out.iter().all(|&x| x.abs() < 1e-14));
        let bad = sys.matrix().apply(&[1.0, 0.0]);
        assert!(bad.iter().any(|&x| x.abs() > 0.5));
    }

    #[test]
    fn block_system_dimensions() {
        for a in [0.0, 1.5] {
            for sign in [1, -1] {
                assert_eq!(syst_dim(&jordan(a, sign), Backend::Exact), 1);
            }
        }
        assert_eq!(syst_dim(&CanonicalBlock::ConjPair { k: 1, mu: c(0.0, 1.0) }, Backend::Exact), 2);
        for k in 0..=3 {
            assert_eq!(syst_dim(&CanonicalBlock::Singular { d: k }, Backend::Exact), 2 * k + 2);
        }
    }

    #[test]
    fn pair_system_dimensions() {
        let pair = |b1, b2, backend| pair_system_dim(&b1, &b2, backend).unwrap();
        assert_eq!(pair(jordan(1.0, 1), jordan(2.0, 1), Backend::Exact), 0);
        for k in 1..=2 {
            assert_eq!(
                pair(jordan(0.5, -1), CanonicalBlock::Singular { d: k }, Backend::Exact),
                2
            );
        }
        assert_eq!(
            pair(CanonicalBlock::Singular { d: 1 }, CanonicalBlock::Singular { d: 2 }, Backend::Exact),
            10
        );
        assert_eq!(
            pair(CanonicalBlock::Singular { d: 1 }, CanonicalBlock::Singular { d: 1 }, Backend::Exact),
            8
        );
        assert_eq!(
            pair(
                CanonicalBlock::ConjPair { k: 1, mu: c(0.0, 1.0) },
                CanonicalBlock::ConjPair { k: 1, mu: c(1.0, 1.0) },
                Backend::Float
            ),
            0
        );
    }

    #[test]
    fn decoupling_identity_on_mixed_pairs() {
        let blocks = [
            jordan(0.0, 1),
            CanonicalBlock::RealJordan { k: 3, a: 2.0, sign: -1 },
            CanonicalBlock::InfJordan { k: 2, sign: -1 },
            CanonicalBlock::ConjPair { k: 1, mu: c(0.0, 1.0) },
            CanonicalBlock::ConjPair { k: 2, mu: c(1.0, 1.0) },
            CanonicalBlock::Singular { d: 0 },
            CanonicalBlock::Singular { d: 1 },
            CanonicalBlock::Singular { d: 2 },
        ];
        for (i, b1) in blocks.iter().enumerate() {
            for b2 in &blocks[i + 1..] {
                let joint = Hkcf::new(vec![*b1, *b2]).unwrap();
                let whole =
                    orbit_codim_bruteforce(&joint, Backend::Float).unwrap().orbit;
                let parts = syst_dim(b1, Backend::Float)
                    + syst_dim(b2, Backend::Float)
                    + pair_system_dim(b1, b2, Backend::Float).unwrap();
                assert_eq!(whole, parts, "decoupling failed for {b1:?} + {b2:?}");
            }
        }
    }

    #[test]
    fn bruteforce_matches_closed_form_spot_checks() {
        let k01 = BundleDescriptor::new(3, 2, 0, 1).unwrap().realize(&[], &[]).unwrap();
        let got = orbit_codim_bruteforce(&k01, Backend::Exact).unwrap();
        assert_eq!((got.orbit, got.bundle), (4, 4));

        for desc in crate::bundles::enumerate_regular(4) {
            let reals: Vec<f64> = (0..desc.real_count()).map(|i| 1.0 + i as f64).collect();
            let pairs: Vec<Complex64> =
                (0..desc.pair_count()).map(|i| c(i as f64, 1.0)).collect();
            let h = desc.realize(&reals, &pairs).unwrap();
            let got = orbit_codim_bruteforce(&h, Backend::Float).unwrap();
            assert_eq!((got.orbit, got.bundle), (4, 0), "failed at {desc:?}");
        }
    }

    #[test]
    fn assembly_agrees_with_full_system() {
        for (c_, d) in [(0, 0), (1, 1), (3, 0)] {
            let desc = BundleDescriptor::new(5, 3, c_, d).unwrap();
            let reals: Vec<f64> = (0..desc.real_count()).map(|i| 2.0 + i as f64).collect();
            let h = desc.realize(&reals, &[]).unwrap();
            let full = orbit_codim_bruteforce(&h, Backend::Exact).unwrap();
            let assembled = orbit_codim_assembled(&h, Backend::Exact).unwrap();
            assert_eq!(full.orbit, assembled.orbit);
            assert_eq!(full.bundle, assembled.bundle);
            let cf = desc.codim_closed_form();
            assert_eq!(full.orbit, cf.orbit);
            assert_eq!(full.bundle, cf.bundle);
        }
    }

    #[test]
    fn assembly_rejects_shared_eigenvalues() {
        let h = Hkcf::new(vec![jordan(1.0, 1), jordan(1.0, -1)]).unwrap();
        assert!(matches!(orbit_codim_assembled(&h, Backend::Exact), Err(Error::InvalidParams(_))));
        let two_inf = Hkcf::new(vec![
            CanonicalBlock::InfJordan { k: 1, sign: 1 },
            CanonicalBlock::InfJordan { k: 2, sign: 1 },
        ])
        .unwrap();
        assert!(orbit_codim_assembled(&two_inf, Backend::Exact).is_err());
    }

    #[test]
    fn size_guard() {
        let h = Hkcf::new(vec![CanonicalBlock::Singular { d: 6 }]).unwrap();
        assert!(matches!(
            orbit_codim_bruteforce(&h, Backend::Float),
            Err(Error::TooLarge { n: 13, .. })
        ));
        // Assembly has no such guard: a single block has no pairs.
        let assembled = orbit_codim_assembled(&h, Backend::Exact).unwrap();
        assert_eq!(assembled.orbit, 2 * 6 + 2);
    }

    #[test]
    fn exact_orbit_dim_is_congruence_invariant() {
        let desc = BundleDescriptor::new(4, 3, 1, 1).unwrap();
        let h = desc.realize(&[5.0], &[]).unwrap();
        let base = build_hkcf(&h).unwrap();
        let reference = solution_space_dim(&realify(&base), Backend::Exact).unwrap();
        assert_eq!(reference, desc.codim_closed_form().orbit);
        let n = base.n();
        let mut seed = 0u64;
        let mut checked = 0;
        while checked < 20 {
            seed += 1;
            let mut rng = SeededRng::new(seed);
            let q = ComplexMatrix::from_fn(n, n, |_, _| {
                c(rng.int_in(-3, 3) as f64, rng.int_in(-3, 3) as f64)
            });
            // Integer determinant: |det| >= 0.5 in floating point certifies
            // nonsingularity exactly.
            let det = crate::linalg::Lu::factor(&q).det();
            if det.norm() < 0.5 {
                continue;
            }
            checked += 1;
            // Integer congruence stays exactly representable in f64.
            let qa = q.adjoint().mul(base.a()).mul(&q);
            let qb = q.adjoint().mul(base.b()).mul(&q);
            let moved = HermitianPencil::new(qa, qb).unwrap();
            let dim = solution_space_dim(&realify(&moved), Backend::Exact).unwrap();
            assert_eq!(dim, reference, "seed {seed}");
        }
    }

    #[test]
    fn float_and_exact_backends_agree() {
        let inputs = [
            Hkcf::new(vec![CanonicalBlock::Singular { d: 2 }]).unwrap(),
            Hkcf::new(vec![
                CanonicalBlock::ConjPair { k: 1, mu: c(0.0, 1.0) },
                jordan(1.0, 1),
                jordan(2.0, -1),
            ])
            .unwrap(),
        ];
        for h in &inputs {
            let e = orbit_codim_bruteforce(h, Backend::Exact).unwrap();
            let f = orbit_codim_bruteforce(h, Backend::Float).unwrap();
            assert_eq!(e.orbit, f.orbit);
            assert_eq!(e.bundle, f.bundle);
            assert!(f.gap_ratio.unwrap() >= crate::GAP_MIN);
            assert!(e.gap_ratio.is_none());
        }
    }
}
