//! Randomized invariants: congruence preserves inertia and normal rank,
//! direct sums add, realizations account for every dimension, eigenvalue
//! classification conserves its input, and the text encoders round-trip.

use hermikron::bundles::{
    balance_division, enumerate_bounded, enumerate_regular, weyr_dominates, weyr_of,
    BundleDescriptor,
};
use hermikron::canonical::{build_hkcf, CanonicalBlock, Hkcf};
use hermikron::experiment::{fmt_g17, spearman};
use hermikron::infer::classify_real;
use hermikron::linalg::{det_poly_exact, jacobi_svd};
use hermikron::pencil::{determinant, inertia_of, normal_rank, INERTIA_TOL};
use hermikron::ComplexMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn int_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-3i64..=3i64, -3i64..=3i64), n * n).prop_map(move |entries| {
        ComplexMatrix::from_fn(n, n, |i, j| {
            let (re, im) = entries[i * n + j];
            Complex64::new(re as f64, im as f64)
        })
    })
}

fn bounded_pool(maxn: usize) -> Vec<BundleDescriptor> {
    let mut out = Vec::new();
    for n in 2..=maxn {
        for r in 1..n {
            out.extend(enumerate_bounded(n, r).expect("bounded enumeration"));
        }
    }
    out
}

fn mixed_pool(maxn: usize) -> Vec<BundleDescriptor> {
    let mut out: Vec<BundleDescriptor> = (1..=maxn).flat_map(enumerate_regular).collect();
    out.extend(bounded_pool(maxn));
    out
}

/// Distinct reals and distinct upper-half-plane pairs from two knobs.
fn realize_spread(desc: &BundleDescriptor, base: f64, step: f64) -> Hkcf {
    let reals: Vec<f64> =
        (0..desc.real_count()).map(|i| base + (i + 1) as f64 * step).collect();
    let pairs: Vec<Complex64> = (0..desc.pair_count())
        .map(|i| Complex64::new(base - (i + 1) as f64 * step, (i + 1) as f64 * step))
        .collect();
    desc.realize(&reals, &pairs).expect("descriptor realizes")
}

proptest! {
    #[test]
    fn hermitian_part_has_zero_defect(n in 1usize..=5, m in int_matrix(5)) {
        let sub = ComplexMatrix::from_fn(n, n, |i, j| m[(i, j)]);
        prop_assert_eq!(sub.hermitian_part().hermitian_defect(), 0.0);
    }

    #[test]
    fn g17_round_trips_every_finite_value(x in prop::num::f64::ANY) {
        prop_assume!(x.is_finite());
        let text = fmt_g17(x);
        let back: f64 = text.parse().expect("g17 output parses");
        prop_assert_eq!(back, x, "{} reprinted as {}", x, text);
    }

    #[test]
    fn spearman_is_bounded_and_reflexive(
        pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..20)
    ) {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        prop_assume!(ys.iter().any(|&y| y != ys[0]));
        let rho = spearman(&xs, &ys);
        prop_assert!(rho.abs() <= 1.0 + 1e-9, "rho = {}", rho);
        prop_assert!((spearman(&xs, &xs) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn balanced_indices_weyr_dominate_any_split(
        indices in prop::collection::vec(0usize..=12, 1..=4)
    ) {
        let total: usize = indices.iter().sum();
        let (alpha, s) = balance_division(total, indices.len());
        let balanced: Vec<usize> = (0..indices.len())
            .map(|i| if i < s { alpha + 1 } else { alpha })
            .collect();
        prop_assert!(
            weyr_dominates(&weyr_of(&balanced), &weyr_of(&indices)),
            "balanced {:?} fails to dominate {:?}",
            balanced,
            indices
        );
    }

    #[test]
    fn classification_conserves_eigenvalues(
        reals in prop::collection::vec(-5.0f64..5.0, 0..=4),
        pairs in prop::collection::vec((-5.0f64..5.0, 0.5f64..3.0), 0..=3)
    ) {
        let mut input: Vec<Complex64> = Vec::new();
        for &r in &reals {
            input.push(Complex64::new(r, 0.0));
        }
        for &(re, im) in &pairs {
            input.push(Complex64::new(re, im));
            input.push(Complex64::new(re, -im));
        }
        let classified = classify_real(&input).expect("conjugate-closed input classifies");
        prop_assert_eq!(classified.reals.len(), reals.len());
        prop_assert_eq!(classified.pairs.len(), pairs.len());
        prop_assert_eq!(
            classified.reals.len() + 2 * classified.pairs.len(),
            input.len()
        );
        for z in &classified.pairs {
            prop_assert!(z.im > 0.0, "representative {} not in the upper half plane", z);
        }
        let mut want = reals.clone();
        want.sort_by(f64::total_cmp);
        prop_assert_eq!(&classified.reals, &want);
    }

    #[test]
    fn bundle_codimension_decreases_with_d(pool_idx in 0usize..1000) {
        let pool = bounded_pool(8);
        let desc = &pool[pool_idx % pool.len()];
        for other in pool.iter().filter(|o| o.n == desc.n && o.r == desc.r && o.d > desc.d) {
            prop_assert!(
                other.codim_closed_form().bundle < desc.codim_closed_form().bundle,
                "d={} bundle {} not below d={} bundle {}",
                other.d,
                other.codim_closed_form().bundle,
                desc.d,
                desc.codim_closed_form().bundle
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn congruence_preserves_inertia(
        n in 2usize..=4,
        bm in int_matrix(4),
        qm in int_matrix(4)
    ) {
        let b = ComplexMatrix::from_fn(n, n, |i, j| bm[(i, j)]).hermitian_part();
        let q = ComplexMatrix::from_fn(n, n, |i, j| qm[(i, j)]);
        prop_assume!(jacobi_svd(&q).sv.last().copied().unwrap_or(0.0) >= 0.3);
        let before = inertia_of(&b, INERTIA_TOL).expect("inertia decision");
        let after = inertia_of(&q.adjoint().mul(&b).mul(&q), INERTIA_TOL)
            .expect("inertia decision");
        prop_assert_eq!(before, after);
    }

    #[test]
    fn realization_accounts_for_every_dimension(
        pool_idx in 0usize..1000,
        base in -4.0f64..4.0,
        step in 0.5f64..2.0
    ) {
        let pool = mixed_pool(8);
        let desc = &pool[pool_idx % pool.len()];
        let h = realize_spread(desc, base, step);
        prop_assert_eq!(h.n(), desc.n);
        prop_assert_eq!(h.singular_count(), desc.n - desc.r);
        let mut orders: Vec<usize> = h
            .blocks()
            .iter()
            .filter_map(|b| match *b {
                CanonicalBlock::Singular { d } => Some(d),
                _ => None,
            })
            .collect();
        orders.sort_unstable();
        let mut want = desc.minimal_indices();
        want.sort_unstable();
        prop_assert_eq!(&orders, &want);
        if desc.r < desc.n {
            // Bounded: d lives in the singular part.
            prop_assert_eq!(orders.iter().sum::<usize>(), desc.d);
        } else {
            // Regular: d counts conjugate pairs.
            let pair_blocks = h
                .blocks()
                .iter()
                .filter(|b| matches!(b, CanonicalBlock::ConjPair { .. }))
                .count();
            prop_assert_eq!(pair_blocks, desc.d);
        }
    }

    #[test]
    fn congruence_preserves_normal_rank(
        pool_idx in 0usize..1000,
        base in -4.0f64..4.0,
        step in 0.5f64..2.0,
        qm in int_matrix(5)
    ) {
        let pool = bounded_pool(5);
        let desc = &pool[pool_idx % pool.len()];
        let p = build_hkcf(&realize_spread(desc, base, step)).expect("canonical pencil");
        let q = ComplexMatrix::from_fn(desc.n, desc.n, |i, j| qm[(i, j)]);
        prop_assume!(jacobi_svd(&q).sv.last().copied().unwrap_or(0.0) >= 0.3);
        let a = q.adjoint().mul(p.a()).mul(&q).hermitian_part();
        let b = q.adjoint().mul(p.b()).mul(&q).hermitian_part();
        let transformed = hermikron::HermitianPencil::new(a, b).expect("stays Hermitian");
        prop_assert_eq!(normal_rank(transformed.pencil(), 7), desc.r);
    }

    #[test]
    fn direct_sum_adds_normal_rank(
        i1 in 0usize..1000,
        i2 in 0usize..1000,
        base in -4.0f64..4.0,
        step in 0.5f64..2.0
    ) {
        let pool = mixed_pool(4);
        let d1 = &pool[i1 % pool.len()];
        let d2 = &pool[i2 % pool.len()];
        let p1 = build_hkcf(&realize_spread(d1, base, step)).expect("canonical pencil");
        let p2 = build_hkcf(&realize_spread(d2, base + 0.25, step)).expect("canonical pencil");
        let joint = p1.direct_sum(&p2);
        prop_assert_eq!(normal_rank(joint.pencil(), 11), d1.r + d2.r);
    }

    #[test]
    fn exact_and_sampled_determinants_agree(
        pool_idx in 0usize..1000,
        base in -3.0f64..3.0,
        step in 0.5f64..1.5
    ) {
        let pool: Vec<BundleDescriptor> = (1..=5).flat_map(enumerate_regular).collect();
        let desc = &pool[pool_idx % pool.len()];
        let p = build_hkcf(&realize_spread(desc, base, step)).expect("canonical pencil");
        let exact = det_poly_exact(p.pencil()).expect("exact coefficients");
        let sampled = determinant(p.pencil()).expect("sampled coefficients");
        prop_assert_eq!(exact.len(), sampled.len());
        let scale = exact
            .iter()
            .map(|c| c.to_c64().norm())
            .fold(1.0f64, f64::max);
        for (e, s) in exact.iter().zip(&sampled) {
            prop_assert!(
                (e.to_c64() - s).norm() <= 1e-9 * scale,
                "coefficient {} vs {}",
                e.to_c64(),
                s
            );
        }
    }
}
