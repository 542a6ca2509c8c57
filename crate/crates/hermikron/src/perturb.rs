//! Structured perturbation families of the canonical blocks. Each family
//! perturbs one block with entries of size eps/m and carries a closed-form
//! prediction: the eigenvalues that split out, their sign bookkeeping
//! through a coefficient inertia, the determinant polynomial, and for the
//! singular family the absorbed block structure. `verify_prediction` checks
//! a constructed pencil against its prediction numerically.

use crate::canonical::{build_block, CanonicalBlock};
use crate::linalg::exact::{det_poly_exact, poly_scale};
use crate::matrix::ComplexMatrix;
use crate::pencil::{
    evaluate, inertia_of, normal_rank, rank_with_gap, HermitianPencil, Inertia, INERTIA_TOL,
};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative tolerance for determinant coefficient comparisons.
pub const DET_TOL: f64 = 1e-12;
/// Relative tolerance for eigenvalue matching.
pub const EIG_TOL: f64 = 1e-9;

/// Which pencil coefficient an inertia prediction refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffSide {
    Constant,
    Leading,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InertiaPrediction {
    pub side: CoeffSide,
    pub inertia: Inertia,
}

/// Everything the construction promises about the perturbed pencil.
/// `eigenvalues` lists the predicted simple finite eigenvalues; fields left
/// `None` are not claimed by that family.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PredictedStructure {
    pub eigenvalues: Vec<Complex64>,
    pub infinite_count: usize,
    pub real_count: usize,
    pub plus_count: Option<usize>,
    pub inertia: Option<InertiaPrediction>,
    pub det_coeffs: Option<Vec<Complex64>>,
    pub normal_rank: usize,
    pub leading_rank: Option<usize>,
    pub singular_order: Option<usize>,
    pub probe: Option<Complex64>,
    pub distance: f64,
}

/// A perturbed pencil together with its unperturbed base and prediction.
#[derive(Clone, Debug, Serialize)]
pub struct Perturbation {
    pub base: HermitianPencil,
    pub perturbed: HermitianPencil,
    pub prediction: PredictedStructure,
}

fn validate_eps_m(eps: f64, m: f64) -> Result<()> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    if !m.is_finite() || m < 1.0 {
        return Err(Error::InvalidParams(format!("m must be at least 1, got {m}")));
    }
    Ok(())
}

fn validate_sign(sign: i8) -> Result<()> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidParams(format!("sign must be +1 or -1, got {sign}")));
    }
    Ok(())
}

/// Inertia of `sign` times the k x k anti-identity.
fn anti_identity_inertia(k: usize, sign: i8) -> Inertia {
    if k % 2 == 0 {
        Inertia { pos: k / 2, neg: k / 2, zero: 0 }
    } else if sign > 0 {
        Inertia { pos: k / 2 + 1, neg: k / 2, zero: 0 }
    } else {
        Inertia { pos: k / 2, neg: k / 2 + 1, zero: 0 }
    }
}

fn binomial(k: usize, j: usize) -> f64 {
    let mut out = 1.0;
    for i in 0..j {
        out = out * (k - i) as f64 / (i + 1) as f64;
    }
    out
}

/// Expands `lead * prod (lambda - root)`, coefficients low to high.
fn poly_from_roots(lead: Complex64, roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![lead];
    for &r in roots {
        c.push(Complex64::ZERO);
        for k in (0..c.len()).rev() {
            let lower = if k > 0 { c[k - 1] } else { Complex64::ZERO };
            c[k] = lower - r * c[k];
        }
    }
    c
}

/// Finite-eigenvalue splitting: adds sign * eps/m to the trailing corner of
/// the constant coefficient of the order-k block at eigenvalue `a`. The k
/// coincident eigenvalues split onto a radius-(eps/m)^(1/k) circle.
pub fn s_perturbation_finite(a: f64, k: usize, sign: i8, eps: f64, m: f64) -> Result<Perturbation> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("order must be at least 2, got {k}")));
    }
    if !a.is_finite() {
        return Err(Error::InvalidParams(format!("eigenvalue must be finite, got {a}")));
    }
    validate_sign(sign)?;
    validate_eps_m(eps, m)?;
    let base = build_block(&CanonicalBlock::RealJordan { k, a, sign })?;
    let t = eps / m;
    let mut pa = base.a().clone();
    pa[(k - 1, k - 1)] += Complex64::new(sign as f64 * t, 0.0);
    let perturbed = HermitianPencil::new(pa, base.b().clone())?;

    let even = k % 2 == 0;
    let r = t.powf(1.0 / k as f64);
    let eigenvalues: Vec<Complex64> = (0..k)
        .map(|j| {
            if even && j == 0 {
                Complex64::new(a + r, 0.0)
            } else if even && 2 * j == k {
                Complex64::new(a - r, 0.0)
            } else if !even && 2 * j + 1 == k {
                Complex64::new(a - r, 0.0)
            } else {
                let theta = if even {
                    2.0 * PI * j as f64 / k as f64
                } else {
                    PI * (2 * j + 1) as f64 / k as f64
                };
                Complex64::new(a + r * theta.cos(), r * theta.sin())
            }
        })
        .collect();

    // det = C ((lambda - a)^k + s eps/m) with C, s fixed by the parity.
    let (c_lead, s) = if even {
        (if (k / 2) % 2 == 0 { 1.0 } else { -1.0 }, -1.0)
    } else {
        (sign as f64 * if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 }, 1.0)
    };
    let mut det: Vec<Complex64> = (0..=k)
        .map(|j| Complex64::new(c_lead * binomial(k, j) * (-a).powi((k - j) as i32), 0.0))
        .collect();
    det[0] += Complex64::new(c_lead * s * t, 0.0);

    let prediction = PredictedStructure {
        eigenvalues,
        infinite_count: 0,
        real_count: if even { 2 } else { 1 },
        plus_count: Some(if even {
            1
        } else if sign > 0 {
            1
        } else {
            0
        }),
        inertia: Some(InertiaPrediction {
            side: CoeffSide::Leading,
            inertia: anti_identity_inertia(k, sign),
        }),
        det_coeffs: Some(det),
        normal_rank: k,
        leading_rank: Some(k),
        singular_order: None,
        probe: None,
        distance: t,
    };
    Ok(Perturbation { base, perturbed, prediction })
}

/// Infinite-eigenvalue splitting: adds sign * eps/m to the trailing corner
/// of the lambda coefficient. The k infinite eigenvalues become the kth
/// roots of m/eps (even k) or of -m/eps (odd k); every real one keeps the
/// block sign.
pub fn s_perturbation_infinite(k: usize, sign: i8, eps: f64, m: f64) -> Result<Perturbation> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("order must be at least 2, got {k}")));
    }
    validate_sign(sign)?;
    validate_eps_m(eps, m)?;
    let base = build_block(&CanonicalBlock::InfJordan { k, sign })?;
    let t = eps / m;
    let mut pb = base.b().clone();
    pb[(k - 1, k - 1)] += Complex64::new(sign as f64 * t, 0.0);
    let perturbed = HermitianPencil::new(base.a().clone(), pb)?;

    let even = k % 2 == 0;
    let radius = (m / eps).powf(1.0 / k as f64);
    let eigenvalues: Vec<Complex64> = (0..k)
        .map(|j| {
            if even && j == 0 {
                Complex64::new(radius, 0.0)
            } else if even && 2 * j == k {
                Complex64::new(-radius, 0.0)
            } else if !even && 2 * j + 1 == k {
                Complex64::new(-radius, 0.0)
            } else {
                let theta = if even {
                    2.0 * PI * j as f64 / k as f64
                } else {
                    PI * (2 * j + 1) as f64 / k as f64
                };
                Complex64::new(radius * theta.cos(), radius * theta.sin())
            }
        })
        .collect();

    // det = C (1 - t lambda^k) even, C (1 + t lambda^k) odd.
    let (c_lead, s) = if even {
        (if (k / 2) % 2 == 0 { 1.0 } else { -1.0 }, -1.0)
    } else {
        (sign as f64 * if ((k - 1) / 2) % 2 == 0 { 1.0 } else { -1.0 }, 1.0)
    };
    let mut det = vec![Complex64::ZERO; k + 1];
    det[0] = Complex64::new(c_lead, 0.0);
    det[k] = Complex64::new(c_lead * s * t, 0.0);

    let prediction = PredictedStructure {
        eigenvalues,
        infinite_count: 0,
        real_count: if even { 2 } else { 1 },
        plus_count: Some(match (even, sign > 0) {
            (true, true) => 2,
            (true, false) => 0,
            (false, up) => usize::from(up),
        }),
        inertia: Some(InertiaPrediction {
            side: CoeffSide::Constant,
            inertia: anti_identity_inertia(k, sign),
        }),
        det_coeffs: Some(det),
        normal_rank: k,
        leading_rank: Some(k),
        singular_order: None,
        probe: None,
        distance: t,
    };
    Ok(Perturbation { base, perturbed, prediction })
}

/// Conjugate-pair splitting: an anti-diagonal ramp moves the paired
/// eigenvalue mu of multiplicity k onto k distinct values mu - j eps/m,
/// j = 1..k, with conjugates. The split is linear in eps/m, not a root.
pub fn conj_pair_split(mu: Complex64, k: usize, eps: f64, m: f64) -> Result<Perturbation> {
    if k < 1 {
        return Err(Error::InvalidParams("order must be at least 1".into()));
    }
    validate_eps_m(eps, m)?;
    let base = build_block(&CanonicalBlock::ConjPair { k, mu })?;
    let t = eps / m;
    let mut pa = base.a().clone();
    let n = 2 * k;
    for i in 0..n {
        let weight = (i.min(n - 1 - i) + 1) as f64;
        pa[(i, n - 1 - i)] += Complex64::new(weight * t, 0.0);
    }
    let perturbed = HermitianPencil::new(pa, base.b().clone())?;

    let mut eigenvalues = Vec::with_capacity(n);
    for j in 1..=k {
        eigenvalues.push(mu - Complex64::new(j as f64 * t, 0.0));
    }
    for j in 1..=k {
        eigenvalues.push(mu.conj() - Complex64::new(j as f64 * t, 0.0));
    }
    let lead = Complex64::new(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    let det = poly_from_roots(lead, &eigenvalues);
    let ramp_energy: f64 = (1..=k).map(|j| (j * j) as f64).sum();

    let prediction = PredictedStructure {
        eigenvalues,
        infinite_count: 0,
        real_count: 0,
        plus_count: Some(0),
        inertia: Some(InertiaPrediction {
            side: CoeffSide::Leading,
            inertia: Inertia { pos: k, neg: k, zero: 0 },
        }),
        det_coeffs: Some(det),
        normal_rank: n,
        leading_rank: Some(n),
        singular_order: None,
        probe: None,
        distance: t * (2.0 * ramp_energy).sqrt(),
    };
    Ok(Perturbation { base, perturbed, prediction })
}

/// Regularizes the order-d singular block: 1/m in the leading corner of the
/// constant coefficient turns it into a regular pencil whose only
/// eigenvalue is infinite, with the full block order 2d + 1 and plus sign.
pub fn regularize_m(d: usize, m: f64) -> Result<Perturbation> {
    if !m.is_finite() || m < 1.0 {
        return Err(Error::InvalidParams(format!("m must be at least 1, got {m}")));
    }
    let base = build_block(&CanonicalBlock::Singular { d })?;
    let mut pa = base.a().clone();
    pa[(0, 0)] += Complex64::new(1.0 / m, 0.0);
    let perturbed = HermitianPencil::new(pa, base.b().clone())?;
    let n = 2 * d + 1;
    let det0 = if d % 2 == 0 { 1.0 / m } else { -1.0 / m };

    let prediction = PredictedStructure {
        eigenvalues: Vec::new(),
        infinite_count: n,
        real_count: 0,
        plus_count: Some(0),
        inertia: Some(InertiaPrediction {
            side: CoeffSide::Constant,
            inertia: Inertia { pos: d + 1, neg: d, zero: 0 },
        }),
        det_coeffs: Some(vec![Complex64::new(det0, 0.0)]),
        normal_rank: n,
        leading_rank: Some(2 * d),
        singular_order: None,
        probe: None,
        distance: 1.0 / m,
    };
    Ok(Perturbation { base, perturbed, prediction })
}

/// The bordered pencil [[0, X*],[X, 0]] with X the (k+d) x (k+d+1)
/// polynomial [anti-Jordan(mu) | singular factor] plus the single coupling
/// entry eps bridging them. eps = 0 reproduces the direct sum of the paired
/// block and the order-d singular block up to a fixed permutation.
pub fn absorb_pencil(mu: Complex64, k: usize, d: usize, eps: f64) -> Result<HermitianPencil> {
    if k < 1 {
        return Err(Error::InvalidParams("order must be at least 1".into()));
    }
    if !(mu.im > 0.0) || !mu.is_finite() {
        return Err(Error::InvalidParams(format!(
            "eigenvalue {mu} must have positive imaginary part"
        )));
    }
    if !eps.is_finite() || eps < 0.0 {
        return Err(Error::InvalidParams(format!("eps must be nonnegative, got {eps}")));
    }
    let rows = k + d;
    let cols = k + d + 1;
    let mut xa = ComplexMatrix::zeros(rows, cols);
    let mut xb = ComplexMatrix::zeros(rows, cols);
    for i in 0..k {
        xa[(i, k - 1 - i)] = -mu;
        xb[(i, k - 1 - i)] = Complex64::ONE;
        if i + 2 <= k {
            xa[(i, k - 2 - i)] = Complex64::ONE;
        }
    }
    for i in 0..d {
        xa[(k + i, k + i + 1)] = Complex64::ONE;
        xb[(k + i, k + i)] = Complex64::ONE;
    }
    xa[(k - 1, k)] += Complex64::new(eps, 0.0);
    let n = rows + cols;
    let mut a = ComplexMatrix::zeros(n, n);
    let mut b = ComplexMatrix::zeros(n, n);
    a.set_block(0, cols, &xa.adjoint());
    a.set_block(cols, 0, &xa);
    b.set_block(0, cols, &xb.adjoint());
    b.set_block(cols, 0, &xb);
    HermitianPencil::new(a, b)
}

/// Absorbing a conjugate pair into the singular part: the coupled pencil
/// has a single right and left minimal index k + d and no eigenvalues, at
/// distance eps * sqrt(2) from the uncoupled direct sum.
pub fn singular_absorb(mu: Complex64, k: usize, d: usize, eps: f64) -> Result<Perturbation> {
    if eps <= 0.0 {
        return Err(Error::InvalidParams(format!("eps must be positive, got {eps}")));
    }
    let base = absorb_pencil(mu, k, d, 0.0)?;
    let perturbed = absorb_pencil(mu, k, d, eps)?;
    let order = k + d;
    let n = 2 * order + 1;

    let prediction = PredictedStructure {
        eigenvalues: Vec::new(),
        infinite_count: 0,
        real_count: 0,
        plus_count: None,
        inertia: None,
        det_coeffs: Some(vec![Complex64::ZERO; n + 1]),
        normal_rank: 2 * order,
        leading_rank: Some(2 * order),
        singular_order: Some(order),
        probe: Some(mu),
        distance: eps * 2.0f64.sqrt(),
    };
    Ok(Perturbation { base, perturbed, prediction })
}

/// Wire form naming one family with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "camelCase")]
pub enum PerturbationSpec {
    #[serde(rename_all = "camelCase")]
    FiniteJordan { a: f64, k: usize, sign: i8, eps: f64, m: f64 },
    #[serde(rename_all = "camelCase")]
    InfiniteJordan { k: usize, sign: i8, eps: f64, m: f64 },
    #[serde(rename_all = "camelCase")]
    ConjPairSplit { mu_re: f64, mu_im: f64, k: usize, eps: f64, m: f64 },
    #[serde(rename_all = "camelCase")]
    RegularizeM { d: usize, m: f64 },
    #[serde(rename_all = "camelCase")]
    SingularAbsorb { mu_re: f64, mu_im: f64, k: usize, d: usize, eps: f64 },
}

impl PerturbationSpec {
    pub fn build(&self) -> Result<Perturbation> {
        match *self {
            PerturbationSpec::FiniteJordan { a, k, sign, eps, m } => {
                s_perturbation_finite(a, k, sign, eps, m)
            }
            PerturbationSpec::InfiniteJordan { k, sign, eps, m } => {
                s_perturbation_infinite(k, sign, eps, m)
            }
            PerturbationSpec::ConjPairSplit { mu_re, mu_im, k, eps, m } => {
                conj_pair_split(Complex64::new(mu_re, mu_im), k, eps, m)
            }
            PerturbationSpec::RegularizeM { d, m } => regularize_m(d, m),
            PerturbationSpec::SingularAbsorb { mu_re, mu_im, k, d, eps } => {
                singular_absorb(Complex64::new(mu_re, mu_im), k, d, eps)
            }
        }
    }
}

/// One named verification outcome.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

pub fn all_pass(checks: &[CheckResult]) -> bool {
    checks.iter().all(|c| c.pass)
}

fn check(name: &str, pass: bool, detail: String) -> CheckResult {
    CheckResult { name: name.to_string(), pass, detail }
}

/// Runs every check the prediction supports against the perturbed pencil.
/// Tolerances: determinant coefficients within `DET_TOL` relative to the
/// polynomial scale, eigenvalues within `EIG_TOL * (1 + |lambda|)`, inertia
/// and rank counts exact.
pub fn verify_prediction(p: &Perturbation, seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let pred = &p.prediction;
    let pen = &p.perturbed;
    let n = pen.n();

    let dist = pen
        .a()
        .sub(p.base.a())
        .frob_norm()
        .hypot(pen.b().sub(p.base.b()).frob_norm());
    out.push(check(
        "distance",
        (dist - pred.distance).abs() <= 1e-12 * (1.0 + pred.distance),
        format!("measured {dist:e}, predicted {:e}", pred.distance),
    ));

    if let Some(expected) = &pred.det_coeffs {
        if n <= crate::DENSE_MAX_N {
            let exact = det_poly_exact(pen.pencil())?;
            let scale = poly_scale(&exact)
                .max(expected.iter().map(|z| z.norm()).fold(0.0, f64::max));
            let mut worst = 0.0f64;
            for (j, got) in exact.iter().enumerate() {
                let want = expected.get(j).copied().unwrap_or(Complex64::ZERO);
                worst = worst.max((got.to_c64() - want).norm());
            }
            out.push(check(
                "detCoeffs",
                worst <= DET_TOL * scale,
                format!("worst coefficient deviation {worst:e} at scale {scale:e}"),
            ));
        }
    }

    if let Some(ip) = &pred.inertia {
        let mat = match ip.side {
            CoeffSide::Constant => pen.a(),
            CoeffSide::Leading => pen.b(),
        };
        let got = inertia_of(mat, INERTIA_TOL)?;
        out.push(check(
            "inertia",
            got == ip.inertia,
            format!("got {got:?}, predicted {:?}", ip.inertia),
        ));
    }

    if let Some(lr) = pred.leading_rank {
        let (rank, _) = rank_with_gap(pen.b());
        out.push(check("leadingRank", rank == lr, format!("got {rank}, predicted {lr}")));
    }

    if let Some(order) = pred.singular_order {
        let nr = normal_rank(pen.pencil(), seed);
        out.push(check(
            "normalRank",
            nr == pred.normal_rank,
            format!("got {nr}, predicted {}", pred.normal_rank),
        ));
        let right = crate::infer::minimal_index_profile(pen.pencil(), nr)?;
        let left = crate::infer::minimal_index_profile(&pen.pencil().transpose(), nr)?;
        out.push(check(
            "minimalIndices",
            right == vec![order] && left == vec![order],
            format!("right {right:?}, left {left:?}, predicted [{order}] each"),
        ));
        if let Some(z) = pred.probe {
            let (rank, _) = rank_with_gap(&evaluate(pen.pencil(), z));
            out.push(check(
                "probeRank",
                rank == pred.normal_rank,
                format!("rank {rank} at the absorbed eigenvalue, predicted {}", pred.normal_rank),
            ));
        }
    } else {
        let eigs = crate::infer::eigs_regular(pen, seed)?;
        let inf_got = eigs.iter().filter(|z| !z.is_finite()).count();
        out.push(check(
            "infiniteCount",
            inf_got == pred.infinite_count,
            format!("got {inf_got}, predicted {}", pred.infinite_count),
        ));
        let finite: Vec<Complex64> = eigs.into_iter().filter(|z| z.is_finite()).collect();
        let mut used = vec![false; finite.len()];
        let mut matched = finite.len() == pred.eigenvalues.len();
        let mut worst = 0.0f64;
        for want in &pred.eigenvalues {
            let best = finite
                .iter()
                .enumerate()
                .filter(|(i, _)| !used[*i])
                .min_by(|(_, x), (_, y)| {
                    (**x - want).norm().total_cmp(&(**y - want).norm())
                });
            match best {
                Some((i, z)) => {
                    used[i] = true;
                    let rel = (z - want).norm() / (1.0 + want.norm());
                    worst = worst.max(rel);
                    if rel > EIG_TOL {
                        matched = false;
                    }
                }
                None => matched = false,
            }
        }
        out.push(check(
            "eigenvalues",
            matched,
            format!("{} predicted, worst relative deviation {worst:e}", pred.eigenvalues.len()),
        ));

        let reals: Vec<f64> = finite
            .iter()
            .filter(|z| z.im.abs() <= crate::REALNESS_TOL * (1.0 + z.re.abs()))
            .map(|z| z.re)
            .collect();
        out.push(check(
            "realCount",
            reals.len() == pred.real_count,
            format!("got {}, predicted {}", reals.len(), pred.real_count),
        ));
        if let Some(pc) = pred.plus_count {
            let mut plus = 0usize;
            let mut failures = Vec::new();
            for &r in &reals {
                match crate::infer::sign_characteristic_simple(pen, r) {
                    Ok(1) => plus += 1,
                    Ok(_) => {}
                    Err(e) => failures.push(format!("sign at {r}: {e}")),
                }
            }
            out.push(check(
                "signs",
                failures.is_empty() && plus == pc,
                if failures.is_empty() {
                    format!("{plus} plus signs, predicted {pc}")
                } else {
                    failures.join("; ")
                },
            ));
        }
    }
    Ok(out)
}
