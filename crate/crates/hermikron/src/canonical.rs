//! Canonical blocks of Hermitian pencils under *-congruence and direct sums
//! of them, plus seeded sampling of congruence representatives.
//!
//! Block families, all square and exactly Hermitian by construction:
//! - `RealJordan`: sign-carrying anti-triangular block for a real eigenvalue,
//! - `InfJordan`: the same shape for the eigenvalue at infinity,
//! - `ConjPair`: a paired block for a non-real eigenvalue and its conjugate,
//! - `Singular`: the order-`d` singular block built from the rectangular
//!   shift factors.

use crate::matrix::ComplexMatrix;
use crate::pencil::{congruence, HermitianPencil, MatrixPencil};
use crate::rng::SeededRng;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One direct summand of a canonical Hermitian pencil.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CanonicalBlock {
    /// `sign * J_k(a)` for a real eigenvalue `a`; size `k`.
    RealJordan { k: usize, a: f64, sign: i8 },
    /// `sign * J_k(inf)`; size `k`.
    InfJordan { k: usize, sign: i8 },
    /// Paired block for `mu` and its conjugate, `im mu > 0`; size `2k`.
    ConjPair { k: usize, mu: Complex64 },
    /// Singular block of order `d`; size `2d + 1` (`d = 0` is the 1x1 zero).
    Singular { d: usize },
}

impl CanonicalBlock {
    pub fn size(&self) -> usize {
        match *self {
            CanonicalBlock::RealJordan { k, .. } => k,
            CanonicalBlock::InfJordan { k, .. } => k,
            CanonicalBlock::ConjPair { k, .. } => 2 * k,
            CanonicalBlock::Singular { d } => 2 * d + 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidBlock(msg));
        match *self {
            CanonicalBlock::RealJordan { k, a, sign } => {
                if k == 0 {
                    return fail("RealJordan requires k >= 1".into());
                }
                if !a.is_finite() {
                    return fail(format!("RealJordan eigenvalue {a} is not finite"));
                }
                if sign != 1 && sign != -1 {
                    return fail(format!("RealJordan sign {sign} must be +1 or -1"));
                }
            }
            CanonicalBlock::InfJordan { k, sign } => {
                if k == 0 {
                    return fail("InfJordan requires k >= 1".into());
                }
                if sign != 1 && sign != -1 {
                    return fail(format!("InfJordan sign {sign} must be +1 or -1"));
                }
            }
            CanonicalBlock::ConjPair { k, mu } => {
                if k == 0 {
                    return fail("ConjPair requires k >= 1".into());
                }
                if !(mu.re.is_finite() && mu.im.is_finite()) {
                    return fail(format!("ConjPair eigenvalue {mu} is not finite"));
                }
                if mu.im <= 0.0 {
                    return fail(format!("ConjPair eigenvalue {mu} must have positive imaginary part"));
                }
            }
            CanonicalBlock::Singular { .. } => {}
        }
        Ok(())
    }
}

/// A canonical form: an ordered list of blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct Hkcf {
    blocks: Vec<CanonicalBlock>,
}

impl Hkcf {
    pub fn new(blocks: Vec<CanonicalBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidBlock("canonical form needs at least one block".into()));
        }
        for b in &blocks {
            b.validate()?;
        }
        Ok(Self { blocks })
    }

    pub fn blocks(&self) -> &[CanonicalBlock] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.size()).sum()
    }

    pub fn singular_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b, CanonicalBlock::Singular { .. }))
            .count()
    }

    /// Distinct finite eigenvalues, counting a conjugate pair as two.
    pub fn distinct_finite_eigenvalues(&self) -> usize {
        let mut seen: Vec<(u64, u64)> = Vec::new();
        let mut push = |z: Complex64| {
            let key = (z.re.to_bits(), z.im.to_bits());
            if !seen.contains(&key) {
                seen.push(key);
            }
        };
        for b in &self.blocks {
            match *b {
                CanonicalBlock::RealJordan { a, .. } => push(Complex64::new(a, 0.0)),
                CanonicalBlock::ConjPair { mu, .. } => {
                    push(mu);
                    push(mu.conj());
                }
                _ => {}
            }
        }
        seen.len()
    }
}

/// `d x (d + 1)` factor with ones on the superdiagonal.
pub fn build_f(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d + 1, |i, j| {
        if j == i + 1 {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// `d x (d + 1)` factor with ones on the main diagonal.
pub fn build_g(d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d + 1, |i, j| {
        if j == i {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// The rectangular singular factor `lambda G_d + F_d`.
pub fn build_l(d: usize) -> MatrixPencil {
    MatrixPencil::new(build_f(d), build_g(d))
}

fn real_jordan_parts(k: usize, a: Complex64) -> (ComplexMatrix, ComplexMatrix) {
    let mut am = ComplexMatrix::zeros(k, k);
    let mut bm = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        am[(i, k - 1 - i)] = -a;
        bm[(i, k - 1 - i)] = Complex64::ONE;
        if k >= 2 && i + 2 <= k {
            am[(i, k - 2 - i)] = Complex64::ONE;
        }
    }
    (am, bm)
}

/// Realizes one canonical block as an exactly Hermitian pencil.
pub fn build_block(block: &CanonicalBlock) -> Result<HermitianPencil> {
    block.validate()?;
    let (a, b) = match *block {
        CanonicalBlock::RealJordan { k, a, sign } => {
            let (am, bm) = real_jordan_parts(k, Complex64::new(a, 0.0));
            let s = Complex64::new(sign as f64, 0.0);
            (am.scale(s), bm.scale(s))
        }
        CanonicalBlock::InfJordan { k, sign } => {
            let mut am = ComplexMatrix::zeros(k, k);
            let mut bm = ComplexMatrix::zeros(k, k);
            let s = Complex64::new(sign as f64, 0.0);
            for i in 0..k {
                am[(i, k - 1 - i)] = s;
                if k >= 2 && i + 2 <= k {
                    bm[(i, k - 2 - i)] = s;
                }
            }
            (am, bm)
        }
        CanonicalBlock::ConjPair { k, mu } => {
            let (a_up, b_up) = real_jordan_parts(k, mu.conj());
            let (a_lo, b_lo) = real_jordan_parts(k, mu);
            let mut am = ComplexMatrix::zeros(2 * k, 2 * k);
            let mut bm = ComplexMatrix::zeros(2 * k, 2 * k);
            am.set_block(0, k, &a_up);
            am.set_block(k, 0, &a_lo);
            bm.set_block(0, k, &b_up);
            bm.set_block(k, 0, &b_lo);
            (am, bm)
        }
        CanonicalBlock::Singular { d } => {
            let l = build_l(d);
            let mut am = ComplexMatrix::zeros(2 * d + 1, 2 * d + 1);
            let mut bm = ComplexMatrix::zeros(2 * d + 1, 2 * d + 1);
            am.set_block(0, d + 1, &l.a.transpose());
            am.set_block(d + 1, 0, &l.a);
            bm.set_block(0, d + 1, &l.b.transpose());
            bm.set_block(d + 1, 0, &l.b);
            (am, bm)
        }
    };
    HermitianPencil::new(a, b)
}

/// Realizes a canonical form as the direct sum of its blocks, in order.
pub fn build_hkcf(h: &Hkcf) -> Result<HermitianPencil> {
    let mut out: Option<HermitianPencil> = None;
    for block in h.blocks() {
        let built = build_block(block)?;
        out = Some(match out {
            None => built,
            Some(acc) => acc.direct_sum(&built),
        });
    }
    Ok(out.expect("canonical form is non-empty"))
}

/// Multiplies a skew-Hermitian pencil by `i`, producing a Hermitian one.
pub fn skew_to_hermitian(p: &MatrixPencil) -> Result<HermitianPencil> {
    if !p.a.is_square() {
        return Err(Error::InvalidParams("skew conversion requires a square pencil".into()));
    }
    let scale = p.norm_scale().max(1.0);
    let tol = crate::HERM_TOL * scale;
    let defect = |m: &ComplexMatrix| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..m.rows() {
            for j in i..m.cols() {
                worst = worst.max((m[(i, j)] + m[(j, i)].conj()).norm());
            }
        }
        worst
    };
    let asym = defect(&p.a).max(defect(&p.b));
    if asym > tol {
        return Err(Error::NotSkewHermitian { asym, tol });
    }
    let i = Complex64::new(0.0, 1.0);
    HermitianPencil::new(p.a.scale(i), p.b.scale(i))
}

/// How fresh eigenvalues are drawn when sampling congruence representatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EigenvaluePolicy {
    /// Distinct integers in `[-1000, 1000]`.
    Integers,
    /// Distinct rationals with numerator in `[-1000, 1000]` and denominator
    /// in `[1, 1000]`.
    Rationals,
    /// Distinct standard normals with a minimum gap of `1e-6`.
    Gaussian,
}

/// A sampled congruence representative together with its ground truth.
pub struct Sample {
    pub pencil: HermitianPencil,
    pub hkcf: Hkcf,
    pub transform: ComplexMatrix,
}

/// Tracks values drawn so far so one call never repeats an eigenvalue.
#[derive(Default)]
struct DistinctDraws {
    fractions: Vec<(i64, i64)>,
    values: Vec<f64>,
}

fn draw_real(policy: EigenvaluePolicy, rng: &mut SeededRng, taken: &mut DistinctDraws) -> f64 {
    loop {
        let (num, den) = match policy {
            EigenvaluePolicy::Integers => (rng.int_in(-1000, 1000), 1),
            EigenvaluePolicy::Rationals => (rng.int_in(-1000, 1000), rng.int_in(1, 1000)),
            EigenvaluePolicy::Gaussian => {
                let x = rng.gaussian();
                if taken.values.iter().all(|&y| (x - y).abs() > 1e-6) {
                    taken.values.push(x);
                    return x;
                }
                continue;
            }
        };
        if taken.fractions.iter().all(|&(n, d)| n * den != num * d) {
            taken.fractions.push((num, den));
            return num as f64 / den as f64;
        }
    }
}

fn draw_im(policy: EigenvaluePolicy, rng: &mut SeededRng) -> f64 {
    match policy {
        EigenvaluePolicy::Integers => rng.int_in(1, 100) as f64,
        EigenvaluePolicy::Rationals => {
            let den = rng.int_in(1, 100);
            let lo = (den as f64 * crate::IM_MIN).ceil() as i64;
            let num = rng.int_in(lo.max(1), den * 10);
            num as f64 / den as f64
        }
        EigenvaluePolicy::Gaussian => crate::IM_MIN + rng.gaussian().abs(),
    }
}

/// Replaces the eigenvalues of `h` by fresh draws (all distinct within this
/// call) and conjugates the realization by a random bounded-condition
/// transform. Deterministic in `seed`.
pub fn random_congruence_sample(h: &Hkcf, policy: EigenvaluePolicy, seed: u64) -> Result<Sample> {
    let mut rng = SeededRng::new(seed);
    let mut taken_real = DistinctDraws::default();
    let mut taken_pairs = DistinctDraws::default();
    let blocks: Vec<CanonicalBlock> = h
        .blocks()
        .iter()
        .map(|b| match *b {
            CanonicalBlock::RealJordan { k, sign, .. } => CanonicalBlock::RealJordan {
                k,
                a: draw_real(policy, &mut rng, &mut taken_real),
                sign,
            },
            CanonicalBlock::ConjPair { k, .. } => {
                let re = draw_real(policy, &mut rng, &mut taken_pairs);
                let im = draw_im(policy, &mut rng);
                CanonicalBlock::ConjPair { k, mu: Complex64::new(re, im) }
            }
            other => other,
        })
        .collect();
    let hkcf = Hkcf::new(blocks)?;
    let canonical = build_hkcf(&hkcf)?;
    let n = hkcf.n();
    let mut rejected = 0;
    while rejected < crate::SAMPLE_REJECT_LIMIT {
        let q = ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian());
        match congruence(&canonical, &q) {
            Ok(pencil) => return Ok(Sample { pencil, hkcf, transform: q }),
            Err(Error::SingularTransform { .. }) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Err(Error::SamplingFailed(rejected))
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
enum BlockWire {
    #[serde(rename_all = "camelCase")]
    RealJordan { k: usize, a: f64, sign: i8 },
    #[serde(rename_all = "camelCase")]
    InfJordan { k: usize, sign: i8 },
    #[serde(rename_all = "camelCase")]
    ConjPair { k: usize, mu_re: f64, mu_im: f64 },
    #[serde(rename_all = "camelCase")]
    Singular { d: usize },
}

impl Serialize for CanonicalBlock {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let wire = match *self {
            CanonicalBlock::RealJordan { k, a, sign } => BlockWire::RealJordan { k, a, sign },
            CanonicalBlock::InfJordan { k, sign } => BlockWire::InfJordan { k, sign },
            CanonicalBlock::ConjPair { k, mu } => {
                BlockWire::ConjPair { k, mu_re: mu.re, mu_im: mu.im }
            }
            CanonicalBlock::Singular { d } => BlockWire::Singular { d },
        };
        wire.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CanonicalBlock {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let wire = BlockWire::deserialize(d)?;
        let block = match wire {
            BlockWire::RealJordan { k, a, sign } => CanonicalBlock::RealJordan { k, a, sign },
            BlockWire::InfJordan { k, sign } => CanonicalBlock::InfJordan { k, sign },
            BlockWire::ConjPair { k, mu_re, mu_im } => {
                CanonicalBlock::ConjPair { k, mu: Complex64::new(mu_re, mu_im) }
            }
            BlockWire::Singular { d } => CanonicalBlock::Singular { d },
        };
        block.validate().map_err(serde::de::Error::custom)?;
        Ok(block)
    }
}

impl Serialize for Hkcf {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            blocks: &'a [CanonicalBlock],
        }
        Wire { blocks: &self.blocks }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hkcf {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            blocks: Vec<CanonicalBlock>,
        }
        let wire = Wire::deserialize(d)?;
        Hkcf::new(wire.blocks).map_err(serde::de::Error::custom)
    }
}
