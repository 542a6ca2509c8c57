//! Generic complete eigenstructures of Hermitian pencils: the regular family
//! and the bounded-rank family, indexed by a common descriptor (n, r, c, d)
//! with r = n flagging the regular case.
//!
//! Regular structure (r = n): d conjugate-pair blocks, c simple real
//! eigenvalues with sign +1, n - 2d - c with sign -1.
//!
//! Bounded structure (r < n): the d parameter is spent on minimal indices,
//! balanced by the Euclidean division d = (n - r)alpha + s; the blocks are
//! s copies of M_{alpha+1}, (n - r - s) copies of M_alpha, then c simple
//! real eigenvalues with sign +1 and r - 2d - c with sign -1. No conjugate
//! pairs occur in the bounded generic family.

use crate::canonical::{CanonicalBlock, Hkcf};
use crate::pencil::Inertia;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Euclidean division `total = t * alpha + s` with `0 <= s < t`.
pub fn balance_division(total: usize, t: usize) -> (usize, usize) {
    assert!(t >= 1, "balance_division needs at least one part");
    (total / t, total % t)
}

/// Identifies one generic structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BundleDescriptor {
    pub n: usize,
    pub r: usize,
    pub c: usize,
    pub d: usize,
    pub alpha: usize,
    pub s: usize,
}

impl BundleDescriptor {
    pub fn new(n: usize, r: usize, c: usize, d: usize) -> Result<Self> {
        let fail = |msg: String| Err(Error::InvalidParams(msg));
        if n == 0 {
            return fail("descriptor needs n >= 1".into());
        }
        if r > n {
            return fail(format!("rank bound r = {r} exceeds n = {n}"));
        }
        if r < n && r == 0 {
            return fail("bounded family needs 1 <= r <= n - 1".into());
        }
        if d > r / 2 {
            return fail(format!("d = {d} exceeds floor(r/2) = {}", r / 2));
        }
        if c > r - 2 * d {
            return fail(format!("c = {c} exceeds r - 2d = {}", r - 2 * d));
        }
        let (alpha, s) = if r < n { balance_division(d, n - r) } else { (0, 0) };
        Ok(Self { n, r, c, d, alpha, s })
    }

    pub fn is_regular(&self) -> bool {
        self.r == self.n
    }

    /// Number of simple real eigenvalues of the realized structure.
    pub fn real_count(&self) -> usize {
        if self.is_regular() {
            self.n - 2 * self.d
        } else {
            self.r - 2 * self.d
        }
    }

    /// Number of conjugate-pair blocks (zero in the bounded family).
    pub fn pair_count(&self) -> usize {
        if self.is_regular() {
            self.d
        } else {
            0
        }
    }

    /// Sizes of the singular blocks, largest first (empty when regular).
    pub fn minimal_indices(&self) -> Vec<usize> {
        if self.is_regular() {
            return Vec::new();
        }
        let mut out = vec![self.alpha + 1; self.s];
        out.extend(std::iter::repeat(self.alpha).take(self.n - self.r - self.s));
        out
    }

    /// Builds the canonical form with the given eigenvalues. The first `c`
    /// reals take sign +1, the remainder sign -1.
    pub fn realize(&self, reals: &[f64], pairs: &[Complex64]) -> Result<Hkcf> {
        if reals.len() != self.real_count() {
            return Err(Error::InvalidParams(format!(
                "expected {} real eigenvalues, got {}",
                self.real_count(),
                reals.len()
            )));
        }
        if pairs.len() != self.pair_count() {
            return Err(Error::InvalidParams(format!(
                "expected {} conjugate-pair eigenvalues, got {}",
                self.pair_count(),
                pairs.len()
            )));
        }
        for (i, x) in reals.iter().enumerate() {
            if reals[..i].contains(x) {
                return Err(Error::EigenvalueCollision(format!("real eigenvalue {x} repeats")));
            }
        }
        for (i, z) in pairs.iter().enumerate() {
            if pairs[..i].contains(z) {
                return Err(Error::EigenvalueCollision(format!("pair eigenvalue {z} repeats")));
            }
        }
        let mut blocks = Vec::new();
        if !self.is_regular() {
            blocks.extend((0..self.s).map(|_| CanonicalBlock::Singular { d: self.alpha + 1 }));
            blocks.extend(
                (0..self.n - self.r - self.s).map(|_| CanonicalBlock::Singular { d: self.alpha }),
            );
        } else {
            blocks.extend(pairs.iter().map(|&mu| CanonicalBlock::ConjPair { k: 1, mu }));
        }
        blocks.extend(
            reals
                .iter()
                .enumerate()
                .map(|(i, &a)| CanonicalBlock::RealJordan { k: 1, a, sign: if i < self.c { 1 } else { -1 } }),
        );
        Hkcf::new(blocks)
    }

    /// Orbit and bundle codimensions in the real space of Hermitian pencils.
    pub fn codim_closed_form(&self) -> ClosedFormCodim {
        if self.is_regular() {
            ClosedFormCodim { orbit: self.n, bundle: 0 }
        } else {
            let bundle = 2 * (self.n - self.d) * (self.n - self.r);
            ClosedFormCodim { orbit: self.r - 2 * self.d + bundle, bundle }
        }
    }

    /// Inertia of the leading coefficient of any realization.
    pub fn leading_inertia(&self) -> Inertia {
        if self.is_regular() {
            Inertia { pos: self.c + self.d, neg: self.n - self.c - self.d, zero: 0 }
        } else {
            Inertia {
                pos: self.c + self.d,
                neg: self.r - self.d - self.c,
                zero: self.n - self.r,
            }
        }
    }
}

/// Closed-form codimension pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormCodim {
    pub orbit: usize,
    pub bundle: usize,
}

impl<'de> Deserialize<'de> for BundleDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            n: usize,
            r: usize,
            c: usize,
            d: usize,
            alpha: Option<usize>,
            s: Option<usize>,
        }
        let w = Wire::deserialize(de)?;
        let desc = BundleDescriptor::new(w.n, w.r, w.c, w.d).map_err(serde::de::Error::custom)?;
        if w.alpha.is_some_and(|a| a != desc.alpha) || w.s.is_some_and(|s| s != desc.s) {
            return Err(serde::de::Error::custom(
                "alpha/s inconsistent with the Euclidean division of d",
            ));
        }
        Ok(desc)
    }
}

/// All regular descriptors at size n: d ascending, then c ascending.
pub fn enumerate_regular(n: usize) -> Vec<BundleDescriptor> {
    let mut out = Vec::new();
    for d in 0..=n / 2 {
        for c in 0..=n - 2 * d {
            out.push(BundleDescriptor::new(n, n, c, d).expect("in-range descriptor"));
        }
    }
    out
}

/// All bounded descriptors at size n, rank bound r: d ascending, then c.
pub fn enumerate_bounded(n: usize, r: usize) -> Result<Vec<BundleDescriptor>> {
    if r == 0 || r >= n {
        return Err(Error::InvalidParams(format!(
            "bounded enumeration needs 1 <= r <= n - 1, got r = {r}, n = {n}"
        )));
    }
    let mut out = Vec::new();
    for d in 0..=r / 2 {
        for c in 0..=r - 2 * d {
            out.push(BundleDescriptor::new(n, r, c, d)?);
        }
    }
    Ok(out)
}

/// Closed-form count of generic structures with rank bound r (r = n for the
/// regular family): (floor(r/2) + 1) * floor((r+3)/2).
pub fn count_generic(r: usize) -> usize {
    (r / 2 + 1) * ((r + 3) / 2)
}

/// Weyr counts of a multiset of minimal indices: w_i = #{indices >= i} for
/// i >= 1, trailing zeros trimmed; the number of indices is kept separately.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeyrSequence {
    counts: Vec<usize>,
    index_count: usize,
}

impl WeyrSequence {
    /// w_1, w_2, ... (trailing zeros trimmed).
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// w_0: how many indices the multiset had.
    pub fn index_count(&self) -> usize {
        self.index_count
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn weyr_of(indices: &[usize]) -> WeyrSequence {
    let max = indices.iter().copied().max().unwrap_or(0);
    let counts: Vec<usize> =
        (1..=max).map(|i| indices.iter().filter(|&&e| e >= i).count()).collect();
    WeyrSequence { counts, index_count: indices.len() }
}

/// Partial-sum majorization: every prefix sum of `from` is >= the matching
/// prefix sum of `to`, and the totals agree. A one-sided necessary filter
/// for bundle-closure reachability, never a sufficient decision.
pub fn weyr_dominates(from: &WeyrSequence, to: &WeyrSequence) -> bool {
    if from.total() != to.total() {
        return false;
    }
    let len = from.counts.len().max(to.counts.len());
    let at = |w: &WeyrSequence, i: usize| w.counts.get(i).copied().unwrap_or(0);
    let mut sum_from = 0;
    let mut sum_to = 0;
    for i in 0..len {
        sum_from += at(from, i);
        sum_to += at(to, i);
        if sum_from < sum_to {
            return false;
        }
    }
    true
}
