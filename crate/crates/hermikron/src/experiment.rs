//! Seeded numerical experiments over random Hermitian pencils, with CSV and
//! plot-script emission.
//!
//! The regular experiment tracks how a growing diagonal shift of B drives
//! the eigenvalues of A + lambda (B + w_j I) onto the real axis. The rank
//! experiment samples bounded-rank generic structures, realizes them through
//! random congruences, and records what inference recovers. Both are fully
//! deterministic in the master seed: trial j uses the split stream
//! `splitmix(master_seed, j)`, so prefixes agree across trial counts.

use crate::bundles::{enumerate_bounded, BundleDescriptor};
use crate::canonical::{random_congruence_sample, EigenvaluePolicy};
use crate::infer;
use crate::matrix::ComplexMatrix;
use crate::pencil::HermitianPencil;
use crate::rng::{splitmix, SeededRng};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Diagonal shift schedule applied to B in the regular experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shift {
    None,
    Linear,
    JLogJ,
}

impl Shift {
    /// Shift weight for 1-based trial index j.
    pub fn weight(self, j: usize) -> f64 {
        let x = j as f64;
        match self {
            Shift::None => 0.0,
            Shift::Linear => x / 100.0,
            Shift::JLogJ => x * x.ln() / 100.0,
        }
    }
}

impl FromStr for Shift {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Shift::None),
            "linear" => Ok(Shift::Linear),
            "jlogj" => Ok(Shift::JLogJ),
            other => Err(Error::InvalidParams(format!(
                "unknown shift {other:?}, expected none, linear, or jlogj"
            ))),
        }
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shift::None => "none",
            Shift::Linear => "linear",
            Shift::JLogJ => "jlogj",
        })
    }
}

/// Descriptor sampler for the rank experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Generator {
    /// g1: d uniform over its range, then c uniform given d.
    Stratified,
    /// g2: descriptors weighted by exp(-codim_bundle / 2).
    Weighted,
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g1" => Ok(Generator::Stratified),
            "g2" => Ok(Generator::Weighted),
            other => {
                Err(Error::InvalidParams(format!("unknown generator {other:?}, expected g1 or g2")))
            }
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Stratified => "g1",
            Generator::Weighted => "g2",
        })
    }
}

/// One experiment trial. The descriptor columns are present only in the
/// rank experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentRow {
    pub j: usize,
    pub real_count: usize,
    pub max_abs_imag: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

fn random_hermitian(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| rng.complex_gaussian()).hermitian_part()
}

fn regular_trial(n: usize, shift: Shift, master_seed: u64, j: usize) -> Result<ExperimentRow> {
    let seed = splitmix(master_seed, j as u64);
    let mut rng = SeededRng::new(seed);
    let a = random_hermitian(n, &mut rng);
    let mut b = random_hermitian(n, &mut rng);
    let w = shift.weight(j);
    for i in 0..n {
        b[(i, i)] += Complex64::new(w, 0.0);
    }
    let p = HermitianPencil::new(a, b)?;
    let eigs = infer::eigs_regular(&p, splitmix(seed, 0xe1))?;
    let mut real_count = 0usize;
    let mut max_abs_imag = 0.0f64;
    for z in eigs.iter().filter(|z| z.is_finite()) {
        if z.im.abs() <= crate::REALNESS_TOL * (1.0 + z.re.abs()) {
            real_count += 1;
        }
        max_abs_imag = max_abs_imag.max(z.im.abs());
    }
    Ok(ExperimentRow { j, real_count, max_abs_imag, c: None, d: None })
}

/// Regular experiment: iid Hermitian A, B with B shifted by w_j I. Trials
/// run in parallel; each is seeded independently, so the rows match the
/// sequential order.
pub fn experiment_regular(
    n: usize,
    trials: usize,
    shift: Shift,
    master_seed: u64,
) -> Result<Vec<ExperimentRow>> {
    (1..=trials).into_par_iter().map(|j| regular_trial(n, shift, master_seed, j)).collect()
}

fn bundle_weights(descriptors: &[BundleDescriptor]) -> Vec<f64> {
    let codims: Vec<usize> = descriptors.iter().map(|d| d.codim_closed_form().bundle).collect();
    let min = codims.iter().copied().min().unwrap_or(0);
    codims.iter().map(|&b| (-((b - min) as f64) / 2.0).exp()).collect()
}

fn pick_weighted(weights: &[f64], rng: &mut SeededRng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.uniform() * total;
    for (i, w) in weights.iter().enumerate() {
        x -= w;
        if x <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

fn rank_trial(
    n: usize,
    r: usize,
    descriptors: &[BundleDescriptor],
    weights: &[f64],
    generator: Generator,
    master_seed: u64,
    j: usize,
) -> Result<ExperimentRow> {
    let seed = splitmix(master_seed, j as u64);
    let mut rng = SeededRng::new(splitmix(seed, 0x57));
    let desc = match generator {
        Generator::Stratified => {
            let d = rng.int_in(0, (r / 2) as i64) as usize;
            let c = rng.int_in(0, (r - 2 * d) as i64) as usize;
            BundleDescriptor::new(n, r, c, d)?
        }
        Generator::Weighted => descriptors[pick_weighted(weights, &mut rng)],
    };
    // Placeholder eigenvalues; the sampler redraws them.
    let reals: Vec<f64> = (0..desc.real_count()).map(|i| i as f64).collect();
    let skeleton = desc.realize(&reals, &[])?;
    let sample =
        random_congruence_sample(&skeleton, EigenvaluePolicy::Integers, splitmix(seed, 0x5a))?;
    let mut report = None;
    let mut last_err = None;
    for attempt in 0..3u64 {
        match infer::full_report(&sample.pencil, splitmix(seed, 0xf0 + attempt)) {
            Ok(rep) => {
                report = Some(rep);
                break;
            }
            Err(
                e @ (Error::InferenceUnstable(..)
                | Error::RankAmbiguity { .. }
                | Error::NotRegular),
            ) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    let rep = match report {
        Some(rep) => rep,
        None => return Err(last_err.expect("three failed attempts leave an error")),
    };
    let max_abs_imag = rep.pair_representatives.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    Ok(ExperimentRow {
        j,
        real_count: rep.real_eigenvalues.len(),
        max_abs_imag,
        c: Some(desc.c),
        d: Some(desc.d),
    })
}

/// Rank experiment: sample a bounded descriptor, realize it through a random
/// congruence with integer eigenvalues, and report what inference recovers.
/// Trials run in parallel with independent seeds.
pub fn experiment_rank(
    n: usize,
    r: usize,
    trials: usize,
    generator: Generator,
    master_seed: u64,
) -> Result<Vec<ExperimentRow>> {
    let descriptors = enumerate_bounded(n, r)?;
    let weights = bundle_weights(&descriptors);
    (1..=trials)
        .into_par_iter()
        .map(|j| rank_trial(n, r, &descriptors, &weights, generator, master_seed, j))
        .collect()
}

/// Formats like C's `%.17g`: up to 17 significant digits, trailing zeros
/// stripped, exponent form outside [1e-4, 1e17).
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let formatted = format!("{:.16e}", x.abs());
    let (mantissa, exp_str) = formatted.split_once('e').expect("exponent form");
    let exp: i32 = exp_str.parse().expect("numeric exponent");
    let all_digits: String = mantissa.chars().filter(|ch| *ch != '.').collect();
    let digits = {
        let trimmed = all_digits.trim_end_matches('0');
        if trimmed.is_empty() {
            "0"
        } else {
            trimmed
        }
    };
    let body = if !(-4..17).contains(&exp) {
        let mut m = String::new();
        m.push_str(&digits[..1]);
        if digits.len() > 1 {
            m.push('.');
            m.push_str(&digits[1..]);
        }
        format!("{}e{}{:02}", m, if exp < 0 { '-' } else { '+' }, exp.abs())
    } else if exp >= 0 {
        let point = exp as usize + 1;
        if digits.len() > point {
            format!("{}.{}", &digits[..point], &digits[point..])
        } else {
            format!("{}{}", digits, "0".repeat(point - digits.len()))
        }
    } else {
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
    };
    if x < 0.0 {
        format!("-{body}")
    } else {
        body
    }
}

/// CSV serialization: LF line endings, trailing newline, `%.17g` floats.
pub fn csv_string(rows: &[ExperimentRow]) -> String {
    let with_descriptor = rows.iter().any(|r| r.c.is_some());
    let mut out = String::from(if with_descriptor {
        "j,real_count,max_abs_imag,c,d\n"
    } else {
        "j,real_count,max_abs_imag\n"
    });
    for row in rows {
        out.push_str(&format!("{},{},{}", row.j, row.real_count, fmt_g17(row.max_abs_imag)));
        if with_descriptor {
            out.push_str(&format!(
                ",{},{}",
                row.c.map_or(String::new(), |v| v.to_string()),
                row.d.map_or(String::new(), |v| v.to_string()),
            ));
        }
        out.push('\n');
    }
    out
}

pub fn emit_csv(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(rows))?;
    Ok(())
}

fn plot_script(csv_name: &str, png_name: &str) -> String {
    format!(
        r#"#!/usr/bin/env python3
import csv
from pathlib import Path

import matplotlib.pyplot as plt

here = Path(__file__).resolve().parent
with open(here / "{csv_name}", newline="") as fh:
    rows = list(csv.DictReader(fh))
xs = [int(row["j"]) for row in rows]
ys = [int(row["real_count"]) for row in rows]
plt.figure(figsize=(7.0, 4.0))
plt.scatter(xs, ys, s=9)
plt.xlabel("trial j")
plt.ylabel("real eigenvalue count")
plt.tight_layout()
plt.savefig(here / "{png_name}", dpi=150)
"#
    )
}

/// Writes the CSV plus a matplotlib stub at `<path>.plot.py` that renders
/// `<path stem>.png` next to the data.
pub fn emit_plotdata(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    emit_csv(rows, path)?;
    let csv_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParams("output path has no file name".into()))?
        .to_string_lossy()
        .into_owned();
    let png_name = format!("{}.png", path.file_stem().unwrap_or_default().to_string_lossy());
    let mut plot_path = PathBuf::from(path);
    plot_path.as_mut_os_string().push(".plot.py");
    std::fs::write(plot_path, plot_script(&csv_name, &png_name))?;
    Ok(())
}

fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let shared = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = shared;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation with average ranks on ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len(), "paired samples");
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let n = rx.len() as f64;
    let mx = rx.iter().sum::<f64>() / n;
    let my = ry.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (x, y) in rx.iter().zip(&ry) {
        cov += (x - mx) * (y - my);
        vx += (x - mx) * (x - mx);
        vy += (y - my) * (y - my);
    }
    cov / (vx * vy).sqrt()
}
