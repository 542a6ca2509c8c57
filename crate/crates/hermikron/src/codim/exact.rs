//! Exact rational rank/nullity of sparse real matrices.
//!
//! Entries arrive as f64 and convert losslessly to rationals (every finite
//! f64 is a dyadic rational), so the nullity decision is exact for the
//! matrix actually given, with no floating rank threshold involved.

use num_rational::BigRational;
use num_traits::Zero;
use std::collections::BTreeMap;

pub type SparseRow = BTreeMap<usize, BigRational>;

/// Converts a dense row-major f64 matrix into sparse rational rows.
pub fn sparse_rows_from_f64(rows: usize, cols: usize, data: &[f64]) -> Vec<SparseRow> {
    assert_eq!(data.len(), rows * cols);
    (0..rows)
        .map(|i| {
            let mut row = SparseRow::new();
            for j in 0..cols {
                let x = data[i * cols + j];
                if x != 0.0 {
                    row.insert(j, BigRational::from_float(x).expect("finite entry"));
                }
            }
            row
        })
        .collect()
}

fn entry_weight(v: &BigRational) -> u64 {
    v.numer().bits() + v.denom().bits()
}

/// Exact nullity (cols minus rank) by fraction-preserving elimination with
/// Markowitz-style pivoting to limit fill-in on sparse systems.
pub fn exact_nullity(rows: Vec<SparseRow>, cols: usize) -> usize {
    let mut live: Vec<SparseRow> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut rank = 0usize;
    while !live.is_empty() {
        let mut col_nnz = vec![0usize; cols];
        for row in &live {
            for &c in row.keys() {
                col_nnz[c] += 1;
            }
        }
        // Pivot choice: minimize predicted fill (row_nnz-1)*(col_nnz-1),
        // tie-break on the smallest entry footprint.
        let mut best: Option<(usize, usize, usize, u64)> = None;
        for (ri, row) in live.iter().enumerate() {
            let rn = row.len() - 1;
            for (&c, v) in row {
                let score = rn * (col_nnz[c] - 1);
                let weight = entry_weight(v);
                let better = match best {
                    None => true,
                    Some((_, _, s, w)) => score < s || (score == s && weight < w),
                };
                if better {
                    best = Some((ri, c, score, weight));
                }
            }
        }
        let (pri, pc, _, _) = best.expect("non-empty live rows have entries");
        rank += 1;
        let pivot_row = live.swap_remove(pri);
        let pivot_val = pivot_row[&pc].clone();
        let mut next = Vec::with_capacity(live.len());
        for mut row in live {
            if let Some(lead) = row.remove(&pc) {
                let factor = lead / &pivot_val;
                for (&c, v) in &pivot_row {
                    if c == pc {
                        continue;
                    }
                    let delta = &factor * v;
                    match row.entry(c) {
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            *e.get_mut() -= delta;
                            if e.get().is_zero() {
                                e.remove();
                            }
                        }
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(-delta);
                        }
                    }
                }
            }
            if !row.is_empty() {
                next.push(row);
            }
        }
        live = next;
    }
    cols - rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(rows: usize, cols: usize, entries: &[f64]) -> Vec<SparseRow> {
        sparse_rows_from_f64(rows, cols, entries)
    }

    #[test]
    fn full_rank_and_deficient() {
        assert_eq!(exact_nullity(dense(2, 2, &[1.0, 0.0, 0.0, 1.0]), 2), 0);
        assert_eq!(exact_nullity(dense(2, 2, &[1.0, 2.0, 2.0, 4.0]), 2), 1);
        assert_eq!(exact_nullity(dense(2, 3, &[0.0; 6]), 3), 3);
    }

    #[test]
    fn near_dependence_is_not_dependence() {
        // Rows differ by 2^-52 in one entry: floating rank logic would need a
        // threshold; the exact path sees rank 2 unambiguously.
        let eps = (2.0f64).powi(-52);
        assert_eq!(exact_nullity(dense(2, 2, &[1.0, 1.0, 1.0, 1.0 + eps]), 2), 0);
    }

    #[test]
    fn rectangular_tall() {
        let m = dense(4, 2, &[1.0, 2.0, 3.0, 6.0, 0.5, 1.0, 7.0, 1.0]);
        assert_eq!(exact_nullity(m, 2), 0);
    }

    #[test]
    fn thirds_and_dyadics() {
        // 1/3 rounds to a dyadic; the system stays consistent with itself.
        let third = 1.0f64 / 3.0;
        let m = dense(2, 2, &[third, 1.0, 2.0 * third, 2.0]);
        assert_eq!(exact_nullity(m, 2), 1);
    }
}
