//! Row-style Hermite normal form over the integers.
//!
//! The canonical form is upper triangular with positive pivots and every
//! entry above a pivot reduced into `[0, pivot)`. Two integer lattices are
//! equal exactly when their HNF bases are equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMat;
use crate::error::{Error, Result};

/// Echelon form of the row span, zero rows dropped. Works for any rank;
/// pivots sit in strictly increasing columns and entries above each pivot
/// are reduced modulo it.
pub fn echelon(m: &IntMat) -> IntMat {
    let cols = m.cols();
    let mut pending: Vec<Vec<BigInt>> = m
        .row_vecs()
        .into_iter()
        .filter(|r| r.iter().any(|e| !e.is_zero()))
        .collect();
    let mut out: Vec<(usize, Vec<BigInt>)> = Vec::new();

    for col in 0..cols {
        loop {
            let piv = pending
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by(|(_, a), (_, b)| a[col].abs().cmp(&b[col].abs()))
                .map(|(i, _)| i);
            let Some(pi) = piv else { break };
            let pivot_row = pending[pi].clone();
            let mut done = true;
            for (i, row) in pending.iter_mut().enumerate() {
                if i == pi || row[col].is_zero() {
                    continue;
                }
                let q = row[col].div_floor(&pivot_row[col]);
                for (e, p) in row.iter_mut().zip(&pivot_row) {
                    *e -= &q * p;
                }
                if !row[col].is_zero() {
                    done = false;
                }
            }
            if done {
                let mut row = pending.swap_remove(pi);
                if row[col].is_negative() {
                    for e in row.iter_mut() {
                        *e = -&*e;
                    }
                }
                out.push((col, row));
                pending.retain(|r| r.iter().any(|e| !e.is_zero()));
                break;
            }
        }
    }

    for i in 0..out.len() {
        let (pc, pivot_row) = (out[i].0, out[i].1.clone());
        for k in 0..i {
            let q = out[k].1[pc].div_floor(&pivot_row[pc]);
            if q.is_zero() {
                continue;
            }
            for (e, p) in out[k].1.iter_mut().zip(&pivot_row) {
                *e -= &q * p;
            }
        }
    }

    if out.is_empty() {
        return IntMat::zeros(0, cols);
    }
    IntMat::from_rows(out.into_iter().map(|(_, r)| r).collect())
}

/// Canonical HNF basis of a full-rank row span (square output).
pub fn hnf(m: &IntMat) -> Result<IntMat> {
    let e = echelon(m);
    if e.rows() != m.cols() {
        return Err(Error::RankDeficient {
            expected: m.cols(),
            found: e.rows(),
        });
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_fixed() {
        let id = IntMat::identity(4);
        assert_eq!(hnf(&id).unwrap(), id);
    }

    #[test]
    fn small_overcomplete_basis() {
        let m = IntMat::from_i64(3, 2, &[2, 0, 0, 2, 1, 1]);
        assert_eq!(hnf(&m).unwrap(), IntMat::from_i64(2, 2, &[1, 1, 0, 2]));
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let m = IntMat::from_i64(2, 2, &[1, 2, 2, 4]);
        assert_eq!(
            hnf(&m),
            Err(Error::RankDeficient {
                expected: 2,
                found: 1
            })
        );
        let e = echelon(&m);
        assert_eq!(e, IntMat::from_i64(1, 2, &[1, 2]));
    }

    #[test]
    fn negative_entries_and_reduction() {
        let m = IntMat::from_i64(2, 2, &[-3, 5, 0, -4]);
        assert_eq!(hnf(&m).unwrap(), IntMat::from_i64(2, 2, &[3, 3, 0, 4]));
    }
}
