//! Lattice points of bounded norm for small positive definite forms.
//!
//! Enumeration runs on an LLL-reduced basis with Fincke-Pohst bounding
//! over an exact rational LDL decomposition. The coordinate range at each
//! level is found by walking outward from the nearest integer to the
//! center and testing each candidate exactly, so no square roots appear.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{round_rat, BigRat, IntMat};
use crate::error::{Error, Result};

/// Integral quadratic form `v -> v M v^T`, with `scale` recording what one
/// unit of the form means to the caller (for quaternion lattices the
/// reduced norm is `scale * v M v^T`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    pub dim: usize,
    pub matrix: IntMat,
    pub scale: BigRat,
}

impl GramForm {
    pub fn new(matrix: IntMat, scale: BigRat) -> Self {
        assert!(matrix.is_symmetric(), "Gram matrix must be symmetric");
        GramForm {
            dim: matrix.rows(),
            matrix,
            scale,
        }
    }

    pub fn value(&self, v: &[i64]) -> BigInt {
        let mut acc = BigInt::zero();
        for i in 0..self.dim {
            if v[i] == 0 {
                continue;
            }
            for j in 0..self.dim {
                if v[j] != 0 {
                    acc += self.matrix.get(i, j) * (v[i] * v[j]);
                }
            }
        }
        acc
    }

    /// Leading principal minors all positive.
    pub fn is_positive_definite(&self) -> bool {
        ldl(&self.matrix).is_some_and(|(_, d)| d.iter().all(Signed::is_positive))
    }
}

/// `M = L D L^T` with `L` unit lower triangular. `None` if a zero pivot
/// shows up before the end.
fn ldl(m: &IntMat) -> Option<(Vec<Vec<BigRat>>, Vec<BigRat>)> {
    let n = m.rows();
    let mut l = vec![vec![BigRat::zero(); n]; n];
    let mut d = vec![BigRat::zero(); n];
    for i in 0..n {
        let mut di = BigRat::from_integer(m.get(i, i).clone());
        for k in 0..i {
            di -= &l[i][k] * &l[i][k] * &d[k];
        }
        if di.is_zero() {
            return None;
        }
        l[i][i] = BigRat::one();
        for j in i + 1..n {
            let mut s = BigRat::from_integer(m.get(j, i).clone());
            for k in 0..i {
                s -= &l[j][k] * &l[i][k] * &d[k];
            }
            l[j][i] = s / &di;
        }
        d[i] = di;
    }
    Some((l, d))
}

/// Exact LLL reduction (delta = 3/4) of a positive definite Gram matrix.
/// Returns the reduced Gram matrix and the transform `U` with
/// `reduced = U M U^T`; rows of `U` are the new basis vectors.
pub fn lll_reduce(m: &IntMat) -> Result<(IntMat, IntMat)> {
    let form = GramForm::new(m.clone(), BigRat::one());
    if !form.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = m.rows();
    let delta = BigRat::new(BigInt::from(3), BigInt::from(4));
    let mut u = IntMat::identity(n);
    let mut g = m.clone();
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (l, _) = ldl(&g).expect("definite");
            let q = round_rat(&l[k][j]);
            if q.is_zero() {
                continue;
            }
            for c in 0..n {
                let v = u.get(k, c) - &q * u.get(j, c);
                u.set(k, c, v);
            }
            g = u.mul(m).mul(&u.transpose());
        }
        let (l, d) = ldl(&g).expect("definite");
        let mu = &l[k][k - 1];
        if d[k] >= (&delta - mu * mu) * &d[k - 1] {
            k += 1;
        } else {
            for c in 0..n {
                let a = u.get(k, c).clone();
                let b = u.get(k - 1, c).clone();
                u.set(k, c, b);
                u.set(k - 1, c, a);
            }
            g = u.mul(m).mul(&u.transpose());
            k = (k - 1).max(1);
        }
    }
    Ok((g, u))
}

/// All nonzero `v` with `v M v^T <= bound`, one of each `±v` (first nonzero
/// coordinate positive), sorted by value and then lexicographically.
pub fn vectors_up_to(g: &GramForm, bound: &BigInt) -> Result<Vec<(Vec<i64>, BigInt)>> {
    let (reduced, u) = lll_reduce(&g.matrix)?;
    let (l, d) = ldl(&reduced).ok_or(Error::NotPositiveDefinite)?;
    let n = g.dim;
    if bound.is_negative() {
        return Ok(Vec::new());
    }
    let mut found: Vec<Vec<i64>> = Vec::new();
    let mut x = vec![0i64; n];
    search(
        n,
        &l,
        &d,
        &mut x,
        &BigRat::from_integer(bound.clone()),
        &mut |y| {
            let v = back_transform(y, &u);
            if let Some(&first) = v.iter().find(|&&c| c != 0) {
                if first > 0 {
                    found.push(v);
                }
            }
        },
    );
    let mut out: Vec<(Vec<i64>, BigInt)> = found
        .into_iter()
        .map(|v| {
            let val = g.value(&v);
            (v, val)
        })
        .collect();
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

/// Exactly the vectors with `v M v^T = target`, one per sign pair, in
/// lexicographic order. Target zero yields the zero vector alone.
pub fn short_vectors(g: &GramForm, target: &BigInt) -> Result<Vec<Vec<i64>>> {
    if target.is_zero() {
        if !g.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        return Ok(vec![vec![0; g.dim]]);
    }
    let mut out: Vec<Vec<i64>> = vectors_up_to(g, target)?
        .into_iter()
        .filter(|(_, val)| val == target)
        .map(|(v, _)| v)
        .collect();
    out.sort();
    Ok(out)
}

fn back_transform(y: &[i64], u: &IntMat) -> Vec<i64> {
    let yb: Vec<BigInt> = y.iter().map(|&c| BigInt::from(c)).collect();
    u.left_apply(&yb)
        .iter()
        .map(|c| c.to_i64().expect("coordinate overflow"))
        .collect()
}

/// Depth-first Fincke-Pohst over levels `i = n-1 .. 0`; `emit` sees every
/// nonzero vector with form value at most the initial budget.
fn search(
    level: usize,
    l: &[Vec<BigRat>],
    d: &[BigRat],
    x: &mut Vec<i64>,
    budget: &BigRat,
    emit: &mut impl FnMut(&[i64]),
) {
    if level == 0 {
        if x.iter().any(|&c| c != 0) {
            emit(x);
        }
        return;
    }
    let i = level - 1;
    let n = x.len();
    let mut c = BigRat::zero();
    for j in i + 1..n {
        if x[j] != 0 {
            c += &l[j][i] * BigInt::from(x[j]);
        }
    }
    let cost = |xi: i64| {
        let t = BigRat::from_integer(BigInt::from(xi)) + &c;
        &d[i] * &t * &t
    };
    let start = round_rat(&-c.clone())
        .to_i64()
        .expect("coordinate overflow");
    let mut visit = |xi: i64, x: &mut Vec<i64>| -> bool {
        let spent = cost(xi);
        if &spent > budget {
            return false;
        }
        x[i] = xi;
        search(i, l, d, x, &(budget - spent), emit);
        x[i] = 0;
        true
    };
    if !visit(start, x) {
        return;
    }
    let mut up = start + 1;
    while visit(up, x) {
        up += 1;
    }
    let mut down = start - 1;
    while visit(down, x) {
        down -= 1;
    }
}
