//! The Bruhat-Tits tree at an unramified prime, realized on global orders
//! that agree with a base order away from that prime.

use num_bigint::BigInt;

use crate::algebra::QuatElement;
use crate::arith::{inv_mod, rat, rat_valuation};
use crate::error::{internal, precondition, Error, Result};
use crate::lattice::QuatLattice;
use crate::order::{right_order_of, QuatOrder};

/// 2x2 matrix over F_p, row-major.
pub type Mat2 = [u64; 4];

/// Explicit isomorphism `O/pO -> M_2(F_p)`.
#[derive(Clone, Debug)]
pub struct ResidueSplitting {
    pub p: u64,
    pub order: QuatOrder,
    /// Images of the order basis.
    pub images: [Mat2; 4],
    /// Residues (order coordinates) of the matrix units e11 and e12.
    pub e11: [u64; 4],
    pub e12: [u64; 4],
}

fn mat_mul(x: &Mat2, y: &Mat2, p: u64) -> Mat2 {
    [
        (x[0] * y[0] + x[1] * y[2]) % p,
        (x[0] * y[1] + x[1] * y[3]) % p,
        (x[2] * y[0] + x[3] * y[2]) % p,
        (x[2] * y[1] + x[3] * y[3]) % p,
    ]
}

fn scalar_multiple_of(x: &[u64; 4], e: &[u64; 4], p: u64) -> Option<u64> {
    // x = c * e for some c in F_p (e nonzero).
    let k = e.iter().position(|&c| c != 0)?;
    let c = x[k] * inv_mod(e[k], p) % p;
    (0..4).all(|i| x[i] == c * e[i] % p).then_some(c)
}

fn residues(p: u64) -> impl Iterator<Item = [u64; 4]> {
    (0..p.pow(4)).map(move |mut n| {
        let mut v = [0u64; 4];
        for k in (0..4).rev() {
            v[k] = n % p;
            n /= p;
        }
        v
    })
}

fn combine(a: u64, x: &[u64; 4], b: u64, y: &[u64; 4], p: u64) -> [u64; 4] {
    std::array::from_fn(|k| (a * x[k] + b * y[k]) % p)
}

/// Searches `O/pO` for a rank-one idempotent and completes it to matrix
/// units; the result is verified on all basis products.
pub fn split_residue(o: &QuatOrder, p: u64) -> Result<ResidueSplitting> {
    if o.algebra().is_ramified_at(p) {
        return Err(Error::Ramified(p));
    }
    if !o.is_maximal_at(p) {
        return Err(Error::NotMaximalAt(p));
    }
    let one = o
        .residue_coords(&o.algebra().one(), p)
        .expect("1 is in the order");
    let basis: Vec<[u64; 4]> = (0..4)
        .map(|k| {
            let mut v = [0u64; 4];
            v[k] = 1;
            v
        })
        .collect();

    let mut e = None;
    for x in residues(p).skip(1) {
        let (t, n) = o.residue_trd_nrd(&x, p);
        if n != 0 {
            continue;
        }
        if t != 0 {
            e = Some(combine(inv_mod(t, p), &x, 0, &x, p));
            break;
        }
        // Nilpotent: pair it with a basis element of nonzero trace product.
        for y in &basis {
            let xy = o.residue_mul(&x, y, p);
            let (t, _) = o.residue_trd_nrd(&xy, p);
            if t != 0 {
                e = Some(combine(inv_mod(t, p), &xy, 0, &xy, p));
                break;
            }
        }
        if e.is_some() {
            break;
        }
    }
    let e11 = e.ok_or_else(|| {
        internal(format!(
            "no idempotent modulo {p}; order not maximal there?"
        ))
    })?;
    let e22 = combine(1, &one, p - 1, &e11, p);

    let e12 = basis
        .iter()
        .map(|b| o.residue_mul(&o.residue_mul(&e11, b, p), &e22, p))
        .find(|v| v.iter().any(|&c| c != 0))
        .ok_or_else(|| internal("no off-diagonal matrix unit"))?;
    let raw21 = basis
        .iter()
        .map(|b| o.residue_mul(&o.residue_mul(&e22, b, p), &e11, p))
        .find(|v| v.iter().any(|&c| c != 0))
        .ok_or_else(|| internal("no off-diagonal matrix unit"))?;
    let c = scalar_multiple_of(&o.residue_mul(&e12, &raw21, p), &e11, p)
        .filter(|&c| c != 0)
        .ok_or_else(|| internal("matrix units do not multiply to e11"))?;
    let e21 = combine(inv_mod(c, p), &raw21, 0, &raw21, p);

    let entry = |l: &[u64; 4], x: &[u64; 4], r: &[u64; 4]| -> Result<u64> {
        let v = o.residue_mul(&o.residue_mul(l, x, p), r, p);
        if v.iter().all(|&c| c == 0) {
            return Ok(0);
        }
        scalar_multiple_of(&v, &e11, p).ok_or_else(|| internal("corner is not a multiple of e11"))
    };
    let mut images = [[0u64; 4]; 4];
    for (k, b) in basis.iter().enumerate() {
        images[k] = [
            entry(&e11, b, &e11)?,
            entry(&e11, b, &e21)?,
            entry(&e12, b, &e11)?,
            entry(&e12, b, &e21)?,
        ];
    }

    let split = ResidueSplitting {
        p,
        order: o.clone(),
        images,
        e11,
        e12,
    };
    for (i, bi) in basis.iter().enumerate() {
        for (j, bj) in basis.iter().enumerate() {
            let lhs = split.image_of_residue(&o.residue_mul(bi, bj, p));
            let rhs = mat_mul(&images[i], &images[j], p);
            if lhs != rhs {
                return Err(internal(format!(
                    "splitting fails on basis product ({i},{j})"
                )));
            }
        }
    }
    if det4(&images, p) == 0 {
        return Err(internal("residue map is not bijective"));
    }
    Ok(split)
}

fn det4(rows: &[Mat2; 4], p: u64) -> u64 {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
    let mut det = 1u64;
    for c in 0..4 {
        let Some(r) = (c..4).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if r != c {
            m.swap(r, c);
            det = (p - det) % p;
        }
        det = det * m[c][c] % p;
        let inv = inv_mod(m[c][c], p);
        for r2 in c + 1..4 {
            let f = m[r2][c] * inv % p;
            for k in c..4 {
                m[r2][k] = (m[r2][k] + p * p - f * m[c][k] % p) % p;
            }
        }
    }
    det
}

impl ResidueSplitting {
    pub fn image_of_residue(&self, x: &[u64; 4]) -> Mat2 {
        let p = self.p;
        let mut out = [0u64; 4];
        for k in 0..4 {
            for c in 0..4 {
                out[c] = (out[c] + x[k] * self.images[k][c]) % p;
            }
        }
        out
    }

    /// Matrix of `x`, for `x` integral at `p` over the order.
    pub fn image(&self, x: &QuatElement) -> Option<Mat2> {
        self.order
            .residue_coords(x, self.p)
            .map(|r| self.image_of_residue(&r))
    }

    /// Points of P^1(F_p): `(0,1)`, then `(1,t)` for `t = 0..p`.
    pub fn lines(&self) -> Vec<(u64, u64)> {
        lines(self.p)
    }

    /// Left ideal `pO + O z` where `z` is a lift of the matrix with kernel `v`.
    pub fn line_ideal(&self, v: (u64, u64)) -> Result<QuatLattice> {
        let p = self.p;
        let z = combine((p - v.1 % p) % p, &self.e11, v.0 % p, &self.e12, p);
        let o = &self.order;
        let mut elems: Vec<QuatElement> = o
            .basis_elements()
            .iter()
            .map(|b| b.scale(&rat(p as i64)))
            .collect();
        let zl = o.lift(&z);
        elems.extend(o.basis_elements().iter().map(|b| b * &zl));
        QuatLattice::from_elements(o.algebra(), &elems)
    }

    /// Index of `g v` in [`lines`], for `g` invertible modulo p.
    pub fn act_on_line(&self, g: &Mat2, v: (u64, u64)) -> Option<usize> {
        let p = self.p;
        let a = (g[0] * v.0 + g[1] * v.1) % p;
        let b = (g[2] * v.0 + g[3] * v.1) % p;
        line_index(normalize_line(a, b, p)?, p)
    }
}

pub fn lines(p: u64) -> Vec<(u64, u64)> {
    let mut out = vec![(0, 1)];
    out.extend((0..p).map(|t| (1, t)));
    out
}

fn normalize_line(a: u64, b: u64, p: u64) -> Option<(u64, u64)> {
    if a == 0 {
        (b != 0).then_some((0, 1))
    } else {
        Some((1, b * inv_mod(a, p) % p))
    }
}

fn line_index(v: (u64, u64), p: u64) -> Option<usize> {
    lines(p).iter().position(|&w| w == v)
}

/// A vertex of the tree: a global order maximal at `p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeVertex {
    pub order: QuatOrder,
    pub depth: u32,
}

/// The `p + 1` neighbors of `o`, one per line in [`lines`] order.
pub fn neighbor_orders(o: &QuatOrder, p: u64) -> Result<Vec<QuatOrder>> {
    let s = split_residue(o, p)?;
    neighbor_orders_with(&s)
}

pub fn neighbor_orders_with(s: &ResidueSplitting) -> Result<Vec<QuatOrder>> {
    s.lines()
        .into_iter()
        .map(|v| right_order_of(&s.line_ideal(v)?))
        .collect()
}

pub fn neighbors(v: &TreeVertex, p: u64) -> Result<Vec<TreeVertex>> {
    Ok(neighbor_orders(&v.order, p)?
        .into_iter()
        .map(|order| TreeVertex {
            order,
            depth: v.depth + 1,
        })
        .collect())
}

/// Distance in the tree between two orders that agree away from `p`.
pub fn tree_distance(a: &QuatOrder, b: &QuatOrder, p: u64) -> Result<u32> {
    if a.algebra() != b.algebra() {
        return Err(Error::MismatchedAlgebras);
    }
    let n = a.lattice().product(b.lattice())?.norm();
    let k = -rat_valuation(&n, p);
    if k < 0 || n * BigInt::from(p).pow(k as u32) != rat(1) {
        return Err(precondition("orders do not agree away from the prime"));
    }
    Ok(k as u32)
}
