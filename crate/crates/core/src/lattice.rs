//! Full-rank lattices in a quaternion algebra.
//!
//! A lattice is stored as `basis / denom`, where `basis` is the HNF of the
//! integer coordinate rows and `denom` is as small as possible. The pair is
//! therefore a canonical key: two lattices are equal exactly when their
//! stored data are.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{QuatElement, QuaternionAlgebra};
use crate::arith::{hnf, rat_content, BigRat, GramForm, IntMat, RatMat};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct QuatLattice {
    alg: QuaternionAlgebra,
    denom: BigInt,
    basis: IntMat,
}

impl PartialEq for QuatLattice {
    fn eq(&self, other: &Self) -> bool {
        self.denom == other.denom && self.basis == other.basis && self.alg == other.alg
    }
}

impl Eq for QuatLattice {}

impl Hash for QuatLattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.denom.hash(state);
        self.basis.hash(state);
    }
}

impl PartialOrd for QuatLattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuatLattice {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key_cmp(other)
    }
}

impl QuatLattice {
    /// Lattice spanned by `elems`, which must have rank 4.
    pub fn from_elements(alg: &QuaternionAlgebra, elems: &[QuatElement]) -> Result<Self> {
        let coords: Vec<[BigRat; 4]> = elems.iter().map(|e| e.coords().clone()).collect();
        Self::from_rat_rows(alg, &coords)
    }

    pub fn from_rat_rows(alg: &QuaternionAlgebra, rows: &[[BigRat; 4]]) -> Result<Self> {
        let mut d = BigInt::one();
        for r in rows {
            for c in r {
                d = d.lcm(c.denom());
            }
        }
        let int_rows: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|c| (c * &d).to_integer()).collect())
            .collect();
        if int_rows.is_empty() {
            return Err(Error::RankDeficient {
                expected: 4,
                found: 0,
            });
        }
        let basis = hnf(&IntMat::from_rows(int_rows))?;
        Ok(Self::from_parts(alg.clone(), d, basis))
    }

    /// Canonicalizes an HNF basis and denominator pair.
    fn from_parts(alg: QuaternionAlgebra, denom: BigInt, basis: IntMat) -> Self {
        let mut g = denom.clone();
        for e in basis.entries() {
            g = g.gcd(e);
        }
        if g.is_one() {
            return QuatLattice { alg, denom, basis };
        }
        let rows = basis
            .row_vecs()
            .into_iter()
            .map(|r| r.into_iter().map(|e| e / &g).collect())
            .collect();
        QuatLattice {
            alg,
            denom: denom / &g,
            basis: IntMat::from_rows(rows),
        }
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.alg
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// HNF integer basis; the lattice is its row span divided by `denom`.
    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn basis_elements(&self) -> Vec<QuatElement> {
        (0..4).map(|r| self.element_of(self.basis.row(r))).collect()
    }

    fn element_of(&self, row: &[BigInt]) -> QuatElement {
        let c = std::array::from_fn(|k| BigRat::new(row[k].clone(), self.denom.clone()));
        self.alg.element(c)
    }

    /// Element with the given coordinates in the stored basis.
    pub fn combination(&self, v: &[BigInt]) -> QuatElement {
        let row = self.basis.left_apply(v);
        self.element_of(&row)
    }

    pub fn combination_i64(&self, v: &[i64]) -> QuatElement {
        let vb: Vec<BigInt> = v.iter().map(|&c| BigInt::from(c)).collect();
        self.combination(&vb)
    }

    /// Coordinates of `x` in the stored basis, if they are rational.
    pub fn rat_coordinates(&self, x: &QuatElement) -> [BigRat; 4] {
        // Row-HNF is upper triangular, so v * B = y solves left to right.
        let y: Vec<BigRat> = x.coords().iter().map(|c| c * &self.denom).collect();
        let mut v: [BigRat; 4] = std::array::from_fn(|_| BigRat::zero());
        for j in 0..4 {
            let mut s = y[j].clone();
            for (i, vi) in v.iter().enumerate().take(j) {
                s -= vi * self.basis.get(i, j);
            }
            v[j] = s / BigRat::from_integer(self.basis.get(j, j).clone());
        }
        v
    }

    pub fn coordinates(&self, x: &QuatElement) -> Option<[BigInt; 4]> {
        let v = self.rat_coordinates(x);
        if v.iter().all(BigRat::is_integer) {
            Some(v.map(|c| c.to_integer()))
        } else {
            None
        }
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.coordinates(x).is_some()
    }

    pub fn is_sublattice_of(&self, other: &QuatLattice) -> bool {
        self.basis_elements().iter().all(|b| other.contains(b))
    }

    pub fn sum(&self, other: &QuatLattice) -> QuatLattice {
        let mut elems = self.basis_elements();
        elems.extend(other.basis_elements());
        Self::from_elements(&self.alg, &elems).expect("sum of full lattices has rank 4")
    }

    /// Coordinate dual `{y : <y, x> in Z for all x}` under the standard dot product.
    fn coordinate_dual(&self) -> QuatLattice {
        let b = RatMat::from_rows(
            (0..4)
                .map(|r| {
                    self.basis
                        .row(r)
                        .iter()
                        .map(|e| BigRat::new(e.clone(), self.denom.clone()))
                        .collect()
                })
                .collect(),
        );
        let inv_t = b.inverse().expect("full rank").transpose();
        let rows: Vec<[BigRat; 4]> = (0..4)
            .map(|r| std::array::from_fn(|k| inv_t.get(r, k).clone()))
            .collect();
        Self::from_rat_rows(&self.alg, &rows).expect("dual of a full lattice")
    }

    pub fn intersection(&self, other: &QuatLattice) -> QuatLattice {
        self.coordinate_dual()
            .sum(&other.coordinate_dual())
            .coordinate_dual()
    }

    pub fn scaled(&self, s: &BigRat) -> QuatLattice {
        assert!(!s.is_zero(), "scaling by zero");
        let rows: Vec<[BigRat; 4]> = self
            .basis_elements()
            .iter()
            .map(|e| e.scale(s).into_coords())
            .collect();
        Self::from_rat_rows(&self.alg, &rows).expect("scaled lattice")
    }

    /// `x * L`.
    pub fn left_mul(&self, x: &QuatElement) -> Result<QuatLattice> {
        let elems: Vec<QuatElement> = self.basis_elements().iter().map(|b| x * b).collect();
        Self::from_elements(&self.alg, &elems)
    }

    /// `L * x`.
    pub fn right_mul(&self, x: &QuatElement) -> Result<QuatLattice> {
        let elems: Vec<QuatElement> = self.basis_elements().iter().map(|b| b * x).collect();
        Self::from_elements(&self.alg, &elems)
    }

    /// `x * L * x^-1`.
    pub fn conjugated_by(&self, x: &QuatElement) -> Result<QuatLattice> {
        let xi = x.inverse()?;
        let elems: Vec<QuatElement> = self
            .basis_elements()
            .iter()
            .map(|b| &(x * b) * &xi)
            .collect();
        Self::from_elements(&self.alg, &elems)
    }

    /// Span of all products `x * y`.
    pub fn product(&self, other: &QuatLattice) -> Result<QuatLattice> {
        let lhs = self.basis_elements();
        let rhs = other.basis_elements();
        let mut elems = Vec::with_capacity(16);
        for x in &lhs {
            for y in &rhs {
                elems.push(x * y);
            }
        }
        Self::from_elements(&self.alg, &elems)
    }

    /// Volume of a fundamental domain in coordinate space.
    pub fn covolume(&self) -> BigRat {
        let det: BigInt = (0..4).map(|i| self.basis.get(i, i).clone()).product();
        BigRat::new(det, self.denom.pow(4))
    }

    /// `[other : self]` for `self` inside `other` (rational in general).
    pub fn index_in(&self, other: &QuatLattice) -> BigRat {
        self.covolume() / other.covolume()
    }

    /// Matrix of `trd(b_i * conj(b_j))` on the stored basis.
    pub fn trace_gram(&self) -> RatMat {
        let b: Vec<QuatElement> = self.basis_elements();
        let mut m = RatMat::zeros(4, 4);
        for i in 0..4 {
            for j in i..4 {
                let v = self.alg.trace_pairing(b[i].coords(), b[j].coords());
                m.set(i, j, v.clone());
                m.set(j, i, v);
            }
        }
        m
    }

    /// Reduced norm of the lattice: the positive generator of the
    /// Z-module spanned by `nrd(x)` for `x` in the lattice.
    pub fn norm(&self) -> BigRat {
        let h = self.trace_gram();
        let two = BigRat::from_integer(BigInt::from(2));
        let mut vals = Vec::new();
        for i in 0..4 {
            vals.push(h.get(i, i) / &two);
            for j in i + 1..4 {
                vals.push(h.get(i, j).clone());
            }
        }
        rat_content(vals.iter())
    }

    /// Primitive integral form `M` and scale `s` with `nrd(v) = s * v M v^T`.
    pub fn gram_form(&self) -> GramForm {
        let h = self.trace_gram();
        let g = rat_content((0..4).flat_map(|i| h.row(i).iter()).collect::<Vec<_>>());
        let rows: Vec<Vec<BigInt>> = (0..4)
            .map(|i| h.row(i).iter().map(|e| (e / &g).to_integer()).collect())
            .collect();
        GramForm::new(
            IntMat::from_rows(rows),
            g / BigRat::from_integer(BigInt::from(2)),
        )
    }

    /// All elements of reduced norm exactly `n`, one per sign pair.
    pub fn elements_of_norm(&self, n: &BigRat) -> Result<Vec<QuatElement>> {
        let g = self.gram_form();
        let t = n / &g.scale;
        if !t.is_integer() || t.is_negative() {
            return Ok(Vec::new());
        }
        let vs = crate::arith::short_vectors(&g, &t.to_integer())?;
        Ok(vs
            .iter()
            .filter(|v| v.iter().any(|&c| c != 0))
            .map(|v| self.combination_i64(v))
            .collect())
    }

    /// Compares the canonical keys: denominator first, then HNF entries.
    pub fn key_cmp(&self, other: &QuatLattice) -> Ordering {
        self.denom
            .cmp(&other.denom)
            .then_with(|| self.basis.cmp(&other.basis))
    }

    /// Denominator followed by the 16 HNF entries.
    pub fn key_integers(&self) -> Vec<BigInt> {
        let mut v = vec![self.denom.clone()];
        v.extend(self.basis.entries().iter().cloned());
        v
    }
}
