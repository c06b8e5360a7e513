//! Orders: construction, discriminants, maximalization, unit groups.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_traits::Signed;

use crate::algebra::{QuatElement, QuaternionAlgebra};
use crate::arith::{
    inv_mod, mod_u64, prime_factors, rat, rat_mod, squarefree_divisors, valuation, BigRat,
};
use crate::error::{internal, precondition, Error, Result};
use crate::lattice::QuatLattice;

struct OrderData {
    lattice: QuatLattice,
    discriminant: BigInt,
    /// `b_i * b_j = sum_k structure[i][j][k] * b_k`.
    structure: Vec<Vec<[BigInt; 4]>>,
    units: OnceLock<Result<Vec<QuatElement>>>,
}

/// A full-rank lattice containing 1 and closed under multiplication.
/// Cheap to clone; equality, hashing and ordering follow the lattice key.
#[derive(Clone)]
pub struct QuatOrder(Arc<OrderData>);

impl fmt::Debug for QuatOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuatOrder")
            .field("denom", self.0.lattice.denom())
            .field("basis", self.0.lattice.basis())
            .field("discriminant", &self.0.discriminant)
            .finish()
    }
}

impl PartialEq for QuatOrder {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.lattice == other.0.lattice
    }
}

impl Eq for QuatOrder {}

impl Hash for QuatOrder {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.lattice.hash(state);
    }
}

impl PartialOrd for QuatOrder {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuatOrder {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.lattice.key_cmp(&other.0.lattice)
    }
}

/// Units of an order in a definite algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitGroup {
    pub elements: Vec<QuatElement>,
    pub order: usize,
}

impl QuatOrder {
    /// Accepts `lattice` if it contains 1 and is closed under products.
    pub fn from_lattice(lattice: QuatLattice) -> Result<Self> {
        let alg = lattice.algebra().clone();
        if !lattice.contains(&alg.one()) {
            return Err(Error::NotIntegral("lattice does not contain 1".into()));
        }
        let b = lattice.basis_elements();
        let mut structure = Vec::with_capacity(4);
        for x in &b {
            let mut row = Vec::with_capacity(4);
            for y in &b {
                let c = lattice.coordinates(&(x * y)).ok_or_else(|| {
                    Error::NotIntegral("lattice is not closed under multiplication".into())
                })?;
                row.push(c);
            }
            structure.push(row);
        }
        let det = lattice.trace_gram().determinant().abs();
        if !det.is_integer() {
            return Err(Error::NotIntegral(
                "trace form has a non-integral determinant".into(),
            ));
        }
        let det = det.to_integer();
        let d = det.sqrt();
        if &d * &d != det {
            return Err(internal("discriminant of an order is not a square"));
        }
        Ok(QuatOrder(Arc::new(OrderData {
            lattice,
            discriminant: d,
            structure,
            units: OnceLock::new(),
        })))
    }

    pub fn lattice(&self) -> &QuatLattice {
        &self.0.lattice
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        self.0.lattice.algebra()
    }

    pub fn basis_elements(&self) -> Vec<QuatElement> {
        self.0.lattice.basis_elements()
    }

    /// Reduced discriminant: `d` with `d^2 = |det trd(b_i conj(b_j))|`.
    pub fn reduced_discriminant(&self) -> &BigInt {
        &self.0.discriminant
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.0.lattice.contains(x)
    }

    pub fn structure_constants(&self) -> &[Vec<[BigInt; 4]>] {
        &self.0.structure
    }

    /// True when the p-part of the discriminant is that of a maximal order.
    pub fn is_maximal_at(&self, p: u64) -> bool {
        let v = valuation(&self.0.discriminant, p);
        v == u32::from(self.algebra().is_ramified_at(p))
    }

    pub fn is_maximal(&self) -> bool {
        prime_factors(&self.0.discriminant)
            .into_iter()
            .all(|p| self.is_maximal_at(p))
    }

    /// Finite ramified primes times the level (for Eichler orders of
    /// squarefree level this is the whole discriminant).
    pub fn level(&self) -> BigInt {
        let ram = BigInt::from(self.algebra().ramified_places().discriminant());
        &self.0.discriminant / ram
    }

    pub fn conjugated_by(&self, x: &QuatElement) -> Result<QuatOrder> {
        QuatOrder::from_lattice(self.0.lattice.conjugated_by(x)?)
    }

    pub fn intersection(&self, other: &QuatOrder) -> Result<QuatOrder> {
        QuatOrder::from_lattice(self.0.lattice.intersection(&other.0.lattice))
    }

    /// All elements of nrd 1, closed under products and inverses.
    pub fn unit_group(&self) -> Result<UnitGroup> {
        let elements = self
            .0
            .units
            .get_or_init(|| {
                if !self.algebra().is_definite() {
                    return Err(Error::Indefinite);
                }
                let half = self.0.lattice.elements_of_norm(&rat(1))?;
                let mut all: Vec<QuatElement> = Vec::with_capacity(2 * half.len());
                for u in half {
                    all.push(-&u);
                    all.push(u);
                }
                all.sort_by(|a, b| a.coords().cmp(b.coords()));
                Ok(all)
            })
            .clone()?;
        let order = elements.len();
        Ok(UnitGroup { elements, order })
    }

    /// `|units| / 2`.
    pub fn unit_order_mod_sign(&self) -> Result<usize> {
        Ok(self.unit_group()?.order / 2)
    }

    /// Elements `x` of the order with `nrd(x) = d` and `x O x^-1 = O`, for
    /// each `d` in `norms`, one per sign pair. With `d` squarefree these
    /// represent the normalizer modulo rational scalars.
    pub fn normalizer_elements(&self, norms: &[u64]) -> Result<Vec<(u64, QuatElement)>> {
        if !self.algebra().is_definite() {
            return Err(Error::Indefinite);
        }
        let mut out = Vec::new();
        for &d in norms {
            for x in self.0.lattice.elements_of_norm(&rat(d as i64))? {
                if d == 1 || self.conjugated_by(&x)? == *self {
                    out.push((d, x));
                }
            }
        }
        Ok(out)
    }

    /// Squarefree divisors of the reduced discriminant, the norms that
    /// carry the normalizer. Errors when the discriminant is not squarefree.
    pub fn normalizer_norms(&self) -> Result<Vec<u64>> {
        let primes = prime_factors(&self.0.discriminant);
        let sq: BigInt = primes.iter().map(|&q| BigInt::from(q)).product();
        if sq != self.0.discriminant {
            return Err(precondition(format!(
                "reduced discriminant {} is not squarefree",
                self.0.discriminant
            )));
        }
        Ok(squarefree_divisors(&primes))
    }

    /// Coordinates of `x` modulo `p` in the order basis; `None` when some
    /// coordinate has `p` in its denominator.
    pub fn residue_coords(&self, x: &QuatElement, p: u64) -> Option<[u64; 4]> {
        let v = self.0.lattice.rat_coordinates(x);
        let mut out = [0u64; 4];
        for k in 0..4 {
            out[k] = rat_mod(&v[k], p)?;
        }
        Some(out)
    }

    /// Product of residues in `O / pO`.
    pub fn residue_mul(&self, x: &[u64; 4], y: &[u64; 4], p: u64) -> [u64; 4] {
        let mut out = [0u64; 4];
        for i in 0..4 {
            if x[i] == 0 {
                continue;
            }
            for j in 0..4 {
                if y[j] == 0 {
                    continue;
                }
                let xy = x[i] * y[j] % p;
                for k in 0..4 {
                    out[k] = (out[k] + xy * mod_u64(&self.0.structure[i][j][k], p)) % p;
                }
            }
        }
        out
    }

    /// Lifts residue coordinates to an element with coefficients in `[0, p)`.
    pub fn lift(&self, x: &[u64; 4]) -> QuatElement {
        let v: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        self.0.lattice.combination(&v)
    }

    /// `(trd, nrd)` of a residue class, both modulo `p`.
    pub fn residue_trd_nrd(&self, x: &[u64; 4], p: u64) -> (u64, u64) {
        let e = self.lift(x);
        let t = rat_mod(&e.trd(), p).expect("order elements are integral");
        let n = rat_mod(&e.nrd(), p).expect("order elements are integral");
        (t, n)
    }
}

/// Smallest order containing `gens`: the span of 1 and the generators,
/// saturated under products until stable.
pub fn order_from_generators(alg: &QuaternionAlgebra, gens: &[QuatElement]) -> Result<QuatOrder> {
    for g in gens {
        if !g.trd().is_integer() || !g.nrd().is_integer() {
            return Err(Error::NotIntegral(format!("generator {g} is not integral")));
        }
    }
    let mut elems = vec![alg.one()];
    elems.extend(gens.iter().cloned());
    // Products of up to three generators already span the order in rank 4;
    // saturation below covers anything else.
    let mut words = elems.clone();
    for _ in 0..2 {
        let mut next = Vec::new();
        for w in &words {
            for g in gens {
                next.push(w * g);
            }
        }
        elems.extend(next.iter().cloned());
        words = next;
    }
    let mut lattice = QuatLattice::from_elements(alg, &elems)?;
    for _ in 0..32 {
        let next = lattice.sum(&lattice.product(&lattice)?);
        if next == lattice {
            return QuatOrder::from_lattice(lattice);
        }
        lattice = next;
    }
    Err(Error::NotIntegral(
        "saturation under multiplication did not stabilize".into(),
    ))
}

/// `{x : x L ⊆ L}`.
pub fn left_order_of(l: &QuatLattice) -> Result<QuatOrder> {
    let mut acc: Option<QuatLattice> = None;
    for b in l.basis_elements() {
        let piece = l.right_mul(&b.inverse()?)?;
        acc = Some(match acc {
            None => piece,
            Some(a) => a.intersection(&piece),
        });
    }
    QuatOrder::from_lattice(acc.expect("four basis elements"))
}

/// `{x : L x ⊆ L}`.
pub fn right_order_of(l: &QuatLattice) -> Result<QuatOrder> {
    let mut acc: Option<QuatLattice> = None;
    for b in l.basis_elements() {
        let piece = l.left_mul(&b.inverse()?)?;
        acc = Some(match acc {
            None => piece,
            Some(a) => a.intersection(&piece),
        });
    }
    QuatOrder::from_lattice(acc.expect("four basis elements"))
}

/// Lattice spanned by `pO` and lifts of the given residues.
fn lattice_mod_p(o: &QuatOrder, p: u64, residues: &[[u64; 4]]) -> Result<QuatLattice> {
    let mut elems: Vec<QuatElement> = o
        .basis_elements()
        .iter()
        .map(|b| b.scale(&rat(p as i64)))
        .collect();
    elems.extend(residues.iter().map(|r| o.lift(r)));
    QuatLattice::from_elements(o.algebra(), &elems)
}

/// Basis of the null space of a matrix over F_p (vectors `v` with `v M = 0`).
fn left_kernel_mod_p(m: &[[u64; 4]; 4], p: u64) -> Vec<[u64; 4]> {
    // Row-reduce the transpose and read off the kernel of M^T.
    let mut a: Vec<Vec<u64>> = (0..4)
        .map(|j| (0..4).map(|i| m[i][j] % p).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..4 {
        let Some(r) = (row..4).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(row, r);
        let inv = inv_mod(a[row][col], p);
        for k in 0..4 {
            a[row][k] = a[row][k] * inv % p;
        }
        for r2 in 0..4 {
            if r2 != row && a[r2][col] != 0 {
                let f = a[r2][col];
                for k in 0..4 {
                    a[r2][k] = (a[r2][k] + p * p - f * a[row][k] % p) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let free: Vec<usize> = (0..4).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = [0u64; 4];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[r][f]) % p;
            }
            v
        })
        .collect()
}

/// Preimage in `O` of the radical of `O/pO` (as computed from the trace
/// form, with the norm condition added at 2).
pub fn radical_at(o: &QuatOrder, p: u64) -> Result<QuatLattice> {
    let b = o.basis_elements();
    let mut t = [[0u64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            t[i][j] = rat_mod(&(&b[i] * &b[j]).trd(), p).expect("integral trace");
        }
    }
    let mut kernel = left_kernel_mod_p(&t, p);
    if p == 2 {
        // nrd is additive modulo 2 on the trace kernel.
        let nrds: Vec<u64> = kernel.iter().map(|v| o.residue_trd_nrd(v, 2).1).collect();
        if let Some(pivot) = nrds.iter().position(|&n| n == 1) {
            let pv = kernel[pivot];
            let mut reduced = Vec::new();
            for (k, v) in kernel.iter().enumerate() {
                if k == pivot {
                    continue;
                }
                if nrds[k] == 1 {
                    reduced.push(std::array::from_fn(|c| (v[c] + pv[c]) % 2));
                } else {
                    reduced.push(*v);
                }
            }
            kernel = reduced;
        }
    }
    lattice_mod_p(o, p, &kernel)
}

/// Enlarges `o` at `p` until the p-part of its discriminant is minimal.
pub fn p_maximalize(o: &QuatOrder, p: u64) -> Result<QuatOrder> {
    let ramified = o.algebra().is_ramified_at(p);
    let target = u32::from(ramified);
    let mut cur = o.clone();
    for _ in 0..64 {
        let v = valuation(cur.reduced_discriminant(), p);
        if v == target {
            return Ok(cur);
        }
        let j = radical_at(&cur, p)?;
        let bigger = left_order_of(&j)?;
        if bigger != cur {
            cur = bigger;
            continue;
        }
        if ramified || v != 1 {
            return Err(internal(format!("maximalization at {p} made no progress")));
        }
        // Hereditary but not maximal: O/J is F_p x F_p. Split it with an
        // idempotent and take the left order of the resulting ideal.
        let e = split_idempotent(&cur, p)?;
        let l = j.sum(&cur.lattice().right_mul(&e)?);
        let bigger = left_order_of(&l)?;
        if bigger == cur {
            return Err(internal(format!("idempotent step at {p} made no progress")));
        }
        cur = bigger;
    }
    Err(internal(format!("maximalization at {p} exceeded 64 steps")))
}

fn split_idempotent(o: &QuatOrder, p: u64) -> Result<QuatElement> {
    for b in o.basis_elements() {
        let t = rat_mod(&b.trd(), p).expect("integral");
        let n = rat_mod(&b.nrd(), p).expect("integral");
        let roots: Vec<u64> = (0..p)
            .filter(|&x| (x * x + p * p - t * x % p + n).is_multiple_of(p))
            .collect();
        if roots.len() == 2 {
            let (l1, l2) = (roots[0], roots[1]);
            let shift = o.algebra().scalar(rat(l2 as i64));
            let c = inv_mod((l1 + p - l2) % p, p);
            return Ok((&b - &shift).scale(&rat(c as i64)));
        }
    }
    Err(internal(format!("no splitting element modulo {p}")))
}

/// Maximal order of the algebra: start from `Z<d_a i, d_b j>` and
/// maximalize at every prime dividing its discriminant.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<QuatOrder> {
    let di = BigRat::from_integer(alg.a().denom().clone());
    let dj = BigRat::from_integer(alg.b().denom().clone());
    let base = order_from_generators(alg, &[alg.i().scale(&di), alg.j().scale(&dj)])?;
    maximalize(&base)
}

/// Maximal order containing `o`.
pub fn maximalize(o: &QuatOrder) -> Result<QuatOrder> {
    let mut cur = o.clone();
    for p in prime_factors(o.reduced_discriminant()) {
        cur = p_maximalize(&cur, p)?;
    }
    if !cur.is_maximal() {
        return Err(internal("maximalization left a non-maximal order"));
    }
    Ok(cur)
}

/// Smallest `k` with `p^k * big ⊆ small` after localizing at `p`, for
/// `small ⊆ big`.
pub fn conductor_exponent(small: &QuatOrder, big: &QuatOrder, p: u64) -> u32 {
    let mut k = 0;
    loop {
        let pk = BigRat::from_integer(BigInt::from(p).pow(k));
        let widened = small.lattice().sum(&big.lattice().scaled(&pk));
        let idx = small.lattice().index_in(&widened).to_integer();
        if valuation(&idx, p) == 0 {
            return k;
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_frac;

    fn lipschitz() -> QuatOrder {
        let h = QuaternionAlgebra::from_ints(-1, -1).unwrap();
        order_from_generators(&h, &[h.i(), h.j()]).unwrap()
    }

    /// Independent discriminant oracle: determinant of the 4x4 trace matrix
    /// written out by hand for a diagonal basis.
    #[test]
    fn lipschitz_and_hurwitz() {
        let l = lipschitz();
        assert_eq!(l.reduced_discriminant(), &BigInt::from(4));
        let h = l.algebra().clone();
        let half = rat_frac(1, 2);
        let g = h.element([half.clone(), half.clone(), half.clone(), half]);
        let hur = order_from_generators(&h, &[h.i(), h.j(), g]).unwrap();
        assert_eq!(hur.reduced_discriminant(), &BigInt::from(2));
        assert_eq!(p_maximalize(&l, 2).unwrap(), hur);
        assert_eq!(p_maximalize(&hur, 2).unwrap(), hur);
        let units = hur.unit_group().unwrap();
        assert_eq!(units.order, 24);
        assert_eq!(l.unit_group().unwrap().order, 8);
    }

    #[test]
    fn units_are_closed() {
        let hur = maximal_order(&QuaternionAlgebra::from_ints(-1, -1).unwrap()).unwrap();
        let units = hur.unit_group().unwrap().elements;
        for u in &units {
            for v in &units {
                assert!(units.contains(&(u * v)));
            }
            assert!(units.contains(&u.inverse().unwrap()));
        }
    }

    #[test]
    fn rank_errors() {
        let h = QuaternionAlgebra::from_ints(-1, -1).unwrap();
        assert!(matches!(
            order_from_generators(&h, &[]),
            Err(Error::RankDeficient { .. })
        ));
        assert!(matches!(
            order_from_generators(&h, &[h.i()]),
            Err(Error::RankDeficient { .. })
        ));
        let bad = h.element([rat_frac(1, 3), rat(0), rat(0), rat(0)]);
        assert!(matches!(
            order_from_generators(&h, &[bad, h.i(), h.j()]),
            Err(Error::NotIntegral(_))
        ));
    }

    #[test]
    fn maximal_orders_of_small_algebras() {
        for (a, b, d, units) in [
            (-1, -1, 2, 24),
            (-3, -3, 3, 12),
            (-7, -1, 7, 4),
            (-1, -3, 3, 12),
            (-2, -5, 5, 6),
        ] {
            let alg = QuaternionAlgebra::from_ints(a, b).unwrap();
            let o = maximal_order(&alg).unwrap();
            assert_eq!(o.reduced_discriminant(), &BigInt::from(d), "({a},{b})");
            assert_eq!(o.unit_group().unwrap().order, units, "({a},{b})");
            assert!(o.is_maximal());
        }
    }

    #[test]
    fn example_orders_in_minus3_minus3() {
        let alg = QuaternionAlgebra::from_ints(-3, -3).unwrap();
        let half = rat_frac(1, 2);
        let eta = alg.element([-half.clone(), half, rat(0), rat(0)]);
        let zeta = order_from_generators(&alg, &[eta, alg.j()]).unwrap();
        assert!(zeta.contains(&alg.i()));
        let up = p_maximalize(&zeta, 2).unwrap();
        assert_eq!(valuation(up.reduced_discriminant(), 2), 0);
        let zij = order_from_generators(&alg, &[alg.i(), alg.j()]).unwrap();
        assert_eq!(zij.reduced_discriminant(), &BigInt::from(36));
    }
}
