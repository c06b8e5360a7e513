//! One-sided ideals, connecting ideals, principality and conjugacy,
//! quadratic embeddings and Eichler orders.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::algebra::QuatElement;
use crate::arith::{is_prime, rat, rat_content, short_vectors, BigRat, GramForm, IntMat};
use crate::error::{precondition, Error, Result};
use crate::lattice::QuatLattice;
use crate::order::{left_order_of, right_order_of, QuatOrder};
use crate::tree::{split_residue, ResidueSplitting};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatIdeal {
    pub lattice: QuatLattice,
    pub left_order: QuatOrder,
    pub right_order: QuatOrder,
    pub norm: BigRat,
}

impl QuatIdeal {
    pub fn new(lattice: QuatLattice) -> Result<Self> {
        let left_order = left_order_of(&lattice)?;
        let right_order = right_order_of(&lattice)?;
        let norm = lattice.norm();
        Ok(QuatIdeal {
            lattice,
            left_order,
            right_order,
            norm,
        })
    }
}

/// `D1 * D2` rescaled to norm `p^k` when the orders sit at distance `k`
/// in a tree; its left order is `D1` and its right order `D2`.
pub fn connecting_ideal(d1: &QuatOrder, d2: &QuatOrder) -> Result<QuatIdeal> {
    if d1.algebra() != d2.algebra() {
        return Err(Error::MismatchedAlgebras);
    }
    let prod = d1.lattice().product(d2.lattice())?;
    let n = prod.norm();
    let lattice = prod.scaled(&n.recip());
    let norm = lattice.norm();
    Ok(QuatIdeal {
        lattice,
        left_order: d1.clone(),
        right_order: d2.clone(),
        norm,
    })
}

/// A generator `x` with `O_l(I) x = I`, found among elements of norm `nrd(I)`.
pub fn is_principal(ideal: &QuatIdeal) -> Result<Option<QuatElement>> {
    if !ideal.lattice.algebra().is_definite() {
        return Err(Error::Indefinite);
    }
    for x in ideal.lattice.elements_of_norm(&ideal.norm)? {
        if ideal.left_order.lattice().right_mul(&x)? == ideal.lattice {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// An element `x` with `x * target * x^-1 = base`, searched in the
/// connecting ideal of `(base, target)` at norms `nrd(J) * d`.
pub fn find_conjugator(
    base: &QuatOrder,
    target: &QuatOrder,
    norms: &[u64],
) -> Result<Option<QuatElement>> {
    if base == target {
        return Ok(Some(base.algebra().one()));
    }
    let j = connecting_ideal(base, target)?;
    for &d in norms {
        for x in j.lattice.elements_of_norm(&(&j.norm * rat(d as i64)))? {
            if target.conjugated_by(&x)? == *base {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

/// An element of `o` with reduced trace `t` and reduced norm `n`.
///
/// Such an `x` gives the pure element `y = 2x - t` of `Z + 2o` with
/// `nrd(y) = 4n - t^2`, so only the rank-3 trace-zero part of `Z + 2o`
/// is enumerated.
pub fn embed_quadratic(o: &QuatOrder, t: i64, n: i64) -> Result<Option<QuatElement>> {
    let alg = o.algebra();
    if !alg.is_definite() {
        return Err(Error::Indefinite);
    }
    let disc = t * t - 4 * n;
    if disc >= 0 {
        return Err(precondition(format!(
            "x^2 - {t}x + {n} is not an imaginary quadratic polynomial"
        )));
    }
    let mut gens = vec![alg.one()];
    gens.extend(o.basis_elements().iter().map(|b| b.scale(&rat(2))));
    let wide = QuatLattice::from_elements(alg, &gens)?.basis_elements();
    let traces: Vec<BigInt> = wide.iter().map(|b| b.trd().to_integer()).collect();
    let pure: Vec<QuatElement> = kernel_basis(&traces)
        .iter()
        .map(|c| {
            c.iter().zip(&wide).fold(alg.zero(), |acc, (k, b)| {
                &acc + &b.scale(&BigRat::from_integer(k.clone()))
            })
        })
        .collect();
    let pairing = |x: &QuatElement, y: &QuatElement| alg.trace_pairing(x.coords(), y.coords());
    let h: Vec<Vec<BigRat>> = pure
        .iter()
        .map(|x| pure.iter().map(|y| pairing(x, y)).collect())
        .collect();
    let content = rat_content(h.iter().flatten().collect::<Vec<_>>());
    let rows: Vec<Vec<BigInt>> = h
        .iter()
        .map(|r| r.iter().map(|e| (e / &content).to_integer()).collect())
        .collect();
    let form = GramForm::new(IntMat::from_rows(rows), &content / rat(2));
    let target = rat(-disc) / &form.scale;
    if !target.is_integer() {
        return Ok(None);
    }
    let half = BigRat::new(BigInt::from(1), BigInt::from(2));
    for v in short_vectors(&form, &target.to_integer())? {
        let y = v
            .iter()
            .zip(&pure)
            .fold(alg.zero(), |acc, (&k, b)| &acc + &b.scale(&rat(k)));
        // One vector per sign pair comes back; both signs are candidates.
        for y in [y.clone(), -&y] {
            let x = (&alg.scalar(rat(t)) + &y).scale(&half);
            if o.contains(&x) {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

/// Integer basis of the kernel of the row vector `w`, by unimodular
/// column operations.
fn kernel_basis(w: &[BigInt]) -> Vec<Vec<BigInt>> {
    let n = w.len();
    let mut w = w.to_vec();
    let mut cols: Vec<Vec<BigInt>> = (0..n)
        .map(|j| (0..n).map(|i| BigInt::from(i32::from(i == j))).collect())
        .collect();
    loop {
        let Some(k) = (0..n)
            .filter(|&j| !w[j].is_zero())
            .min_by_key(|&j| w[j].abs())
        else {
            break;
        };
        let mut changed = false;
        for j in 0..n {
            if j == k || w[j].is_zero() {
                continue;
            }
            let q = w[j].div_floor(&w[k]);
            let step = &q * &w[k];
            w[j] -= step;
            let ck = cols[k].clone();
            for (a, b) in cols[j].iter_mut().zip(&ck) {
                *a -= &q * b;
            }
            changed = true;
        }
        if !changed {
            break;
        }
    }
    (0..n)
        .filter(|&j| w[j].is_zero())
        .map(|j| cols[j].clone())
        .collect()
}

/// The `p + 1` left ideals of `d` of reduced norm `p`, in line order.
pub fn left_ideals_norm_p(d: &QuatOrder, p: u64) -> Result<Vec<QuatIdeal>> {
    let s = split_residue(d, p)?;
    left_ideals_with(&s)
}

pub fn left_ideals_with(s: &ResidueSplitting) -> Result<Vec<QuatIdeal>> {
    s.lines()
        .into_iter()
        .map(|v| {
            let lattice = s.line_ideal(v)?;
            let right_order = right_order_of(&lattice)?;
            let norm = lattice.norm();
            Ok(QuatIdeal {
                lattice,
                left_order: s.order.clone(),
                right_order,
                norm,
            })
        })
        .collect()
}

/// Intersection of `d` with one `q`-neighbor for each prime `q | level`.
pub fn eichler_order(d: &QuatOrder, level: u64) -> Result<QuatOrder> {
    if !d.is_maximal() {
        return Err(precondition(
            "Eichler orders are built from a maximal order",
        ));
    }
    if level == 0 || level.is_multiple_of(2) {
        return Err(precondition(format!(
            "level {level} must be odd and positive"
        )));
    }
    let disc = d.reduced_discriminant();
    let mut primes = Vec::new();
    let mut rest = level;
    let mut q = 3;
    while rest > 1 {
        if rest.is_multiple_of(q) {
            rest /= q;
            if rest.is_multiple_of(q) {
                return Err(precondition(format!("level {level} is not squarefree")));
            }
            primes.push(q);
        }
        q += 2;
    }
    let mut out = d.clone();
    for q in primes {
        debug_assert!(is_prime(q));
        if (disc % BigInt::from(q)).is_zero() {
            return Err(precondition(format!(
                "level {level} is not coprime to the discriminant {disc}"
            )));
        }
        let s = split_residue(d, q)?;
        let lattice = s.line_ideal(s.lines()[0])?;
        let neighbor = right_order_of(&lattice)?;
        out = out.intersection(&neighbor)?;
    }
    Ok(out)
}

/// True when every element of `gens` lies in `o`.
pub fn contains_all(o: &QuatOrder, gens: &[QuatElement]) -> bool {
    gens.iter().all(|g| o.contains(g))
}

/// Sign-normalized copy: first nonzero coordinate positive.
pub fn sign_normalized(x: &QuatElement) -> QuatElement {
    match x.coords().iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => -x,
        _ => x.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::QuaternionAlgebra;
    use crate::arith::rat_frac;
    use crate::order::maximal_order;
    use crate::tree::tree_distance;

    #[test]
    fn connecting_ideal_basics() {
        let o = maximal_order(&QuaternionAlgebra::from_ints(-3, -3).unwrap()).unwrap();
        let j = connecting_ideal(&o, &o).unwrap();
        assert_eq!(&j.lattice, o.lattice());
        assert_eq!(j.norm, rat(1));
        let u = is_principal(&j).unwrap().unwrap();
        assert_eq!(u.nrd(), rat(1));
        let scaled = QuatIdeal::new(o.lattice().scaled(&rat(5))).unwrap();
        assert_eq!(scaled.norm, rat(25));
        let g = is_principal(&scaled).unwrap().unwrap();
        assert_eq!(g.nrd(), rat(25));
        for i in left_ideals_norm_p(&o, 2).unwrap() {
            assert_eq!(i.norm, rat(2));
            assert_eq!(i.lattice.index_in(o.lattice()), rat(4));
            assert_eq!(
                i.right_order.reduced_discriminant(),
                o.reduced_discriminant()
            );
            let c = connecting_ideal(&o, &i.right_order).unwrap();
            assert_eq!(c.norm, rat(2));
            assert_eq!(left_order_of(&c.lattice).unwrap(), o);
            assert_eq!(right_order_of(&c.lattice).unwrap(), i.right_order);
            // Type number one: every norm-2 ideal is principal.
            let x = is_principal(&i).unwrap().unwrap();
            assert_eq!(o.lattice().right_mul(&x).unwrap(), i.lattice);
            assert_eq!(
                i.lattice
                    .elements_of_norm(&rat(2))
                    .unwrap()
                    .iter()
                    .map(|e| e.nrd())
                    .min(),
                Some(rat(2))
            );
        }
    }

    #[test]
    fn quadratic_embeddings() {
        let h = QuaternionAlgebra::from_ints(-1, -1).unwrap();
        let hur = maximal_order(&h).unwrap();
        let w = embed_quadratic(&hur, -1, 1).unwrap().unwrap();
        assert_eq!(&(&w * &w) + &w, -&h.one());
        let i = embed_quadratic(&hur, 0, 1).unwrap().unwrap();
        assert_eq!(&i * &i, -&h.one());
        assert!(embed_quadratic(&hur, 2, 1).is_err());
        let a7 = maximal_order(&QuaternionAlgebra::from_ints(-1, -7).unwrap()).unwrap();
        assert_eq!(embed_quadratic(&a7, -1, 1).unwrap(), None);
        let x = embed_quadratic(&a7, 1, 2).unwrap().unwrap();
        assert_eq!((x.trd(), x.nrd()), (rat(1), rat(2)));
        // Oracle: the full norm enumeration of the order agrees on existence.
        for (t, n) in [(0, 3), (1, 3), (0, 7), (1, 4), (0, 12), (0, 48)] {
            let brute = a7
                .lattice()
                .elements_of_norm(&rat(n))
                .unwrap()
                .into_iter()
                .any(|x| x.trd().abs() == rat(t));
            let found = embed_quadratic(&a7, t, n).unwrap();
            assert_eq!(found.is_some(), brute, "t={t} n={n}");
            if let Some(x) = found {
                assert!(a7.contains(&x) && x.trd() == rat(t) && x.nrd() == rat(n));
            }
        }
    }

    #[test]
    fn eichler_discriminants() {
        let a3 = maximal_order(&QuaternionAlgebra::from_ints(-3, -3).unwrap()).unwrap();
        assert_eq!(eichler_order(&a3, 1).unwrap(), a3);
        let e = eichler_order(&a3, 5).unwrap();
        assert_eq!(e.reduced_discriminant(), &BigInt::from(15));
        let a7 = maximal_order(&QuaternionAlgebra::from_ints(-1, -7).unwrap()).unwrap();
        let e = eichler_order(&a7, 3).unwrap();
        assert_eq!(e.reduced_discriminant(), &BigInt::from(21));
        assert!(eichler_order(&a3, 9).is_err());
        assert!(eichler_order(&a3, 3).is_err());
        assert!(eichler_order(&a3, 4).is_err());
        // The hereditary step of maximalization recovers a maximal order.
        let back = crate::order::maximalize(&eichler_order(&a7, 15).unwrap()).unwrap();
        assert_eq!(back.reduced_discriminant(), &BigInt::from(7));
    }

    #[test]
    fn distance_two_connecting_ideal() {
        let o = maximal_order(&QuaternionAlgebra::from_ints(-3, -3).unwrap()).unwrap();
        let n1 = crate::tree::neighbor_orders(&o, 2).unwrap()[0].clone();
        let n2 = crate::tree::neighbor_orders(&n1, 2)
            .unwrap()
            .into_iter()
            .find(|n| *n != o)
            .unwrap();
        assert_eq!(tree_distance(&o, &n2, 2).unwrap(), 2);
        let j = connecting_ideal(&o, &n2).unwrap();
        assert_eq!(j.norm, rat(4));
        let half = rat_frac(1, 2);
        assert_eq!(j.lattice.scaled(&half).norm(), rat(1));
    }
}
