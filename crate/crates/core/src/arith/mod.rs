//! Exact integer and rational arithmetic.
//!
//! Nothing in here (or downstream) touches floating point in a decision
//! path. The only `f64` use is a starting guess for integer square-root
//! bounds in [`enumerate`], which is corrected by exact comparisons.

pub mod enumerate;
pub mod hnf;
pub mod matrix;
pub mod symbols;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use enumerate::{lll_reduce, short_vectors, vectors_up_to, GramForm};
pub use hnf::{echelon, hnf};
pub use matrix::{IntMat, RatMat};
pub use symbols::{hilbert_symbol, kronecker, Place};

pub type BigRat = num_rational::BigRational;

pub fn int(n: i64) -> BigInt {
    BigInt::from(n)
}

pub fn rat(n: i64) -> BigRat {
    BigRat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRat {
    BigRat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_from_int(n: &BigInt) -> BigRat {
    BigRat::from_integer(n.clone())
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational.
pub fn rat_valuation(q: &BigRat, p: u64) -> i64 {
    valuation(q.numer(), p) as i64 - valuation(q.denom(), p) as i64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime divisors of |n| by trial division, ascending.
///
/// Panics if a prime factor does not fit in `u64`; every integer fed in
/// here comes from small algebra parameters or discriminants.
pub fn prime_factors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d: u64 = 2;
    loop {
        let db = BigInt::from(d);
        if &db * &db > n {
            break;
        }
        let (q, r) = n.div_rem(&db);
        if r.is_zero() {
            out.push(d);
            n = q;
            while (&n % &db).is_zero() {
                n /= &db;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime factor exceeds u64"));
    }
    out
}

/// All products of subsets of `primes`, ascending.
pub fn squarefree_divisors(primes: &[u64]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &p in primes {
        let extra: Vec<u64> = divs.iter().map(|d| d * p).collect();
        divs.extend(extra);
    }
    divs.sort_unstable();
    divs.dedup();
    divs
}

/// Positive generator of the Z-module spanned by `values` (zero if all vanish).
pub fn rat_content<'a>(values: impl IntoIterator<Item = &'a BigRat>) -> BigRat {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    BigRat::new(num, den)
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn rat_sqrt(q: &BigRat) -> Option<BigRat> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRat::new(n, d))
    } else {
        None
    }
}

pub fn mod_u64(n: &BigInt, p: u64) -> u64 {
    n.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("residue fits u64")
}

/// Reduce a rational with denominator prime to p into Z/p.
pub fn rat_mod(q: &BigRat, p: u64) -> Option<u64> {
    let d = mod_u64(q.denom(), p);
    if d == 0 {
        return None;
    }
    let n = mod_u64(q.numer(), p);
    Some(n * inv_mod(d, p) % p)
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (g, x, _) = ext_gcd(a as i128, p as i128);
    assert_eq!(g, 1, "{a} not invertible mod {p}");
    x.rem_euclid(p as i128) as u64
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Nearest integer, ties toward +infinity.
pub fn round_rat(q: &BigRat) -> BigInt {
    (q + BigRat::new(BigInt::one(), BigInt::from(2)))
        .floor()
        .to_integer()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_and_divisors() {
        assert_eq!(prime_factors(&int(-360)), vec![2, 3, 5]);
        assert_eq!(prime_factors(&int(97)), vec![97]);
        assert_eq!(prime_factors(&int(1)), Vec::<u64>::new());
        assert_eq!(squarefree_divisors(&[3, 5]), vec![1, 3, 5, 15]);
    }

    #[test]
    fn content_of_rationals() {
        let v = [rat_frac(3, 2), rat(6), rat_frac(-9, 4)];
        assert_eq!(rat_content(v.iter()), rat_frac(3, 4));
        assert_eq!(rat_content([rat(0)].iter()), rat(0));
    }

    #[test]
    fn valuations() {
        assert_eq!(valuation(&int(48), 2), 4);
        assert_eq!(rat_valuation(&rat_frac(9, 8), 2), -3);
        assert_eq!(rat_valuation(&rat_frac(9, 8), 3), 2);
    }

    #[test]
    fn modular_helpers() {
        assert_eq!(inv_mod(3, 7), 5);
        assert_eq!(rat_mod(&rat_frac(1, 2), 5), Some(3));
        assert_eq!(rat_mod(&rat_frac(1, 5), 5), None);
        assert_eq!(rat_sqrt(&rat_frac(9, 4)), Some(rat_frac(3, 2)));
        assert_eq!(rat_sqrt(&rat(2)), None);
        assert_eq!(round_rat(&rat_frac(-3, 2)), int(-1));
        assert_eq!(round_rat(&rat_frac(7, 3)), int(2));
    }
}
