//! Quaternion algebras (a,b) over the rationals and their elements.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::{hilbert_symbol, prime_factors, rat, BigRat, Place};
use crate::error::{Error, Result};

/// Places where an algebra ramifies.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RamifiedPlaces {
    pub primes: Vec<u64>,
    pub infinite: bool,
}

impl RamifiedPlaces {
    /// Product of the finite ramified primes.
    pub fn discriminant(&self) -> u64 {
        self.primes.iter().product()
    }

    pub fn contains_prime(&self, p: u64) -> bool {
        self.primes.contains(&p)
    }

    pub fn count(&self) -> usize {
        self.primes.len() + usize::from(self.infinite)
    }
}

#[derive(Debug)]
struct AlgebraData {
    a: BigRat,
    b: BigRat,
    ab: BigRat,
    ramified: RamifiedPlaces,
}

/// The algebra with basis `1, i, j, ij` and `i^2 = a`, `j^2 = b`, `ij = -ji`.
/// Cheap to clone; equality is equality of `(a, b)`.
#[derive(Clone, Debug)]
pub struct QuaternionAlgebra(Arc<AlgebraData>);

impl PartialEq for QuaternionAlgebra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.a == other.0.a && self.0.b == other.0.b)
    }
}

impl Eq for QuaternionAlgebra {}

impl QuaternionAlgebra {
    pub fn new(a: BigRat, b: BigRat) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::Precondition(
                "algebra parameters must be nonzero".into(),
            ));
        }
        let ramified = compute_ramification(&a, &b);
        let ab = &a * &b;
        Ok(QuaternionAlgebra(Arc::new(AlgebraData {
            a,
            b,
            ab,
            ramified,
        })))
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(rat(a), rat(b))
    }

    pub fn a(&self) -> &BigRat {
        &self.0.a
    }

    pub fn b(&self) -> &BigRat {
        &self.0.b
    }

    pub fn ramified_places(&self) -> &RamifiedPlaces {
        &self.0.ramified
    }

    pub fn is_definite(&self) -> bool {
        self.0.ramified.infinite
    }

    pub fn is_ramified_at(&self, p: u64) -> bool {
        self.0.ramified.contains_prime(p)
    }

    pub fn element(&self, coords: [BigRat; 4]) -> QuatElement {
        QuatElement {
            alg: self.clone(),
            c: coords,
        }
    }

    pub fn element_i64(&self, coords: [i64; 4]) -> QuatElement {
        self.element(coords.map(rat))
    }

    pub fn scalar(&self, s: BigRat) -> QuatElement {
        self.element([s, BigRat::zero(), BigRat::zero(), BigRat::zero()])
    }

    pub fn one(&self) -> QuatElement {
        self.element_i64([1, 0, 0, 0])
    }

    pub fn zero(&self) -> QuatElement {
        self.element_i64([0, 0, 0, 0])
    }

    pub fn i(&self) -> QuatElement {
        self.element_i64([0, 1, 0, 0])
    }

    pub fn j(&self) -> QuatElement {
        self.element_i64([0, 0, 1, 0])
    }

    pub fn k(&self) -> QuatElement {
        self.element_i64([0, 0, 0, 1])
    }

    /// `trd(x * conj(y))` as a bilinear form on coordinates.
    pub fn trace_pairing(&self, x: &[BigRat; 4], y: &[BigRat; 4]) -> BigRat {
        let d = &self.0;
        let two = rat(2);
        two * (&x[0] * &y[0] - &d.a * &x[1] * &y[1] - &d.b * &x[2] * &y[2] + &d.ab * &x[3] * &y[3])
    }
}

impl fmt::Display for QuaternionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.0.a, self.0.b)
    }
}

fn compute_ramification(a: &BigRat, b: &BigRat) -> RamifiedPlaces {
    let mut candidates = vec![2u64];
    for n in [a.numer(), a.denom(), b.numer(), b.denom()] {
        candidates.extend(prime_factors(n));
    }
    candidates.sort_unstable();
    candidates.dedup();
    let primes = candidates
        .into_iter()
        .filter(|&p| hilbert_symbol(a, b, Place::Prime(p)) == -1)
        .collect();
    RamifiedPlaces {
        primes,
        infinite: hilbert_symbol(a, b, Place::Infinite) == -1,
    }
}

/// A definite algebra ramified exactly at `p` and infinity, with small
/// negative integer parameters. Pairs are tried by increasing `max(|a|,|b|)`;
/// the first hit is returned.
pub fn algebra_for_ramification(p: u64) -> Result<QuaternionAlgebra> {
    if p < 3 || !crate::arith::is_prime(p) {
        return Err(Error::Precondition(format!("{p} is not an odd prime")));
    }
    let limit = 8 * p as i64;
    for m in 1..=limit {
        let pairs = (1..m).map(|x| (x, m)).chain((1..=m).map(|y| (m, y)));
        for (x, y) in pairs {
            let alg = QuaternionAlgebra::from_ints(-x, -y)?;
            let r = alg.ramified_places();
            if r.infinite && r.primes == [p] {
                return Ok(alg);
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no algebra ramified at {{{p}, inf}} with parameters up to {limit}"
    )))
}

/// Element `c0 + c1 i + c2 j + c3 ij`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatElement {
    alg: QuaternionAlgebra,
    c: [BigRat; 4],
}

impl QuatElement {
    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.alg
    }

    pub fn coords(&self) -> &[BigRat; 4] {
        &self.c
    }

    pub fn into_coords(self) -> [BigRat; 4] {
        self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.c[1..].iter().all(Zero::is_zero)
    }

    pub fn trd(&self) -> BigRat {
        &self.c[0] * rat(2)
    }

    pub fn nrd(&self) -> BigRat {
        let d = &self.alg.0;
        let c = &self.c;
        &c[0] * &c[0] - &d.a * &c[1] * &c[1] - &d.b * &c[2] * &c[2] + &d.ab * &c[3] * &c[3]
    }

    pub fn conj(&self) -> QuatElement {
        let c = &self.c;
        self.alg.element([c[0].clone(), -&c[1], -&c[2], -&c[3]])
    }

    pub fn inverse(&self) -> Result<QuatElement> {
        let n = self.nrd();
        if n.is_zero() {
            return Err(Error::ZeroDivisor(self.to_string()));
        }
        Ok(self.conj().scale(&n.recip()))
    }

    pub fn scale(&self, s: &BigRat) -> QuatElement {
        self.alg.element(self.c.clone().map(|x| x * s))
    }

    pub fn checked_mul(&self, other: &QuatElement) -> Result<QuatElement> {
        if self.alg != other.alg {
            return Err(Error::MismatchedAlgebras);
        }
        let d = &self.alg.0;
        let (x, y) = (&self.c, &other.c);
        let c0 =
            &x[0] * &y[0] + &d.a * &x[1] * &y[1] + &d.b * &x[2] * &y[2] - &d.ab * &x[3] * &y[3];
        let c1 = &x[0] * &y[1] + &x[1] * &y[0] - &d.b * (&x[2] * &y[3] - &x[3] * &y[2]);
        let c2 = &x[0] * &y[2] + &x[2] * &y[0] + &d.a * (&x[1] * &y[3] - &x[3] * &y[1]);
        let c3 = &x[0] * &y[3] + &x[3] * &y[0] + &x[1] * &y[2] - &x[2] * &y[1];
        Ok(self.alg.element([c0, c1, c2, c3]))
    }

    /// `self * x * self^-1`.
    pub fn conjugate(&self, x: &QuatElement) -> Result<QuatElement> {
        Ok(&(self * x) * &self.inverse()?)
    }

    pub fn pow(&self, e: u32) -> QuatElement {
        let mut out = self.alg.one();
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Coordinates all integral.
    pub fn has_integral_coords(&self) -> bool {
        self.c.iter().all(|x| x.is_integer())
    }

    /// Common denominator of the coordinates.
    pub fn denominator(&self) -> BigInt {
        self.c.iter().fold(BigInt::one(), |acc, x| {
            num_integer::Integer::lcm(&acc, x.denom())
        })
    }
}

impl fmt::Display for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "ij"];
        let mut wrote = false;
        for (c, name) in self.c.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if wrote {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            if name.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{mag}*{name}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Mul for &QuatElement {
    type Output = QuatElement;
    fn mul(self, rhs: &QuatElement) -> QuatElement {
        self.checked_mul(rhs)
            .expect("elements from different algebras")
    }
}

impl Add for &QuatElement {
    type Output = QuatElement;
    fn add(self, rhs: &QuatElement) -> QuatElement {
        assert!(self.alg == rhs.alg, "elements from different algebras");
        let c = std::array::from_fn(|k| &self.c[k] + &rhs.c[k]);
        self.alg.element(c)
    }
}

impl Sub for &QuatElement {
    type Output = QuatElement;
    fn sub(self, rhs: &QuatElement) -> QuatElement {
        assert!(self.alg == rhs.alg, "elements from different algebras");
        let c = std::array::from_fn(|k| &self.c[k] - &rhs.c[k]);
        self.alg.element(c)
    }
}

impl Neg for &QuatElement {
    type Output = QuatElement;
    fn neg(self) -> QuatElement {
        self.alg.element(self.c.clone().map(|x| -x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat_frac;

    #[test]
    fn defining_relations() {
        let a = QuaternionAlgebra::from_ints(-3, -3).unwrap();
        let (i, j, k) = (a.i(), a.j(), a.k());
        assert_eq!(&i * &j, k);
        assert_eq!(&j * &i, -&k);
        assert_eq!(&i * &i, a.scalar(rat(-3)));
        assert_eq!(&k * &k, a.scalar(rat(-9)));
        let x = a.element_i64([2, -1, 5, 3]);
        assert_eq!(&a.one() * &x, x);
        let half = rat_frac(1, 2);
        let omega = a.element([-half.clone(), rat(0), half, rat(0)]);
        assert_eq!(&omega * &omega, &(-&a.one()) - &omega);
        assert_eq!(omega.trd(), rat(-1));
        assert_eq!(omega.nrd(), rat(1));
    }

    #[test]
    fn norm_and_trace() {
        let h = QuaternionAlgebra::from_ints(-1, -1).unwrap();
        let x = h.element_i64([1, 2, 3, 4]);
        assert_eq!(x.nrd(), rat(30));
        assert_eq!(h.one().nrd(), rat(1));
        assert_eq!(h.one().trd(), rat(2));
        assert_eq!(&x * &x.conj(), h.scalar(rat(30)));
        assert_eq!(&x * &x.inverse().unwrap(), h.one());
        assert!(h.zero().inverse().is_err());
        let other = QuaternionAlgebra::from_ints(-1, -3).unwrap();
        assert_eq!(x.checked_mul(&other.one()), Err(Error::MismatchedAlgebras));
    }

    #[test]
    fn ramification_examples() {
        let r = |a, b| {
            QuaternionAlgebra::from_ints(a, b)
                .unwrap()
                .ramified_places()
                .clone()
        };
        assert_eq!(
            r(1, 5),
            RamifiedPlaces {
                primes: vec![],
                infinite: false
            }
        );
        assert_eq!(
            r(-3, -3),
            RamifiedPlaces {
                primes: vec![3],
                infinite: true
            }
        );
        assert_eq!(
            r(-1, -1),
            RamifiedPlaces {
                primes: vec![2],
                infinite: true
            }
        );
        assert_eq!(
            r(-7, -1),
            RamifiedPlaces {
                primes: vec![7],
                infinite: true
            }
        );
        assert_eq!(
            r(-7, -13),
            RamifiedPlaces {
                primes: vec![13],
                infinite: true
            }
        );
        assert!(QuaternionAlgebra::from_ints(-1, -1).unwrap().is_definite());
        assert!(!QuaternionAlgebra::from_ints(1, 1).unwrap().is_definite());
    }

    #[test]
    fn small_models_for_ramified_primes() {
        let pick = |p| {
            let alg = algebra_for_ramification(p).unwrap();
            (alg.a().clone(), alg.b().clone())
        };
        assert_eq!(pick(3), (rat(-1), rat(-3)));
        assert_eq!(pick(5), (rat(-2), rat(-5)));
        assert_eq!(pick(7), (rat(-1), rat(-7)));
        assert_eq!(pick(13), (rat(-2), rat(-13)));
        for p in [11, 17, 19, 23, 29, 31, 37, 41, 43, 47, 97] {
            let alg = algebra_for_ramification(p).unwrap();
            assert!(alg.is_definite());
            assert_eq!(alg.ramified_places().primes, vec![p]);
        }
        assert!(algebra_for_ramification(2).is_err());
        assert!(algebra_for_ramification(9).is_err());
    }
}
