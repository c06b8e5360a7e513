//! Kronecker and Hilbert symbols over the rationals.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{mod_u64, valuation, BigRat};

/// A place of the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Place {
    Infinite,
    Prime(u64),
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinite => write!(f, "inf"),
            Place::Prime(p) => write!(f, "{p}"),
        }
    }
}

/// Kronecker symbol `(a|n)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1;
    let mut n = n;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let mut twos = 0;
    while n % 2 == 0 {
        n /= 2;
        twos += 1;
    }
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
    }
    // Jacobi symbol (a|n) for odd positive n.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Hilbert symbol `(a, b)` at `place`; `a` and `b` must be nonzero.
pub fn hilbert_symbol(a: &BigRat, b: &BigRat, place: Place) -> i32 {
    assert!(!a.is_zero() && !b.is_zero(), "hilbert symbol of zero");
    match place {
        Place::Infinite => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(2) => {
            let table = two_adic_table();
            table[&(square_class_2(a), square_class_2(b))]
        }
        Place::Prime(p) => hilbert_odd(a, b, p),
    }
}

/// Split a nonzero rational as `p^v * u` and return `v` and `u mod p`.
fn split_at(q: &BigRat, p: u64) -> (i64, u64) {
    let vn = valuation(q.numer(), p);
    let vd = valuation(q.denom(), p);
    let pb = BigInt::from(p);
    let num = q.numer() / pb.pow(vn);
    let den = q.denom() / pb.pow(vd);
    let u = (mod_u64(&num, p) * super::inv_mod(mod_u64(&den, p), p)) % p;
    (vn as i64 - vd as i64, u)
}

fn legendre(u: u64, p: u64) -> i32 {
    kronecker(u as i64, p as i64)
}

fn hilbert_odd(a: &BigRat, b: &BigRat, p: u64) -> i32 {
    let (alpha, u) = split_at(a, p);
    let (beta, v) = split_at(b, p);
    let mut s = 1;
    if (alpha * beta).rem_euclid(2) == 1 && p % 4 == 3 {
        s = -s;
    }
    if beta.rem_euclid(2) == 1 {
        s *= legendre(u, p);
    }
    if alpha.rem_euclid(2) == 1 {
        s *= legendre(v, p);
    }
    s
}

/// Representative in {1,3,5,7} * {1,2} of the 2-adic square class.
fn square_class_2(q: &BigRat) -> i64 {
    let vn = valuation(q.numer(), 2);
    let vd = valuation(q.denom(), 2);
    let num = q.numer() >> vn as usize;
    let den = q.denom() >> vd as usize;
    let unit = (mod_u64(&num, 8) * mod_u64(&den, 8)) % 8;
    let two = if (vn as i64 - vd as i64).rem_euclid(2) == 1 {
        2
    } else {
        1
    };
    two * unit as i64
}

/// Decides z^2 = a x^2 + b y^2 over the 2-adic integers by searching for a
/// primitive solution modulo 32, for every pair of square-class
/// representatives. With both valuations at most one, a primitive solution
/// modulo 32 lifts.
fn two_adic_table() -> &'static HashMap<(i64, i64), i32> {
    static TABLE: OnceLock<HashMap<(i64, i64), i32>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let reps = [1i64, 3, 5, 7, 2, 6, 10, 14];
        let mut table = HashMap::new();
        for &a in &reps {
            for &b in &reps {
                table.insert(
                    (a, b),
                    if primitive_solution_mod32(a, b) {
                        1
                    } else {
                        -1
                    },
                );
            }
        }
        table
    })
}

fn primitive_solution_mod32(a: i64, b: i64) -> bool {
    const M: i64 = 32;
    for x in 0..M {
        for y in 0..M {
            for z in 0..M {
                if x % 2 == 0 && y % 2 == 0 && z % 2 == 0 {
                    continue;
                }
                if (z * z - a * x * x - b * y * y).rem_euclid(M) == 0 {
                    return true;
                }
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, rat_frac};

    fn squares_mod(n: i64) -> Vec<i64> {
        (1..n).map(|x| x * x % n).collect()
    }

    #[test]
    fn kronecker_against_square_tables() {
        assert_eq!(kronecker(1, 9), 1);
        assert_eq!(kronecker(-3, 7), 1);
        assert_eq!(kronecker(2, 3), -1);
        for p in [3i64, 5, 7, 11, 13, 17] {
            let sq = squares_mod(p);
            for a in -20..20i64 {
                let expect = if a.rem_euclid(p) == 0 {
                    0
                } else if sq.contains(&a.rem_euclid(p)) {
                    1
                } else {
                    -1
                };
                assert_eq!(kronecker(a, p), expect, "({a}|{p})");
            }
        }
        assert_eq!(kronecker(3, 2), -1);
        assert_eq!(kronecker(7, 2), 1);
        assert_eq!(kronecker(4, 2), 0);
    }

    /// Standard closed formula at 2, used only as an oracle.
    fn hilbert_two_formula(a: i64, b: i64) -> i32 {
        let split = |mut n: i64| {
            let mut v = 0;
            while n % 2 == 0 {
                n /= 2;
                v += 1;
            }
            (v, n)
        };
        let eps = |u: i64| ((u - 1) / 2).rem_euclid(2);
        let omega = |u: i64| ((u * u - 1) / 8).rem_euclid(2);
        let (alpha, u) = split(a);
        let (beta, v) = split(b);
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn two_adic_table_matches_closed_formula() {
        for a in [
            -15i64, -14, -7, -6, -5, -3, -2, -1, 1, 2, 3, 5, 6, 7, 10, 12, 24,
        ] {
            for b in [-15i64, -10, -7, -3, -2, -1, 1, 2, 3, 5, 7, 14, 20] {
                assert_eq!(
                    hilbert_symbol(&rat(a), &rat(b), Place::Prime(2)),
                    hilbert_two_formula(a, b),
                    "({a},{b})_2"
                );
            }
        }
    }

    #[test]
    fn small_symbol_values() {
        assert_eq!(hilbert_symbol(&rat(-1), &rat(-1), Place::Prime(2)), -1);
        assert_eq!(hilbert_symbol(&rat(-3), &rat(-3), Place::Prime(3)), -1);
        assert_eq!(hilbert_symbol(&rat(-1), &rat(-1), Place::Infinite), -1);
        assert_eq!(hilbert_symbol(&rat(1), &rat(-7), Place::Prime(7)), 1);
        // Square classes only: scaling by squares changes nothing.
        assert_eq!(
            hilbert_symbol(&rat_frac(-4, 9), &rat_frac(-1, 25), Place::Prime(2)),
            hilbert_symbol(&rat(-1), &rat(-1), Place::Prime(2))
        );
        assert_eq!(
            hilbert_symbol(&rat_frac(-1, 3), &rat(-3), Place::Prime(3)),
            -1
        );
    }
}
