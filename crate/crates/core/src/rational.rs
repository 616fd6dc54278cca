//! Exact rational helpers shared by the amplification and search modules.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

pub type Rational = Rational64;

/// `"num/den"` rendering (denominator always shown).
pub fn to_fraction_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn big(r: &Rational) -> (BigInt, BigInt) {
    (BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Compares `a^p` with `b^q` exactly, for nonnegative rationals.
pub fn cmp_powers(a: &Rational, p: u32, b: &Rational, q: u32) -> Ordering {
    assert!(!a.is_negative() && !b.is_negative(), "powers compared on nonnegative values only");
    let (an, ad) = big(a);
    let (bn, bd) = big(b);
    // a^p ? b^q  <=>  an^p * bd^q ? bn^q * ad^p  (denominators positive)
    (an.pow(p) * bd.pow(q)).cmp(&(bn.pow(q) * ad.pow(p)))
}

/// `C(n, k)` as an exact big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Reduces a big fraction into a [`Rational`]; panics if it does not fit.
pub fn from_big(num: BigInt, den: BigInt) -> Rational {
    assert!(!den.is_zero());
    let g = num_integer::Integer::gcd(&num, &den);
    let (n, d) = (num / &g, den / g);
    let to_i64 = |v: BigInt| i64::try_from(v).expect("rational does not fit in 64 bits");
    Rational::new(to_i64(n), to_i64(d))
}
