//! Shared helpers for the integration tests: an exact rational oracle and
//! conversions between rationals and library coefficients.
#![allow(dead_code)]

pub mod oracle;

use fglab_core::{PAdicNum, PrimeConfig, TruncatedSeries};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `v_p` of a nonzero integer.
pub fn val_int(n: &BigInt, p: u64) -> i64 {
    assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    while (&n % &p).is_zero() {
        n /= &p;
        v += 1;
    }
    v
}

/// `v_p` of a rational; `None` for zero.
pub fn val_rat(r: &BigRational, p: u64) -> Option<i64> {
    if r.is_zero() {
        None
    } else {
        Some(val_int(r.numer(), p) - val_int(r.denom(), p))
    }
}

/// Exact value `mantissa * p^shift` of a library number (one representative).
pub fn to_rational(c: &PAdicNum) -> BigRational {
    let p = BigInt::from(c.cfg().p);
    let m = BigInt::from(c.mantissa());
    if c.shift() >= 0 {
        BigRational::from_integer(m * num_traits::pow(p, c.shift() as usize))
    } else {
        BigRational::new(m, num_traits::pow(p, (-c.shift()) as usize))
    }
}

/// `c` agrees with `r` modulo `p^prec`.
pub fn agrees(c: &PAdicNum, r: &BigRational, prec: i64) -> bool {
    match val_rat(&(to_rational(c) - r), c.cfg().p) {
        None => true,
        Some(v) => v >= prec,
    }
}

/// The library number closest to a p-integral rational, exact.
pub fn from_rational(cfg: PrimeConfig, r: &BigRational) -> PAdicNum {
    let digits = cfg.exact_digits();
    let modulus = num_traits::pow(BigInt::from(cfg.p), digits as usize);
    let d = r.denom();
    assert!(val_int(d, cfg.p) == 0, "denominator divisible by p");
    let inv = d.modinv(&modulus).expect("unit denominator");
    let mut v = (r.numer() * inv) % &modulus;
    if v.is_negative() {
        v += &modulus;
    }
    let v: u128 = v.try_into().expect("fits u128");
    PAdicNum::from_parts(cfg, v, 0, digits as i32).unwrap()
}

/// Coefficient list of a one-variable library series as rationals.
pub fn coeffs_1v(s: &TruncatedSeries) -> Vec<BigRational> {
    (0..=s.deg_cap()).map(|k| to_rational(&s.coeff(&[k]))).collect()
}

pub fn binomial(a: &BigRational, k: u32) -> BigRational {
    let mut out = BigRational::one();
    for j in 0..k {
        out = out * (a - rat(j as i64)) / rat(j as i64 + 1);
    }
    out
}
