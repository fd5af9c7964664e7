//! Scaled fixed-precision p-adic numbers.
//!
//! A [`PAdicNum`] represents `p^shift * mantissa` known modulo `p^prec`
//! (absolute precision). Canonical form keeps the mantissa a unit reduced
//! modulo `p^(prec - shift)`, so `shift` is the valuation; values that vanish
//! at their precision are stored as `mantissa = 0, shift = 0`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modring::{self, Modulus};

/// The finite model: prime, target precision, denominator cap, degree cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeConfig {
    pub p: u64,
    /// Target p-adic precision N (digits).
    pub prec: u32,
    /// Denominator cap D: largest power of p allowed in a denominator.
    pub den_cap: u32,
    /// Total-degree cap M for truncated series.
    pub deg_cap: u32,
}

impl PrimeConfig {
    pub fn new(p: u64, prec: u32, den_cap: u32, deg_cap: u32) -> Result<Self> {
        let cfg = PrimeConfig {
            p,
            prec,
            den_cap,
            deg_cap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !modring::is_prime(self.p) {
            return Err(Error::InvalidConfig(format!("{} is not prime", self.p)));
        }
        if self.prec == 0 {
            return Err(Error::InvalidConfig("precision must be at least 1".into()));
        }
        if self.deg_cap == 0 {
            return Err(Error::InvalidConfig("degree cap must be at least 1".into()));
        }
        if self.prec + self.den_cap > modring::max_digits(self.p) {
            return Err(Error::InvalidConfig(format!(
                "p^{} exceeds the arithmetic kernel",
                self.prec + self.den_cap
            )));
        }
        Ok(())
    }

    /// Digits carried by exact (integer-literal) data.
    pub fn exact_digits(&self) -> u32 {
        modring::max_digits(self.p)
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        PrimeConfig { prec, ..*self }
    }

    pub fn with_deg_cap(&self, deg_cap: u32) -> Self {
        PrimeConfig { deg_cap, ..*self }
    }

    pub fn modulus(&self, digits: i64) -> Result<Modulus> {
        Modulus::new(self.p, digits)
    }

    /// `floor(log_p(n))` for `n >= 1`.
    pub fn log_p_floor(&self, n: u64) -> u32 {
        let mut k = 0;
        let mut acc = self.p;
        while acc <= n {
            k += 1;
            acc = match acc.checked_mul(self.p) {
                Some(a) => a,
                None => break,
            };
        }
        k
    }

    /// p-adic valuation of a nonzero integer.
    pub fn val_int(&self, n: i128) -> Option<u32> {
        if n == 0 {
            return None;
        }
        let mut n = n.unsigned_abs();
        let p = self.p as u128;
        let mut v = 0;
        while n.is_multiple_of(p) {
            n /= p;
            v += 1;
        }
        Some(v)
    }
}

/// A valuation known exactly, or only bounded below by the precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Valuation {
    Finite(i64),
    AtLeast(i64),
}

impl Valuation {
    pub fn finite(&self) -> Option<i64> {
        match *self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// A lower bound valid in both cases.
    pub fn lower_bound(&self) -> i64 {
        match *self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_at_least(&self, bound: i64) -> bool {
        self.lower_bound() >= bound
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

/// A scaled p-adic number `p^shift * mantissa + O(p^prec)`.
#[derive(Clone, Copy, Debug)]
pub struct PAdicNum {
    cfg: PrimeConfig,
    mantissa: u128,
    shift: i32,
    prec: i32,
}

impl PAdicNum {
    /// An integer at the configuration's target precision N.
    pub fn from_int(cfg: PrimeConfig, n: i128) -> Result<Self> {
        Self::from_int_at(cfg, n, cfg.prec as i32)
    }

    /// An integer carried to the full exact digit budget, so it can later be
    /// used at any working precision.
    pub fn exact(cfg: PrimeConfig, n: i128) -> Self {
        Self::from_int_at(cfg, n, cfg.exact_digits() as i32)
            .expect("exact digits are always representable")
    }

    pub fn from_int_at(cfg: PrimeConfig, n: i128, prec: i32) -> Result<Self> {
        let m = cfg.modulus(prec as i64)?;
        Self::from_parts(cfg, m.from_i128(n), 0, prec)
    }

    pub fn zero(cfg: PrimeConfig, prec: i32) -> Self {
        PAdicNum {
            cfg,
            mantissa: 0,
            shift: 0,
            prec,
        }
    }

    /// `p^shift * mantissa` known modulo `p^prec`; normalises to canonical form.
    pub fn from_parts(cfg: PrimeConfig, mantissa: u128, shift: i32, prec: i32) -> Result<Self> {
        if prec <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "absolute precision {prec} <= 0"
            )));
        }
        // Digits beyond the kernel's budget are not representable.
        let prec = prec.min(cfg.exact_digits() as i32 + shift);
        let rel = prec as i64 - shift as i64;
        if rel <= 0 {
            return Ok(Self::zero(cfg, prec));
        }
        let m = cfg.modulus(rel)?;
        let mut mant = m.reduce(mantissa);
        if mant == 0 {
            return Ok(Self::zero(cfg, prec));
        }
        let mut shift = shift;
        let p = cfg.p as u128;
        while mant % p == 0 {
            mant /= p;
            shift += 1;
        }
        if shift < -(cfg.den_cap as i32) {
            return Err(Error::DenominatorCapExceeded {
                needed: -(shift as i64),
                cap: cfg.den_cap,
            });
        }
        let m = cfg.modulus(prec as i64 - shift as i64)?;
        Ok(PAdicNum {
            cfg,
            mantissa: m.reduce(mant),
            shift,
            prec,
        })
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn mantissa(&self) -> u128 {
        self.mantissa
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn prec(&self) -> i32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == 0
    }

    pub fn val_p(&self) -> Valuation {
        if self.is_zero() {
            Valuation::AtLeast(self.prec as i64)
        } else {
            Valuation::Finite(self.shift as i64)
        }
    }

    fn val_or_prec(&self) -> i64 {
        self.val_p().lower_bound()
    }

    /// Residue modulo `p^digits`; requires an integral value.
    pub fn residue(&self, digits: u32) -> Result<u128> {
        if self.is_zero() {
            return Ok(0);
        }
        if self.shift < 0 {
            return Err(Error::InvalidArgument(
                "value has a denominator and no residue".into(),
            ));
        }
        if digits as i64 > self.prec as i64 {
            return Err(Error::PrecisionExhausted(format!(
                "residue mod p^{digits} requested from a value known to p^{}",
                self.prec
            )));
        }
        let m = self.cfg.modulus(digits as i64)?;
        let scale = m.pow(self.cfg.p as u128, self.shift as u64);
        Ok(m.mul(m.reduce(self.mantissa), scale))
    }

    /// Value as a signed integer when the number is an integral residue
    /// small enough to be read back (used for reporting).
    pub fn to_signed(&self) -> Option<i128> {
        if self.shift < 0 {
            return None;
        }
        let m = self.cfg.modulus(self.prec as i64).ok()?;
        Some(m.signed(self.residue(self.prec as u32).ok()?))
    }

    pub fn with_prec(&self, prec: i32) -> Result<Self> {
        if prec > self.prec {
            return Err(Error::PrecisionExhausted(format!(
                "cannot raise precision from {} to {prec}",
                self.prec
            )));
        }
        Self::from_parts(self.cfg, self.mantissa, self.shift, prec)
    }

    fn check_cfg(&self, other: &Self) -> Result<()> {
        if self.cfg.p != other.cfg.p {
            return Err(Error::ConfigMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_cfg(other)?;
        let prec = self.prec.min(other.prec);
        let base = self.nonzero_shift().min(other.nonzero_shift()).min(prec);
        let m = self.cfg.modulus(prec as i64 - base as i64)?;
        let lift = |x: &Self| -> u128 {
            if x.is_zero() {
                0
            } else {
                let sc = m.pow(x.cfg.p as u128, (x.shift - base) as u64);
                m.mul(m.reduce(x.mantissa), sc)
            }
        };
        Self::from_parts(self.cfg, m.add(lift(self), lift(other)), base, prec)
    }

    fn nonzero_shift(&self) -> i32 {
        if self.is_zero() {
            self.prec
        } else {
            self.shift
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        let m = self
            .cfg
            .modulus(self.prec as i64 - self.shift as i64)
            .expect("canonical mantissa fits");
        PAdicNum {
            mantissa: m.neg(self.mantissa),
            ..*self
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_cfg(other)?;
        let va = self.val_or_prec();
        let vb = other.val_or_prec();
        let prec = (self.prec as i64 + vb).min(other.prec as i64 + va);
        let prec = i32::try_from(prec).map_err(|_| Error::ModulusOverflow { digits: prec })?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.cfg, prec.max(1)));
        }
        let shift = self.shift + other.shift;
        let m = self.cfg.modulus(prec as i64 - shift as i64)?;
        Self::from_parts(
            self.cfg,
            m.mul(m.reduce(self.mantissa), m.reduce(other.mantissa)),
            shift,
            prec,
        )
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() || self.shift != 0 {
            return Err(Error::NonUnit);
        }
        let m = self.cfg.modulus(self.prec as i64)?;
        let inv = m.inv(self.mantissa).ok_or(Error::NonUnit)?;
        Self::from_parts(self.cfg, inv, 0, self.prec)
    }

    /// `self / other`; the quotient may carry a denominator down to `p^-D`.
    pub fn divide_exact(&self, other: &Self) -> Result<Self> {
        self.check_cfg(other)?;
        if other.is_zero() {
            return Err(Error::PrecisionExhausted(
                "divisor vanishes at its precision".into(),
            ));
        }
        let vb = other.shift as i64;
        let va = self.val_or_prec();
        let prec = (self.prec as i64 - vb).min(va - vb + other.prec as i64 - vb);
        if prec <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "quotient precision {prec} <= 0"
            )));
        }
        let prec = prec as i32;
        if self.is_zero() {
            return Ok(Self::zero(self.cfg, prec));
        }
        let shift = self.shift - other.shift;
        let rel = prec as i64 - shift as i64;
        if rel <= 0 {
            return Ok(Self::zero(self.cfg, prec));
        }
        let m = self.cfg.modulus(rel)?;
        let inv = m.inv(other.mantissa).ok_or(Error::NonUnit)?;
        Self::from_parts(self.cfg, m.mul(m.reduce(self.mantissa), inv), shift, prec)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::exact(self.cfg, 1);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Agreement modulo `p^n`.
    pub fn eq_at(&self, other: &Self, n: i32) -> bool {
        if n > self.prec.min(other.prec) {
            return false;
        }
        match self.sub(other) {
            Ok(d) => d.val_p().is_at_least(n as i64),
            Err(_) => false,
        }
    }
}

/// Equality at the smaller of the two precisions.
impl PartialEq for PAdicNum {
    fn eq(&self, other: &Self) -> bool {
        self.cfg.p == other.cfg.p && self.eq_at(other, self.prec.min(other.prec))
    }
}

impl fmt::Display for PAdicNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "O({}^{})", self.cfg.p, self.prec);
        }
        match self.to_signed() {
            Some(v) => write!(f, "{v} + O({}^{})", self.cfg.p, self.prec),
            None => write!(
                f,
                "{}^{} * {} + O({}^{})",
                self.cfg.p, self.shift, self.mantissa, self.cfg.p, self.prec
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(p: u64, n: u32) -> PrimeConfig {
        PrimeConfig::new(p, n, 4, 8).unwrap()
    }

    fn num(c: PrimeConfig, v: i128) -> PAdicNum {
        PAdicNum::from_int(c, v).unwrap()
    }

    #[test]
    fn add_carries_valuation() {
        let c = cfg(3, 4);
        let s = num(c, 18).add(&num(c, 9)).unwrap();
        assert_eq!(s, num(c, 27));
        assert_eq!(s.val_p(), Valuation::Finite(3));
    }

    #[test]
    fn multiplicative_identity() {
        let c = cfg(3, 6);
        for v in [-40i128, 0, 1, 2, 81, 500] {
            assert_eq!(num(c, 1).mul(&num(c, v)).unwrap(), num(c, v));
        }
    }

    #[test]
    fn five_times_205_is_one_mod_256() {
        let c = cfg(2, 8);
        assert_eq!(num(c, 5).mul(&num(c, 205)).unwrap(), num(c, 1));
        assert_eq!(num(c, 5).inv().unwrap().residue(8).unwrap(), 205);
        assert_eq!(num(c, 1).inv().unwrap(), num(c, 1));
    }

    #[test]
    fn three_is_not_a_unit() {
        assert_eq!(num(cfg(3, 6), 3).inv(), Err(Error::NonUnit));
    }

    #[test]
    fn divide_exact_cases() {
        let c = cfg(3, 6);
        let q = num(c, 12).divide_exact(&num(c, 6)).unwrap();
        assert_eq!(q, num(c, 2));
        assert_eq!(q.prec(), 5);
        let x = num(c, 7);
        assert_eq!(x.divide_exact(&num(c, 1)).unwrap(), x);
        let third = num(c, 1).divide_exact(&num(c, 3)).unwrap();
        assert_eq!((third.mantissa(), third.shift()), (1, -1));
        let tiny = PrimeConfig::new(3, 6, 0, 8).unwrap();
        assert!(matches!(
            num(tiny, 1).divide_exact(&num(tiny, 3)),
            Err(Error::DenominatorCapExceeded { .. })
        ));
    }

    #[test]
    fn valuations() {
        let c = cfg(3, 6);
        assert_eq!(num(c, 18).val_p(), Valuation::Finite(2));
        assert_eq!(num(c, 0).val_p(), Valuation::AtLeast(6));
        let c2 = cfg(2, 10);
        assert_eq!(num(c2, 8 * 7).val_p(), Valuation::Finite(3));
    }

    #[test]
    fn precision_exhaustion() {
        let c = cfg(3, 2);
        assert!(matches!(
            num(c, 9).divide_exact(&num(c, 9)),
            Err(Error::PrecisionExhausted(_))
        ));
    }
}
