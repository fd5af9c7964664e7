//! Quotient rings `(Z/p^N)[T]/(g(T))` and their elements.
//!
//! Torsion points of formal groups live in totally ramified extensions of
//! `Q_p`; for a monic Eisenstein `g` the class of `T` is a uniformizer and the
//! normalized valuation is `val(p) = e = deg g`. Elements track an absolute
//! precision in those units, so results computed from truncated data carry
//! an explicit guarantee.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modring::Modulus;
use crate::padic::{PrimeConfig, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RingKind {
    /// `Z/p^N` itself, presented as `(Z/p^N)[T]/(T)`.
    Base,
    /// `Phi_{p^k}(1+T)`; `T` is `zeta_{p^k} - 1`.
    Cyclotomic(u32),
    Eisenstein,
    Generic,
}

/// The ring `(Z/p^digits)[T]/(g(T))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtRing {
    cfg: PrimeConfig,
    modulus: Modulus,
    /// Coefficients of the monic `g`, constant term first, leading 1 omitted.
    poly: Vec<u128>,
    kind: RingKind,
}

impl ExtRing {
    /// A ring from the non-leading coefficients of a monic polynomial.
    pub fn new(cfg: PrimeConfig, lower: &[i128], kind: RingKind) -> Result<Arc<Self>> {
        let modulus = cfg.modulus(cfg.prec as i64)?;
        let poly: Vec<u128> = lower.iter().map(|&c| modulus.from_i128(c)).collect();
        Self::from_residues(cfg, poly, kind)
    }

    fn from_residues(cfg: PrimeConfig, poly: Vec<u128>, kind: RingKind) -> Result<Arc<Self>> {
        let modulus = cfg.modulus(cfg.prec as i64)?;
        if poly.is_empty() {
            return Err(Error::InvalidArgument("modulus must have degree >= 1".into()));
        }
        match kind {
            RingKind::Base => {
                if poly.len() != 1 || poly[0] != 0 {
                    return Err(Error::InvalidArgument("base ring modulus is T".into()));
                }
            }
            RingKind::Eisenstein | RingKind::Cyclotomic(_) => {
                if poly.iter().any(|&c| c % cfg.p as u128 != 0) {
                    return Err(Error::InvalidArgument(
                        "Eisenstein modulus needs p | every non-leading coefficient".into(),
                    ));
                }
                if modulus.valuation(poly[0]) != Some(1) {
                    return Err(Error::InvalidArgument(
                        "Eisenstein modulus needs val_p(constant term) = 1".into(),
                    ));
                }
            }
            RingKind::Generic => {}
        }
        Ok(Arc::new(ExtRing {
            cfg,
            modulus,
            poly,
            kind,
        }))
    }

    /// `Z/p^N` as a degree-one ring.
    pub fn base(cfg: PrimeConfig) -> Result<Arc<Self>> {
        Self::from_residues(cfg, vec![0], RingKind::Base)
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.poly.len()
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub fn digits(&self) -> u32 {
        self.modulus.digits()
    }

    /// Ramification index `e`; `val(p) = e`.
    pub fn ram_index(&self) -> u32 {
        match self.kind {
            RingKind::Base | RingKind::Generic => 1,
            RingKind::Cyclotomic(_) | RingKind::Eisenstein => self.degree() as u32,
        }
    }

    pub fn has_valuation(&self) -> bool {
        !matches!(self.kind, RingKind::Generic)
    }

    /// Precision cap `e * N` in valuation units.
    pub fn val_cap(&self) -> i64 {
        self.ram_index() as i64 * self.digits() as i64
    }

    /// Non-leading coefficients of the monic modulus as signed integers.
    pub fn modulus_coefficients(&self) -> Vec<i128> {
        self.poly.iter().map(|&c| self.modulus.signed(c)).collect()
    }
}

/// `(Z/p^N)[T] / (Phi_{p^k}(1+T))`, whose generator is `zeta_{p^k} - 1`.
pub fn cyclotomic_ring(cfg: PrimeConfig, level: u32) -> Result<Arc<ExtRing>> {
    if level == 0 {
        return Err(Error::InvalidArgument("cyclotomic level must be >= 1".into()));
    }
    let m = cfg.modulus(cfg.prec as i64)?;
    let p = cfg.p as usize;
    let step = p.pow(level - 1);
    // Phi_{p^k}(1+T) = sum_{j<p} (1+T)^{j p^{k-1}}.
    let deg = step * (p - 1);
    let mut phi = vec![0u128; deg + 1];
    let base = binomial_row(&m, step);
    let mut power = vec![1u128];
    for _ in 0..p {
        for (i, &c) in power.iter().enumerate() {
            phi[i] = m.add(phi[i], c);
        }
        power = poly_mul(&m, &power, &base);
    }
    debug_assert_eq!(phi[deg], 1);
    phi.truncate(deg);
    ExtRing::from_residues(cfg, phi, RingKind::Cyclotomic(level))
}

/// Coefficients of `(1+T)^n`.
fn binomial_row(m: &Modulus, n: usize) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![0u128; row.len() + 1];
        for (i, &c) in row.iter().enumerate() {
            next[i] = m.add(next[i], c);
            next[i + 1] = m.add(next[i + 1], c);
        }
        row = next;
    }
    row
}

fn poly_mul(m: &Modulus, a: &[u128], b: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = m.mul_add(x, y, out[i + j]);
        }
    }
    out
}

/// An element of an [`ExtRing`], known up to `prec` in valuation units.
#[derive(Clone)]
pub struct ExtElem {
    ring: Arc<ExtRing>,
    coeffs: Vec<u128>,
    prec: i64,
}

impl ExtElem {
    pub fn zero(ring: &Arc<ExtRing>) -> Self {
        ExtElem {
            coeffs: vec![0; ring.degree()],
            prec: ring.val_cap(),
            ring: Arc::clone(ring),
        }
    }

    pub fn from_int(ring: &Arc<ExtRing>, n: i128) -> Self {
        let mut z = Self::zero(ring);
        z.coeffs[0] = ring.modulus.from_i128(n);
        z
    }

    /// The class of `T`.
    pub fn generator(ring: &Arc<ExtRing>) -> Self {
        Self::from_coeffs(ring, &[0, 1])
    }

    /// `sum c_i T^i`, reduced modulo `g`.
    pub fn from_coeffs(ring: &Arc<ExtRing>, coeffs: &[i128]) -> Self {
        let m = &ring.modulus;
        let raw: Vec<u128> = coeffs.iter().map(|&c| m.from_i128(c)).collect();
        Self::from_raw(ring, raw, ring.val_cap())
    }

    pub(crate) fn from_raw(ring: &Arc<ExtRing>, mut raw: Vec<u128>, prec: i64) -> Self {
        reduce_mod_g(ring, &mut raw);
        raw.resize(ring.degree(), 0);
        ExtElem {
            coeffs: raw,
            prec: prec.min(ring.val_cap()),
            ring: Arc::clone(ring),
        }
    }

    pub fn ring(&self) -> &Arc<ExtRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    /// Coefficients as symmetric signed residues.
    pub fn signed_coeffs(&self) -> Vec<i128> {
        self.coeffs.iter().map(|&c| self.ring.modulus.signed(c)).collect()
    }

    /// Absolute precision in valuation units.
    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn with_prec(mut self, prec: i64) -> Self {
        self.prec = self.prec.min(prec);
        self
    }

    fn same_ring(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring {
            Ok(())
        } else {
            Err(Error::ConfigMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let m = &self.ring.modulus;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| m.add(a, b))
            .collect();
        Ok(ExtElem {
            coeffs,
            prec: self.prec.min(other.prec),
            ring: Arc::clone(&self.ring),
        })
    }

    pub fn neg(&self) -> Self {
        let m = &self.ring.modulus;
        ExtElem {
            coeffs: self.coeffs.iter().map(|&a| m.neg(a)).collect(),
            prec: self.prec,
            ring: Arc::clone(&self.ring),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let m = &self.ring.modulus;
        let raw = poly_mul(m, &self.coeffs, &other.coeffs);
        let prec = if self.ring.has_valuation() {
            let va = self.val_lower_bound();
            let vb = other.val_lower_bound();
            (self.prec + vb).min(other.prec + va)
        } else {
            self.prec.min(other.prec)
        };
        Ok(Self::from_raw(&self.ring, raw, prec))
    }

    pub fn pow(&self, mut e: u64) -> Result<Self> {
        let mut acc = Self::from_int(&self.ring, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    pub fn scale_int(&self, n: i128) -> Self {
        let m = &self.ring.modulus;
        let c = m.from_i128(n);
        let v = if c == 0 {
            self.ring.val_cap()
        } else {
            m.valuation(c).unwrap_or(0) as i64 * self.ring.ram_index() as i64
        };
        ExtElem {
            coeffs: self.coeffs.iter().map(|&a| m.mul(a, c)).collect(),
            prec: (self.prec + v).min(self.ring.val_cap()),
            ring: Arc::clone(&self.ring),
        }
    }

    /// Normalized valuation `min_i (e * val_p(a_i) + i)`, capped at the
    /// element's precision.
    pub fn val_ext(&self) -> Result<Valuation> {
        if !self.ring.has_valuation() {
            return Err(Error::UnsupportedRing);
        }
        let e = self.ring.ram_index() as i64;
        let m = &self.ring.modulus;
        let mut best: Option<i64> = None;
        for (i, &a) in self.coeffs.iter().enumerate() {
            if let Some(v) = m.valuation(a) {
                let cand = e * v as i64 + i as i64;
                best = Some(best.map_or(cand, |b: i64| b.min(cand)));
            }
        }
        Ok(match best {
            Some(v) if v < self.prec => Valuation::Finite(v),
            _ => Valuation::AtLeast(self.prec),
        })
    }

    fn val_lower_bound(&self) -> i64 {
        self.val_ext().map(|v| v.lower_bound()).unwrap_or(0)
    }

    /// Zero at the element's own precision.
    pub fn is_zero_at_prec(&self) -> bool {
        match self.val_ext() {
            Ok(v) => v.finite().is_none(),
            Err(_) => self.coeffs.iter().all(|&c| c == 0),
        }
    }

    /// Agreement at the smaller of the two precisions.
    pub fn eq_at_prec(&self, other: &Self) -> Result<bool> {
        let d = self.sub(other)?;
        Ok(d.is_zero_at_prec())
    }

    /// Exact coefficient equality modulo `p^N`.
    pub fn eq_exact(&self, other: &Self) -> bool {
        *self.ring == *other.ring && self.coeffs == other.coeffs
    }

    pub fn is_unit(&self) -> bool {
        !self.coeffs[0].is_multiple_of(self.ring.cfg.p as u128)
    }

    /// Inverse of a unit by Newton iteration `x <- x(2 - a x)`.
    pub fn inv(&self) -> Result<Self> {
        if !self.ring.has_valuation() {
            return Err(Error::UnsupportedRing);
        }
        if !self.is_unit() {
            return Err(Error::NonUnit);
        }
        let m = &self.ring.modulus;
        let a0 = m.inv(self.coeffs[0]).ok_or(Error::NonUnit)?;
        let two = Self::from_int(&self.ring, 2);
        let mut x = Self::from_raw(&self.ring, vec![a0], self.ring.val_cap());
        // Each step doubles the number of correct valuation units.
        let mut known = 1i64;
        while known < self.ring.val_cap() {
            x = x.mul(&two.sub(&self.mul(&x)?)?)?;
            known *= 2;
        }
        x.prec = self.prec.min(self.ring.val_cap());
        Ok(x)
    }

    /// Divides by `T`, given `val >= 1`. The constant term passes through
    /// `T^{-1} = -(g(T) - g_0) / (T g_0)`, which costs one p-digit.
    fn div_by_generator(&self) -> Result<Self> {
        let v = self.val_ext()?;
        if !v.is_at_least(1) {
            return Err(Error::NonUnit);
        }
        let ring = &self.ring;
        let m = &ring.modulus;
        let p = ring.cfg.p as u128;
        let e = ring.degree();
        let mut out = vec![0u128; e];
        out[..(e - 1)].copy_from_slice(&self.coeffs[1..]);
        let a0 = self.coeffs[0];
        if a0 != 0 {
            // a0/T = -(a0/p) / (g0/p) * (T^{e-1} + g_{e-1} T^{e-2} + ... + g_1)
            let g0 = ring.poly[0];
            let a0p = a0 / p;
            let g0p_inv = m.inv(g0 / p).ok_or(Error::NonUnit)?;
            let factor = m.neg(m.mul(a0p, g0p_inv));
            for (j, o) in out.iter_mut().enumerate() {
                let gj = if j + 1 < e { ring.poly[j + 1] } else { 1 };
                *o = m.mul_add(factor, gj, *o);
            }
        }
        let cap = ring.ram_index() as i64 * (ring.digits() as i64 - 1);
        Ok(ExtElem {
            coeffs: out,
            prec: (self.prec - 1).min(cap),
            ring: Arc::clone(ring),
        })
    }

    /// `self / other` for `val(self) >= val(other)`; exact in valuation,
    /// with the precision loss tracked.
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_ring(other)?;
        let vb = other
            .val_ext()?
            .finite()
            .ok_or_else(|| Error::PrecisionExhausted("divisor vanishes at precision".into()))?;
        if matches!(self.ring.kind, RingKind::Base) {
            // Integers: strip p-powers directly.
            return self.div_base(other, vb);
        }
        let mut num = self.clone();
        let mut den = other.clone();
        for _ in 0..vb {
            num = num.div_by_generator()?;
            den = den.div_by_generator()?;
        }
        let q = num.mul(&den.inv()?)?;
        Ok(q)
    }

    fn div_base(&self, other: &Self, vb: i64) -> Result<Self> {
        let ring = &self.ring;
        let m = &ring.modulus;
        let p = ring.cfg.p as u128;
        let va = self.val_lower_bound();
        if va < vb {
            return Err(Error::NonUnit);
        }
        let pv = p.pow(vb as u32);
        let num = self.coeffs[0] / pv;
        let unit = other.coeffs[0] / pv;
        let digits = ring.digits() as i64 - vb;
        if digits <= 0 {
            return Err(Error::PrecisionExhausted("quotient has no digits".into()));
        }
        let mm = ring.cfg.modulus(digits)?;
        let q = mm.mul(mm.reduce(num), mm.inv(mm.reduce(unit)).ok_or(Error::NonUnit)?);
        let prec = (self.prec - vb).min(other.prec - 2 * vb + va).min(digits);
        Ok(ExtElem {
            coeffs: vec![m.reduce(q)],
            prec,
            ring: Arc::clone(ring),
        })
    }
}

fn reduce_mod_g(ring: &ExtRing, raw: &mut Vec<u128>) {
    let m = &ring.modulus;
    let e = ring.degree();
    while raw.len() > e {
        let top = raw.pop().expect("nonempty");
        if top == 0 {
            continue;
        }
        let shift = raw.len() - e;
        // T^e = -(g_0 + g_1 T + ... + g_{e-1} T^{e-1})
        for (j, &g) in ring.poly.iter().enumerate() {
            let t = m.mul(top, g);
            raw[shift + j] = m.sub(raw[shift + j], t);
        }
    }
}

impl fmt::Debug for ExtElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ExtElem({:?} + O(pi^{}))",
            self.signed_coeffs(),
            self.prec
        )
    }
}
