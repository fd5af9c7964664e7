//! Dense truncated power series in `d` variables over scaled p-adic
//! coefficients.
//!
//! A [`TruncatedSeries`] stores integer numerators modulo `p^(prec + den)`;
//! the represented coefficient is `numerator / p^den`, known modulo `p^prec`.
//! All monomials of total degree above the configuration's cap `M` are
//! discarded. A series built from integer literals is *exact*: it carries
//! the kernel's full digit budget and can be used at any working precision.

mod arith;
mod calculus;
mod eval;
mod inverse;
pub mod monomial;
mod weierstrass;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::modring::Modulus;
use crate::padic::{PAdicNum, PrimeConfig, Valuation};

pub use eval::{hensel_lift, Evaluation};
pub use monomial::MonomialTable;
pub use weierstrass::WeierstrassFactors;

#[derive(Clone)]
pub struct TruncatedSeries {
    cfg: PrimeConfig,
    table: Arc<MonomialTable>,
    modulus: Modulus,
    coeffs: Vec<u128>,
    prec: i32,
    den: u32,
    poly: bool,
}

impl TruncatedSeries {
    pub(crate) fn from_raw(
        cfg: PrimeConfig,
        nvars: usize,
        coeffs: Vec<u128>,
        prec: i32,
        den: u32,
        poly: bool,
    ) -> Result<Self> {
        if prec <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "series precision floor {prec} <= 0"
            )));
        }
        if den > cfg.den_cap {
            return Err(Error::DenominatorCapExceeded {
                needed: den as i64,
                cap: cfg.den_cap,
            });
        }
        let table = monomial::table(nvars, cfg.deg_cap);
        let digits = (prec as i64 + den as i64).min(cfg.exact_digits() as i64);
        let prec = (digits - den as i64) as i32;
        let modulus = cfg.modulus(digits)?;
        let mut coeffs = coeffs;
        coeffs.resize(table.len(), 0);
        for c in coeffs.iter_mut() {
            *c = modulus.reduce(*c);
        }
        Ok(TruncatedSeries {
            cfg,
            table,
            modulus,
            coeffs,
            prec,
            den,
            poly,
        })
    }

    pub fn zero(cfg: PrimeConfig, nvars: usize) -> Self {
        Self::from_raw(cfg, nvars, Vec::new(), cfg.exact_digits() as i32, 0, true)
            .expect("zero series")
    }

    /// The coordinate function `X_var` (0-based), exact.
    pub fn var(cfg: PrimeConfig, nvars: usize, var: usize) -> Result<Self> {
        if var >= nvars {
            return Err(Error::InvalidArgument(format!(
                "variable {var} out of range for {nvars} variables"
            )));
        }
        let mut exps = vec![0u32; nvars];
        exps[var] = 1;
        Self::from_terms(cfg, nvars, &[(exps, 1)])
    }

    /// An exact polynomial from integer terms.
    pub fn from_terms(cfg: PrimeConfig, nvars: usize, terms: &[(Vec<u32>, i128)]) -> Result<Self> {
        let table = monomial::table(nvars, cfg.deg_cap);
        let m = cfg.modulus(cfg.exact_digits() as i64)?;
        let mut coeffs = vec![0u128; table.len()];
        for (exps, c) in terms {
            let idx = table.index_of(exps).ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "monomial {exps:?} exceeds degree cap {} or has wrong arity",
                    cfg.deg_cap
                ))
            })?;
            coeffs[idx] = m.add(coeffs[idx], m.from_i128(*c));
        }
        Self::from_raw(cfg, nvars, coeffs, cfg.exact_digits() as i32, 0, true)
    }

    /// An exact one-variable polynomial `sum c_k X^k`.
    pub fn from_coeffs(cfg: PrimeConfig, coeffs: &[i128]) -> Result<Self> {
        let terms: Vec<(Vec<u32>, i128)> = coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(k, &c)| (vec![k as u32], c))
            .collect();
        Self::from_terms(cfg, 1, &terms)
    }

    /// A one-variable series from p-adic coefficients (index = degree).
    pub fn from_padic(cfg: PrimeConfig, coeffs: &[PAdicNum]) -> Result<Self> {
        let prec = coeffs
            .iter()
            .map(|c| c.prec())
            .min()
            .unwrap_or(cfg.exact_digits() as i32);
        let den = coeffs.iter().map(|c| (-c.shift()).max(0) as u32).max().unwrap_or(0);
        let m = cfg.modulus(prec as i64 + den as i64)?;
        let mut raw = Vec::with_capacity(coeffs.len());
        for c in coeffs {
            raw.push(numerator_of(c, den, &m));
        }
        if coeffs.len() > cfg.deg_cap as usize + 1 {
            return Err(Error::InvalidArgument("more coefficients than the degree cap".into()));
        }
        Self::from_raw(cfg, 1, raw, prec, den, true)
    }

    /// A series from `(exponents, value)` pairs at an explicit precision.
    pub fn from_padic_terms(
        cfg: PrimeConfig,
        nvars: usize,
        terms: &[(Vec<u32>, PAdicNum)],
        prec: i32,
        poly: bool,
    ) -> Result<Self> {
        let table = monomial::table(nvars, cfg.deg_cap);
        let den = terms
            .iter()
            .map(|(_, c)| (-c.shift()).max(0) as u32)
            .max()
            .unwrap_or(0);
        let m = cfg.modulus(prec as i64 + den as i64)?;
        let mut raw = vec![0u128; table.len()];
        for (exps, c) in terms {
            let idx = table.index_of(exps).ok_or_else(|| {
                Error::InvalidArgument(format!("monomial {exps:?} exceeds degree cap"))
            })?;
            raw[idx] = m.add(raw[idx], numerator_of(c, den, &m));
        }
        Self::from_raw(cfg, nvars, raw, prec, den, poly)
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.cfg
    }

    pub fn nvars(&self) -> usize {
        self.table.nvars()
    }

    pub fn deg_cap(&self) -> u32 {
        self.cfg.deg_cap
    }

    pub fn table(&self) -> &Arc<MonomialTable> {
        &self.table
    }

    /// Uniform absolute precision of the coefficients.
    pub fn prec(&self) -> i32 {
        self.prec
    }

    /// Common denominator exponent.
    pub fn den(&self) -> u32 {
        self.den
    }

    /// True when the series is known to be a polynomial (no truncated tail).
    pub fn is_poly(&self) -> bool {
        self.poly
    }

    /// Coefficients carry the full exact digit budget.
    pub fn is_exact(&self) -> bool {
        self.prec as i64 + self.den as i64 >= self.cfg.exact_digits() as i64
    }

    pub(crate) fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    pub(crate) fn raw(&self) -> &[u128] {
        &self.coeffs
    }

    /// Overwrites one stored numerator (reduced by the series modulus).
    pub(crate) fn set_raw(&mut self, idx: usize, value: u128) {
        self.coeffs[idx] = self.modulus.reduce(value);
    }

    pub(crate) fn set_poly(&mut self, poly: bool) {
        self.poly = poly;
    }

    pub fn is_integral(&self) -> bool {
        self.den == 0
    }

    /// Degree of the highest nonzero monomial.
    pub fn degree(&self) -> Option<u32> {
        (0..self.coeffs.len())
            .rev()
            .find(|&i| self.coeffs[i] != 0)
            .map(|i| self.table.degree(i))
    }

    /// Lowest degree with a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        (0..self.coeffs.len())
            .find(|&i| self.coeffs[i] != 0)
            .map(|i| self.table.degree(i))
    }

    pub fn coeff_at(&self, idx: usize) -> PAdicNum {
        PAdicNum::from_parts(self.cfg, self.coeffs[idx], -(self.den as i32), self.prec)
            .expect("series coefficients are representable")
    }

    /// Coefficient of a monomial; zero (at precision) outside the table.
    pub fn coeff(&self, exps: &[u32]) -> PAdicNum {
        match self.table.index_of(exps) {
            Some(idx) => self.coeff_at(idx),
            None => PAdicNum::zero(self.cfg, self.prec),
        }
    }

    /// Nonzero terms in table order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], PAdicNum)> + '_ {
        (0..self.coeffs.len())
            .filter(move |&i| self.coeffs[i] != 0)
            .map(move |i| (self.table.exps(i), self.coeff_at(i)))
    }

    pub fn constant_term(&self) -> PAdicNum {
        self.coeff_at(0)
    }

    pub fn has_zero_constant(&self) -> bool {
        self.coeffs[0] == 0
    }

    /// Numerator coefficient valuations are all at least `den`.
    fn num_valuation(&self) -> Valuation {
        let mut best: Option<u32> = None;
        for &c in &self.coeffs {
            if let Some(v) = self.modulus.valuation(c) {
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        match best {
            Some(v) => Valuation::Finite(v as i64 - self.den as i64),
            None => Valuation::AtLeast(self.prec as i64),
        }
    }

    /// Minimum coefficient valuation (true values).
    pub fn valuation(&self) -> Valuation {
        self.num_valuation()
    }

    /// Reduces to a lower precision floor.
    pub fn at_prec(&self, prec: i32) -> Result<Self> {
        if prec > self.prec {
            return Err(Error::PrecisionExhausted(format!(
                "cannot raise series precision from {} to {prec}",
                self.prec
            )));
        }
        Self::from_raw(
            self.cfg,
            self.nvars(),
            self.coeffs.clone(),
            prec,
            self.den,
            self.poly,
        )
    }

    /// Reduces to `min(self.prec, prec)`.
    pub fn capped(&self, prec: i32) -> Result<Self> {
        if prec >= self.prec {
            Ok(self.clone())
        } else {
            self.at_prec(prec)
        }
    }

    /// Same data under a configuration with a different target precision.
    pub fn with_cfg(&self, cfg: PrimeConfig) -> Result<Self> {
        if cfg.p != self.cfg.p || cfg.deg_cap != self.cfg.deg_cap {
            return Err(Error::ConfigMismatch);
        }
        let mut s = self.clone();
        s.cfg = cfg;
        Ok(s)
    }

    /// Rewrites the numerators over a larger common denominator.
    fn with_den(&self, den: u32) -> Result<Self> {
        if den == self.den {
            return Ok(self.clone());
        }
        debug_assert!(den > self.den);
        let prec = self.prec.min(self.cfg.exact_digits() as i32 - den as i32);
        let m = self.cfg.modulus(prec as i64 + den as i64)?;
        let scale = m.pow(self.cfg.p as u128, (den - self.den) as u64);
        let coeffs = self.coeffs.iter().map(|&c| m.mul(m.reduce(c), scale)).collect();
        Self::from_raw(self.cfg, self.nvars(), coeffs, prec, den, self.poly)
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.cfg.p != other.cfg.p
            || self.cfg.deg_cap != other.cfg.deg_cap
            || self.nvars() != other.nvars()
        {
            return Err(Error::ConfigMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let den = self.den.max(other.den);
        let a = self.with_den(den)?;
        let b = other.with_den(den)?;
        let prec = a.prec.min(b.prec);
        let m = self.cfg.modulus(prec as i64 + den as i64)?;
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| m.add(m.reduce(x), m.reduce(y)))
            .collect();
        Self::from_raw(self.cfg, self.nvars(), coeffs, prec, den, a.poly && b.poly)
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for c in s.coeffs.iter_mut() {
            *c = self.modulus.neg(*c);
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by a p-adic scalar.
    pub fn scale(&self, c: &PAdicNum) -> Result<Self> {
        if c.cfg().p != self.cfg.p {
            return Err(Error::ConfigMismatch);
        }
        if c.is_zero() {
            let prec = (c.prec() - self.den as i32).min(self.prec + c.prec());
            return Self::from_raw(self.cfg, self.nvars(), Vec::new(), prec, 0, self.poly);
        }
        let s = c.shift();
        let den = self.den + (-s).max(0) as u32;
        let prec = (self.prec as i64 + s as i64).min(c.prec() as i64 - self.den as i64);
        let prec = i32::try_from(prec).map_err(|_| Error::ModulusOverflow { digits: prec })?;
        let digits = (prec as i64 + den as i64).min(self.cfg.exact_digits() as i64);
        let m = self.cfg.modulus(digits)?;
        let factor = m.mul(
            m.reduce(c.mantissa()),
            m.pow(self.cfg.p as u128, s.max(0) as u64),
        );
        let coeffs = self
            .coeffs
            .iter()
            .map(|&x| m.mul(m.reduce(x), factor))
            .collect();
        Self::from_raw(self.cfg, self.nvars(), coeffs, prec, den, self.poly)
    }

    pub fn scale_int(&self, n: i128) -> Result<Self> {
        self.scale(&PAdicNum::exact(self.cfg, n))
    }

    /// Keeps only the monomials of total degree `deg`.
    pub fn homogeneous_part(&self, deg: u32) -> Self {
        let mut s = self.clone();
        for i in 0..s.coeffs.len() {
            if s.table.degree(i) != deg {
                s.coeffs[i] = 0;
            }
        }
        s.poly = true;
        s
    }

    /// Drops monomials of degree above `deg`.
    pub fn truncate(&self, deg: u32) -> Self {
        let mut s = self.clone();
        let keep = s.table.count_upto(deg);
        for c in s.coeffs[keep..].iter_mut() {
            *c = 0;
        }
        s.poly = s.poly || deg < self.cfg.deg_cap;
        if deg >= self.cfg.deg_cap {
            s.poly = self.poly;
        }
        s
    }

    /// Smallest monomial (degree, then table order) where the two series
    /// differ at their common precision, or `None` when they agree.
    pub fn first_difference(&self, other: &Self) -> Result<Option<Vec<u32>>> {
        let d = self.sub(other)?;
        let prec = d.prec;
        for i in 0..d.coeffs.len() {
            if d.coeffs[i] == 0 {
                continue;
            }
            let v = d.modulus.valuation(d.coeffs[i]).unwrap_or(u32::MAX) as i64 - d.den as i64;
            if v < prec as i64 {
                return Ok(Some(d.table.exps(i).to_vec()));
            }
        }
        Ok(None)
    }

    /// Coefficient-wise agreement at the smaller of the two precisions.
    pub fn eq_at_prec(&self, other: &Self) -> Result<bool> {
        Ok(self.first_difference(other)?.is_none())
    }

    /// Canonical integral residues modulo `p^digits`; for comparisons and
    /// golden output.
    pub fn residues(&self, digits: u32) -> Result<Vec<u128>> {
        if self.den != 0 {
            return Err(Error::InvalidArgument("series has denominators".into()));
        }
        if digits as i32 > self.prec {
            return Err(Error::PrecisionExhausted(format!(
                "requested {digits} digits from a series known to {}",
                self.prec
            )));
        }
        let m = self.cfg.modulus(digits as i64)?;
        Ok(self.coeffs.iter().map(|&c| m.reduce(c)).collect())
    }

    pub fn one(cfg: PrimeConfig, nvars: usize) -> Self {
        let mut s = Self::zero(cfg, nvars);
        s.coeffs[0] = 1;
        s
    }
}

fn numerator_of(c: &PAdicNum, den: u32, m: &Modulus) -> u128 {
    if c.is_zero() {
        return 0;
    }
    let e = c.shift() as i64 + den as i64;
    debug_assert!(e >= 0);
    m.mul(m.reduce(c.mantissa()), m.pow(c.cfg().p as u128, e as u64))
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const NAMES: [&str; 4] = ["X", "Y", "Z", "W"];
        let mut first = true;
        for i in 0..self.coeffs.len() {
            if self.coeffs[i] == 0 {
                continue;
            }
            let c = self.modulus.signed(self.coeffs[i]);
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if self.den > 0 {
                write!(f, "({c}/{}^{})", self.cfg.p, self.den)?;
            } else {
                write!(f, "{c}")?;
            }
            for (v, &e) in self.table.exps(i).iter().enumerate() {
                let name = NAMES
                    .get(v)
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| format!("X{}", v + 1));
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.is_exact() {
            Ok(())
        } else {
            write!(f, " + O({}^{})", self.cfg.p, self.prec)
        }
    }
}
