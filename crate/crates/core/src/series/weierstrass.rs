//! Weierstrass preparation `h = U * P` for one-variable integral series.
//!
//! With `s` the index of the first unit coefficient, split
//! `h = h_low + X^s h_high` and iterate `V <- h_high^{-1} (1 - (h_low V) div X^s)`;
//! the map contracts by a factor `p` because `h_low = 0 mod p`. Then
//! `P = X^s + (h_low V)_{<s}` and `U = V^{-1}`.
//!
//! The coefficients of `V` at degree `j` depend on degrees up to `j + s` of
//! the previous iterate, so the iteration runs at an enlarged degree cap and
//! treats `h` as the polynomial given by its truncation.

use super::TruncatedSeries;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct WeierstrassFactors {
    pub unit: TruncatedSeries,
    /// Monic of degree `wdeg`, lower coefficients divisible by `p`.
    pub distinguished: TruncatedSeries,
    pub wdeg: u32,
}

impl TruncatedSeries {
    /// Index of the first coefficient that is a unit.
    pub fn weierstrass_degree(&self) -> Result<u32> {
        if self.nvars() != 1 {
            return Err(Error::InvalidArgument("Weierstrass degree needs one variable".into()));
        }
        let p = self.cfg.p as u128;
        let den_pow = (self.cfg.p as u128).pow(self.den);
        for (k, &c) in self.coeffs.iter().enumerate() {
            // a unit true coefficient has numerator of valuation exactly den
            if c != 0 && c % den_pow == 0 && !(c / den_pow).is_multiple_of(p) {
                return Ok(k as u32);
            }
        }
        Err(Error::InfiniteHeightAtCap {
            deg_cap: self.cfg.deg_cap,
        })
    }

    pub fn weierstrass_prep(&self) -> Result<WeierstrassFactors> {
        if self.den != 0 {
            return Err(Error::InvalidArgument("Weierstrass preparation needs integral coefficients".into()));
        }
        let s = self.weierstrass_degree()?;
        let cfg = self.cfg;
        let prec = self.prec.min(cfg.prec as i32);
        let big_cap = cfg.deg_cap + s * (prec as u32 + 1);
        let wide = cfg.with_deg_cap(big_cap);
        let m = cfg.modulus(prec as i64)?;

        let mut low = vec![0u128; big_cap as usize + 1];
        let mut high = vec![0u128; big_cap as usize + 1];
        for k in 0..self.coeffs.len() {
            let c = m.reduce(self.coeffs[k]);
            if (k as u32) < s {
                low[k] = c;
            } else {
                high[k - s as usize] = c;
            }
        }
        let low = TruncatedSeries::from_raw(wide, 1, low, prec, 0, true)?;
        let high = TruncatedSeries::from_raw(wide, 1, high, prec, 0, true)?;
        let high_inv = high.reciprocal()?;
        let one = TruncatedSeries::one(wide, 1).capped(prec)?;

        let mut v = high_inv.clone();
        let mut settled = false;
        for _ in 0..=(prec as usize + 2) {
            let lv = low.mul(&v)?;
            let shifted = lv.shift_down(s);
            let next = high_inv.mul(&one.sub(&shifted)?)?;
            if next.raw() == v.raw() {
                settled = true;
                break;
            }
            v = next;
        }
        if !settled {
            return Err(Error::PrecisionExhausted("Weierstrass iteration did not settle".into()));
        }

        let lv = low.mul(&v)?;
        let mut pcoef = vec![0u128; cfg.deg_cap as usize + 1];
        pcoef[..s as usize].copy_from_slice(&lv.raw()[..s as usize]);
        pcoef[s as usize] = 1;
        let distinguished = TruncatedSeries::from_raw(cfg, 1, pcoef, prec, 0, true)?;
        let v_short = TruncatedSeries::from_raw(cfg, 1, v.raw()[..=cfg.deg_cap as usize].to_vec(), prec, 0, false)?;
        let unit = v_short.reciprocal()?;
        Ok(WeierstrassFactors {
            unit,
            distinguished,
            wdeg: s,
        })
    }

    /// `(h - h_{<s}) / X^s`.
    fn shift_down(&self, s: u32) -> Self {
        let mut out = self.clone();
        let n = out.coeffs.len();
        for k in 0..n {
            out.coeffs[k] = if k + (s as usize) < n { self.coeffs[k + s as usize] } else { 0 };
        }
        out
    }
}
