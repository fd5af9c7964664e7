//! The formal logarithm `Log' = 1 / (dF/dY)(X, 0)`, `Log(0) = 0`.
//!
//! Degree-`k` coefficients pick up a denominator dividing `k`, so the series
//! is stored with common denominator `p^{floor(log_p M)}`.

use super::checks::{compare, Verdict};
use super::FormalGroup;
use crate::error::{Error, Result};
use crate::ext::ExtElem;
use crate::padic::Valuation;
use crate::series::TruncatedSeries;

#[derive(Clone, Debug)]
pub struct FormalLog {
    series: TruncatedSeries,
    scale: u32,
}

/// `Log(z)`, stored as `p^den Log(z)` in the ring of `z`.
#[derive(Clone, Debug)]
pub struct LogEvaluation {
    pub numerator: ExtElem,
    pub den: u32,
    /// Valuation of `Log(z)` itself (normalized, `val(p) = e`).
    pub valuation: Valuation,
    /// `Log(z)` is correct modulo `pi^guaranteed`.
    pub guaranteed: i64,
}

impl LogEvaluation {
    /// `Log(z)` vanishes to the guaranteed precision.
    pub fn is_zero(&self) -> bool {
        self.valuation.is_at_least(self.guaranteed)
    }
}

pub fn formal_log(group: &FormalGroup) -> Result<FormalLog> {
    let cfg = group.cfg();
    let needed = cfg.log_p_floor(cfg.deg_cap as u64);
    if needed > cfg.den_cap {
        return Err(Error::DenominatorCapExceeded {
            needed: needed as i64,
            cap: cfg.den_cap,
        });
    }
    let dy = group.law().derivative(1)?.restrict_to(0)?;
    let dlog = dy.reciprocal()?;
    let series = dlog.integrate()?;
    Ok(FormalLog {
        series,
        scale: group.scale(),
    })
}

impl FormalLog {
    pub fn series(&self) -> &TruncatedSeries {
        &self.series
    }

    pub fn den(&self) -> u32 {
        self.series.den()
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// `Log(F(X,Y)) = Log(X) + Log(Y)`.
    pub fn check_additivity(&self, group: &FormalGroup) -> Result<Verdict> {
        let left = self.series.compose(&[group.law().clone()])?;
        let right = self.series.embed(2, 0)?.add(&self.series.embed(2, 1)?)?;
        compare(&left, &right)
    }

    /// `Log([a](X)) = a Log(X)`.
    pub fn check_linearization(&self, endo: &super::Endomorphism) -> Result<Verdict> {
        let left = self.series.compose(std::slice::from_ref(&endo.series))?;
        let right = self.series.scale(&endo.a)?;
        compare(&left, &right)
    }

    /// Smallest valuation of an omitted term `c_k z^k`, `k > M`, using
    /// `val(c_k) >= -val_p(k)`.
    fn tail_bound(&self, vz: i64, e: i64) -> i64 {
        let cfg = self.series.cfg();
        let ln_p = (cfg.p as f64).ln();
        // x vz - e log_p(x) is increasing for x > e / (vz ln p); once it
        // exceeds the running minimum, no later term can go lower.
        let turn = e as f64 / (vz as f64 * ln_p);
        let mut best = i64::MAX;
        let mut k = cfg.deg_cap as u64 + 1;
        loop {
            let vk = cfg.val_int(k as i128).unwrap_or(0) as i64;
            best = best.min(k as i64 * vz - e * vk);
            let lower = k as f64 * vz as f64 - e as f64 * (k as f64).ln() / ln_p;
            if k as f64 > turn && lower >= best as f64 {
                return best;
            }
            k += 1;
        }
    }

    /// `Log(z)` for a point of the maximal ideal, in stored coordinates.
    pub fn eval(&self, z: &ExtElem) -> Result<LogEvaluation> {
        let ring = z.ring();
        let e = ring.ram_index() as i64;
        let vz = z.val_ext()?.lower_bound();
        if vz <= 0 {
            return Err(Error::DivergentEvaluation(format!(
                "the logarithm converges only on val(z) > 0, got {}",
                z.val_ext()?
            )));
        }
        let den = self.series.den() as i64;
        let top = self.series.cfg().deg_cap as usize;
        let mut acc = self.series.coeff_in(ring, top);
        for k in (0..top).rev() {
            acc = acc.mul(z)?.add(&self.series.coeff_in(ring, k))?;
        }
        let guaranteed = (e * self.series.prec() as i64)
            .min(e * (ring.digits() as i64 - den))
            .min(z.prec() - e * den)
            .min(self.tail_bound(vz, e));
        let valuation = match acc.val_ext()? {
            Valuation::Finite(v) => Valuation::Finite(v - e * den),
            Valuation::AtLeast(v) => Valuation::AtLeast(v - e * den),
        };
        Ok(LogEvaluation {
            numerator: acc,
            den: den as u32,
            valuation,
            guaranteed,
        })
    }

    /// `Log_F(z)` for a point given in original coordinates.
    ///
    /// At scale `c > 0` the point maps to `z / p^c`, which lies in the
    /// maximal ideal only when `val(z) > c e`.
    pub fn eval_original(&self, z: &ExtElem) -> Result<LogEvaluation> {
        if self.scale == 0 {
            return self.eval(z);
        }
        let ring = z.ring();
        let e = ring.ram_index() as i64;
        let vz = z.val_ext()?;
        if !vz.is_at_least(self.scale as i64 * e + 1) {
            return Err(Error::DivergentEvaluation(format!(
                "the group is stored at scale {}: val(z) = {vz} does not exceed {} \
                 so z / p^{} leaves the disc of convergence",
                self.scale,
                self.scale as i64 * e,
                self.scale
            )));
        }
        let pc = ExtElem::from_int(ring, (ring.cfg().p as i128).pow(self.scale));
        let inner = z.div(&pc)?;
        let mut out = self.eval(&inner)?;
        // Log_F(z) = p^c Log_G(z / p^c)
        let shift = self.scale as i64 * e;
        out.valuation = match out.valuation {
            Valuation::Finite(v) => Valuation::Finite(v + shift),
            Valuation::AtLeast(v) => Valuation::AtLeast(v + shift),
        };
        out.guaranteed += shift;
        out.numerator = out.numerator.mul(&pc)?;
        Ok(out)
    }
}
