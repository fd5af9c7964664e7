use std::sync::Arc;

use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::ext::{ExtElem, ExtRing};

/// A value together with the valuation up to which it is guaranteed.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub value: ExtElem,
    /// The value is correct modulo `pi^guaranteed`.
    pub guaranteed: i64,
}

impl Evaluation {
    /// The value vanishes to the guaranteed precision.
    pub fn is_zero(&self) -> bool {
        match self.value.val_ext() {
            Ok(v) => v.is_at_least(self.guaranteed),
            Err(_) => false,
        }
    }
}

impl TruncatedSeries {
    /// Coefficient `k` of an integral one-variable series as a ring element.
    pub(crate) fn coeff_in(&self, ring: &Arc<ExtRing>, k: usize) -> ExtElem {
        let c = self.modulus.signed(self.coeffs[k]);
        ExtElem::from_coeffs(ring, &[c])
    }

    /// `h(z)` for a one-variable integral series and a point of the maximal
    /// ideal (any point when `h` is a polynomial).
    ///
    /// The guarantee is `min(e*prec_floor, prec(z), (M+1) val(z))`, the last
    /// term dropping out for polynomials.
    pub fn eval_at(&self, z: &ExtElem) -> Result<Evaluation> {
        if self.nvars() != 1 {
            return Err(Error::InvalidArgument("eval_at needs one variable".into()));
        }
        if self.den != 0 {
            return Err(Error::InvalidArgument(
                "eval_at needs integral coefficients".into(),
            ));
        }
        let ring = z.ring();
        if ring.cfg().p != self.cfg.p {
            return Err(Error::ConfigMismatch);
        }
        let e = ring.ram_index() as i64;
        let vz = z.val_ext()?;
        let mut g = (e * self.prec as i64).min(z.prec()).min(ring.val_cap());
        if !self.poly {
            let v = vz.lower_bound();
            if v <= 0 {
                return Err(Error::DivergentEvaluation(format!(
                    "val(z) = {vz} and the series has a truncated tail"
                )));
            }
            g = g.min((self.cfg.deg_cap as i64 + 1) * v);
        }
        let top = self.degree().unwrap_or(0) as usize;
        let mut acc = self.coeff_in(ring, top);
        for k in (0..top).rev() {
            acc = acc.mul(z)?.add(&self.coeff_in(ring, k))?;
        }
        let value = acc.with_prec(g);
        let guaranteed = value.prec();
        Ok(Evaluation { value, guaranteed })
    }
}

/// Newton refinement of a root of `f` from `seed`, to `target` valuation
/// units.
pub fn hensel_lift(f: &TruncatedSeries, seed: &ExtElem, target: i64) -> Result<ExtElem> {
    let ring = seed.ring();
    if target > ring.val_cap() {
        return Err(Error::PrecisionExhausted(format!(
            "target {target} exceeds the ring precision {}",
            ring.val_cap()
        )));
    }
    let df = f.derivative(0)?;
    let fz = f.eval_at(seed)?;
    let dz = df.eval_at(seed)?;
    let vf = fz.value.val_ext()?;
    let vd = dz.value.val_ext()?;
    let vd_fin = match vd.finite() {
        Some(v) => v,
        None => {
            return Err(Error::NewtonHypothesisFailed(
                "f' vanishes at the seed".into(),
            ))
        }
    };
    if !vf.is_at_least(2 * vd_fin + 1) {
        return Err(Error::NewtonHypothesisFailed(format!(
            "val f(z) = {vf}, val f'(z) = {vd}"
        )));
    }
    let mut z = seed.clone();
    for _ in 0..128 {
        let fz = f.eval_at(&z)?;
        if fz.value.val_ext()?.is_at_least(target) {
            return Ok(z.with_prec(target.max(0)));
        }
        if fz.guaranteed < target {
            return Err(Error::PrecisionExhausted(format!(
                "f(z) only known to {}",
                fz.guaranteed
            )));
        }
        let dz = df.eval_at(&z)?;
        let step = fz.value.div(&dz.value)?;
        z = ExtElem::from_raw(ring, z.sub(&step)?.coeffs().to_vec(), ring.val_cap());
    }
    Err(Error::PrecisionExhausted("Newton iteration did not settle".into()))
}
