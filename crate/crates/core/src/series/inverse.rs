use super::TruncatedSeries;
use crate::error::{Error, Result};

impl TruncatedSeries {
    /// Multiplicative inverse of an integral series with unit constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        if self.den != 0 {
            return Err(Error::InvalidArgument("reciprocal of a series with denominators".into()));
        }
        let c0 = self.constant_term();
        let inv0 = c0.inv()?;
        let mut x = Self::one(self.cfg, self.nvars()).scale(&inv0)?.capped(self.prec)?;
        x.poly = false;
        // x <- x (2 - a x); each round doubles the correct degree range
        let two = Self::one(self.cfg, self.nvars()).scale_int(2)?;
        let mut known = 1u32;
        while known <= self.cfg.deg_cap {
            let ax = self.mul(&x)?;
            x = x.mul(&two.sub(&ax)?)?;
            known *= 2;
        }
        x.poly = false;
        Ok(x)
    }

    /// Compositional inverse of a one-variable series with `h(0) = 0` and
    /// unit linear coefficient.
    pub fn comp_inverse(&self) -> Result<Self> {
        if self.nvars() != 1 {
            return Err(Error::InvalidArgument("comp_inverse needs one variable".into()));
        }
        if self.den != 0 {
            return Err(Error::InvalidArgument("comp_inverse of a series with denominators".into()));
        }
        if !self.has_zero_constant() {
            return Err(Error::InnerConstantTermNonzero { index: 0 });
        }
        let a = self.coeff(&[1]);
        let ainv = a.inv().map_err(|_| Error::NonUnitDerivative)?;
        let x = Self::var(self.cfg, 1, 0)?;
        let mut g = x.scale(&ainv)?.capped(self.prec)?;
        let m = g.modulus;
        let ainv_raw = m.reduce(ainv.mantissa());
        for k in 2..=self.cfg.deg_cap {
            let hg = self.compose_to(std::slice::from_ref(&g), k)?;
            let err = m.reduce(hg.coeffs[k as usize]);
            if err != 0 {
                let idx = k as usize;
                g.coeffs[idx] = m.sub(g.coeffs[idx], m.mul(ainv_raw, err));
            }
        }
        g.poly = self.degree() == Some(1);
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeConfig;

    #[test]
    fn catalan_inverse() {
        let cfg = PrimeConfig::new(5, 12, 0, 6).unwrap();
        let h = TruncatedSeries::from_coeffs(cfg, &[0, 1, 1]).unwrap();
        let g = h.comp_inverse().unwrap();
        let got: Vec<i128> = (0..=6).map(|k| g.coeff(&[k]).to_signed().unwrap()).collect();
        assert_eq!(got, vec![0, 1, -1, 2, -5, 14, -42]);
        let x = TruncatedSeries::var(cfg, 1, 0).unwrap();
        assert!(h.compose(std::slice::from_ref(&g)).unwrap().eq_at_prec(&x).unwrap());
        assert!(g.compose(&[h]).unwrap().eq_at_prec(&x).unwrap());
    }

    #[test]
    fn linear_inverse() {
        let cfg = PrimeConfig::new(3, 8, 0, 4).unwrap();
        let h = TruncatedSeries::from_coeffs(cfg, &[0, 2]).unwrap();
        let g = h.comp_inverse().unwrap();
        assert_eq!(g.coeff(&[1]).mul(&h.coeff(&[1])).unwrap().to_signed(), Some(1));
        assert_eq!(g.degree(), Some(1));
    }

    #[test]
    fn non_unit_derivative_rejected() {
        let cfg = PrimeConfig::new(3, 8, 0, 4).unwrap();
        let h = TruncatedSeries::from_coeffs(cfg, &[0, 3, 1]).unwrap();
        assert_eq!(h.comp_inverse().unwrap_err(), Error::NonUnitDerivative);
    }

    #[test]
    fn reciprocal_of_one_plus_x() {
        let cfg = PrimeConfig::new(2, 10, 0, 5).unwrap();
        let s = TruncatedSeries::from_coeffs(cfg, &[1, 1]).unwrap();
        let r = s.reciprocal().unwrap();
        let got: Vec<i128> = (0..=5).map(|k| r.coeff(&[k]).to_signed().unwrap()).collect();
        assert_eq!(got, vec![1, -1, 1, -1, 1, -1]);
    }
}
