use super::monomial;
use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::padic::PAdicNum;

impl TruncatedSeries {
    /// Formal partial derivative in variable `var` (0-based).
    ///
    /// Valid through degree `M - 1`; for a series with a truncated tail the
    /// degree-`M` coefficient of the result is unknown and stored as zero.
    pub fn derivative(&self, var: usize) -> Result<Self> {
        if var >= self.nvars() {
            return Err(Error::InvalidArgument(format!("no variable {var}")));
        }
        let m = self.modulus;
        let mut out = vec![0u128; self.coeffs.len()];
        let mut e = vec![0u32; self.nvars()];
        for i in 0..self.coeffs.len() {
            let c = self.coeffs[i];
            if c == 0 {
                continue;
            }
            e.copy_from_slice(self.table.exps(i));
            let k = e[var];
            if k == 0 {
                continue;
            }
            e[var] -= 1;
            let j = self.table.index_of(&e).expect("lower monomial exists");
            out[j] = m.mul(c, m.reduce(k as u128));
        }
        Self::from_raw(self.cfg, self.nvars(), out, self.prec, self.den, self.poly)
    }

    /// The first-order coefficients `dh/dX_i(0)`.
    pub fn linear_part(&self) -> Vec<PAdicNum> {
        (0..self.nvars())
            .map(|v| {
                let mut e = vec![0u32; self.nvars()];
                e[v] = 1;
                self.coeff(&e)
            })
            .collect()
    }

    /// Sets every variable except `var` to zero, giving a one-variable series.
    pub fn restrict_to(&self, var: usize) -> Result<Self> {
        if var >= self.nvars() {
            return Err(Error::InvalidArgument(format!("no variable {var}")));
        }
        let mut out = vec![0u128; self.cfg.deg_cap as usize + 1];
        for i in 0..self.coeffs.len() {
            let e = self.table.exps(i);
            if e.iter().enumerate().all(|(w, &x)| w == var || x == 0) {
                out[e[var] as usize] = self.coeffs[i];
            }
        }
        Self::from_raw(self.cfg, 1, out, self.prec, self.den, self.poly)
    }

    /// A one-variable series viewed as a series in `X_var` among `nvars`.
    pub fn embed(&self, nvars: usize, var: usize) -> Result<Self> {
        if self.nvars() != 1 || var >= nvars {
            return Err(Error::InvalidArgument("embed needs a one-variable series".into()));
        }
        let t = monomial::table(nvars, self.cfg.deg_cap);
        let mut out = vec![0u128; t.len()];
        let mut e = vec![0u32; nvars];
        for k in 0..self.coeffs.len() {
            e[var] = k as u32;
            out[t.index_of(&e).expect("pure power in table")] = self.coeffs[k];
        }
        Self::from_raw(self.cfg, nvars, out, self.prec, self.den, self.poly)
    }

    /// Reorders variables: variable `v` of the result is variable `perm[v]`
    /// of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let d = self.nvars();
        let mut seen = vec![false; d];
        if perm.len() != d || perm.iter().any(|&v| v >= d || std::mem::replace(&mut seen[v], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
        let mut out = vec![0u128; self.coeffs.len()];
        let mut e = vec![0u32; d];
        for i in 0..self.coeffs.len() {
            let src = self.table.exps(i);
            for v in 0..d {
                e[v] = src[perm[v]];
            }
            out[self.table.index_of(&e).expect("permuted monomial")] = self.coeffs[i];
        }
        Self::from_raw(self.cfg, d, out, self.prec, self.den, self.poly)
    }

    /// Antiderivative in one variable with zero constant term.
    ///
    /// Division by `k` at degree `k` raises the common denominator by
    /// `floor(log_p M)` and lowers the precision floor by the same amount.
    pub fn integrate(&self) -> Result<Self> {
        if self.nvars() != 1 {
            return Err(Error::InvalidArgument("integrate needs one variable".into()));
        }
        let cfg = self.cfg;
        let l = cfg.log_p_floor(cfg.deg_cap as u64);
        let den = self.den + l;
        if den > cfg.den_cap {
            return Err(Error::DenominatorCapExceeded {
                needed: den as i64,
                cap: cfg.den_cap,
            });
        }
        let m = self.modulus;
        let p = cfg.p as u128;
        let mut out = vec![0u128; self.coeffs.len()];
        for k in 1..self.coeffs.len() {
            let c = self.coeffs[k - 1];
            if c == 0 {
                continue;
            }
            let mut unit = k as u128;
            let mut v = 0u32;
            while unit.is_multiple_of(p) {
                unit /= p;
                v += 1;
            }
            let inv = m.inv(unit).expect("prime-to-p part is a unit");
            out[k] = m.mul(m.mul(c, inv), m.pow(p, (l - v) as u64));
        }
        let prec = self.prec - l as i32;
        Self::from_raw(cfg, 1, out, prec, den, self.poly)
    }
}

impl TruncatedSeries {
    /// The conjugate `p^{-c} h(p^c X_1, ..., p^c X_d)`: the degree-`k` part is
    /// multiplied by `p^{c(k-1)}`. Needs a zero constant term.
    pub fn rescale(&self, c: u32) -> Result<Self> {
        if c == 0 {
            return Ok(self.clone());
        }
        if !self.has_zero_constant() {
            return Err(Error::InnerConstantTermNonzero { index: 0 });
        }
        let m = self.modulus;
        let p = self.cfg.p as u128;
        let mut out = self.coeffs.clone();
        for (i, o) in out.iter_mut().enumerate() {
            let k = self.table.degree(i);
            if *o != 0 && k > 1 {
                *o = m.mul(*o, m.pow(p, (c * (k - 1)) as u64));
            }
        }
        let s = Self::from_raw(self.cfg, self.nvars(), out, self.prec, self.den, self.poly)?;
        Ok(s.normalize_den())
    }

    /// Lowers the common denominator while every numerator is divisible by `p`.
    pub fn normalize_den(&self) -> Self {
        let mut s = self.clone();
        let p = self.cfg.p as u128;
        while s.den > 0 && s.coeffs.iter().all(|&c| c % p == 0) {
            let digits = s.prec as i64 + s.den as i64 - 1;
            let m = self.cfg.modulus(digits).expect("smaller modulus");
            for c in s.coeffs.iter_mut() {
                *c = m.reduce(*c / p);
            }
            s.den -= 1;
            s.modulus = m;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrimeConfig;

    #[test]
    fn derivative_examples() {
        let cfg = PrimeConfig::new(2, 12, 0, 4).unwrap();
        let x3 = TruncatedSeries::from_coeffs(cfg, &[0, 0, 0, 1]).unwrap();
        assert_eq!(x3.derivative(0).unwrap().coeff(&[2]).to_signed(), Some(3));
        let xy = TruncatedSeries::from_terms(cfg, 2, &[(vec![1, 1], 1)]).unwrap();
        let d = xy.derivative(1).unwrap();
        assert!(d.eq_at_prec(&TruncatedSeries::var(cfg, 2, 0).unwrap()).unwrap());
        let f = TruncatedSeries::from_coeffs(cfg, &[0, 6, 5, 1]).unwrap();
        assert_eq!(f.derivative(0).unwrap().constant_term().to_signed(), Some(6));
        assert_eq!(f.linear_part()[0].to_signed(), Some(6));
    }

    #[test]
    fn linear_part_of_multiplicative_law() {
        let cfg = PrimeConfig::new(3, 6, 0, 4).unwrap();
        let law = TruncatedSeries::from_terms(cfg, 2, &[(vec![1, 0], 1), (vec![0, 1], 1), (vec![1, 1], 1)])
            .unwrap();
        let lp: Vec<_> = law.linear_part().iter().map(|c| c.to_signed().unwrap()).collect();
        assert_eq!(lp, vec![1, 1]);
    }

    #[test]
    fn integrate_geometric_series_is_log() {
        let cfg = PrimeConfig::new(2, 12, 3, 6).unwrap();
        let geo = TruncatedSeries::from_coeffs(cfg, &[1, -1, 1, -1, 1, -1]).unwrap();
        let log = geo.integrate().unwrap();
        assert_eq!(log.den(), 2);
        assert_eq!(log.coeff(&[1]).to_signed(), Some(1));
        let half = log.coeff(&[2]);
        assert_eq!(half.shift(), -1);
        assert!(half.mul(&PAdicNum::exact(cfg, 2)).unwrap().eq_at(&PAdicNum::exact(cfg, -1), 8));
        let third = log.coeff(&[3]).mul(&PAdicNum::exact(cfg, 3)).unwrap();
        assert!(third.eq_at(&PAdicNum::exact(cfg, 1), 8));
    }

    #[test]
    fn rescaling_multiplicative_law() {
        // 2^{-1}((1+2X)(1+2Y)-1) = X + Y + 2XY
        let cfg = PrimeConfig::new(2, 12, 2, 4).unwrap();
        let law = TruncatedSeries::from_terms(cfg, 2, &[(vec![1, 0], 1), (vec![0, 1], 1), (vec![1, 1], 1)])
            .unwrap();
        let r = law.rescale(1).unwrap();
        assert_eq!(r.coeff(&[1, 1]).to_signed(), Some(2));
        assert_eq!(r.coeff(&[1, 0]).to_signed(), Some(1));
        let half = TruncatedSeries::from_terms(cfg, 1, &[(vec![1], 1)])
            .unwrap()
            .add(
                &TruncatedSeries::from_coeffs(cfg, &[0, 0, 1])
                    .unwrap()
                    .scale(&PAdicNum::exact(cfg, 1).divide_exact(&PAdicNum::exact(cfg, 2)).unwrap())
                    .unwrap(),
            )
            .unwrap();
        assert_eq!(half.den(), 1);
        let integral = half.rescale(1).unwrap();
        assert_eq!(integral.den(), 0);
        assert_eq!(integral.coeff(&[2]).to_signed(), Some(1));
    }

    #[test]
    fn permute_swaps() {
        let cfg = PrimeConfig::new(3, 6, 0, 4).unwrap();
        let s = TruncatedSeries::from_terms(cfg, 2, &[(vec![2, 1], 5)]).unwrap();
        let t = s.permute(&[1, 0]).unwrap();
        assert_eq!(t.coeff(&[1, 2]).to_signed(), Some(5));
    }
}
