//! Multiplication and composition kernels.

use super::monomial::MonomialTable;
use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::modring::Modulus;

/// Product of two raw coefficient vectors, dropping degrees above `cap`.
pub(crate) fn mul_raw(t: &MonomialTable, m: &Modulus, a: &[u128], b: &[u128], cap: u32) -> Vec<u128> {
    let cap = cap.min(t.deg_cap());
    let mut out = vec![0u128; t.len()];
    if t.nvars() == 1 {
        let n = cap as usize + 1;
        for i in 0..n {
            let ai = a[i];
            if ai == 0 {
                continue;
            }
            for j in 0..n - i {
                let bj = b[j];
                if bj != 0 {
                    out[i + j] = m.mul_add(ai, bj, out[i + j]);
                }
            }
        }
        return out;
    }
    let a_end = t.count_upto(cap);
    for i in 0..a_end {
        let ai = a[i];
        if ai == 0 {
            continue;
        }
        let ci = t.code(i);
        let b_end = t.count_upto(cap - t.degree(i));
        for j in 0..b_end {
            let bj = b[j];
            if bj == 0 {
                continue;
            }
            let k = t
                .index_of_code(ci + t.code(j))
                .expect("product monomial inside the table");
            out[k] = m.mul_add(ai, bj, out[k]);
        }
    }
    out
}

/// `acc += c * x` coefficient-wise.
fn axpy(m: &Modulus, acc: &mut [u128], c: u128, x: &[u128]) {
    if c == 0 {
        return;
    }
    for (a, &v) in acc.iter_mut().zip(x) {
        if v != 0 {
            *a = m.mul_add(c, v, *a);
        }
    }
}

impl TruncatedSeries {
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let den = self.den + other.den;
        if den > self.cfg.den_cap {
            return Err(Error::DenominatorCapExceeded {
                needed: den as i64,
                cap: self.cfg.den_cap,
            });
        }
        let prec = (self.prec - other.den as i32).min(other.prec - self.den as i32);
        if prec <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "product precision {prec} <= 0"
            )));
        }
        let m = self.cfg.modulus(prec as i64 + den as i64)?;
        let a: Vec<u128> = self.coeffs.iter().map(|&c| m.reduce(c)).collect();
        let b: Vec<u128> = other.coeffs.iter().map(|&c| m.reduce(c)).collect();
        let out = mul_raw(&self.table, &m, &a, &b, self.cfg.deg_cap);
        let poly = self.poly
            && other.poly
            && match (self.degree(), other.degree()) {
                (Some(x), Some(y)) => x + y <= self.cfg.deg_cap,
                _ => true,
            };
        Self::from_raw(self.cfg, self.nvars(), out, prec, den, poly)
    }

    pub fn pow(&self, mut e: u32) -> Result<Self> {
        let mut acc = Self::one(self.cfg, self.nvars());
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

    /// `outer(inner_1, ..., inner_d)` truncated to the degree cap.
    pub fn compose(&self, inner: &[TruncatedSeries]) -> Result<Self> {
        self.compose_to(inner, self.cfg.deg_cap)
    }

    /// Composition keeping only degrees up to `cap`.
    pub(crate) fn compose_to(&self, inner: &[TruncatedSeries], cap: u32) -> Result<Self> {
        if inner.len() != self.nvars() {
            return Err(Error::InvalidArgument(format!(
                "composition needs {} inner series, got {}",
                self.nvars(),
                inner.len()
            )));
        }
        let first = inner
            .first()
            .ok_or_else(|| Error::InvalidArgument("no inner series".into()))?;
        let nv = first.nvars();
        for (index, s) in inner.iter().enumerate() {
            if s.cfg.p != self.cfg.p || s.cfg.deg_cap != self.cfg.deg_cap || s.nvars() != nv {
                return Err(Error::ConfigMismatch);
            }
            if !s.has_zero_constant() {
                return Err(Error::InnerConstantTermNonzero { index });
            }
            if s.den != 0 {
                return Err(Error::InvalidArgument(format!(
                    "inner series {index} has denominators"
                )));
            }
        }
        let inner_prec = inner.iter().map(|s| s.prec).min().unwrap_or(i32::MAX);
        let prec = self.prec.min(inner_prec - self.den as i32);
        if prec <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "composition precision {prec} <= 0"
            )));
        }
        let den = self.den;
        let m = self.cfg.modulus(prec as i64 + den as i64)?;
        let cap = cap.min(self.cfg.deg_cap);
        let t_out = super::monomial::table(nv, self.cfg.deg_cap);
        let outer_deg = self.degree().unwrap_or(0).min(cap);

        // powers[v][e] = inner_v^e, e up to the outer degree
        let mut powers: Vec<Vec<Vec<u128>>> = Vec::with_capacity(inner.len());
        for s in inner {
            let base: Vec<u128> = s.coeffs.iter().map(|&c| m.reduce(c)).collect();
            let mut one = vec![0u128; t_out.len()];
            one[0] = m.reduce(1);
            let mut pw = vec![one];
            for e in 1..=outer_deg {
                let next = mul_raw(&t_out, &m, &pw[e as usize - 1], &base, cap);
                let vanished = next.iter().all(|&c| c == 0);
                pw.push(next);
                if vanished {
                    break;
                }
            }
            powers.push(pw);
        }

        let outer: Vec<u128> = self.coeffs.iter().map(|&c| m.reduce(c)).collect();
        let ctx = ComposeCtx {
            outer_table: &self.table,
            outer: &outer,
            powers: &powers,
            t_out: &t_out,
            m: &m,
            cap,
            max_deg: outer_deg,
        };
        let mut prefix = vec![0u32; self.nvars()];
        let out = ctx.eval(0, &mut prefix, 0);

        let inner_poly = inner.iter().all(|s| s.poly);
        let max_inner = inner.iter().filter_map(|s| s.degree()).max().unwrap_or(0);
        let poly = self.poly
            && inner_poly
            && self.degree().unwrap_or(0) * max_inner <= cap
            && cap == self.cfg.deg_cap;
        Self::from_raw(self.cfg, nv, out, prec, den, poly)
    }
}

struct ComposeCtx<'a> {
    outer_table: &'a MonomialTable,
    outer: &'a [u128],
    powers: &'a [Vec<Vec<u128>>],
    t_out: &'a MonomialTable,
    m: &'a Modulus,
    cap: u32,
    max_deg: u32,
}

impl ComposeCtx<'_> {
    /// Sum over outer monomials sharing `prefix[..v]` of
    /// `c * prod_{w >= v} inner_w^{e_w}`.
    fn eval(&self, v: usize, prefix: &mut Vec<u32>, used: u32) -> Vec<u128> {
        let d = prefix.len();
        let mut acc = vec![0u128; self.t_out.len()];
        let budget = self.max_deg - used;
        if v + 1 == d {
            let pw = &self.powers[v];
            for e in 0..=budget {
                if e as usize >= pw.len() {
                    break;
                }
                prefix[v] = e;
                if let Some(idx) = self.outer_table.index_of(prefix) {
                    axpy(self.m, &mut acc, self.outer[idx], &pw[e as usize]);
                }
            }
            prefix[v] = 0;
            return acc;
        }
        let pw = &self.powers[v];
        for e in 0..=budget {
            if e as usize >= pw.len() {
                break;
            }
            prefix[v] = e;
            let rest = self.eval(v + 1, prefix, used + e);
            if rest.iter().all(|&c| c == 0) {
                continue;
            }
            let term = if e == 0 {
                rest
            } else {
                mul_raw(self.t_out, self.m, &pw[e as usize], &rest, self.cap)
            };
            for (a, t) in acc.iter_mut().zip(term) {
                *a = self.m.add(*a, t);
            }
        }
        prefix[v] = 0;
        acc
    }
}
