//! The degree-by-degree functional-equation solver.
//!
//! Given one-variable `f`, `g` with common linear coefficient `pi` and a
//! linear form `L`, the unique `phi = L + O(deg 2)` with
//! `g(phi) = phi(f, ..., f)` is built one degree at a time: if `phi_m` is
//! correct through degree `m`, the degree-`m+1` correction is
//!
//! ```text
//! r = (phi_m(f, ..., f) - g(phi_m))_{m+1} / (pi - pi^{m+1}).
//! ```
//!
//! Lubin–Tate groups and endomorphisms (`f = g`) and commutants of a stable
//! series (`f = g = u`) are both instances.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{PAdicNum, PrimeConfig};
use crate::series::TruncatedSeries;

/// Precision accounting of one solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PrecisionBudget {
    /// Precision floor the recursion started from.
    pub working_prec: i32,
    /// Loss predicted from the divisors before solving.
    pub declared_loss: i64,
    /// Drop of the precision floor observed during the solve.
    pub tracked_loss: i64,
    /// Guaranteed precision of the result.
    pub output_prec: i32,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub series: TruncatedSeries,
    pub budget: PrecisionBudget,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    RootOfUnityAtPrecision,
}

/// Classifies `u'(0)`: zero, a root of unity modulo `p^N`, or neither.
pub fn is_stable(u: &TruncatedSeries) -> Result<Stability> {
    if u.nvars() != 1 {
        return Err(Error::InvalidArgument("stability is defined for one variable".into()));
    }
    if !u.has_zero_constant() {
        return Err(Error::InnerConstantTermNonzero { index: 0 });
    }
    let cfg = u.cfg();
    let a = u.coeff(&[1]);
    let n = (cfg.prec as i32).min(a.prec());
    if a.val_p().is_at_least(n as i64) {
        return Ok(Stability::Unstable);
    }
    if a.shift() != 0 {
        // positive valuation: never a root of unity; negative: not integral
        return Ok(Stability::Stable);
    }
    let e = if cfg.p == 2 { 2 } else { cfg.p as u32 - 1 };
    let one = PAdicNum::exact(cfg, 1);
    if a.pow(e)?.eq_at(&one, n) {
        Ok(Stability::RootOfUnityAtPrecision)
    } else {
        Ok(Stability::Stable)
    }
}

fn linear_series(cfg: PrimeConfig, lin: &[PAdicNum], prec: i32) -> Result<TruncatedSeries> {
    let d = lin.len();
    let mut terms = Vec::with_capacity(d);
    for (i, c) in lin.iter().enumerate() {
        if c.shift() < 0 {
            return Err(Error::InvalidArgument(format!(
                "linear coefficient {i} is not integral"
            )));
        }
        let mut e = vec![0u32; d];
        e[i] = 1;
        terms.push((e, *c));
    }
    let mut s = TruncatedSeries::from_padic_terms(cfg, d, &terms, prec, false)?;
    s = s.capped(prec)?;
    Ok(s)
}

fn pi_of(f: &TruncatedSeries, g: &TruncatedSeries) -> Result<PAdicNum> {
    for s in [f, g] {
        if s.nvars() != 1 {
            return Err(Error::InvalidArgument("f and g must be one-variable".into()));
        }
        if !s.has_zero_constant() {
            return Err(Error::InnerConstantTermNonzero { index: 0 });
        }
        if !s.is_integral() {
            return Err(Error::InvalidArgument("f and g must be integral".into()));
        }
    }
    let pf = f.coeff(&[1]);
    let pg = g.coeff(&[1]);
    let n = pf.prec().min(pg.prec());
    if !pf.eq_at(&pg, n) {
        return Err(Error::InvalidArgument(format!(
            "linear coefficients differ: {pf} vs {pg}"
        )));
    }
    Ok(pf)
}

/// Valuations `v(pi - pi^{m+1})` for `m = 1..M-1`.
fn divisor_losses(pi: &PAdicNum, deg_cap: u32) -> Result<Vec<(PAdicNum, u32)>> {
    let mut out = Vec::new();
    for m in 1..deg_cap {
        let d = pi.sub(&pi.pow(m + 1)?)?;
        let v = d.val_p().finite().ok_or_else(|| {
            Error::PrecisionExhausted(format!(
                "divisor pi - pi^{} vanishes at precision {}",
                m + 1,
                d.prec()
            ))
        })?;
        if v < 0 {
            return Err(Error::InvalidArgument("linear coefficient is not integral".into()));
        }
        out.push((d, v as u32));
    }
    Ok(out)
}

fn recursion(
    f: &TruncatedSeries,
    g: &TruncatedSeries,
    lin: &[PAdicNum],
    start_prec: i32,
    divisors: &[(PAdicNum, u32)],
) -> Result<Solution> {
    let cfg = f.cfg();
    let d = lin.len();
    if d == 0 {
        return Err(Error::InvalidArgument("empty linear form".into()));
    }
    let f = f.capped(start_prec)?;
    let g = g.capped(start_prec)?;
    let inners: Vec<TruncatedSeries> = (0..d).map(|i| f.embed(d, i)).collect::<Result<_>>()?;
    let mut phi = linear_series(cfg, lin, start_prec)?;
    let start = phi.prec();
    let p = cfg.p as u128;
    let mut declared = 0i64;

    for m in 1..cfg.deg_cap {
        let (delta, v) = &divisors[m as usize - 1];
        declared += *v as i64;
        let lhs = phi.compose_to(&inners, m + 1)?;
        let rhs = g.compose_to(std::slice::from_ref(&phi), m + 1)?;
        let diff = lhs.sub(&rhs)?;
        let new_prec = diff.prec() - *v as i32;
        if new_prec <= 0 {
            return Err(Error::PrecisionExhausted(format!(
                "degree {} correction has no precision left",
                m + 1
            )));
        }
        let dm = diff.modulus();
        let out_m = cfg.modulus(new_prec as i64)?;
        let pv = p.pow(*v);
        let unit = delta.mantissa() % out_m.value();
        let unit_inv = out_m.inv(unit).ok_or(Error::NonUnit)?;
        let mut next = phi.capped(new_prec)?;
        let table = diff.table().clone();
        for idx in table.degree_range(m + 1) {
            let c = diff.raw()[idx];
            if c == 0 {
                continue;
            }
            let vc = dm.valuation(c).unwrap_or(u32::MAX);
            if vc < *v && (vc as i32) < diff.prec() {
                return Err(Error::IntegralityFailure {
                    degree: m + 1,
                    exponents: table.exps(idx).to_vec(),
                    needed: *v,
                });
            }
            let q = out_m.reduce(c / pv);
            next.set_raw(idx, out_m.mul(q, unit_inv));
        }
        phi = next;
    }
    phi.set_poly(false);
    let output_prec = phi.prec();
    Ok(Solution {
        budget: PrecisionBudget {
            working_prec: start,
            declared_loss: declared,
            tracked_loss: (start - output_prec) as i64,
            output_prec,
        },
        series: phi,
    })
}

/// The unique `phi = L + O(deg 2)` with `g(phi) = phi(f, ..., f)`.
///
/// Exact inputs are lifted to `N + M v(pi) + 2` digits so that the output
/// keeps at least `N`; every division is checked for exactness.
pub fn lt_solve(f: &TruncatedSeries, g: &TruncatedSeries, lin: &[PAdicNum]) -> Result<Solution> {
    let cfg = f.cfg();
    let pi = pi_of(f, g)?;
    let vpi = match pi.val_p().finite() {
        Some(v) if v >= 1 => v,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "linear coefficient {pi} must have positive valuation"
            )))
        }
    };
    let divisors = divisor_losses(&pi, cfg.deg_cap)?;
    let lifted = cfg.prec as i64 + cfg.deg_cap as i64 * vpi + 2;
    let start = if f.is_exact() && g.is_exact() {
        if lifted > cfg.exact_digits() as i64 {
            return Err(Error::ModulusOverflow { digits: lifted });
        }
        lifted as i32
    } else {
        f.prec().min(g.prec())
    };
    recursion(f, g, lin, start, &divisors)
}

/// The unique `h = L + O(deg 2)` commuting with the stable series `u`:
/// `h(u(X_1), ..., u(X_d)) = u(h(X_1, ..., X_d))`.
///
/// The declared loss is `sum_{m=2}^{M} v(a - a^m)` with `a = u'(0)`; exact `u`
/// is lifted by that much so the output keeps `N` digits.
pub fn solve_commutant(u: &TruncatedSeries, lin: &[PAdicNum]) -> Result<Solution> {
    match is_stable(u)? {
        Stability::Stable => {}
        other => {
            return Err(Error::NotStable(format!(
                "u'(0) = {} is classified {other:?}",
                u.coeff(&[1])
            )))
        }
    }
    if !u.is_integral() {
        return Err(Error::InvalidArgument("u must be integral".into()));
    }
    let cfg = u.cfg();
    let a = u.coeff(&[1]);
    let divisors = divisor_losses(&a, cfg.deg_cap)?;
    let loss: i64 = divisors.iter().map(|(_, v)| *v as i64).sum();
    let start = if u.is_exact() {
        let lifted = cfg.prec as i64 + loss;
        if lifted > cfg.exact_digits() as i64 {
            return Err(Error::ModulusOverflow { digits: lifted });
        }
        lifted as i32
    } else {
        u.prec()
    };
    recursion(u, u, lin, start, &divisors)
}
