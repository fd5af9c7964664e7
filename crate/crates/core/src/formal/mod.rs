//! Formal group laws, their endomorphisms and logarithms.
//!
//! A group may be stored in *rescaled coordinates*: with scale `c` the law
//! kept is `p^{-c} F(p^c X, p^c Y)`, the conjugate of `F` by `X -> p^c X`.
//! This is how a Lubin–Tate law whose coefficients are not `p`-integral is
//! still handled with integral arithmetic. Every series passed to or returned
//! from a group-level operation is in the group's stored coordinates; use
//! [`FormalGroup::coords`] to move an original-coordinate series there.

mod checks;
mod log;
mod solve;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::padic::{PAdicNum, PrimeConfig};
use crate::series::TruncatedSeries;

pub use checks::{
    check_axioms, check_endomorphism, check_homomorphism, conjugate_group, decompose_commuting,
    Verdict,
};
pub(crate) use checks::compare;
pub use log::{formal_log, FormalLog, LogEvaluation};
pub use solve::{is_stable, lt_solve, solve_commutant, PrecisionBudget, Solution, Stability};

/// Rescaling exponents tried for a non-integral Lubin–Tate law.
pub const MAX_SCALE: u32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Height {
    Finite(u32),
    InfiniteAtCap,
}

#[derive(Clone, Debug)]
pub enum Provenance {
    /// Built from the Lubin–Tate series `f` (original coordinates) with
    /// `f'(0) = pi`.
    LubinTate { f: TruncatedSeries, pi: PAdicNum },
    Multiplicative,
    UserSupplied,
}

impl Provenance {
    pub fn name(&self) -> &'static str {
        match self {
            Provenance::LubinTate { .. } => "lubin_tate",
            Provenance::Multiplicative => "multiplicative",
            Provenance::UserSupplied => "user_supplied",
        }
    }
}

#[derive(Clone, Debug)]
pub struct FormalGroup {
    law: TruncatedSeries,
    scale: u32,
    height: Height,
    provenance: Provenance,
    /// A stable endomorphism in stored coordinates, used to solve for `[a]`.
    stable_endo: TruncatedSeries,
    budget: Option<PrecisionBudget>,
}

#[derive(Clone, Debug)]
pub struct Endomorphism {
    pub series: TruncatedSeries,
    pub a: PAdicNum,
    pub stability: Stability,
    pub budget: Option<PrecisionBudget>,
}

fn height_from_wdeg(p: u64, series: &TruncatedSeries) -> Result<Height> {
    match series.weierstrass_degree() {
        Ok(w) => {
            let mut h = 0;
            let mut q = 1u64;
            while q < w as u64 {
                q *= p;
                h += 1;
            }
            if q != w as u64 {
                return Err(Error::InvalidArgument(format!(
                    "Weierstrass degree {w} is not a power of {p}"
                )));
            }
            Ok(Height::Finite(h))
        }
        Err(Error::InfiniteHeightAtCap { .. }) => Ok(Height::InfiniteAtCap),
        Err(e) => Err(e),
    }
}

/// `(1+X)^n - 1`, exact.
pub fn binomial_series(cfg: PrimeConfig, n: u32) -> Result<TruncatedSeries> {
    let top = n.min(cfg.deg_cap) as usize;
    let mut row = vec![0i128; top + 1];
    let mut c: i128 = 1;
    for k in 1..=top {
        c = c * (n as i128 - k as i128 + 1) / k as i128;
        row[k] = c;
    }
    TruncatedSeries::from_coeffs(cfg, &row)
}

fn sum_law(cfg: PrimeConfig) -> Result<TruncatedSeries> {
    TruncatedSeries::from_terms(cfg, 2, &[(vec![1, 0], 1), (vec![0, 1], 1)])
}

impl FormalGroup {
    /// `X + Y + XY`, the multiplicative group.
    pub fn multiplicative(cfg: PrimeConfig) -> Result<Self> {
        let law = TruncatedSeries::from_terms(
            cfg,
            2,
            &[(vec![1, 0], 1), (vec![0, 1], 1), (vec![1, 1], 1)],
        )?;
        let q = binomial_series(cfg, cfg.p as u32)?;
        Ok(FormalGroup {
            law,
            scale: 0,
            height: Height::Finite(1),
            provenance: Provenance::Multiplicative,
            stable_endo: q,
            budget: None,
        })
    }

    /// The group law admitting `f` as an endomorphism, required integral.
    pub fn lubin_tate(f: &TruncatedSeries) -> Result<Self> {
        Self::lubin_tate_at_scale(f, 0)
    }

    /// As [`FormalGroup::lubin_tate`], but retries in rescaled coordinates
    /// (scales `1..=MAX_SCALE`) when the law is not integral.
    pub fn lubin_tate_rescaled(f: &TruncatedSeries) -> Result<Self> {
        let mut last = None;
        for c in 0..=MAX_SCALE {
            match Self::lubin_tate_at_scale(f, c) {
                Ok(g) => return Ok(g),
                Err(e @ Error::IntegralityFailure { .. }) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one scale tried"))
    }

    pub fn lubin_tate_at_scale(f: &TruncatedSeries, scale: u32) -> Result<Self> {
        if f.nvars() != 1 || !f.has_zero_constant() || !f.is_integral() {
            return Err(Error::InvalidArgument(
                "a Lubin-Tate series is an integral one-variable series with f(0) = 0".into(),
            ));
        }
        let cfg = f.cfg();
        let pi = f.coeff(&[1]);
        if !pi.val_p().finite().is_some_and(|v| v >= 1) {
            return Err(Error::InvalidArgument(format!(
                "f'(0) = {pi} must have positive valuation"
            )));
        }
        let height = height_from_wdeg(cfg.p, f)?;
        let fc = f.rescale(scale)?;
        let sol = lt_solve(&fc, &fc, &[PAdicNum::exact(cfg, 1), PAdicNum::exact(cfg, 1)])?;
        let group = FormalGroup {
            law: sol.series,
            scale,
            height,
            provenance: Provenance::LubinTate { f: f.clone(), pi },
            stable_endo: fc,
            budget: Some(sol.budget),
        };
        check_axioms(&group)?;
        Ok(group)
    }

    /// A law given directly; `endo` optionally registers a stable
    /// endomorphism (default `[2]`, computed from the law).
    pub fn user_supplied(law: &TruncatedSeries, endo: Option<&TruncatedSeries>) -> Result<Self> {
        if law.nvars() != 2 {
            return Err(Error::InvalidArgument("a group law has two variables".into()));
        }
        if !law.is_integral() {
            return Err(Error::InvalidArgument(
                "group law has denominators; supply an integral conjugate".into(),
            ));
        }
        let cfg = law.cfg();
        let mut group = FormalGroup {
            law: law.clone(),
            scale: 0,
            height: Height::InfiniteAtCap,
            provenance: Provenance::UserSupplied,
            stable_endo: TruncatedSeries::var(cfg, 1, 0)?,
            budget: None,
        };
        check_axioms(&group)?;
        group.height = height_from_wdeg(cfg.p, &group.mul_int(cfg.p)?)?;
        let u = match endo {
            Some(u) => u.clone(),
            None => group.mul_int(2)?,
        };
        if is_stable(&u)? != Stability::Stable {
            return Err(Error::NotStable(
                "registered endomorphism must be stable".into(),
            ));
        }
        let v = check_endomorphism(&group, &u)?;
        if !v.holds {
            return Err(Error::AxiomCheckFailed {
                axiom: "registered endomorphism",
                exponents: v.first_failure.unwrap_or_default(),
            });
        }
        group.stable_endo = u;
        Ok(group)
    }

    /// `X + Y`.
    pub fn additive(cfg: PrimeConfig) -> Result<Self> {
        let law = sum_law(cfg)?;
        let u = TruncatedSeries::from_coeffs(cfg, &[0, 2])?;
        Self::user_supplied(&law, Some(&u))
    }

    pub fn cfg(&self) -> PrimeConfig {
        self.law.cfg()
    }

    pub fn law(&self) -> &TruncatedSeries {
        &self.law
    }

    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn height(&self) -> Height {
        self.height
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn budget(&self) -> Option<PrecisionBudget> {
        self.budget
    }

    pub fn stable_endomorphism(&self) -> &TruncatedSeries {
        &self.stable_endo
    }

    /// Moves an original-coordinate series into stored coordinates.
    pub fn coords(&self, h: &TruncatedSeries) -> Result<TruncatedSeries> {
        h.rescale(self.scale)
    }

    /// The same group stored at a larger scale.
    pub fn rescaled(&self, scale: u32) -> Result<Self> {
        if scale < self.scale {
            return Err(Error::InvalidArgument(format!(
                "cannot lower the scale from {} to {scale}",
                self.scale
            )));
        }
        let extra = scale - self.scale;
        Ok(FormalGroup {
            law: self.law.rescale(extra)?,
            scale,
            height: self.height,
            provenance: self.provenance.clone(),
            stable_endo: self.stable_endo.rescale(extra)?,
            budget: self.budget,
        })
    }

    /// `F(x, y)` for series `x`, `y` in the same variables.
    pub fn add_series(&self, x: &TruncatedSeries, y: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.law.compose(&[x.clone(), y.clone()])
    }

    /// `[n](X)` for a non-negative integer by repeated doubling in the law.
    pub fn mul_int(&self, n: u64) -> Result<TruncatedSeries> {
        let cfg = self.cfg();
        let mut acc = TruncatedSeries::zero(cfg, 1);
        let mut base = TruncatedSeries::var(cfg, 1, 0)?;
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add_series(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.add_series(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// `[a](X)`, the endomorphism with derivative `a` at 0.
    pub fn mul_by(&self, a: &PAdicNum) -> Result<Endomorphism> {
        let sol = match &self.provenance {
            Provenance::LubinTate { .. } | Provenance::Multiplicative => {
                lt_solve(&self.stable_endo, &self.stable_endo, std::slice::from_ref(a))?
            }
            Provenance::UserSupplied => solve_commutant(&self.stable_endo, std::slice::from_ref(a))?,
        };
        let v = check_endomorphism(self, &sol.series)?;
        if !v.holds {
            return Err(Error::AxiomCheckFailed {
                axiom: "endomorphism",
                exponents: v.first_failure.unwrap_or_default(),
            });
        }
        Ok(Endomorphism {
            stability: is_stable(&sol.series)?,
            series: sol.series,
            a: *a,
            budget: Some(sol.budget),
        })
    }

    pub fn mul_by_int(&self, a: i128) -> Result<Endomorphism> {
        self.mul_by(&PAdicNum::exact(self.cfg(), a))
    }
}

impl Endomorphism {
    /// Wraps a series after checking that it is an endomorphism of `group`.
    pub fn new(group: &FormalGroup, series: &TruncatedSeries) -> Result<Self> {
        let v = check_endomorphism(group, series)?;
        if !v.holds {
            return Err(Error::AxiomCheckFailed {
                axiom: "endomorphism",
                exponents: v.first_failure.unwrap_or_default(),
            });
        }
        Ok(Endomorphism {
            a: series.coeff(&[1]),
            stability: is_stable(series)?,
            series: series.clone(),
            budget: None,
        })
    }
}
