use serde::Serialize;

use super::{is_stable, solve_commutant, Endomorphism, FormalGroup, Stability};
use crate::error::{Error, Result};
use crate::series::TruncatedSeries;

/// Outcome of a coefficient-wise identity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// Smallest monomial (degree, then table order) where the sides differ.
    pub first_failure: Option<Vec<u32>>,
    /// p-adic precision the comparison was made at.
    pub prec: i32,
}

/// Compares at `min(N, prec(a), prec(b))`.
pub(crate) fn compare(a: &TruncatedSeries, b: &TruncatedSeries) -> Result<Verdict> {
    let prec = (a.cfg().prec as i32).min(a.prec()).min(b.prec());
    let diff = a.capped(prec)?.first_difference(&b.capped(prec)?)?;
    Ok(Verdict {
        holds: diff.is_none(),
        first_failure: diff,
        prec,
    })
}

fn require_origin(h: &TruncatedSeries) -> Result<()> {
    if h.nvars() != 1 {
        return Err(Error::InvalidArgument("expected a one-variable series".into()));
    }
    if !h.has_zero_constant() {
        return Err(Error::InnerConstantTermNonzero { index: 0 });
    }
    Ok(())
}

/// Identity, commutativity and associativity of the stored law.
pub fn check_axioms(group: &FormalGroup) -> Result<()> {
    let law = group.law();
    let cfg = law.cfg();
    let fail = |axiom: &'static str, v: Verdict| -> Result<()> {
        if v.holds {
            Ok(())
        } else {
            Err(Error::AxiomCheckFailed {
                axiom,
                exponents: v.first_failure.unwrap_or_default(),
            })
        }
    };
    let x = TruncatedSeries::var(cfg, 2, 0)?;
    let zero = TruncatedSeries::zero(cfg, 2);
    fail("identity", compare(&law.compose(&[x.clone(), zero])?, &x)?)?;
    fail("commutativity", compare(&law.permute(&[1, 0])?, law)?)?;
    let v = |i| TruncatedSeries::var(cfg, 3, i);
    let (x3, y3, z3) = (v(0)?, v(1)?, v(2)?);
    let xy = law.compose(&[x3.clone(), y3.clone()])?;
    let yz = law.compose(&[y3, z3.clone()])?;
    let left = law.compose(&[xy, z3])?;
    let right = law.compose(&[x3, yz])?;
    fail("associativity", compare(&left, &right)?)
}

/// `h(F(X,Y)) = F(h(X), h(Y))`.
pub fn check_endomorphism(group: &FormalGroup, h: &TruncatedSeries) -> Result<Verdict> {
    check_homomorphism(group, group, h)
}

/// `h(F(X,Y)) = G(h(X), h(Y))`; both groups must be stored at one scale.
pub fn check_homomorphism(f: &FormalGroup, g: &FormalGroup, h: &TruncatedSeries) -> Result<Verdict> {
    require_origin(h)?;
    if f.scale() != g.scale() {
        return Err(Error::InvalidArgument(format!(
            "groups are stored at scales {} and {}",
            f.scale(),
            g.scale()
        )));
    }
    let hx = h.embed(2, 0)?;
    let hy = h.embed(2, 1)?;
    let left = h.compose(&[f.law().clone()])?;
    let right = g.law().compose(&[hx, hy])?;
    compare(&left, &right)
}

/// `K(X,Y) = h(F(h^{-1}(X), h^{-1}(Y)))`, the law transported along `h`.
pub fn conjugate_group(group: &FormalGroup, h: &TruncatedSeries) -> Result<TruncatedSeries> {
    require_origin(h)?;
    let hinv = h.comp_inverse()?;
    let inner = group
        .law()
        .compose(&[hinv.embed(2, 0)?, hinv.embed(2, 1)?])?;
    h.compose(&[inner])
}

/// Writes a series commuting with the stable endomorphism `u` as
/// `[a_1](X_1) + ... + [a_d](X_d)` (sum in the group law).
pub fn decompose_commuting(
    group: &FormalGroup,
    h: &TruncatedSeries,
    u: &Endomorphism,
) -> Result<Vec<Endomorphism>> {
    let d = h.nvars();
    if !h.has_zero_constant() {
        return Err(Error::InnerConstantTermNonzero { index: 0 });
    }
    if is_stable(&u.series)? != Stability::Stable {
        return Err(Error::NotStable("decomposition needs a stable u".into()));
    }
    let inners: Vec<TruncatedSeries> = (0..d).map(|i| u.series.embed(d, i)).collect::<Result<_>>()?;
    let left = h.compose(&inners)?;
    let right = u.series.compose(std::slice::from_ref(h))?;
    let v = compare(&left, &right)?;
    if !v.holds {
        return Err(Error::NotCommuting {
            exponents: v.first_failure.unwrap_or_default(),
        });
    }
    let mut parts = Vec::with_capacity(d);
    let mut sum: Option<TruncatedSeries> = None;
    for i in 0..d {
        let a = h.restrict_to(i)?.coeff(&[1]);
        let sol = solve_commutant(&u.series, std::slice::from_ref(&a))?;
        let term = sol.series.embed(d, i)?;
        sum = Some(match sum {
            None => term,
            Some(s) => group.law().compose(&[s, term])?,
        });
        parts.push(Endomorphism {
            stability: is_stable(&sol.series)?,
            series: sol.series,
            a,
            budget: Some(sol.budget),
        });
    }
    let rebuilt = sum.expect("at least one variable");
    let v = compare(&rebuilt, h)?;
    if !v.holds {
        return Err(Error::ReconstructionMismatch {
            exponents: v.first_failure.unwrap_or_default(),
        });
    }
    Ok(parts)
}
