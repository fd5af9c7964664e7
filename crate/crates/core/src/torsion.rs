//! Torsion points, orbits, and the shared-torsion construction.
//!
//! Points live in original coordinates. A point is certified torsion when
//! some iterate of the group's torsion map (`[p]`, or the generating series
//! `f = [pi]` for a Lubin–Tate group) sends it to zero within the guaranteed
//! evaluation precision.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ext::{cyclotomic_ring, ExtElem};
use crate::formal::{
    check_endomorphism, decompose_commuting, Endomorphism, FormalGroup, Provenance, Verdict,
};
use crate::padic::{PAdicNum, PrimeConfig, Valuation};
use crate::report::Report;
use crate::series::{Evaluation, TruncatedSeries};

/// `h` composed with itself `k` times; `k = 0` gives `X`.
pub fn iterate(h: &TruncatedSeries, k: u32) -> Result<TruncatedSeries> {
    if h.nvars() != 1 {
        return Err(Error::InvalidArgument("iterate needs one variable".into()));
    }
    let mut acc = TruncatedSeries::var(h.cfg(), 1, 0)?;
    for _ in 0..k {
        acc = h.compose(&[acc])?;
    }
    Ok(acc)
}

/// The orbit point `h^k(z)`, with the weakest guarantee along the way.
pub fn iterate_at(h: &TruncatedSeries, z: &ExtElem, k: u32) -> Result<Evaluation> {
    let mut w = z.clone();
    let mut guaranteed = z.prec();
    for _ in 0..k {
        let ev = h.eval_at(&w)?;
        guaranteed = guaranteed.min(ev.guaranteed);
        w = ev.value;
    }
    Ok(Evaluation {
        value: w,
        guaranteed,
    })
}

/// The series whose iterates detect torsion, in original coordinates.
pub fn torsion_map(group: &FormalGroup) -> Result<TruncatedSeries> {
    match group.provenance() {
        Provenance::LubinTate { f, .. } => Ok(f.clone()),
        Provenance::Multiplicative => crate::formal::binomial_series(group.cfg(), group.cfg().p as u32),
        Provenance::UserSupplied => group.mul_int(group.cfg().p),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TorsionCertificate {
    #[serde(serialize_with = "ser_elem")]
    pub point: ExtElem,
    pub group: &'static str,
    pub level: u32,
    pub guaranteed_val_prec: i64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsionVerdict {
    Torsion(TorsionCertificate),
    /// No iterate up to the cap vanished; not a disproof.
    NotTorsionAtCap { max_level: u32, guaranteed_val_prec: i64 },
}

impl TorsionVerdict {
    pub fn level(&self) -> Option<u32> {
        match self {
            TorsionVerdict::Torsion(c) => Some(c.level),
            TorsionVerdict::NotTorsionAtCap { .. } => None,
        }
    }
}

fn ser_elem<S: serde::Serializer>(z: &ExtElem, s: S) -> std::result::Result<S::Ok, S::Error> {
    let coeffs: Vec<String> = z.signed_coeffs().iter().map(|c| c.to_string()).collect();
    coeffs.serialize(s)
}

fn vanishes(z: &ExtElem, guaranteed: i64) -> Result<bool> {
    Ok(z.val_ext()?.is_at_least(guaranteed))
}

/// Smallest `k <= max_level` with `[p]^k(z) = 0` at the guaranteed precision.
pub fn is_torsion(group: &FormalGroup, z: &ExtElem, max_level: u32) -> Result<TorsionVerdict> {
    let map = torsion_map(group)?;
    let vz = z.val_ext()?;
    if !vz.is_at_least(1) {
        return Err(Error::InvalidArgument(format!(
            "torsion points lie in the maximal ideal; val(z) = {vz}"
        )));
    }
    let mut w = z.clone();
    let mut guaranteed = z.prec();
    for level in 0..=max_level {
        if level > 0 {
            let ev = map.eval_at(&w)?;
            guaranteed = guaranteed.min(ev.guaranteed);
            w = ev.value;
        }
        if vanishes(&w, guaranteed)? {
            return Ok(TorsionVerdict::Torsion(TorsionCertificate {
                point: z.clone(),
                group: group.provenance().name(),
                level,
                guaranteed_val_prec: guaranteed,
            }));
        }
    }
    Ok(TorsionVerdict::NotTorsionAtCap {
        max_level,
        guaranteed_val_prec: guaranteed,
    })
}

/// `u(X) = 1 + ((1+X)^{p^n} - 1)/X`.
fn unit_factor(cfg: PrimeConfig, n: u32) -> Result<TruncatedSeries> {
    let pn = (cfg.p as u32).pow(n);
    let mut c = vec![0i128; pn as usize];
    let mut binom: i128 = 1;
    for j in 1..=pn as i128 {
        binom = binom * (pn as i128 - j + 1) / j;
        c[j as usize - 1] += binom;
    }
    c[0] += 1;
    TruncatedSeries::from_coeffs(cfg, &c)
}

/// The series `f = u q` with `q = (1+X)^p - 1` and
/// `u = 1 + ((1+X)^{p^n} - 1)/X`, so that `f'(0) = p (1 + p^n)`.
pub fn shared_torsion_series(cfg: PrimeConfig, n: u32) -> Result<TruncatedSeries> {
    if n == 0 {
        return Err(Error::InvalidArgument("level n must be at least 1".into()));
    }
    let pn = cfg.p
        .checked_pow(n)
        .ok_or_else(|| Error::InvalidArgument("p^n overflows".into()))?;
    let deg = pn + cfg.p - 1;
    if (cfg.deg_cap as u64) < deg {
        return Err(Error::InvalidArgument(format!(
            "degree cap {} is below deg f = {deg}",
            cfg.deg_cap
        )));
    }
    let q = crate::formal::binomial_series(cfg, cfg.p as u32)?;
    unit_factor(cfg, n)?.mul(&q)
}

#[derive(Clone, Debug, Serialize)]
pub struct SharedPoint {
    pub level: u32,
    pub name: String,
    /// Non-leading coefficients of the cyclotomic modulus in `T`.
    pub ring_modulus: Vec<String>,
    pub ram_index: u32,
    pub chain_identity: bool,
    pub level_in_lubin_tate: Option<u32>,
    pub level_in_multiplicative: Option<u32>,
    pub guaranteed_val_prec: i64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LawDifference {
    pub exponents: Vec<u32>,
    pub scale: u32,
    pub lubin_tate_coeff: String,
    pub multiplicative_coeff: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SharedTorsionReport {
    pub p: u64,
    pub n: u32,
    pub f: Vec<String>,
    pub derivative_at_zero: String,
    pub derivative_ok: bool,
    pub scale: u32,
    pub law_budget: Option<crate::formal::PrecisionBudget>,
    pub points: Vec<SharedPoint>,
    pub laws_differ: Option<LawDifference>,
}

impl SharedTorsionReport {
    pub fn holds(&self) -> bool {
        self.derivative_ok
            && self.laws_differ.is_some()
            && self.points.len() == self.n as usize
            && self.points.iter().all(|pt| {
                pt.chain_identity
                    && pt.level_in_lubin_tate == Some(pt.level)
                    && pt.level_in_multiplicative == Some(pt.level)
            })
    }

    pub fn report(&self, cfg: PrimeConfig) -> Report {
        let mut r = Report::new("shared-torsion", cfg);
        r.verdict(
            "f'(0) = p(1+p^n)",
            self.derivative_ok,
            Some(self.derivative_at_zero.clone()),
        );
        for pt in &self.points {
            r.verdict(
                format!("f({0}) = (1+T)^p - 1 in level {1}", pt.name, pt.level),
                pt.chain_identity,
                None,
            );
            r.verdict(
                format!("{} is torsion for both laws", pt.name),
                pt.level_in_lubin_tate == Some(pt.level) && pt.level_in_multiplicative == Some(pt.level),
                Some(format!(
                    "levels {} / {}",
                    level_text(pt.level_in_lubin_tate),
                    level_text(pt.level_in_multiplicative)
                )),
            );
            r.precision(format!("torsion guarantee level {}", pt.level), pt.guaranteed_val_prec);
        }
        r.verdict(
            "laws differ",
            self.laws_differ.is_some(),
            self.laws_differ
                .as_ref()
                .map(|d| format!("first difference at {:?}", d.exponents)),
        );
        if let Some(b) = self.law_budget {
            r.precision("law working precision", b.working_prec as i64);
            r.precision("law output precision", b.output_prec as i64);
        }
        r.put("p", self.p);
        r.put("n", self.n);
        r.put("f", &self.f);
        r.put("scale", self.scale);
        r.put("shared_points", &self.points);
        r.put("nonzero_shared_points", self.points.len());
        r.put("laws_differ", &self.laws_differ);
        r
    }
}

fn level_text(l: Option<u32>) -> String {
    l.map_or_else(|| "none".to_string(), |l| l.to_string())
}

fn signed_coeffs(s: &TruncatedSeries) -> Vec<String> {
    (0..s.table().len())
        .map(|i| {
            let c = s.coeff_at(i);
            c.to_signed().map(|v| v.to_string()).unwrap_or_else(|| c.to_string())
        })
        .collect()
}

/// Builds `f`, its Lubin–Tate law, and certifies `zeta_{p^k} - 1`, `k <= n`,
/// as torsion for both that law and the multiplicative group.
pub fn shared_torsion_demo(cfg: PrimeConfig, n: u32) -> Result<SharedTorsionReport> {
    let f = shared_torsion_series(cfg, n)?;
    let p = cfg.p as i128;
    let pi_expect = PAdicNum::exact(cfg, p * (1 + p.pow(n)));
    let fp0 = f.coeff(&[1]);
    let derivative_ok = fp0.eq_at(&pi_expect, cfg.prec as i32);

    let lt = FormalGroup::lubin_tate_rescaled(&f)?;
    let gm = FormalGroup::multiplicative(cfg)?;
    let q = crate::formal::binomial_series(cfg, cfg.p as u32)?;

    let mut points = Vec::new();
    for k in 1..=n {
        let ring = cyclotomic_ring(cfg, k)?;
        let t = ExtElem::generator(&ring);
        let fz = f.eval_at(&t)?;
        let qz = q.eval_at(&t)?;
        let direct = ExtElem::from_coeffs(&ring, &[1, 1]).pow(cfg.p)?.sub(&ExtElem::from_int(&ring, 1))?;
        let chain_identity = fz.value.eq_exact(&qz.value)
            && fz.value.eq_exact(&direct)
            && fz.guaranteed == ring.val_cap();
        let lt_v = is_torsion(&lt, &t, n + 1)?;
        let gm_v = is_torsion(&gm, &t, n + 1)?;
        let guaranteed = match (&lt_v, &gm_v) {
            (TorsionVerdict::Torsion(a), TorsionVerdict::Torsion(b)) => {
                a.guaranteed_val_prec.min(b.guaranteed_val_prec)
            }
            _ => 0,
        };
        points.push(SharedPoint {
            level: k,
            name: format!("zeta_{}^{} - 1", cfg.p, k),
            ring_modulus: ring.modulus_coefficients().iter().map(|c| c.to_string()).collect(),
            ram_index: ring.ram_index(),
            chain_identity,
            level_in_lubin_tate: lt_v.level(),
            level_in_multiplicative: gm_v.level(),
            guaranteed_val_prec: guaranteed,
        });
    }

    let gm_scaled = gm.rescaled(lt.scale())?;
    let laws_differ = lt
        .law()
        .first_difference(gm_scaled.law())?
        .map(|e| LawDifference {
            lubin_tate_coeff: lt.law().coeff(&e).to_string(),
            multiplicative_coeff: gm_scaled.law().coeff(&e).to_string(),
            exponents: e,
            scale: lt.scale(),
        });

    Ok(SharedTorsionReport {
        p: cfg.p,
        n,
        f: signed_coeffs(&f)[..=f.degree().unwrap_or(0) as usize].to_vec(),
        derivative_at_zero: fp0.to_string(),
        derivative_ok,
        scale: lt.scale(),
        law_budget: lt.budget(),
        points,
        laws_differ,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RigidityReport {
    pub commutes: Verdict,
    pub a: Option<String>,
    pub is_endomorphism: Option<Verdict>,
    pub sample: Vec<SampleImage>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SampleImage {
    pub source_level: Option<u32>,
    pub image_level: Option<u32>,
}

impl RigidityReport {
    pub fn holds(&self) -> bool {
        self.commutes.holds
            && self.is_endomorphism.as_ref().is_some_and(|v| v.holds)
            && self.sample.iter().all(|s| s.image_level.is_some())
    }
}

/// Checks `u(h) = h(u)`, recovers `h = [a]` and confirms that `h` maps each
/// certified torsion point of the sample to a torsion point.
pub fn rigidity_witness(
    group: &FormalGroup,
    u: &Endomorphism,
    h: &TruncatedSeries,
    sample: &[ExtElem],
) -> Result<RigidityReport> {
    let left = u.series.compose(std::slice::from_ref(h))?;
    let right = h.compose(std::slice::from_ref(&u.series))?;
    let commutes = crate::formal::compare(&left, &right)?;
    if !commutes.holds {
        return Err(Error::NotCommuting {
            exponents: commutes.first_failure.unwrap_or_default(),
        });
    }
    let parts = decompose_commuting(group, h, u)?;
    let a = parts[0].a;
    let endo = check_endomorphism(group, h)?;
    if !sample.is_empty() && group.scale() != 0 {
        return Err(Error::InvalidArgument(
            "sample points need a group stored at scale 0".into(),
        ));
    }
    let cap = 8;
    let mut images = Vec::new();
    for z in sample {
        let src = is_torsion(group, z, cap)?;
        if src.level().is_none() {
            return Err(Error::InvalidArgument("sample point is not certified torsion".into()));
        }
        let w = h.eval_at(z)?;
        let img = is_torsion(group, &w.value.with_prec(w.guaranteed), cap)?;
        images.push(SampleImage {
            source_level: src.level(),
            image_level: img.level(),
        });
    }
    Ok(RigidityReport {
        commutes,
        a: Some(a.to_string()),
        is_endomorphism: Some(endo),
        sample: images,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremAReport {
    pub u_endomorphism_of_f: Verdict,
    pub u_endomorphism_of_g: Verdict,
    pub laws: Verdict,
    pub scale: u32,
    /// `equal_at_precision`, or `obstruction` when `u` is not an
    /// endomorphism of `G`.
    pub conclusion: &'static str,
}

impl TheoremAReport {
    pub fn holds(&self) -> bool {
        self.conclusion == "equal_at_precision"
    }
}

/// If the stable `u` is an endomorphism of both laws, they coincide at
/// precision; otherwise reports where `u` fails to respect `G`.
pub fn theorem_a_witness(f: &FormalGroup, g: &FormalGroup, u: &Endomorphism) -> Result<TheoremAReport> {
    let scale = f.scale().max(g.scale());
    let f = f.rescaled(scale)?;
    let g = g.rescaled(scale)?;
    let uf = check_endomorphism(&f, &u.series)?;
    if !uf.holds {
        return Err(Error::AxiomCheckFailed {
            axiom: "u is an endomorphism of F",
            exponents: uf.first_failure.unwrap_or_default(),
        });
    }
    let ug = check_endomorphism(&g, &u.series)?;
    let laws = crate::formal::compare(f.law(), g.law())?;
    let conclusion = if ug.holds && laws.holds {
        "equal_at_precision"
    } else if ug.holds {
        // uniqueness says this cannot happen at full precision
        "precision_exhausted"
    } else {
        "obstruction"
    };
    Ok(TheoremAReport {
        u_endomorphism_of_f: uf,
        u_endomorphism_of_g: ug,
        laws,
        scale,
        conclusion,
    })
}

/// Valuation of a point, for reports.
pub fn point_valuation(z: &ExtElem) -> Result<Valuation> {
    z.val_ext()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iterate_doubling() {
        let cfg = PrimeConfig::new(2, 12, 0, 6).unwrap();
        let q = TruncatedSeries::from_coeffs(cfg, &[0, 2, 1]).unwrap();
        let q2 = iterate(&q, 2).unwrap();
        let expect = TruncatedSeries::from_coeffs(cfg, &[0, 4, 6, 4, 1]).unwrap();
        assert!(q2.eq_at_prec(&expect).unwrap());
        assert!(iterate(&q, 0).unwrap().eq_at_prec(&TruncatedSeries::var(cfg, 1, 0).unwrap()).unwrap());
    }

    #[test]
    fn orbit_of_ninth_root_of_unity() {
        let cfg = PrimeConfig::new(3, 10, 0, 6).unwrap();
        let ring = cyclotomic_ring(cfg, 2).unwrap();
        let q = TruncatedSeries::from_coeffs(cfg, &[0, 3, 3, 1]).unwrap();
        let t = ExtElem::generator(&ring);
        let once = iterate_at(&q, &t, 1).unwrap().value;
        let expect = ExtElem::from_coeffs(&ring, &[0, 3, 3, 1]);
        assert!(once.eq_exact(&expect));
        assert!(iterate_at(&q, &t, 2).unwrap().value.is_zero_at_prec());
    }

    #[test]
    fn torsion_levels_for_multiplicative_group() {
        let cfg = PrimeConfig::new(3, 10, 2, 8).unwrap();
        let g = FormalGroup::multiplicative(cfg).unwrap();
        let ring = cyclotomic_ring(cfg, 1).unwrap();
        assert_eq!(is_torsion(&g, &ExtElem::generator(&ring), 4).unwrap().level(), Some(1));
        assert_eq!(is_torsion(&g, &ExtElem::zero(&ring), 4).unwrap().level(), Some(0));
        let not = ExtElem::from_int(&ring, 3);
        assert_eq!(is_torsion(&g, &not, 3).unwrap().level(), None);
    }

    #[test]
    fn shared_series_coefficients() {
        let cfg = PrimeConfig::new(2, 24, 4, 3).unwrap();
        let f = shared_torsion_series(cfg, 1).unwrap();
        let c: Vec<i128> = (0..=3).map(|k| f.coeff(&[k]).to_signed().unwrap()).collect();
        assert_eq!(c, vec![0, 6, 5, 1]);
        let cfg3 = PrimeConfig::new(3, 24, 4, 5).unwrap();
        let f3 = shared_torsion_series(cfg3, 1).unwrap();
        // (4 + 3X + X^2)(3X + 3X^2 + X^3)
        let c3: Vec<i128> = (0..=5).map(|k| f3.coeff(&[k]).to_signed().unwrap()).collect();
        assert_eq!(c3, vec![0, 12, 21, 16, 6, 1]);
    }

    #[test]
    fn demo_p2_n1() {
        let cfg = PrimeConfig::new(2, 24, 4, 8).unwrap();
        let rep = shared_torsion_demo(cfg, 1).unwrap();
        assert!(rep.holds(), "{rep:?}");
        assert_eq!(rep.points.len(), 1);
    }
}
