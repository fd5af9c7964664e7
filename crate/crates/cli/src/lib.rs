//! Argument handling for the `fglab` binary. [`run`] never exits the
//! process; it returns the exit code and the text that would be printed.
//!
//! Exit codes: 0 when every verdict in the report holds, 1 when one is
//! false, 2 on usage or computation errors.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use fglab_core::torsion::{self, TorsionVerdict};
use fglab_core::{
    check_endomorphism, check_homomorphism, cyclotomic_ring, decompose_commuting, formal_log,
    is_stable, solve_commutant, Endomorphism, Error, ExtElem, FormalGroup, PAdicNum, PrimeConfig,
    Report, SeriesDocument, TruncatedSeries,
};
use serde_json::json;

pub const DEFAULT_MAX_DEGREE: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "fglab", version, about = "p-adic formal groups, endomorphisms and torsion")]
struct Cli {
    /// The prime.
    #[arg(long, global = true, default_value_t = 2)]
    p: u64,
    /// Target precision N (p-adic digits).
    #[arg(long, global = true, default_value_t = 24)]
    prec: u32,
    /// Largest power of p allowed in a denominator.
    #[arg(long = "dencap", global = true, default_value_t = 4)]
    den_cap: u32,
    /// Total-degree cap M.
    #[arg(long = "degcap", global = true, default_value_t = 12)]
    deg_cap: u32,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Series document used wherever a series argument is omitted.
    #[arg(long = "seed-file", global = true)]
    seed_file: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

/// Group specifications: `mult`, `lt:FILE` (a Lubin–Tate series f) or
/// `law:FILE` (a two-variable law).
#[derive(Subcommand, Debug)]
enum Command {
    /// Build the Lubin–Tate law of a series f.
    LtGroup {
        #[arg(long)]
        f: Option<PathBuf>,
        /// Refuse rescaled coordinates.
        #[arg(long)]
        strict: bool,
    },
    /// The endomorphism [a] of a group.
    MulBy {
        #[arg(long)]
        group: String,
        #[arg(long, allow_hyphen_values = true)]
        a: i128,
    },
    /// The series commuting with a stable u with given linear coefficients.
    SolveCommutant {
        #[arg(long)]
        u: Option<PathBuf>,
        /// Comma-separated linear coefficients, one per variable.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        a: Vec<i128>,
    },
    /// Is h an endomorphism of the group?
    CheckEndo {
        #[arg(long)]
        group: String,
        #[arg(long)]
        h: Option<PathBuf>,
    },
    /// Is h a homomorphism from one group to another?
    CheckHom {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        h: Option<PathBuf>,
    },
    /// Split a series commuting with u into [a_1](X_1) + ... + [a_d](X_d).
    Decompose {
        #[arg(long)]
        group: String,
        #[arg(long)]
        h: Option<PathBuf>,
        /// Stable endomorphism; defaults to the group's own.
        #[arg(long)]
        u: Option<PathBuf>,
    },
    /// The formal logarithm, optionally evaluated at zeta_{p^k} - 1.
    Log {
        #[arg(long)]
        group: String,
        #[arg(long = "at-level")]
        at_level: Option<u32>,
    },
    /// The shared-torsion construction for level n.
    SharedTorsion {
        #[arg(long)]
        n: u32,
    },
    /// Certify a point of the level-k cyclotomic ring as torsion.
    IsTorsion {
        #[arg(long)]
        group: String,
        #[arg(long)]
        level: u32,
        /// Coefficients in T = zeta - 1 (default: T itself).
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        point: Option<Vec<i128>>,
        #[arg(long = "max-level", default_value_t = 8)]
        max_level: u32,
    },
    /// A stable u that is an endomorphism of both laws forces them equal.
    TheoremA {
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long)]
        u: Option<PathBuf>,
    },
    /// A series commuting with u is [a], and maps torsion to torsion.
    Rigidity {
        #[arg(long)]
        group: String,
        #[arg(long)]
        h: Option<PathBuf>,
        #[arg(long)]
        u: Option<PathBuf>,
        /// Sample the primitive torsion points of these levels.
        #[arg(long = "sample-level", value_delimiter = ',')]
        sample_level: Vec<u32>,
    },
    /// Weierstrass preparation of a one-variable series.
    Prep {
        #[arg(long)]
        series: Option<PathBuf>,
    },
}

struct Ctx {
    cfg: PrimeConfig,
    seed_file: Option<PathBuf>,
}

fn max_degree() -> Result<u32, Error> {
    match std::env::var("FGLAB_MAX_DEGREE") {
        Ok(v) => v
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("FGLAB_MAX_DEGREE={v:?} is not a degree"))),
        Err(_) => Ok(DEFAULT_MAX_DEGREE),
    }
}

impl Ctx {
    fn read_doc(&self, path: Option<&Path>, what: &str) -> Result<TruncatedSeries, Error> {
        let path = path.or(self.seed_file.as_deref()).ok_or_else(|| {
            Error::InvalidArgument(format!("no {what} given and no --seed-file"))
        })?;
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        let mut doc: SeriesDocument = serde_json::from_str(&text).map_err(|e| Error::Schema {
            location: format!("{} line {} column {}", path.display(), e.line(), e.column()),
            message: e.to_string(),
        })?;
        if doc.cfg.p != self.cfg.p {
            return Err(Error::Schema {
                location: format!("{} cfg.p", path.display()),
                message: format!("document is over p = {}, run uses p = {}", doc.cfg.p, self.cfg.p),
            });
        }
        // the run's precision and caps govern; the document supplies terms
        doc.cfg = self.cfg;
        doc.to_series()
    }

    fn group(&self, spec: &str) -> Result<FormalGroup, Error> {
        if spec == "mult" {
            return FormalGroup::multiplicative(self.cfg);
        }
        if let Some(file) = spec.strip_prefix("lt:") {
            let f = self.read_doc(Some(Path::new(file)), "Lubin-Tate series")?;
            return FormalGroup::lubin_tate_rescaled(&f);
        }
        if let Some(file) = spec.strip_prefix("law:") {
            let law = self.read_doc(Some(Path::new(file)), "group law")?;
            return FormalGroup::user_supplied(&law, None);
        }
        Err(Error::InvalidArgument(format!(
            "group spec {spec:?} is not mult, lt:FILE or law:FILE"
        )))
    }
}

fn doc(s: &TruncatedSeries) -> serde_json::Value {
    serde_json::to_value(SeriesDocument::from_series(s)).expect("documents serialize")
}

fn budget_precisions(r: &mut Report, prefix: &str, b: Option<fglab_core::PrecisionBudget>) {
    if let Some(b) = b {
        r.precision(format!("{prefix} working precision"), b.working_prec as i64);
        r.precision(format!("{prefix} declared loss"), b.declared_loss);
        r.precision(format!("{prefix} tracked loss"), b.tracked_loss);
        r.precision(format!("{prefix} output precision"), b.output_prec as i64);
    }
}

fn describe_group(r: &mut Report, name: &str, g: &FormalGroup) {
    r.put(
        name,
        json!({
            "provenance": g.provenance().name(),
            "scale": g.scale(),
            "height": g.height(),
            "law": doc(g.law()),
        }),
    );
    r.precision(format!("{name} law precision"), g.law().prec() as i64);
    budget_precisions(r, &format!("{name} law"), g.budget());
}

fn verdict_entry(r: &mut Report, name: &str, v: &fglab_core::Verdict) {
    r.verdict(
        name,
        v.holds,
        v.first_failure.as_ref().map(|e| format!("first failure at {e:?}")),
    );
    r.precision(format!("{name} compared at"), v.prec as i64);
}

fn execute(cli: Cli) -> Result<Report, Error> {
    let cap = max_degree()?;
    if cli.deg_cap > cap {
        return Err(Error::InvalidConfig(format!(
            "degree cap {} exceeds FGLAB_MAX_DEGREE = {cap}",
            cli.deg_cap
        )));
    }
    let cfg = PrimeConfig::new(cli.p, cli.prec, cli.den_cap, cli.deg_cap)?;
    let ctx = Ctx {
        cfg,
        seed_file: cli.seed_file,
    };
    let r = match cli.command {
        Command::LtGroup { f, strict } => {
            let f = ctx.read_doc(f.as_deref(), "--f")?;
            let g = if strict {
                FormalGroup::lubin_tate(&f)?
            } else {
                FormalGroup::lubin_tate_rescaled(&f)?
            };
            let mut r = Report::new("lt-group", cfg);
            r.verdict("group axioms", true, None);
            r.verdict("f is [pi]", true, Some(format!("pi = {}", f.coeff(&[1]))));
            describe_group(&mut r, "group", &g);
            r
        }
        Command::MulBy { group, a } => {
            let g = ctx.group(&group)?;
            let e = g.mul_by(&PAdicNum::exact(cfg, a))?;
            let mut r = Report::new("mul-by", cfg);
            verdict_entry(&mut r, "endomorphism", &check_endomorphism(&g, &e.series)?);
            describe_group(&mut r, "group", &g);
            budget_precisions(&mut r, "[a]", e.budget);
            r.precision("[a] precision", e.series.prec() as i64);
            r.put("a", a.to_string());
            r.put("stability", format!("{:?}", e.stability));
            r.put("series", doc(&e.series));
            r
        }
        Command::SolveCommutant { u, a } => {
            let u = ctx.read_doc(u.as_deref(), "--u")?;
            let lin: Vec<PAdicNum> = a.iter().map(|&x| PAdicNum::exact(cfg, x)).collect();
            let sol = solve_commutant(&u, &lin)?;
            let mut r = Report::new("solve-commutant", cfg);
            let b = sol.budget;
            r.verdict(
                "declared loss matches tracked loss",
                b.declared_loss == b.tracked_loss,
                Some(format!("{} vs {}", b.declared_loss, b.tracked_loss)),
            );
            budget_precisions(&mut r, "solve", Some(b));
            r.put("stability", format!("{:?}", is_stable(&u)?));
            r.put("series", doc(&sol.series));
            r
        }
        Command::CheckEndo { group, h } => {
            let g = ctx.group(&group)?;
            let h = g.coords(&ctx.read_doc(h.as_deref(), "--h")?)?;
            let mut r = Report::new("check-endo", cfg);
            verdict_entry(&mut r, "endomorphism", &check_endomorphism(&g, &h)?);
            r.put("scale", g.scale());
            r
        }
        Command::CheckHom { from, to, h } => {
            let f = ctx.group(&from)?;
            let g = ctx.group(&to)?;
            let scale = f.scale().max(g.scale());
            let (f, g) = (f.rescaled(scale)?, g.rescaled(scale)?);
            let h = f.coords(&ctx.read_doc(h.as_deref(), "--h")?)?;
            let mut r = Report::new("check-hom", cfg);
            verdict_entry(&mut r, "homomorphism", &check_homomorphism(&f, &g, &h)?);
            r.put("scale", scale);
            r
        }
        Command::Decompose { group, h, u } => {
            let g = ctx.group(&group)?;
            let h = g.coords(&ctx.read_doc(h.as_deref(), "--h")?)?;
            let u = match u {
                Some(path) => g.coords(&ctx.read_doc(Some(&path), "--u")?)?,
                None => g.stable_endomorphism().clone(),
            };
            let u = Endomorphism::new(&g, &u)?;
            let parts = decompose_commuting(&g, &h, &u)?;
            let mut r = Report::new("decompose", cfg);
            r.verdict("reconstruction", true, None);
            let a: Vec<String> = parts.iter().map(|e| e.a.to_string()).collect();
            for (i, e) in parts.iter().enumerate() {
                budget_precisions(&mut r, &format!("[a_{}]", i + 1), e.budget);
            }
            r.put("a", a);
            r
        }
        Command::Log { group, at_level } => {
            let g = ctx.group(&group)?;
            let log = formal_log(&g)?;
            let mut r = Report::new("log", cfg);
            verdict_entry(&mut r, "additivity", &log.check_additivity(&g)?);
            r.precision("log precision", log.series().prec() as i64);
            r.put("denominator", log.den());
            r.put("scale", log.scale());
            r.put("series", doc(log.series()));
            if let Some(k) = at_level {
                let ring = cyclotomic_ring(cfg, k)?;
                let ev = log.eval_original(&ExtElem::generator(&ring))?;
                r.verdict(
                    format!("Log vanishes at zeta_{}^{k} - 1", cfg.p),
                    ev.is_zero(),
                    Some(format!("valuation {}", ev.valuation)),
                );
                r.precision("evaluation guarantee", ev.guaranteed);
            }
            r
        }
        Command::SharedTorsion { n } => torsion::shared_torsion_demo(cfg, n)?.report(cfg),
        Command::IsTorsion {
            group,
            level,
            point,
            max_level,
        } => {
            let g = ctx.group(&group)?;
            let ring = cyclotomic_ring(cfg, level)?;
            let z = match point {
                Some(c) => ExtElem::from_coeffs(&ring, &c),
                None => ExtElem::generator(&ring),
            };
            let v = torsion::is_torsion(&g, &z, max_level)?;
            let mut r = Report::new("is-torsion", cfg);
            match &v {
                TorsionVerdict::Torsion(c) => {
                    r.verdict("torsion", true, Some(format!("level {}", c.level)));
                    r.precision("guaranteed valuation", c.guaranteed_val_prec);
                }
                TorsionVerdict::NotTorsionAtCap {
                    max_level,
                    guaranteed_val_prec,
                } => {
                    r.verdict("torsion", false, Some(format!("no level <= {max_level}")));
                    r.precision("guaranteed valuation", *guaranteed_val_prec);
                }
            }
            r.put("certificate", &v);
            r
        }
        Command::TheoremA { f, g, u } => {
            let fg = ctx.group(&f)?;
            let gg = ctx.group(&g)?;
            let scale = fg.scale().max(gg.scale());
            let u_orig = ctx.read_doc(u.as_deref(), "--u")?;
            let fs = fg.rescaled(scale)?;
            let u = Endomorphism::new(&fs, &u_orig.rescale(scale)?)?;
            let rep = torsion::theorem_a_witness(&fg, &gg, &u)?;
            let mut r = Report::new("theorem-a", cfg);
            verdict_entry(&mut r, "u is an endomorphism of F", &rep.u_endomorphism_of_f);
            verdict_entry(&mut r, "u is an endomorphism of G", &rep.u_endomorphism_of_g);
            verdict_entry(&mut r, "laws agree", &rep.laws);
            r.put("scale", rep.scale);
            r.put("conclusion", rep.conclusion);
            r
        }
        Command::Rigidity {
            group,
            h,
            u,
            sample_level,
        } => {
            let g = ctx.group(&group)?;
            let h = g.coords(&ctx.read_doc(h.as_deref(), "--h")?)?;
            let u = match u {
                Some(path) => g.coords(&ctx.read_doc(Some(&path), "--u")?)?,
                None => g.stable_endomorphism().clone(),
            };
            let u = Endomorphism::new(&g, &u)?;
            let mut sample = Vec::new();
            for k in sample_level {
                sample.push(ExtElem::generator(&cyclotomic_ring(cfg, k)?));
            }
            let rep = torsion::rigidity_witness(&g, &u, &h, &sample)?;
            let mut r = Report::new("rigidity", cfg);
            verdict_entry(&mut r, "h commutes with u", &rep.commutes);
            if let Some(v) = &rep.is_endomorphism {
                verdict_entry(&mut r, "h is an endomorphism", v);
            }
            r.verdict(
                "h maps sampled torsion to torsion",
                rep.sample.iter().all(|s| s.image_level.is_some()),
                None,
            );
            r.put("a", &rep.a);
            r.put("sample", &rep.sample);
            r
        }
        Command::Prep { series } => {
            let s = ctx.read_doc(series.as_deref(), "--series")?;
            let w = s.weierstrass_prep()?;
            let back = w.unit.mul(&w.distinguished)?;
            let mut r = Report::new("prep", cfg);
            let same = back.first_difference(&s)?;
            r.verdict(
                "unit * distinguished = series",
                same.is_none(),
                same.map(|e| format!("first difference at {e:?}")),
            );
            r.precision("unit precision", w.unit.prec() as i64);
            r.precision("distinguished precision", w.distinguished.prec() as i64);
            r.put("weierstrass_degree", w.wdeg);
            r.put("unit", doc(&w.unit));
            r.put("distinguished", doc(&w.distinguished));
            r
        }
    };
    Ok(r)
}

/// Parses `argv` (program name first) and runs one command.
pub fn run<I, S>(argv: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let format = cli.format;
    match execute(cli) {
        Ok(report) => Outcome {
            code: if report.all_hold() { 0 } else { 1 },
            stdout: match format {
                Format::Json => report.to_json(),
                Format::Text => report.to_text(),
            },
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
