//! JSON documents for truncated series.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "cfg": {"p": 2, "prec": 24, "den_cap": 4, "deg_cap": 8},
//!   "vars": 1,
//!   "terms": [{"exponents": [1], "mantissa": "3", "shift": 1}],
//!   "prec_floor": null
//! }
//! ```
//!
//! A term stands for `mantissa * p^shift`; the mantissa is a unit written as
//! its signed representative of least absolute value modulo
//! `p^(prec_floor - shift)`. `prec_floor: null` marks an exact polynomial.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{PAdicNum, PrimeConfig};
use crate::series::TruncatedSeries;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesDocument {
    pub schema_version: u32,
    pub cfg: PrimeConfig,
    pub vars: usize,
    pub terms: Vec<TermDocument>,
    pub prec_floor: Option<i32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDocument {
    pub exponents: Vec<u32>,
    pub mantissa: String,
    pub shift: i32,
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Schema {
        location: location.into(),
        message: message.into(),
    }
}

fn parse_mantissa(text: &str, at: &str) -> Result<i128> {
    let digits = text.strip_prefix('-').unwrap_or(text);
    let ok = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'));
    if !ok {
        return Err(schema(at, format!("mantissa {text:?} is not a canonical decimal integer")));
    }
    text.parse::<i128>()
        .map_err(|e| schema(at, format!("mantissa {text:?}: {e}")))
}

impl SeriesDocument {
    pub fn from_series(s: &TruncatedSeries) -> Self {
        let exact = s.is_exact() && s.is_poly();
        let mut terms: Vec<TermDocument> = s
            .terms()
            .map(|(exps, c)| {
                let m = s
                    .cfg()
                    .modulus(c.prec() as i64 - c.shift() as i64)
                    .expect("coefficient modulus fits the kernel");
                TermDocument {
                    exponents: exps.to_vec(),
                    mantissa: m.signed(c.mantissa()).to_string(),
                    shift: c.shift(),
                }
            })
            .collect();
        terms.sort_by(|a, b| a.exponents.cmp(&b.exponents));
        SeriesDocument {
            schema_version: SCHEMA_VERSION,
            cfg: s.cfg(),
            vars: s.nvars(),
            terms,
            prec_floor: if exact { None } else { Some(s.prec()) },
        }
    }

    pub fn to_series(&self) -> Result<TruncatedSeries> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(schema(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let cfg = self.cfg;
        cfg.validate().map_err(|e| schema("cfg", e.to_string()))?;
        if self.vars == 0 {
            return Err(schema("vars", "a series needs at least one variable"));
        }
        let exact = cfg.exact_digits() as i32;
        let prec = match self.prec_floor {
            Some(p) if p <= 0 => return Err(schema("prec_floor", "must be positive")),
            Some(p) if p > exact => {
                return Err(schema("prec_floor", format!("exceeds the {exact} digits the kernel holds")))
            }
            Some(p) => p,
            None => exact,
        };
        let mut seen = std::collections::BTreeSet::new();
        let mut terms = Vec::with_capacity(self.terms.len());
        let mut den = 0u32;
        for (i, t) in self.terms.iter().enumerate() {
            let at = |field: &str| format!("terms[{i}].{field}");
            if t.exponents.len() != self.vars {
                return Err(schema(
                    at("exponents"),
                    format!("has {} entries for {} variables", t.exponents.len(), self.vars),
                ));
            }
            let total: u64 = t.exponents.iter().map(|&e| e as u64).sum();
            if total > cfg.deg_cap as u64 {
                return Err(schema(
                    at("exponents"),
                    format!("total degree {total} exceeds the degree cap {}", cfg.deg_cap),
                ));
            }
            if !seen.insert(t.exponents.clone()) {
                return Err(schema(at("exponents"), "duplicate monomial"));
            }
            let mant = parse_mantissa(&t.mantissa, &at("mantissa"))?;
            if t.shift < 0 {
                den = den.max((-t.shift) as u32);
            }
            if t.shift < -(cfg.den_cap as i32) {
                return Err(schema(
                    at("shift"),
                    format!("denominator p^{} exceeds the cap {}", -t.shift, cfg.den_cap),
                ));
            }
            if t.shift >= prec {
                // vanishes at the floor
                continue;
            }
            let m = cfg
                .modulus(prec as i64 - t.shift as i64)
                .map_err(|e| schema(at("shift"), e.to_string()))?;
            let c = PAdicNum::from_parts(cfg, m.from_i128(mant), t.shift, prec)
                .map_err(|e| schema(at("mantissa"), e.to_string()))?;
            terms.push((t.exponents.clone(), c));
        }
        let prec = if self.prec_floor.is_none() {
            prec - den as i32
        } else {
            prec
        };
        let terms: Vec<_> = terms
            .into_iter()
            .map(|(e, c)| Ok((e, c.with_prec(c.prec().min(prec))?)))
            .collect::<Result<_>>()
            .map_err(|e: Error| schema("terms", e.to_string()))?;
        TruncatedSeries::from_padic_terms(cfg, self.vars, &terms, prec, self.prec_floor.is_none())
            .map_err(|e| schema("terms", e.to_string()))
    }
}

pub fn parse_series(text: &str) -> Result<TruncatedSeries> {
    let doc: SeriesDocument = serde_json::from_str(text).map_err(|e| {
        schema(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })?;
    doc.to_series()
}

/// Canonical pretty JSON with a trailing newline.
pub fn emit_series(s: &TruncatedSeries) -> String {
    let mut out = serde_json::to_string_pretty(&SeriesDocument::from_series(s))
        .expect("documents serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PrimeConfig {
        PrimeConfig::new(2, 24, 4, 8).unwrap()
    }

    #[test]
    fn emit_orders_terms() {
        let f = TruncatedSeries::from_coeffs(cfg(), &[0, 6, 5, 1]).unwrap();
        let doc = SeriesDocument::from_series(&f);
        let exps: Vec<_> = doc.terms.iter().map(|t| t.exponents.clone()).collect();
        assert_eq!(exps, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(doc.terms[0].mantissa, "3");
        assert_eq!(doc.terms[0].shift, 1);
        assert_eq!(doc.prec_floor, None);
    }

    #[test]
    fn round_trip_is_byte_stable() {
        let law = TruncatedSeries::from_terms(cfg(), 2, &[(vec![1, 0], 1), (vec![0, 1], 1), (vec![1, 1], -3)])
            .unwrap();
        let text = emit_series(&law);
        let back = parse_series(&text).unwrap();
        assert!(back.eq_at_prec(&law).unwrap());
        assert_eq!(emit_series(&back), text);
    }

    #[test]
    fn inexact_series_keep_their_floor() {
        let s = TruncatedSeries::from_coeffs(cfg(), &[0, 1, -1]).unwrap().at_prec(10).unwrap();
        let text = emit_series(&s);
        assert!(text.contains("\"prec_floor\": 10"));
        let back = parse_series(&text).unwrap();
        assert_eq!(back.prec(), 10);
        assert_eq!(emit_series(&back), text);
    }

    #[test]
    fn rejects_bad_documents() {
        let good = emit_series(&TruncatedSeries::from_coeffs(cfg(), &[0, 1]).unwrap());
        let too_high = good.replace("[\n        1\n      ]", "[\n        9\n      ]");
        assert!(matches!(parse_series(&too_high), Err(Error::Schema { .. })));
        let bad_mant = good.replace("\"1\"", "\"01\"");
        match parse_series(&bad_mant) {
            Err(Error::Schema { location, .. }) => assert_eq!(location, "terms[0].mantissa"),
            other => panic!("{other:?}"),
        }
        let version = good.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(matches!(parse_series(&version), Err(Error::Schema { .. })));
        match parse_series("{\"schema_version\": 1,") {
            Err(Error::Schema { location, .. }) => assert!(location.starts_with("line 1")),
            other => panic!("{other:?}"),
        }
    }
}
