//! The machine-readable report shared by the library demos and the CLI:
//! `{command, cfg, verdicts[], precisions[], data}`.

use serde::Serialize;
use serde_json::Value;

use crate::padic::PrimeConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrecisionEntry {
    pub name: String,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub cfg: PrimeConfig,
    pub verdicts: Vec<VerdictEntry>,
    pub precisions: Vec<PrecisionEntry>,
    pub data: Value,
}

impl Report {
    pub fn new(command: &str, cfg: PrimeConfig) -> Self {
        Report {
            command: command.to_string(),
            cfg,
            verdicts: Vec::new(),
            precisions: Vec::new(),
            data: Value::Object(Default::default()),
        }
    }

    pub fn verdict(&mut self, name: impl Into<String>, holds: bool, detail: Option<String>) {
        self.verdicts.push(VerdictEntry {
            name: name.into(),
            holds,
            detail,
        });
    }

    pub fn precision(&mut self, name: impl Into<String>, value: i64) {
        self.precisions.push(PrecisionEntry {
            name: name.into(),
            value,
        });
    }

    /// Sets `data[key]`.
    pub fn put(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("report data serializes");
        if let Value::Object(map) = &mut self.data {
            map.insert(key.to_string(), v);
        }
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// A terse human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{} (p={}, N={}, D={}, M={})\n",
            self.command, self.cfg.p, self.cfg.prec, self.cfg.den_cap, self.cfg.deg_cap
        );
        for v in &self.verdicts {
            let mark = if v.holds { "ok  " } else { "FAIL" };
            match &v.detail {
                Some(d) => out.push_str(&format!("  [{mark}] {}: {d}\n", v.name)),
                None => out.push_str(&format!("  [{mark}] {}\n", v.name)),
            }
        }
        for p in &self.precisions {
            out.push_str(&format!("  prec {} = {}\n", p.name, p.value));
        }
        if let Value::Object(map) = &self.data {
            for (k, v) in map {
                out.push_str(&format!("  {k}: {v}\n"));
            }
        }
        out
    }
}
