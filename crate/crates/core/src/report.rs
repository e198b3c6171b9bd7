//! Check records and reports with a stable, byte-reproducible serialization.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::padic::{format_rational, LogMag, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    /// The inequality held with a truncated quantity on its small side.
    LowerBoundPass,
    /// The hypotheses of the checked statement do not hold at these parameters.
    RegimeUnmet,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::LowerBoundPass => "lower-bound-pass",
            Verdict::RegimeUnmet => "regime-unmet",
            Verdict::Fail => "fail",
        }
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// The statement being checked, in one line.
    pub anchor: String,
    pub params: BTreeMap<String, String>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub exponents: BTreeMap<String, String>,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            params: BTreeMap::new(),
            verdict: Verdict::Pass,
            witness: None,
            exponents: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn exponent(mut self, key: &str, value: &Scalar) -> Self {
        self.exponents.insert(key.to_string(), format_rational(value));
        self
    }

    pub fn magnitude(mut self, key: &str, value: &LogMag) -> Self {
        let text = match value.exponent() {
            Some(e) => format_rational(e),
            None => "-inf".to_string(),
        };
        self.exponents.insert(key.to_string(), text);
        self
    }

    pub fn verdict(mut self, verdict: Verdict) -> Self {
        self.verdict = verdict;
        self
    }

    /// Marks the record failed with a witness; an earlier witness is kept.
    pub fn fail(mut self, witness: impl Into<String>) -> Self {
        self.verdict = Verdict::Fail;
        if self.witness.is_none() {
            self.witness = Some(witness.into());
        }
        self
    }

    pub fn passed(&self) -> bool {
        !self.verdict.is_fail()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub group: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<CheckRecord>,
}

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl Report {
    pub fn has_failures(&self) -> bool {
        self.checks.iter().any(|c| c.verdict.is_fail())
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.checks.iter().filter(|c| c.verdict == verdict).count()
    }

    pub fn emit(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Json => {
                let mut out = serde_json::to_vec_pretty(self).expect("report serializes");
                out.push(b'\n');
                out
            }
            Format::Text => self.to_text().into_bytes(),
        }
    }

    fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "schema {} group {}", self.schema, self.group);
        for (k, v) in &self.config {
            let _ = writeln!(s, "  {k} = {v}");
        }
        for c in &self.checks {
            let params: Vec<String> = c.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(s, "[{}] {} {}", c.verdict.as_str(), c.id, params.join(" "));
            let _ = writeln!(s, "    {}", c.anchor);
            if !c.exponents.is_empty() {
                let ex: Vec<String> = c.exponents.iter().map(|(k, v)| format!("{k}={v}")).collect();
                let _ = writeln!(s, "    exponents: {}", ex.join(" "));
            }
            if let Some(w) = &c.witness {
                let _ = writeln!(s, "    witness: {w}");
            }
        }
        let _ = writeln!(
            s,
            "summary: {} pass, {} lower-bound-pass, {} regime-unmet, {} fail",
            self.count(Verdict::Pass),
            self.count(Verdict::LowerBoundPass),
            self.count(Verdict::RegimeUnmet),
            self.count(Verdict::Fail)
        );
        s
    }
}
