//! Certification reports: one record per checked predicate, emitted as
//! line-delimited JSON with a fixed key order so runs diff byte-for-byte.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::point::{Point, Window};
use crate::rational::Rational;
use crate::space::ScaleParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The predicate is not decidable from finite samples (continuity,
    /// quantification over all moduli); recorded for completeness.
    NotChecked,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotChecked => "not-checked",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub predicate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ScaleParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<String>,
    pub verdict: Verdict,
    /// Extremal or violating points, in the order the predicate names them.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<Point>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Record {
    pub fn new(predicate: impl Into<String>, verdict: Verdict) -> Self {
        Record {
            predicate: predicate.into(),
            params: None,
            window: None,
            verdict,
            witness: Vec::new(),
            values: BTreeMap::new(),
            note: None,
        }
    }

    pub fn pass(predicate: impl Into<String>) -> Self {
        Record::new(predicate, Verdict::Pass)
    }

    pub fn fail(predicate: impl Into<String>) -> Self {
        Record::new(predicate, Verdict::Fail)
    }

    pub fn not_checked(predicate: impl Into<String>) -> Self {
        Record::new(predicate, Verdict::NotChecked)
    }

    /// Pass or fail depending on `ok`.
    pub fn verdict(predicate: impl Into<String>, ok: bool) -> Self {
        Record::new(predicate, if ok { Verdict::Pass } else { Verdict::Fail })
    }

    pub fn params(mut self, params: ScaleParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn window(mut self, window: &Window) -> Self {
        self.window = Some(window.label());
        self
    }

    pub fn witness<I: IntoIterator<Item = Point>>(mut self, pts: I) -> Self {
        self.witness = pts.into_iter().collect();
        self
    }

    pub fn value(mut self, name: &str, v: Rational) -> Self {
        self.values.insert(name.to_string(), v);
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_fail(&self) -> bool {
        self.verdict == Verdict::Fail
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub subject: String,
    pub records: Vec<Record>,
}

#[derive(Serialize)]
struct Line<'a> {
    subject: &'a str,
    #[serde(flatten)]
    record: &'a Record,
}

impl CertReport {
    pub fn new(subject: impl Into<String>) -> Self {
        CertReport {
            subject: subject.into(),
            records: Vec::new(),
        }
    }

    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    /// Appends every record of `other`, prefixing predicates with its subject.
    pub fn absorb(&mut self, other: CertReport) {
        for mut r in other.records {
            r.predicate = format!("{}/{}", other.subject, r.predicate);
            self.records.push(r);
        }
    }

    /// True when no record failed.
    pub fn passed(&self) -> bool {
        !self.records.iter().any(Record::is_fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.is_fail())
    }

    pub fn find(&self, predicate: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.predicate == predicate)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for record in &self.records {
            let line = Line {
                subject: &self.subject,
                record,
            };
            out.push_str(&serde_json::to_string(&line).expect("report record serializes"));
            out.push('\n');
        }
        out
    }
}
