//! Shared domain types: the technique taxonomy, integer labels, SQL dialects,
//! and the request / response / pair / dataset records every other module
//! reads and writes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Injection technique taxonomy. `Benign` is the only non-attack variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Technique {
    Benign,
    BooleanBased,
    ErrorBased,
    Inline,
    Stacked,
    TimeBlind,
    UnionBased,
}

impl Technique {
    /// All seven techniques in label order.
    pub const ALL: [Technique; 7] = [
        Technique::Benign,
        Technique::BooleanBased,
        Technique::ErrorBased,
        Technique::Inline,
        Technique::Stacked,
        Technique::TimeBlind,
        Technique::UnionBased,
    ];

    pub fn is_attack(self) -> bool {
        self != Technique::Benign
    }

    pub fn name(self) -> &'static str {
        match self {
            Technique::Benign => "benign",
            Technique::BooleanBased => "boolean_based",
            Technique::ErrorBased => "error_based",
            Technique::Inline => "inline",
            Technique::Stacked => "stacked",
            Technique::TimeBlind => "time_blind",
            Technique::UnionBased => "union_based",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Integer class label in `[0, 6]`, bijective with [`Technique`] by position.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Label(u8);

impl Label {
    pub fn new(value: u8) -> Result<Label> {
        if value <= 6 {
            Ok(Label(value))
        } else {
            Err(Error::Validation(format!("label out of range: {value}")))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn technique(self) -> Technique {
        Technique::ALL[self.0 as usize]
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Fixed technique → label bijection (list position).
pub fn label_of(technique: Technique) -> Label {
    let idx = Technique::ALL
        .iter()
        .position(|t| *t == technique)
        .expect("technique is in ALL");
    Label(idx as u8)
}

/// The six emulated relational dialects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dialect {
    Mysql,
    Postgresql,
    Oracle,
    Sqlite,
    Sqlserver,
    Mariadb,
}

impl Dialect {
    pub const ALL: [Dialect; 6] = [
        Dialect::Mysql,
        Dialect::Postgresql,
        Dialect::Oracle,
        Dialect::Sqlite,
        Dialect::Sqlserver,
        Dialect::Mariadb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dialect::Mysql => "mysql",
            Dialect::Postgresql => "postgresql",
            Dialect::Oracle => "oracle",
            Dialect::Sqlite => "sqlite",
            Dialect::Sqlserver => "sqlserver",
            Dialect::Mariadb => "mariadb",
        }
    }
}

impl fmt::Display for Dialect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What the generator meant by a request: technique, target dialect, the
/// evasion chain applied (in order), the template used, and the retry count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectionIntent {
    pub technique: Technique,
    pub dialect: Dialect,
    pub evasions: Vec<String>,
    pub template_id: String,
    pub attempt: u32,
}

impl InjectionIntent {
    pub fn validate(&self) -> Result<()> {
        if self.attempt < 1 {
            return Err(Error::Validation("intent.attempt must be >= 1".into()));
        }
        if self.technique == Technique::Benign {
            if !self.evasions.is_empty() {
                return Err(Error::Validation(
                    "benign intent must have empty evasions".into(),
                ));
            }
            if !self.template_id.starts_with("benign") {
                return Err(Error::Validation(format!(
                    "benign intent must use a benign template, got `{}`",
                    self.template_id
                )));
            }
        }
        Ok(())
    }
}

/// One generated HTTP request with its injection intent.
///
/// `raw` is the full HTTP/1.1 text; `payload` is the injected (or benign)
/// parameter value before transport encoding. Timestamps are monotonic
/// milliseconds from run start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HttpRequestRecord {
    pub session_id: String,
    pub issued_at: u64,
    pub method: String,
    pub path: String,
    pub query: Vec<(String, String)>,
    pub headers: Vec<(String, String)>,
    pub body: String,
    pub payload: String,
    pub intent: InjectionIntent,
    pub raw: String,
}

/// HTTP status used for successful executions.
pub const STATUS_OK: u16 = 200;
/// Status synthesized for requests whose path matches no endpoint.
pub const STATUS_NOT_FOUND: u16 = 404;
/// Status synthesized when execution exceeds the timeout budget.
pub const STATUS_TIMEOUT: u16 = 408;
/// Status for dialect/engine errors.
pub const STATUS_DB_ERROR: u16 = 500;

/// Failure statuses carry dialect-formatted error text; all others must not.
pub fn is_failure_status(status: u16) -> bool {
    status == STATUS_DB_ERROR || status == STATUS_TIMEOUT
}

/// Captured shadow-database response for one request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DbResponseRecord {
    pub session_id: String,
    pub completed_at: u64,
    pub status: u16,
    pub latency_ms: u64,
    pub row_count: u64,
    pub body_digest: String,
    pub body_preview: String,
    pub error_text: Option<String>,
    pub replica_id: u32,
}

impl DbResponseRecord {
    pub fn validate(&self) -> Result<()> {
        let has_error = self.error_text.as_deref().map_or(false, |t| !t.is_empty());
        if has_error != is_failure_status(self.status) {
            return Err(Error::Validation(format!(
                "error_text presence must match failure status (status {}, error_text {})",
                self.status,
                if has_error { "present" } else { "absent" },
            )));
        }
        Ok(())
    }
}

/// A request joined to its response by session id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairedRecord {
    pub request: HttpRequestRecord,
    pub response: DbResponseRecord,
}

impl PairedRecord {
    pub fn validate(&self) -> Result<()> {
        if self.request.session_id != self.response.session_id {
            return Err(Error::Validation(format!(
                "pair session mismatch: `{}` vs `{}`",
                self.request.session_id, self.response.session_id
            )));
        }
        if self.response.completed_at < self.request.issued_at {
            return Err(Error::Validation(
                "response completed before request was issued".into(),
            ));
        }
        self.request.intent.validate()?;
        self.response.validate()
    }
}

/// A pair plus its ground-truth label (derived from intent, never content).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledPair {
    pub pair: PairedRecord,
    pub label: Label,
}

impl LabeledPair {
    pub fn validate(&self) -> Result<()> {
        self.pair.validate()?;
        if self.label != label_of(self.pair.request.intent.technique) {
            return Err(Error::Validation(format!(
                "label {} does not match technique {}",
                self.label, self.pair.request.intent.technique
            )));
        }
        Ok(())
    }

    pub fn session_id(&self) -> &str {
        &self.pair.request.session_id
    }
}

/// Train / validation / test assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Curated, deduplicated, stratified collection of labeled pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub records: Vec<LabeledPair>,
    pub split_of: BTreeMap<String, Split>,
    pub seed: u64,
    pub ratios: [f64; 3],
}

impl Dataset {
    pub fn split_of(&self, session_id: &str) -> Option<Split> {
        self.split_of.get(session_id).copied()
    }

    /// Records assigned to `split`, in dataset order.
    pub fn in_split(&self, split: Split) -> impl Iterator<Item = &LabeledPair> {
        self.records
            .iter()
            .filter(move |r| self.split_of.get(r.session_id()) == Some(&split))
    }

    /// Per-class record counts keyed by label value.
    pub fn class_counts(&self) -> BTreeMap<u8, usize> {
        let mut counts = BTreeMap::new();
        for rec in &self.records {
            *counts.entry(rec.label.value()).or_insert(0) += 1;
        }
        counts
    }

    /// Per-class, per-split counts.
    pub fn class_split_counts(&self) -> BTreeMap<u8, BTreeMap<Split, usize>> {
        let mut counts: BTreeMap<u8, BTreeMap<Split, usize>> = BTreeMap::new();
        for rec in &self.records {
            if let Some(split) = self.split_of(rec.session_id()) {
                *counts
                    .entry(rec.label.value())
                    .or_default()
                    .entry(split)
                    .or_insert(0) += 1;
            }
        }
        counts
    }
}
