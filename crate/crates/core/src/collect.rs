//! Document-level label table built from mention-level negation results.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bioc::{parse_bool_infon, BiocCollection, BiocDocument};
use crate::deid::is_phi_annotation;
use crate::error::{Error, Result};
use crate::resources;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LabelStatus {
    Positive,
    Negative,
    Uncertain,
    Absent,
}

impl LabelStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            LabelStatus::Positive => "positive",
            LabelStatus::Negative => "negative",
            LabelStatus::Uncertain => "uncertain",
            LabelStatus::Absent => "absent",
        }
    }
}

impl fmt::Display for LabelStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(LabelStatus::Positive),
            "negative" => Ok(LabelStatus::Negative),
            "uncertain" => Ok(LabelStatus::Uncertain),
            "absent" => Ok(LabelStatus::Absent),
            other => Err(Error::Config(format!("unknown label status {other:?}"))),
        }
    }
}

/// Order in which mention statuses win when a document mentions a finding
/// more than once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Precedence([LabelStatus; 3]);

impl Default for Precedence {
    fn default() -> Self {
        Precedence([LabelStatus::Positive, LabelStatus::Uncertain, LabelStatus::Negative])
    }
}

impl Precedence {
    pub fn order(&self) -> &[LabelStatus; 3] {
        &self.0
    }
}

impl FromStr for Precedence {
    type Err = Error;

    /// A comma-separated permutation of positive, uncertain and negative.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s.split(',').map(LabelStatus::from_str).collect::<Result<Vec<_>>>()?;
        let mut sorted = parts.clone();
        sorted.sort();
        if sorted != [LabelStatus::Positive, LabelStatus::Negative, LabelStatus::Uncertain] {
            return Err(Error::Config(format!(
                "precedence must order positive, uncertain and negative once each, got {s:?}"
            )));
        }
        Ok(Precedence([parts[0], parts[1], parts[2]]))
    }
}

impl fmt::Display for Precedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub concept_id: String,
    pub concept_name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRecord {
    pub doc_id: String,
    pub concept_id: String,
    pub concept_name: String,
    pub status: LabelStatus,
}

/// Findings CSV: header `concept_id,concept_name`, one finding per row.
pub fn parse_findings(text: &str, label: &str) -> Result<Vec<Finding>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::resource(label, e.to_string()))?.clone();
    if header.iter().ne(["concept_id", "concept_name"]) {
        return Err(Error::resource(label, "header must be concept_id,concept_name"));
    }
    let mut out: Vec<Finding> = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::resource(label, e.to_string()))?;
        let id = rec[0].trim();
        if id.is_empty() {
            return Err(Error::resource(label, "empty concept_id"));
        }
        if out.iter().any(|f| f.concept_id == id) {
            return Err(Error::resource(label, format!("duplicate concept_id {id}")));
        }
        out.push(Finding {
            concept_id: id.to_string(),
            concept_name: rec[1].trim().to_string(),
        });
    }
    Ok(out)
}

pub fn load_findings(path: &Path) -> Result<Vec<Finding>> {
    parse_findings(&resources::read_file(path)?, &path.display().to_string())
}

pub fn default_findings() -> Result<Vec<Finding>> {
    let (text, _, label) = resources::load(None, resources::FINDINGS)?;
    parse_findings(&text, &label)
}

fn flag(a: &crate::bioc::BiocAnnotation, key: &str) -> bool {
    a.infons.get(key).and_then(parse_bool_infon) == Some(true)
}

/// Status of one finding in one document. Mentions that never went through
/// negation detection (no flags at all) count as positive.
pub fn document_status(doc: &BiocDocument, concept_id: &str, precedence: &Precedence) -> LabelStatus {
    let mut seen = [false; 3];
    let mut any = false;
    for p in &doc.passages {
        let anns = p
            .annotations
            .iter()
            .chain(p.sentences.iter().flat_map(|s| s.annotations.iter()));
        for a in anns {
            if a.infons.get("source_concept_id") != Some(concept_id)
                || a.infons.contains_key("tag")
                || is_phi_annotation(p, a)
            {
                continue;
            }
            any = true;
            let status = if flag(a, "exists") {
                LabelStatus::Positive
            } else if flag(a, "uncertainty") {
                LabelStatus::Uncertain
            } else if flag(a, "negation") {
                LabelStatus::Negative
            } else {
                LabelStatus::Positive
            };
            let i = precedence.0.iter().position(|s| *s == status).unwrap();
            seen[i] = true;
        }
    }
    if !any {
        return LabelStatus::Absent;
    }
    (0..3)
        .find(|&i| seen[i])
        .map(|i| precedence.0[i])
        .unwrap_or(LabelStatus::Absent)
}

/// One record per document per finding, documents in collection order.
pub fn collect_labels(c: &BiocCollection, findings: &[Finding]) -> Vec<LabelRecord> {
    collect_labels_with(c, findings, &Precedence::default())
}

pub fn collect_labels_with(c: &BiocCollection, findings: &[Finding], precedence: &Precedence) -> Vec<LabelRecord> {
    c.documents
        .par_iter()
        .map(|doc| {
            findings
                .iter()
                .map(|f| LabelRecord {
                    doc_id: doc.id.clone(),
                    concept_id: f.concept_id.clone(),
                    concept_name: f.concept_name.clone(),
                    status: document_status(doc, &f.concept_id, precedence),
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SummaryRow {
    pub concept_id: String,
    pub concept_name: String,
    pub positive: usize,
    pub negative: usize,
    pub uncertain: usize,
}

impl SummaryRow {
    pub fn total(&self) -> usize {
        self.positive + self.negative + self.uncertain
    }
}

/// Per-finding status counts, ordered by concept id. Absent records add no
/// counts but still give their finding a row.
pub fn summarize(records: &[LabelRecord]) -> Vec<SummaryRow> {
    let mut rows: BTreeMap<&str, SummaryRow> = BTreeMap::new();
    for r in records {
        let row = rows.entry(&r.concept_id).or_insert_with(|| SummaryRow {
            concept_id: r.concept_id.clone(),
            concept_name: r.concept_name.clone(),
            positive: 0,
            negative: 0,
            uncertain: 0,
        });
        match r.status {
            LabelStatus::Positive => row.positive += 1,
            LabelStatus::Negative => row.negative += 1,
            LabelStatus::Uncertain => row.uncertain += 1,
            LabelStatus::Absent => {}
        }
    }
    rows.into_values().collect()
}

/// Labels CSV sorted by document then concept id. Unless empty, a blank
/// line and a count block follow the data rows.
pub fn write_labels_csv(records: &[LabelRecord]) -> Result<String> {
    let mut sorted: Vec<&LabelRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (&a.doc_id, &a.concept_id).cmp(&(&b.doc_id, &b.concept_id)));
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let err = |e: csv::Error| Error::Conversion(e.to_string());
        w.write_record(["doc_id", "concept_id", "concept_name", "status"])
            .map_err(err)?;
        for r in &sorted {
            w.write_record([r.doc_id.as_str(), &r.concept_id, &r.concept_name, r.status.as_str()])
                .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Conversion(e.to_string()))?;
    }
    if !records.is_empty() {
        buf.push(b'\n');
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        let err = |e: csv::Error| Error::Conversion(e.to_string());
        w.write_record([
            "concept_id",
            "concept_name",
            "positive",
            "negative",
            "uncertain",
            "total",
        ])
        .map_err(err)?;
        for s in summarize(records) {
            w.write_record([
                s.concept_id.clone(),
                s.concept_name.clone(),
                s.positive.to_string(),
                s.negative.to_string(),
                s.uncertain.to_string(),
                s.total().to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::Conversion(e.to_string()))?;
    }
    String::from_utf8(buf).map_err(|e| Error::Conversion(e.to_string()))
}
