use std::collections::HashSet;
use std::fmt;

use chrono::NaiveDate;

use super::model::*;
use crate::text::is_masked;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    BadDate,
    IllegalCharacter,
    DuplicateId,
    MissingLocation,
    EmptyLocation,
    OutOfBounds,
    TextMismatch,
    Overlap,
    Unordered,
    NotContained,
    DanglingRefid,
    RelationArity,
    MissingDependency,
}

/// One broken invariant, with a path to the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

struct Checker {
    out: Vec<Violation>,
}

impl Checker {
    fn push(&mut self, path: &str, kind: ViolationKind, message: impl Into<String>) {
        self.out.push(Violation {
            path: path.to_string(),
            kind,
            message: message.into(),
        });
    }

    fn chars(&mut self, path: &str, what: &str, s: &str) {
        if let Some(c) = s.chars().find(|&c| !xml_char(c)) {
            self.push(
                path,
                ViolationKind::IllegalCharacter,
                format!("{what} contains U+{:04X}, which XML cannot carry", c as u32),
            );
        }
    }

    fn infons(&mut self, path: &str, infons: &Infons) {
        for (k, v) in infons.iter() {
            self.chars(path, "infon key", k);
            self.chars(path, "infon value", v);
        }
    }
}

fn xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..)
}

/// Check every structural invariant of the collection.
///
/// Text checks compare against the document text reassembled from its
/// passages. An annotation whose text differs from a span of 'X' of the same
/// length is accepted: that is a de-identified span whose annotation keeps
/// the original text. Documents without any text (rebuilt from NOTE_NLP
/// rows alone) skip bounds and text checks.
pub fn validate(c: &BiocCollection) -> Vec<Violation> {
    let mut ck = Checker { out: Vec::new() };
    if NaiveDate::parse_from_str(&c.date, "%Y-%m-%d").is_err() {
        ck.push(
            "collection",
            ViolationKind::BadDate,
            format!("date {:?} is not a calendar date (YYYY-MM-DD)", c.date),
        );
    }
    ck.chars("collection", "source", &c.source);
    ck.chars("collection", "key", &c.key);
    ck.infons("collection", &c.infons);

    let mut doc_ids = HashSet::new();
    for d in &c.documents {
        let dpath = format!("document[{}]", d.id);
        if !doc_ids.insert(d.id.as_str()) {
            ck.push(&dpath, ViolationKind::DuplicateId, "duplicate document id");
        }
        ck.chars(&dpath, "id", &d.id);
        ck.infons(&dpath, &d.infons);
        check_document(&mut ck, d, &dpath);
    }
    ck.out
}

fn check_document(ck: &mut Checker, d: &BiocDocument, dpath: &str) {
    let text: Option<Vec<char>> = d.has_text().then(|| d.text().chars().collect());

    let mut prev: Option<Location> = None;
    for (pi, p) in d.passages.iter().enumerate() {
        let ppath = format!("{dpath}/passage[{pi}]");
        ck.chars(&ppath, "text", &p.text);
        ck.infons(&ppath, &p.infons);
        let span = p.span();
        if let Some(prev) = prev {
            if span.offset < prev.offset {
                ck.push(&ppath, ViolationKind::Unordered, "passages not ordered by offset");
            } else if span.offset < prev.end() {
                ck.push(&ppath, ViolationKind::Overlap, "passage overlaps its predecessor");
            }
        }
        prev = Some(span);

        let mut prev_s: Option<Location> = None;
        for (si, s) in p.sentences.iter().enumerate() {
            let spath = format!("{ppath}/sentence[{si}]");
            ck.chars(&spath, "text", &s.text);
            ck.infons(&spath, &s.infons);
            let ss = s.span();
            if let Some(prev_s) = prev_s {
                if ss.offset < prev_s.offset {
                    ck.push(&spath, ViolationKind::Unordered, "sentences not ordered by offset");
                } else if ss.offset < prev_s.end() {
                    ck.push(&spath, ViolationKind::Overlap, "sentence overlaps its predecessor");
                }
            }
            prev_s = Some(ss);
            if ss.offset < span.offset || ss.end() > span.end() {
                ck.push(
                    &spath,
                    ViolationKind::NotContained,
                    format!(
                        "sentence [{}, {}) outside passage [{}, {})",
                        ss.offset,
                        ss.end(),
                        span.offset,
                        span.end()
                    ),
                );
            }
            if let Some(text) = &text {
                check_text(ck, &spath, text, ss, &s.text, false);
            }
            check_annotations(ck, &spath, &s.annotations, text.as_deref());
            let ids: HashSet<&str> = s.annotations.iter().map(|a| a.id.as_str()).collect();
            check_relations(ck, &spath, &s.relations, &ids);
        }

        check_annotations(ck, &ppath, &p.annotations, text.as_deref());
        let ids: HashSet<&str> = p
            .annotations
            .iter()
            .chain(p.sentences.iter().flat_map(|s| s.annotations.iter()))
            .map(|a| a.id.as_str())
            .collect();
        check_relations(ck, &ppath, &p.relations, &ids);
    }
}

fn check_text(ck: &mut Checker, path: &str, doc: &[char], loc: Location, expected: &str, allow_masked: bool) {
    if loc.end() > doc.len() {
        ck.push(
            path,
            ViolationKind::OutOfBounds,
            format!(
                "span [{}, {}) exceeds document length {}",
                loc.offset,
                loc.end(),
                doc.len()
            ),
        );
        return;
    }
    let actual: String = doc[loc.offset..loc.end()].iter().collect();
    if actual != expected && !(allow_masked && is_masked(&actual) && actual.chars().count() == expected.chars().count())
    {
        ck.push(
            path,
            ViolationKind::TextMismatch,
            format!(
                "text {expected:?} differs from document text {actual:?} at offset {}",
                loc.offset
            ),
        );
    }
}

fn check_annotations(ck: &mut Checker, path: &str, anns: &[BiocAnnotation], doc: Option<&[char]>) {
    let mut seen = HashSet::new();
    for a in anns {
        let apath = format!("{path}/annotation[{}]", a.id);
        if !seen.insert(a.id.as_str()) {
            ck.push(&apath, ViolationKind::DuplicateId, "duplicate annotation id");
        }
        ck.chars(&apath, "id", &a.id);
        ck.chars(&apath, "text", &a.text);
        ck.infons(&apath, &a.infons);
        if a.locations.is_empty() {
            ck.push(&apath, ViolationKind::MissingLocation, "annotation has no location");
            continue;
        }
        if a.locations.iter().any(|l| l.length == 0) {
            ck.push(&apath, ViolationKind::EmptyLocation, "location with zero length");
        }
        let Some(doc) = doc else { continue };
        if let [loc] = a.locations.as_slice() {
            check_text(ck, &apath, doc, *loc, &a.text, true);
        } else {
            for loc in &a.locations {
                if loc.end() > doc.len() {
                    ck.push(&apath, ViolationKind::OutOfBounds, "location exceeds document");
                }
            }
        }
    }
}

fn check_relations(ck: &mut Checker, path: &str, rels: &[BiocRelation], ids: &HashSet<&str>) {
    let mut seen = HashSet::new();
    for r in rels {
        let rpath = format!("{path}/relation[{}]", r.id);
        if !seen.insert(r.id.as_str()) {
            ck.push(&rpath, ViolationKind::DuplicateId, "duplicate relation id");
        }
        ck.infons(&rpath, &r.infons);
        match r.infons.get("dependency") {
            Some(dep) if !dep.is_empty() => {}
            _ => ck.push(
                &rpath,
                ViolationKind::MissingDependency,
                "relation lacks a non-empty dependency infon",
            ),
        }
        let governors = r.nodes.iter().filter(|n| n.role == ROLE_GOVERNOR).count();
        let dependants = r.nodes.iter().filter(|n| n.role == ROLE_DEPENDANT).count();
        if governors != 1 || dependants != 1 || r.nodes.len() != 2 {
            ck.push(
                &rpath,
                ViolationKind::RelationArity,
                "relation needs exactly one governor and one dependant node",
            );
        }
        for n in &r.nodes {
            if !ids.contains(n.refid.as_str()) {
                ck.push(
                    &rpath,
                    ViolationKind::DanglingRefid,
                    format!("node refid {:?} matches no annotation", n.refid),
                );
            }
        }
    }
}
