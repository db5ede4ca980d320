//! Conversion between BioC collections and OMOP CDM `NOTE_NLP` rows, and
//! ingestion of raw notes from CSV.

use std::collections::{HashMap, HashSet};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::bioc::{bool_infon, parse_bool_infon, BiocAnnotation, BiocCollection, BiocDocument, BiocPassage, Location};
use crate::error::{Error, Result};
use crate::secsplit::is_title_text;
use crate::text::char_len;

/// `NOTE_NLP` columns, in table order.
pub const NOTE_NLP_COLUMNS: [&str; 14] = [
    "note_nlp_id",
    "note_id",
    "section_concept_id",
    "snippet",
    "offset",
    "lexical_variant",
    "note_nlp_concept_id",
    "note_nlp_source_concept_id",
    "nlp_system",
    "nlp_date",
    "nlp_datetime",
    "term_exists",
    "term_temporal",
    "term_modifiers",
];

/// Characters on each side of a term in a window snippet.
pub const SNIPPET_WINDOW: usize = 40;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdmNoteNlpRow {
    pub note_nlp_id: String,
    pub note_id: String,
    pub section_concept_id: String,
    pub snippet: String,
    pub offset: usize,
    pub lexical_variant: String,
    pub note_nlp_concept_id: String,
    pub note_nlp_source_concept_id: String,
    pub nlp_system: String,
    pub nlp_date: String,
    pub nlp_datetime: String,
    pub term_exists: String,
    pub term_temporal: String,
    pub term_modifiers: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteRow {
    pub note_id: String,
    pub note_text: String,
}

/// Annotation infons with a column of their own; the rest are folded into
/// `term_modifiers`.
const MAPPED_INFONS: &[&str] = &[
    "note_nlp_id",
    "section_concept_id",
    "snippet",
    "lemma",
    "source_concept_id",
    "nlp_system",
    "nlp_date",
    "nlp_datetime",
    "exists",
    "negation",
    "temporal",
    "modifiers",
];

fn is_token(a: &BiocAnnotation) -> bool {
    a.infons.contains_key("tag")
}

fn modifiers_of(a: &BiocAnnotation) -> String {
    a.infons
        .iter()
        .filter(|(k, _)| !MAPPED_INFONS.contains(k))
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join("; ")
}

fn term_exists_of(a: &BiocAnnotation) -> String {
    if let Some(e) = a.infons.get("exists") {
        return e.to_string();
    }
    match a.infons.get("negation").and_then(parse_bool_infon) {
        Some(neg) => bool_infon(!neg).to_string(),
        None => String::new(),
    }
}

fn window(chars: &[char], loc: Location) -> String {
    let start = loc.offset.saturating_sub(SNIPPET_WINDOW).min(chars.len());
    let end = (loc.end() + SNIPPET_WINDOW).min(chars.len()).max(start);
    chars[start..end].iter().collect()
}

/// The sentence containing `loc`, else a window around it.
fn snippet_for(passage: &BiocPassage, doc_chars: &[char], loc: Location) -> String {
    passage
        .sentences
        .iter()
        .find(|s| s.offset <= loc.offset && loc.end() <= s.offset + char_len(&s.text))
        .map(|s| s.text.clone())
        .unwrap_or_else(|| window(doc_chars, loc))
}

struct Context<'a> {
    doc: &'a BiocDocument,
    chars: Vec<char>,
    /// Section id in force for each passage (its own, else the closest
    /// preceding title's).
    sections: Vec<String>,
    collection_system: String,
    collection_date: String,
    collection_datetime: String,
}

impl<'a> Context<'a> {
    fn new(c: &BiocCollection, doc: &'a BiocDocument) -> Self {
        let mut sections = Vec::with_capacity(doc.passages.len());
        let mut current = String::new();
        for p in &doc.passages {
            match p.infons.get("section_concept_id") {
                Some(id) => {
                    if is_title_text(&p.text) {
                        current = id.to_string();
                    }
                    sections.push(id.to_string());
                }
                None => {
                    if is_title_text(&p.text) {
                        current.clear();
                    }
                    sections.push(current.clone());
                }
            }
        }
        Context {
            doc,
            chars: doc.text().chars().collect(),
            sections,
            collection_system: c.infons.get("nlp_system").unwrap_or_default().to_string(),
            collection_date: c.date.clone(),
            collection_datetime: c.infons.get("nlp_datetime").unwrap_or_default().to_string(),
        }
    }

    fn row(&self, pi: usize, a: &BiocAnnotation) -> Result<CdmNoteNlpRow> {
        let passage = &self.doc.passages[pi];
        let Some(&loc) = a.locations.first() else {
            return Err(Error::Conversion(format!(
                "document {}: annotation {} has no location",
                self.doc.id, a.id
            )));
        };
        let get = |k: &str| a.infons.get(k).map(str::to_string);
        Ok(CdmNoteNlpRow {
            note_nlp_id: get("note_nlp_id").unwrap_or_else(|| format!("{}.{}", self.doc.id, a.id)),
            note_id: self.doc.id.clone(),
            section_concept_id: get("section_concept_id").unwrap_or_else(|| self.sections[pi].clone()),
            snippet: get("snippet").unwrap_or_else(|| snippet_for(passage, &self.chars, loc)),
            offset: loc.offset,
            lexical_variant: a.text.clone(),
            note_nlp_concept_id: get("lemma").unwrap_or_default(),
            note_nlp_source_concept_id: get("source_concept_id").unwrap_or_default(),
            nlp_system: get("nlp_system").unwrap_or_else(|| self.collection_system.clone()),
            nlp_date: get("nlp_date").unwrap_or_else(|| self.collection_date.clone()),
            nlp_datetime: get("nlp_datetime").unwrap_or_else(|| self.collection_datetime.clone()),
            term_exists: term_exists_of(a),
            term_temporal: get("temporal").unwrap_or_default(),
            term_modifiers: get("modifiers").unwrap_or_else(|| modifiers_of(a)),
        })
    }
}

/// One row per annotation (dependency tokens excluded), in document,
/// passage, then annotation order; sentence-level annotations follow
/// their passage's own.
pub fn bioc2cdm(c: &BiocCollection) -> Result<Vec<CdmNoteNlpRow>> {
    let mut rows = Vec::new();
    for doc in &c.documents {
        let ctx = Context::new(c, doc);
        for (pi, p) in doc.passages.iter().enumerate() {
            let anns = p
                .annotations
                .iter()
                .chain(p.sentences.iter().flat_map(|s| s.annotations.iter()));
            for a in anns.filter(|a| !is_token(a)) {
                rows.push(ctx.row(pi, a)?);
            }
        }
    }
    Ok(rows)
}

fn is_iso_date(s: &str) -> bool {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").is_ok()
}

/// Rebuild a collection from rows: one document per distinct `note_id`
/// (in order of first appearance) holding a single passage at offset 0.
/// With `notes` the passage carries the note text and every row must
/// match it; without, the passage is empty and annotations keep their own
/// text. Values that the reverse mapping would not reproduce on its own
/// are kept as annotation infons, so `bioc2cdm` returns the rows unchanged.
pub fn cdm2bioc(rows: &[CdmNoteNlpRow], notes: Option<&[NoteRow]>) -> Result<BiocCollection> {
    let mut seen = HashSet::new();
    for r in rows {
        if !seen.insert(r.note_nlp_id.as_str()) {
            return Err(Error::Conversion(format!("duplicate note_nlp_id {:?}", r.note_nlp_id)));
        }
        if r.lexical_variant.is_empty() {
            return Err(Error::Conversion(format!(
                "row {:?} has an empty lexical_variant",
                r.note_nlp_id
            )));
        }
    }
    let note_text: Option<HashMap<&str, &str>> =
        notes.map(|ns| ns.iter().map(|n| (n.note_id.as_str(), n.note_text.as_str())).collect());

    let first = rows.first();
    let date = first
        .map(|r| r.nlp_date.clone())
        .filter(|d| is_iso_date(d))
        .unwrap_or_else(|| "1970-01-01".to_string());
    let mut c = BiocCollection::new("cdm2bioc", date);
    let system = first.map(|r| r.nlp_system.clone()).unwrap_or_default();
    let datetime = first.map(|r| r.nlp_datetime.clone()).unwrap_or_default();
    if !system.is_empty() {
        c.infons.insert("nlp_system", system.as_str());
    }
    if !datetime.is_empty() {
        c.infons.insert("nlp_datetime", datetime.as_str());
    }

    let mut order: Vec<&str> = Vec::new();
    let mut by_note: HashMap<&str, Vec<&CdmNoteNlpRow>> = HashMap::new();
    for r in rows {
        by_note
            .entry(r.note_id.as_str())
            .or_insert_with(|| {
                order.push(r.note_id.as_str());
                Vec::new()
            })
            .push(r);
    }

    for note_id in order {
        let text = match &note_text {
            Some(map) => match map.get(note_id) {
                Some(t) => t.to_string(),
                None => return Err(Error::Conversion(format!("note {note_id:?} is missing from the notes"))),
            },
            None => String::new(),
        };
        let mut doc = BiocDocument::from_text(note_id, text.as_str());
        let chars: Vec<char> = text.chars().collect();
        let prefix = format!("{note_id}.");
        let mut ids: HashSet<String> = HashSet::new();
        for r in &by_note[note_id] {
            let len = char_len(&r.lexical_variant);
            if notes.is_some() {
                if r.offset + len > chars.len() {
                    return Err(Error::Conversion(format!(
                        "row {:?}: offset {} + length {len} is beyond note {note_id:?} ({} characters)",
                        r.note_nlp_id,
                        r.offset,
                        chars.len()
                    )));
                }
                let under: String = chars[r.offset..r.offset + len].iter().collect();
                if under != r.lexical_variant && !crate::text::is_masked(&under) {
                    return Err(Error::Conversion(format!(
                        "row {:?}: note text at offset {} is {under:?}, not {:?}",
                        r.note_nlp_id, r.offset, r.lexical_variant
                    )));
                }
            }
            let (mut id, keep_id) = match r.note_nlp_id.strip_prefix(&prefix) {
                Some(rest) if !rest.is_empty() => (rest.to_string(), false),
                _ => (r.note_nlp_id.clone(), true),
            };
            let mut k = 1;
            while ids.contains(&id) {
                id = format!("{}~{k}", r.note_nlp_id);
                k += 1;
            }
            ids.insert(id.clone());
            let keep_id = keep_id || id != r.note_nlp_id.strip_prefix(&prefix).unwrap_or_default();

            let mut a = BiocAnnotation::new(id, r.offset, r.lexical_variant.as_str());
            let mut set = |k: &str, v: &str| {
                if !v.is_empty() {
                    a.infons.insert(k, v);
                }
            };
            set("source_concept_id", &r.note_nlp_source_concept_id);
            set("lemma", &r.note_nlp_concept_id);
            set("section_concept_id", &r.section_concept_id);
            match parse_bool_infon(&r.term_exists) {
                Some(exists) => {
                    a.infons.insert("exists", r.term_exists.as_str());
                    if !exists {
                        a.infons.insert("negation", bool_infon(true));
                    }
                }
                None if !r.term_exists.is_empty() => {
                    a.infons.insert("exists", r.term_exists.as_str());
                }
                None => {}
            }
            let mut set = |k: &str, v: &str| {
                if !v.is_empty() {
                    a.infons.insert(k, v);
                }
            };
            set("temporal", &r.term_temporal);
            set("modifiers", &r.term_modifiers);
            if keep_id {
                a.infons.insert("note_nlp_id", r.note_nlp_id.as_str());
            }
            // per-row values that differ from the collection defaults
            if r.nlp_system != system {
                a.infons.insert("nlp_system", r.nlp_system.as_str());
            }
            if r.nlp_date != c.date {
                a.infons.insert("nlp_date", r.nlp_date.as_str());
            }
            if r.nlp_datetime != datetime {
                a.infons.insert("nlp_datetime", r.nlp_datetime.as_str());
            }
            let loc = Location::new(r.offset, len);
            if snippet_for(&doc.passages[0], &chars, loc) != r.snippet {
                a.infons.insert("snippet", r.snippet.as_str());
            }
            doc.passages[0].annotations.push(a);
        }
        c.documents.push(doc);
    }
    Ok(c)
}

fn csv_error(e: csv::Error) -> Error {
    let row = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Csv {
        row,
        message: e.to_string(),
    }
}

/// `NOTE_NLP` rows as CSV with a header row.
pub fn write_note_nlp_csv(rows: &[CdmNoteNlpRow]) -> Result<String> {
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .has_headers(false)
            .from_writer(&mut buf);
        w.write_record(NOTE_NLP_COLUMNS).map_err(csv_error)?;
        for r in rows {
            w.serialize(r).map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::Conversion(e.to_string()))?;
    }
    String::from_utf8(buf).map_err(|e| Error::Conversion(e.to_string()))
}

/// Read `NOTE_NLP` CSV; the header must list exactly the table's columns in
/// order.
pub fn read_note_nlp_csv(text: &str) -> Result<Vec<CdmNoteNlpRow>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?.clone();
    if header.iter().ne(NOTE_NLP_COLUMNS.iter().copied()) {
        return Err(Error::Config(format!(
            "NOTE_NLP header must be {}, found {}",
            NOTE_NLP_COLUMNS.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    r.deserialize().map(|row| row.map_err(csv_error)).collect()
}

/// Read `(id, text)` pairs from the named columns of a CSV file.
fn read_id_text(text: &str, id_column: &str, text_column: &str) -> Result<Vec<(String, String)>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers().map_err(csv_error)?.clone();
    let col = |name: &str| {
        header.iter().position(|h| h == name).ok_or_else(|| {
            Error::Config(format!(
                "CSV has no column {name:?} (columns: {})",
                header.iter().collect::<Vec<_>>().join(",")
            ))
        })
    };
    let (ic, tc) = (col(id_column)?, col(text_column)?);
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_error)?;
        let row = rec.position().map(|p| p.line()).unwrap_or(0);
        let id = rec.get(ic).unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(Error::Csv {
                row,
                message: format!("empty {id_column}"),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::Csv {
                row,
                message: format!("duplicate {id_column} {id:?}"),
            });
        }
        out.push((id, rec.get(tc).unwrap_or_default().to_string()));
    }
    Ok(out)
}

/// Notes CSV with columns `note_id` and `note_text`.
pub fn read_notes_csv(text: &str) -> Result<Vec<NoteRow>> {
    Ok(read_id_text(text, "note_id", "note_text")?
        .into_iter()
        .map(|(note_id, note_text)| NoteRow { note_id, note_text })
        .collect())
}

/// Local date as YYYY-MM-DD.
pub fn today() -> String {
    chrono::Local::now().format("%Y-%m-%d").to_string()
}

pub fn check_date(date: &str) -> Result<()> {
    NaiveDate::parse_from_str(date, "%Y-%m-%d")
        .map(|_| ())
        .map_err(|_| Error::Config(format!("date must be YYYY-MM-DD, got {date:?}")))
}

/// One document per CSV data row, its text in a single passage at offset 0.
pub fn csv2bioc(csv_text: &str, id_column: &str, text_column: &str, date: &str) -> Result<BiocCollection> {
    check_date(date)?;
    let mut c = BiocCollection::new("csv2bioc", date);
    for (id, text) in read_id_text(csv_text, id_column, text_column)? {
        c.documents.push(BiocDocument::from_text(id, text));
    }
    Ok(c)
}
