//! Section segmentation.
//!
//! A header is a line-initial run of capital letters, spaces and
//! apostrophes ending in ':' (for example `FINDINGS:`). Each header becomes
//! its own title passage and the text up to the next header becomes a body
//! passage, trimmed of surrounding whitespace. Title passages whose header
//! appears in the section vocabulary carry `section_concept` and
//! `section_concept_id` infons.

use std::collections::HashMap;
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;

use crate::bioc::{BiocDocument, BiocPassage, BiocRelation, ROLE_GOVERNOR};
use crate::error::{Error, Result};
use crate::resources;
use crate::text::CharIndex;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionTitle {
    pub title: String,
    pub section_concept: String,
    pub section_concept_id: String,
}

#[derive(Debug, Clone, Default)]
pub struct SectionTitleVocab {
    entries: Vec<SectionTitle>,
    by_title: HashMap<String, usize>,
}

fn normalize_title(t: &str) -> String {
    t.split_whitespace().collect::<Vec<_>>().join(" ").to_uppercase()
}

impl SectionTitleVocab {
    pub fn new(entries: Vec<SectionTitle>) -> Result<Self> {
        let mut by_title = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            let key = normalize_title(&e.title);
            if key.is_empty() {
                return Err(Error::Config(format!("section title #{} is empty", i + 1)));
            }
            if by_title.insert(key, i).is_some() {
                return Err(Error::Config(format!("duplicate section title {:?}", e.title)));
            }
        }
        Ok(SectionTitleVocab { entries, by_title })
    }

    pub fn lookup(&self, title: &str) -> Option<&SectionTitle> {
        self.by_title.get(&normalize_title(title)).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[SectionTitle] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Load a vocabulary of `title,section_concept,section_concept_id` rows. A
/// leading header row with those names is skipped.
pub fn load_section_vocab(path: &Path) -> Result<SectionTitleVocab> {
    parse_section_vocab(&resources::read_file(path)?, &path.display().to_string())
}

pub fn default_section_vocab() -> Result<SectionTitleVocab> {
    let (text, _, label) = resources::load(None, resources::SECTION_TITLES)?;
    parse_section_vocab(&text, &label)
}

pub fn parse_section_vocab(text: &str, label: &str) -> Result<SectionTitleVocab> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut entries = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::resource(label, e.to_string()))?;
        if i == 0 && rec.get(0) == Some("title") {
            continue;
        }
        if rec.len() != 3 {
            return Err(Error::resource(
                label,
                format!("row {}: expected 3 fields, found {}", i + 1, rec.len()),
            ));
        }
        entries.push(SectionTitle {
            title: rec[0].to_string(),
            section_concept: rec[1].to_string(),
            section_concept_id: rec[2].to_string(),
        });
    }
    SectionTitleVocab::new(entries).map_err(|e| Error::resource(label, e.to_string()))
}

fn header_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)^[ \t]*([A-Z][A-Z ']{0,40}:)").unwrap())
}

/// Whether a whole passage text is a section header.
pub fn is_title_text(text: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[A-Z][A-Z ']{0,40}:$").unwrap())
        .is_match(text)
}

/// Character spans `[start, end)` of every header in `text`.
fn find_headers(text: &str) -> Vec<(usize, usize)> {
    let index = CharIndex::new(text);
    header_regex()
        .captures_iter(text)
        .map(|c| {
            let m = c.get(1).unwrap();
            (index.char_at(m.start()), index.char_at(m.end()))
        })
        .collect()
}

/// Push `[start, end)` of `chars` as a trimmed body passage.
fn push_body(out: &mut Vec<BiocPassage>, chars: &[char], start: usize, end: usize) {
    let mut s = start;
    let mut e = end;
    while s < e && chars[s].is_whitespace() {
        s += 1;
    }
    while e > s && chars[e - 1].is_whitespace() {
        e -= 1;
    }
    if s < e {
        out.push(BiocPassage::new(s, chars[s..e].iter().collect::<String>()));
    }
}

/// Split a document into title and body passages.
///
/// The document text is reassembled from its passages, so a document that
/// was already split is re-split from scratch. Passage-level annotations
/// move to the new passage containing their start; sentences are dropped.
pub fn split_sections(doc: &BiocDocument, vocab: &SectionTitleVocab) -> BiocDocument {
    let chars = reassemble(doc);
    let text: String = chars.iter().collect();

    let mut passages = Vec::new();
    let mut cursor = 0;
    for (hs, he) in find_headers(&text) {
        push_body(&mut passages, &chars, cursor, hs);
        let title: String = chars[hs..he].iter().collect();
        let mut p = BiocPassage::new(hs, title.as_str());
        if let Some(entry) = vocab.lookup(title.trim_end_matches(':')) {
            p.infons.insert("section_concept", entry.section_concept.as_str());
            p.infons.insert("section_concept_id", entry.section_concept_id.as_str());
        }
        passages.push(p);
        cursor = he;
    }
    push_body(&mut passages, &chars, cursor, chars.len());

    let old_annotations = doc.passages.iter().flat_map(|p| p.annotations.iter());
    for ann in old_annotations {
        let start = ann.span().map(|l| l.offset).unwrap_or(0);
        if let Some(i) = owning_passage(&passages, start) {
            passages[i].annotations.push(ann.clone());
        }
    }
    let old_relations: Vec<&BiocRelation> = doc.passages.iter().flat_map(|p| p.relations.iter()).collect();
    for rel in old_relations {
        let Some(gov) = rel.node(ROLE_GOVERNOR) else { continue };
        if let Some(p) = passages
            .iter_mut()
            .find(|p| p.annotations.iter().any(|a| a.id == gov.refid))
        {
            p.relations.push(rel.clone());
        }
    }

    BiocDocument {
        id: doc.id.clone(),
        infons: doc.infons.clone(),
        passages,
    }
}

/// Document text from its passages. A gap before a title passage becomes
/// a line break so the header stays line-initial; other gaps are spaces.
fn reassemble(doc: &BiocDocument) -> Vec<char> {
    let mut buf = doc.text().chars().collect::<Vec<_>>();
    let mut prev_end = 0;
    for p in &doc.passages {
        if p.offset > prev_end && is_title_text(&p.text) {
            buf[p.offset - 1] = '\n';
        }
        prev_end = prev_end.max(p.offset + p.text.chars().count());
    }
    buf
}

/// Index of the passage containing `offset`, else the closest one before it,
/// else the first.
fn owning_passage(passages: &[BiocPassage], offset: usize) -> Option<usize> {
    if passages.is_empty() {
        return None;
    }
    let mut best = 0;
    for (i, p) in passages.iter().enumerate() {
        if p.offset <= offset {
            best = i;
        }
    }
    Some(best)
}
