//! Vocabulary-driven concept recognition.
//!
//! Phrases and regexes are matched case-insensitively, aligned to token
//! boundaries, leftmost-longest and without overlaps. Ties on length go to
//! the entry listed first in the vocabulary.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use crate::bioc::{BiocAnnotation, BiocDocument, Location};
use crate::deid::IdAllocator;
use crate::error::{Error, Result};
use crate::resources;
use crate::secsplit::is_title_text;
use crate::ssplit::{tokenize_text, Token};
use crate::text::CharIndex;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConceptEntry {
    pub concept_id: String,
    pub concept_name: String,
    /// Terminology the id comes from ("UMLS", "RadLex", ...).
    #[serde(default)]
    pub source: Option<String>,
    #[serde(default)]
    pub phrases: Vec<String>,
    #[serde(default)]
    pub regexes: Vec<String>,
}

#[derive(Debug, Clone)]
struct Pattern {
    entry: usize,
    regex: Regex,
}

#[derive(Debug, Clone)]
pub struct ConceptVocabulary {
    entries: Vec<ConceptEntry>,
    /// Phrase patterns keyed by their lowercased first token.
    phrases: HashMap<String, Vec<Pattern>>,
    regexes: Vec<Pattern>,
}

/// Anchored, case-insensitive regex for a phrase; whitespace runs in the
/// phrase match any whitespace run.
fn phrase_regex(phrase: &str) -> std::result::Result<Regex, regex::Error> {
    let body = phrase
        .split_whitespace()
        .map(regex::escape)
        .collect::<Vec<_>>()
        .join(r"\s+");
    Regex::new(&format!("(?i)^(?:{body})"))
}

impl ConceptVocabulary {
    pub fn new(entries: Vec<ConceptEntry>) -> Result<Self> {
        let mut ids = HashSet::new();
        let mut phrases: HashMap<String, Vec<Pattern>> = HashMap::new();
        let mut regexes = Vec::new();
        for (i, e) in entries.iter().enumerate() {
            if !ids.insert(e.concept_id.as_str()) {
                return Err(Error::Config(format!("duplicate concept id {}", e.concept_id)));
            }
            let phrase_count = e.phrases.iter().filter(|p| !p.trim().is_empty()).count();
            if phrase_count == 0 && e.regexes.is_empty() {
                return Err(Error::Config(format!(
                    "concept {} has neither phrases nor regexes",
                    e.concept_id
                )));
            }
            for p in e.phrases.iter().filter(|p| !p.trim().is_empty()) {
                let first = tokenize_text(p, 0)[0].text.to_lowercase();
                let regex = phrase_regex(p)
                    .map_err(|err| Error::Config(format!("concept {}: phrase {p:?}: {err}", e.concept_id)))?;
                phrases.entry(first).or_default().push(Pattern { entry: i, regex });
            }
            for r in &e.regexes {
                let regex = Regex::new(&format!("(?i)^(?:{r})"))
                    .map_err(|err| Error::Config(format!("concept {}: bad regex {r:?}: {err}", e.concept_id)))?;
                regexes.push(Pattern { entry: i, regex });
            }
        }
        Ok(ConceptVocabulary {
            entries,
            phrases,
            regexes,
        })
    }

    pub fn empty() -> Self {
        ConceptVocabulary {
            entries: Vec::new(),
            phrases: HashMap::new(),
            regexes: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[ConceptEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, concept_id: &str) -> Option<&ConceptEntry> {
        self.entries.iter().find(|e| e.concept_id == concept_id)
    }
}

pub fn parse_concept_vocab(text: &str, label: &str) -> Result<ConceptVocabulary> {
    let entries: Vec<ConceptEntry> = serde_yaml::from_str(text).map_err(|e| Error::resource(label, e.to_string()))?;
    ConceptVocabulary::new(entries).map_err(|e| Error::resource(label, e.to_string()))
}

pub fn load_concept_vocab(path: &Path) -> Result<ConceptVocabulary> {
    parse_concept_vocab(&resources::read_file(path)?, &path.display().to_string())
}

pub fn default_concept_vocab() -> Result<ConceptVocabulary> {
    let (text, _, label) = resources::load(None, resources::CONCEPTS)?;
    parse_concept_vocab(&text, &label)
}

/// A recognized mention, in characters relative to the matched text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mention {
    pub entry: usize,
    pub start: usize,
    pub end: usize,
}

/// Leftmost-longest, non-overlapping, token-aligned mentions in `text`.
pub fn find_mentions(text: &str, vocab: &ConceptVocabulary) -> Vec<Mention> {
    let tokens: Vec<Token> = tokenize_text(text, 0);
    if tokens.is_empty() || vocab.is_empty() {
        return Vec::new();
    }
    let index = CharIndex::new(text);
    let byte_of: Vec<usize> = {
        let mut v: Vec<usize> = text.char_indices().map(|(b, _)| b).collect();
        v.push(text.len());
        v
    };
    let token_ends: HashSet<usize> = tokens.iter().map(Token::end).collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        let rest = &text[byte_of[tok.offset]..];
        let key = tok.text.to_lowercase();
        let candidates = vocab
            .phrases
            .get(&key)
            .into_iter()
            .flatten()
            .chain(vocab.regexes.iter());
        let mut best: Option<Mention> = None;
        for pat in candidates {
            let Some(m) = pat.regex.find(rest) else { continue };
            if m.is_empty() {
                continue;
            }
            let end = index.char_at(byte_of[tok.offset] + m.end());
            if !token_ends.contains(&end) {
                continue;
            }
            let cand = Mention {
                entry: pat.entry,
                start: tok.offset,
                end,
            };
            best = match best {
                None => Some(cand),
                Some(b) if cand.end > b.end || (cand.end == b.end && cand.entry < b.entry) => Some(cand),
                keep => keep,
            };
        }
        match best {
            Some(m) => {
                out.push(m);
                while i < tokens.len() && tokens[i].offset < m.end {
                    i += 1;
                }
            }
            None => i += 1,
        }
    }
    out
}

/// Annotate every vocabulary mention. Matching runs per sentence; a body
/// passage without sentences is matched as a whole. Annotations go to the
/// passage with ids `a1`, `a2`, ... and infons `source_concept`,
/// `source_concept_id` (and `source` when the vocabulary names one). A
/// mention already annotated with the same span and concept is skipped, so
/// re-running is a no-op.
pub fn match_concepts(doc: &BiocDocument, vocab: &ConceptVocabulary) -> BiocDocument {
    let mut out = doc.clone();
    let mut ids = IdAllocator::starting_at(doc, "a", 1);
    for p in &mut out.passages {
        let units: Vec<(usize, String)> = if p.sentences.is_empty() {
            if is_title_text(&p.text) {
                continue;
            }
            vec![(p.offset, p.text.clone())]
        } else {
            p.sentences.iter().map(|s| (s.offset, s.text.clone())).collect()
        };
        for (base, text) in units {
            let chars: Vec<char> = text.chars().collect();
            for m in find_mentions(&text, vocab) {
                let entry = &vocab.entries[m.entry];
                let loc = Location::new(base + m.start, m.end - m.start);
                let exists = p.annotations.iter().any(|a| {
                    a.locations.first() == Some(&loc)
                        && a.infons.get("source_concept_id") == Some(entry.concept_id.as_str())
                });
                if exists {
                    continue;
                }
                let surface: String = chars[m.start..m.end].iter().collect();
                let mut ann = BiocAnnotation::new(ids.next(), loc.offset, surface);
                ann.infons.insert("source_concept", entry.concept_name.as_str());
                ann.infons.insert("source_concept_id", entry.concept_id.as_str());
                if let Some(src) = &entry.source {
                    ann.infons.insert("source", src.as_str());
                }
                p.annotations.push(ann);
            }
        }
    }
    out
}
