//! Rule-based de-identification.
//!
//! PHI spans are found with regular expressions and name dictionaries, then
//! masked character-for-character with 'X' so that every offset in the
//! document stays valid. Each span also becomes an annotation carrying the
//! original text, unless the caller asks for redaction.

use std::collections::HashSet;
use std::path::Path;

use regex::Regex;
use serde::Deserialize;

use crate::bioc::{BiocAnnotation, BiocDocument, BiocPassage};
use crate::error::{Error, Result};
use crate::resources::{self, Origin};
use crate::text::CharIndex;

#[derive(Debug, Clone)]
pub enum PhiDetector {
    Regex(Regex),
    /// Whole-word, case-sensitive alternation over dictionary entries.
    Dictionary {
        source: String,
        matcher: Regex,
    },
}

#[derive(Debug, Clone)]
pub struct PhiRule {
    pub name: String,
    pub category: String,
    pub concept_id: String,
    pub detector: PhiDetector,
    pub priority: i32,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleEntry {
    name: Option<String>,
    category: String,
    #[serde(default)]
    concept_id: String,
    regex: Option<String>,
    dictionary: Option<String>,
    #[serde(default)]
    priority: i32,
}

impl PhiRule {
    /// Character spans `[start, end)` this rule detects in `text`.
    fn spans(&self, text: &str, index: &CharIndex) -> Vec<(usize, usize)> {
        let re = match &self.detector {
            PhiDetector::Regex(re) => re,
            PhiDetector::Dictionary { matcher, .. } => matcher,
        };
        re.captures_iter(text)
            .filter_map(|caps| caps.name("phi").or_else(|| caps.get(0)))
            .filter(|m| !m.is_empty())
            .map(|m| (index.char_at(m.start()), index.char_at(m.end())))
            .collect()
    }
}

/// Load PHI rules from a YAML rule file.
pub fn load_phi_rules(path: &Path) -> Result<Vec<PhiRule>> {
    let text = resources::read_file(path)?;
    parse_phi_rules(&text, &Origin::of_file(path), &path.display().to_string())
}

/// Rules from `RADTEXT_RESOURCES` or the bundled rule file.
pub fn default_phi_rules() -> Result<Vec<PhiRule>> {
    let (text, origin, label) = resources::load(None, resources::PHI_RULES)?;
    parse_phi_rules(&text, &origin, &label)
}

pub fn parse_phi_rules(text: &str, origin: &Origin, label: &str) -> Result<Vec<PhiRule>> {
    let entries: Vec<RuleEntry> = serde_yaml::from_str(text).map_err(|e| Error::resource(label, e.to_string()))?;
    entries
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let name = e.name.unwrap_or_else(|| format!("rule-{i}"));
            let detector = match (e.regex, e.dictionary) {
                (Some(re), None) => PhiDetector::Regex(
                    Regex::new(&re)
                        .map_err(|err| Error::resource(label, format!("rule {name:?}: bad regex: {err}")))?,
                ),
                (None, Some(dict)) => {
                    let entries = origin
                        .read(&dict)
                        .map_err(|err| Error::resource(label, format!("rule {name:?}: dictionary: {err}")))?;
                    PhiDetector::Dictionary {
                        matcher: dictionary_regex(&entries)
                            .map_err(|err| Error::resource(label, format!("rule {name:?}: {err}")))?,
                        source: dict,
                    }
                }
                _ => {
                    return Err(Error::resource(
                        label,
                        format!("rule {name:?}: exactly one of regex or dictionary is required"),
                    ))
                }
            };
            Ok(PhiRule {
                name,
                category: e.category,
                concept_id: e.concept_id,
                detector,
                priority: e.priority,
            })
        })
        .collect()
}

fn dictionary_regex(entries: &str) -> std::result::Result<Regex, regex::Error> {
    let mut words: Vec<&str> = entries
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    if words.is_empty() {
        // matches nothing
        return Regex::new(r"[^\s\S]");
    }
    words.sort_by_key(|w| std::cmp::Reverse(w.len()));
    let alt = words.iter().map(|w| regex::escape(w)).collect::<Vec<_>>().join("|");
    Regex::new(&format!(r"\b(?:{alt})\b"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Candidate {
    start: usize,
    end: usize,
    priority: i32,
    rule: usize,
}

/// Spans consisting only of 'X' and non-alphanumerics are already masked.
fn already_masked(chars: &[char]) -> bool {
    chars.iter().all(|&c| c == 'X' || !c.is_alphanumeric())
}

/// Select non-overlapping PHI spans in `text`: higher priority first, then
/// leftmost, then longest, then rule order.
fn select_spans(text: &str, rules: &[PhiRule]) -> Vec<Candidate> {
    let index = CharIndex::new(text);
    let chars: Vec<char> = text.chars().collect();
    let mut cands: Vec<Candidate> = rules
        .iter()
        .enumerate()
        .flat_map(|(ri, rule)| {
            rule.spans(text, &index).into_iter().map(move |(start, end)| Candidate {
                start,
                end,
                priority: rule.priority,
                rule: ri,
            })
        })
        .filter(|c| !already_masked(&chars[c.start..c.end]))
        .collect();
    cands.sort_by(|a, b| {
        b.priority
            .cmp(&a.priority)
            .then(a.start.cmp(&b.start))
            .then((b.end - b.start).cmp(&(a.end - a.start)))
            .then(a.rule.cmp(&b.rule))
    });
    let mut chosen: Vec<Candidate> = Vec::new();
    for c in cands {
        if chosen.iter().all(|k| c.end <= k.start || k.end <= c.start) {
            chosen.push(c);
        }
    }
    chosen.sort_by_key(|c| c.start);
    chosen
}

/// Mask every PHI span with 'X' and annotate it with the original text.
pub fn deidentify(doc: &BiocDocument, rules: &[PhiRule]) -> BiocDocument {
    deidentify_with(doc, rules, false)
}

/// Like [`deidentify`]; with `redact` the PHI annotations are dropped so the
/// original text does not survive anywhere in the output.
pub fn deidentify_with(doc: &BiocDocument, rules: &[PhiRule], redact: bool) -> BiocDocument {
    let mut out = doc.clone();
    let mut ids = IdAllocator::new(doc, "A");
    for passage in &mut out.passages {
        let spans = select_spans(&passage.text, rules);
        if spans.is_empty() {
            continue;
        }
        let mut chars: Vec<char> = passage.text.chars().collect();
        for c in &spans {
            let original: String = chars[c.start..c.end].iter().collect();
            for ch in &mut chars[c.start..c.end] {
                *ch = 'X';
            }
            if redact {
                continue;
            }
            let rule = &rules[c.rule];
            let mut ann = BiocAnnotation::new(ids.next(), passage.offset + c.start, original);
            ann.infons.insert("source_concept", rule.category.as_str());
            if !rule.concept_id.is_empty() {
                ann.infons.insert("source_concept_id", rule.concept_id.as_str());
            }
            passage.annotations.push(ann);
        }
        let masked: String = chars.iter().collect();
        for s in &mut passage.sentences {
            let rel = s.offset - passage.offset;
            let len = s.text.chars().count();
            s.text = masked.chars().skip(rel).take(len).collect();
        }
        passage.text = masked;
    }
    out
}

/// True for a PHI annotation left by de-identification: the passage text
/// under it is masked while the annotation keeps the original wording.
pub fn is_phi_annotation(passage: &BiocPassage, ann: &BiocAnnotation) -> bool {
    let Some(loc) = ann.locations.first() else {
        return false;
    };
    match passage.substring(*loc) {
        Some(under) => crate::text::is_masked(under) && under != ann.text,
        None => false,
    }
}

/// Hands out annotation ids `<prefix><n>` not already used in a document.
pub(crate) struct IdAllocator {
    prefix: String,
    used: HashSet<String>,
    next: usize,
}

impl IdAllocator {
    pub(crate) fn new(doc: &BiocDocument, prefix: &str) -> Self {
        Self::starting_at(doc, prefix, 0)
    }

    pub(crate) fn starting_at(doc: &BiocDocument, prefix: &str, first: usize) -> Self {
        IdAllocator {
            prefix: prefix.to_string(),
            used: doc.annotations().map(|a| a.id.clone()).collect(),
            next: first,
        }
    }

    pub(crate) fn next(&mut self) -> String {
        loop {
            let id = format!("{}{}", self.prefix, self.next);
            self.next += 1;
            if self.used.insert(id.clone()) {
                return id;
            }
        }
    }
}
