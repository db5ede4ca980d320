use std::collections::HashSet;
use std::path::Path;

use super::matcher::match_pattern;
use super::pattern::{compile_pattern, NegPattern, PatternKind};
use crate::bioc::{bool_infon, BiocAnnotation, BiocDocument, BiocPassage, Location};
use crate::deid::is_phi_annotation;
use crate::depgraph::{graph_from_sentence, DepGraph};
use crate::error::{Error, Result};
use crate::resources;

pub const PATTERN_ID_INFON: &str = "negbio_pattern_id";
pub const PATTERN_STR_INFON: &str = "negbio_pattern_str";

const FLAG_INFONS: &[&str] = &["exists", "negation", "uncertainty", PATTERN_ID_INFON, PATTERN_STR_INFON];

/// Parse a pattern file: one `id <TAB> pattern` per line; blank lines and
/// lines starting with `#` are skipped.
pub fn parse_pattern_file(text: &str, kind: PatternKind, label: &str) -> Result<Vec<NegPattern>> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: String| Error::resource(label, format!("line {}: {m}", i + 1));
        let Some((id, src)) = line.split_once('\t') else {
            return Err(err("expected `id<TAB>pattern`".into()));
        };
        let id = id.trim();
        if id.is_empty() {
            return Err(err("empty pattern id".into()));
        }
        if !ids.insert(id.to_string()) {
            return Err(err(format!("duplicate pattern id {id}")));
        }
        out.push(compile_pattern(src.trim(), id, kind).map_err(|e| err(e.to_string()))?);
    }
    Ok(out)
}

pub fn load_pattern_file(path: &Path, kind: PatternKind) -> Result<Vec<NegPattern>> {
    parse_pattern_file(&resources::read_file(path)?, kind, &path.display().to_string())
}

/// The bundled negation patterns followed by the uncertainty patterns.
pub fn default_patterns() -> Result<Vec<NegPattern>> {
    let (neg, _, neg_label) = resources::load(None, resources::NEG_PATTERNS)?;
    let (unc, _, unc_label) = resources::load(None, resources::UNCERTAINTY_PATTERNS)?;
    let mut out = parse_pattern_file(&neg, PatternKind::Negation, &neg_label)?;
    out.extend(parse_pattern_file(&unc, PatternKind::Uncertainty, &unc_label)?);
    Ok(out)
}

/// Graph nodes whose spans overlap `loc`, closed under `conj` edges in both
/// directions so coordinated findings share their context.
pub fn concept_anchor(g: &DepGraph, loc: Location) -> Vec<usize> {
    let mut anchor: Vec<usize> = g
        .nodes
        .iter()
        .filter(|n| n.span().is_some_and(|(s, e)| s < loc.end() && loc.offset < e))
        .map(|n| n.index)
        .collect();
    let mut i = 0;
    while i < anchor.len() {
        let a = anchor[i];
        for e in g.edges.iter().filter(|e| e.label == "conj") {
            let other = if e.governor == a {
                e.dependent
            } else if e.dependent == a {
                e.governor
            } else {
                continue;
            };
            if other != 0 && !anchor.contains(&other) {
                anchor.push(other);
            }
        }
        i += 1;
    }
    anchor.sort_unstable();
    anchor
}

fn is_concept(passage: &BiocPassage, a: &BiocAnnotation) -> bool {
    a.infons.contains_key("source_concept_id")
        && !a.infons.contains_key("tag")
        && !a.locations.is_empty()
        && !is_phi_annotation(passage, a)
}

enum Slot {
    Passage(usize),
    Sentence(usize, usize),
}

/// Flag every concept annotation. Negation patterns are tried before
/// uncertainty ones, each kind in list order; the first pattern with a
/// binding decides. A negated concept gets `exists=False` and
/// `negation=True`, an uncertain one `uncertainty=True`, both with the
/// pattern id and source; anything else `exists=True`. Previous flags are
/// replaced.
pub fn detect(doc: &BiocDocument, patterns: &[NegPattern]) -> Result<BiocDocument> {
    let ordered: Vec<&NegPattern> = patterns
        .iter()
        .filter(|p| p.kind == PatternKind::Negation)
        .chain(patterns.iter().filter(|p| p.kind == PatternKind::Uncertainty))
        .collect();
    let mut out = doc.clone();
    for passage in &mut out.passages {
        let mut slots = Vec::new();
        for (ai, a) in passage.annotations.iter().enumerate() {
            if is_concept(passage, a) {
                slots.push(Slot::Passage(ai));
            }
        }
        for (si, s) in passage.sentences.iter().enumerate() {
            for (ai, a) in s.annotations.iter().enumerate() {
                if is_concept(passage, a) {
                    slots.push(Slot::Sentence(si, ai));
                }
            }
        }
        if slots.is_empty() {
            continue;
        }
        let mut graphs: Vec<Option<Option<DepGraph>>> = vec![None; passage.sentences.len()];
        let mut decisions = Vec::with_capacity(slots.len());
        for slot in &slots {
            let (ann, sentence) = match *slot {
                Slot::Passage(ai) => {
                    let a = &passage.annotations[ai];
                    let loc = a.locations[0];
                    let si = passage
                        .sentences
                        .iter()
                        .position(|s| s.offset <= loc.offset && loc.end() <= s.offset + s.text.chars().count());
                    (a, si)
                }
                Slot::Sentence(si, ai) => (&passage.sentences[si].annotations[ai], Some(si)),
            };
            let Some(si) = sentence else {
                return Err(Error::PipelineOrder(format!(
                    "document {}: concept annotation {} is not inside any sentence; run ssplit and parse before neg",
                    doc.id, ann.id
                )));
            };
            if graphs[si].is_none() {
                graphs[si] = Some(graph_from_sentence(&passage.sentences[si])?);
            }
            let Some(Some(g)) = &graphs[si] else {
                return Err(Error::PipelineOrder(format!(
                    "document {}: sentence at offset {} has concept annotations but no dependency graph; run parse (or tree2dep) before neg",
                    doc.id, passage.sentences[si].offset
                )));
            };
            let anchor = concept_anchor(g, ann.locations[0]);
            let hit = if anchor.is_empty() {
                None
            } else {
                ordered
                    .iter()
                    .find(|p| !match_pattern(p, g, &anchor).is_empty())
                    .copied()
            };
            decisions.push(hit);
        }
        for (slot, hit) in slots.iter().zip(decisions) {
            let ann = match *slot {
                Slot::Passage(ai) => &mut passage.annotations[ai],
                Slot::Sentence(si, ai) => &mut passage.sentences[si].annotations[ai],
            };
            for k in FLAG_INFONS {
                ann.infons.remove(k);
            }
            match hit {
                Some(p) if p.kind == PatternKind::Negation => {
                    ann.infons.insert("exists", bool_infon(false));
                    ann.infons.insert("negation", bool_infon(true));
                    ann.infons.insert(PATTERN_ID_INFON, p.id.as_str());
                    ann.infons.insert(PATTERN_STR_INFON, p.source.as_str());
                }
                Some(p) => {
                    ann.infons.insert("uncertainty", bool_infon(true));
                    ann.infons.insert(PATTERN_ID_INFON, p.id.as_str());
                    ann.infons.insert(PATTERN_STR_INFON, p.source.as_str());
                }
                None => {
                    ann.infons.insert("exists", bool_infon(true));
                }
            }
        }
    }
    Ok(out)
}
