use std::collections::HashMap;

use super::graph::{lemmatize, DepEdge, DepGraph, DepNode, ROOT_LABEL};
use crate::bioc::{BiocAnnotation, BiocDocument, BiocNode, BiocRelation, BiocSentence, ROLE_DEPENDANT, ROLE_GOVERNOR};
use crate::error::{Error, Result};

/// Sentence infon holding a bracketed constituency tree.
pub const PARSE_TREE_INFON: &str = "parse tree";

fn is_token(a: &BiocAnnotation) -> bool {
    a.infons.contains_key("tag")
}

/// Remove token annotations and the dependency relations between them.
pub fn strip_graph(sentence: &mut BiocSentence) {
    let tokens: Vec<String> = sentence
        .annotations
        .iter()
        .filter(|a| is_token(a))
        .map(|a| a.id.clone())
        .collect();
    sentence.annotations.retain(|a| !is_token(a));
    sentence
        .relations
        .retain(|r| !(r.infons.contains_key("dependency") && r.nodes.iter().all(|n| tokens.contains(&n.refid))));
}

/// Attach `g` with token numbering starting at 1.
pub fn attach_graph(sentence: &BiocSentence, g: &DepGraph) -> Result<BiocSentence> {
    attach_graph_numbered(sentence, g, 1)
}

/// Attach `g` to the sentence: node k becomes annotation `T<first+k-1>`
/// (infons lemma, tag), each non-root edge a relation named after its
/// dependent's annotation number, carrying infon `dependency`. Nodes are
/// aligned to the text left to right. An existing graph is replaced.
pub fn attach_graph_numbered(sentence: &BiocSentence, g: &DepGraph, first: usize) -> Result<BiocSentence> {
    let mut out = sentence.clone();
    if g.is_empty() {
        return Ok(out);
    }
    g.validate()?;
    strip_graph(&mut out);
    let g = g.normalized();
    let text = &sentence.text;
    let mut cursor = 0; // byte position
    let mut cursor_chars = 0;
    let mut annotations = Vec::with_capacity(g.len());
    for n in &g.nodes {
        let Some(found) = text[cursor..].find(n.word.as_str()).filter(|_| !n.word.is_empty()) else {
            return Err(Error::Alignment(format!(
                "token {:?} (node {}) not found in sentence at offset {} after character {}",
                n.word, n.index, sentence.offset, cursor_chars
            )));
        };
        let start_chars = cursor_chars + text[cursor..cursor + found].chars().count();
        cursor += found + n.word.len();
        cursor_chars = start_chars + n.word.chars().count();
        let mut a = BiocAnnotation::new(
            format!("T{}", first + n.index - 1),
            sentence.offset + start_chars,
            n.word.clone(),
        );
        a.infons.insert("lemma", n.lemma.as_str());
        a.infons.insert("tag", n.tag.as_str());
        annotations.push(a);
    }
    out.annotations.extend(annotations);
    for e in g.edges.iter().filter(|e| e.governor != 0) {
        let dep = first + e.dependent - 1;
        let mut r = BiocRelation::new(format!("R{dep}"));
        r.infons.insert("dependency", e.label.as_str());
        r.nodes.push(BiocNode::new(format!("T{dep}"), ROLE_DEPENDANT));
        r.nodes
            .push(BiocNode::new(format!("T{}", first + e.governor - 1), ROLE_GOVERNOR));
        out.relations.push(r);
    }
    Ok(out)
}

/// Read back the graph stored in a sentence's token annotations and
/// dependency relations. `None` when the sentence carries no tokens.
pub fn graph_from_sentence(sentence: &BiocSentence) -> Result<Option<DepGraph>> {
    let mut tokens: Vec<&BiocAnnotation> = sentence.annotations.iter().filter(|a| is_token(a)).collect();
    if tokens.is_empty() {
        return Ok(None);
    }
    tokens.sort_by_key(|a| a.locations.first().map(|l| l.offset).unwrap_or(0));
    let index: HashMap<&str, usize> = tokens.iter().enumerate().map(|(i, a)| (a.id.as_str(), i + 1)).collect();
    let nodes: Vec<DepNode> = tokens
        .iter()
        .enumerate()
        .map(|(i, a)| DepNode {
            index: i + 1,
            word: a.text.clone(),
            lemma: a
                .infons
                .get("lemma")
                .map(str::to_string)
                .unwrap_or_else(|| lemmatize(&a.text)),
            tag: a.infons.get("tag").unwrap_or_default().to_string(),
            offset: a.locations.first().map(|l| l.offset),
        })
        .collect();
    let mut edges = Vec::new();
    let mut governed = vec![false; nodes.len() + 1];
    for r in &sentence.relations {
        let Some(label) = r.infons.get("dependency") else {
            continue;
        };
        let (Some(gov), Some(dep)) = (r.node(ROLE_GOVERNOR), r.node(ROLE_DEPENDANT)) else {
            continue;
        };
        let (Some(&g), Some(&d)) = (index.get(gov.refid.as_str()), index.get(dep.refid.as_str())) else {
            continue;
        };
        governed[d] = true;
        edges.push(DepEdge::new(g, d, label));
    }
    for (i, is_governed) in governed.iter().enumerate().skip(1) {
        if !is_governed {
            edges.push(DepEdge::new(0, i, ROOT_LABEL));
        }
    }
    let g = DepGraph { nodes, edges }.normalized();
    g.validate()
        .map_err(|e| Error::Graph(format!("sentence at offset {}: {e}", sentence.offset)))?;
    Ok(Some(g))
}

/// Attach a graph to every sentence of `doc`, numbering tokens across the
/// whole document. `graph_for` returns the sentence's new graph, or `None`
/// to keep (and renumber) whatever graph the sentence already has.
pub fn attach_document_graphs<F>(doc: &BiocDocument, mut graph_for: F) -> Result<BiocDocument>
where
    F: FnMut(&BiocSentence) -> Result<Option<DepGraph>>,
{
    let mut out = doc.clone();
    let mut next = 1;
    for p in &mut out.passages {
        for s in &mut p.sentences {
            let g = match graph_for(s)? {
                Some(g) => Some(g),
                None => graph_from_sentence(s)?,
            };
            if let Some(g) = g {
                *s = attach_graph_numbered(s, &g, next)?;
                next += g.len();
            }
        }
    }
    Ok(out)
}
