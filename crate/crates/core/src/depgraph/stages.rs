//! Document-level parse and conversion steps.

use super::attach::{attach_document_graphs, PARSE_TREE_INFON};
use super::graph::DepGraph;
use super::ptb::{parse_ptb, ParseTree};
use super::shallow;
use super::tree2dep::{tree2dep, HeadRuleTable};
use crate::bioc::BiocDocument;
use crate::error::{Error, Result};

/// Store a bracketed tree from the built-in parser on every sentence.
pub fn parse_document(doc: &BiocDocument) -> BiocDocument {
    let mut out = doc.clone();
    for s in out.passages.iter_mut().flat_map(|p| p.sentences.iter_mut()) {
        let tree = shallow::parse_text(&s.text);
        s.infons.insert(PARSE_TREE_INFON, tree.to_string());
    }
    out
}

fn sentence_count(doc: &BiocDocument) -> usize {
    doc.passages.iter().map(|p| p.sentences.len()).sum()
}

/// Store externally produced trees, one per sentence in document order,
/// starting at `trees[first]`. Returns the number consumed.
pub fn assign_trees(doc: &mut BiocDocument, trees: &[ParseTree], first: usize) -> Result<usize> {
    let n = sentence_count(doc);
    if first + n > trees.len() {
        return Err(Error::Stage {
            stage: "parse".into(),
            message: format!(
                "document {} needs {n} trees but only {} remain",
                doc.id,
                trees.len().saturating_sub(first)
            ),
        });
    }
    for (s, tree) in doc
        .passages
        .iter_mut()
        .flat_map(|p| p.sentences.iter_mut())
        .zip(&trees[first..])
    {
        s.infons.insert(PARSE_TREE_INFON, tree.to_string());
    }
    Ok(n)
}

/// Attach externally produced graphs, one per sentence in document order,
/// starting at `graphs[first]`. Returns the number consumed.
pub fn assign_graphs(doc: &BiocDocument, graphs: &[DepGraph], first: usize) -> Result<(BiocDocument, usize)> {
    let n = sentence_count(doc);
    if first + n > graphs.len() {
        return Err(Error::Stage {
            stage: "parse".into(),
            message: format!(
                "document {} needs {n} graphs but only {} remain",
                doc.id,
                graphs.len().saturating_sub(first)
            ),
        });
    }
    let mut k = first;
    let out = attach_document_graphs(doc, |_| {
        k += 1;
        Ok(Some(graphs[k - 1].clone()))
    })?;
    Ok((out, n))
}

/// Convert each sentence's stored tree into an attached dependency graph.
/// Sentences without a tree keep the graph they already have.
pub fn tree2dep_document(doc: &BiocDocument, rules: &HeadRuleTable) -> Result<BiocDocument> {
    attach_document_graphs(doc, |s| match s.infons.get(PARSE_TREE_INFON) {
        Some(t) => {
            let tree = parse_ptb(t).map_err(|e| Error::Stage {
                stage: "tree2dep".into(),
                message: format!("document {}, sentence at offset {}: {e}", doc.id, s.offset),
            })?;
            tree2dep(&tree, rules).map(Some)
        }
        None => Ok(None),
    })
    .map_err(|e| match e {
        Error::Alignment(m) => Error::Alignment(format!("document {}: {m}", doc.id)),
        e => e,
    })
}
