use super::graph::{lemmatize, DepEdge, DepGraph, DepNode, ROOT_LABEL};
use crate::error::{Error, Result};

/// Parse CoNLL-U text into one graph per sentence block. Multiword-token
/// ranges (`1-2`) and empty nodes (`1.1`) are skipped; a `_` lemma is
/// derived from the form. The root edge's label is normalized to `root`.
pub fn parse_conllu(text: &str) -> Result<Vec<DepGraph>> {
    let mut graphs = Vec::new();
    let mut current = DepGraph::default();
    let mut first_line = 0;
    let finish = |g: &mut DepGraph, graphs: &mut Vec<DepGraph>, line: usize| -> Result<()> {
        if g.nodes.is_empty() {
            return Ok(());
        }
        let graph = std::mem::take(g);
        graph.validate().map_err(|e| Error::Conllu {
            line,
            message: e.to_string(),
        })?;
        graphs.push(graph);
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            finish(&mut current, &mut graphs, first_line)?;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if current.nodes.is_empty() {
            first_line = line_no;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        let err = |message: String| Error::Conllu { line: line_no, message };
        if cols.len() != 10 {
            return Err(err(format!("expected 10 tab-separated columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0].parse().map_err(|_| err(format!("bad ID {:?}", cols[0])))?;
        if index != current.nodes.len() + 1 {
            return Err(err(format!("expected ID {}, found {index}", current.nodes.len() + 1)));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| err(format!("HEAD is not an integer: {:?}", cols[6])))?;
        let word = cols[1].to_string();
        let lemma = if cols[2] == "_" && word != "_" {
            lemmatize(&word)
        } else {
            cols[2].to_string()
        };
        current.nodes.push(DepNode {
            index,
            word,
            lemma,
            tag: cols[3].to_string(),
            offset: None,
        });
        let label = if head == 0 { ROOT_LABEL } else { cols[7] };
        current.edges.push(DepEdge::new(head, index, label));
    }
    finish(&mut current, &mut graphs, first_line)?;
    Ok(graphs)
}

/// Write graphs as CoNLL-U; columns beyond ID, FORM, LEMMA, UPOS, HEAD and
/// DEPREL are `_`.
pub fn write_conllu(graphs: &[DepGraph]) -> String {
    let mut out = String::new();
    for g in graphs {
        let g = g.normalized();
        for n in &g.nodes {
            let (head, label) = g
                .head_edge(n.index)
                .map(|e| (e.governor, e.label.as_str()))
                .unwrap_or((0, ROOT_LABEL));
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t_\n",
                n.index, n.word, n.lemma, n.tag, head, label
            ));
        }
        out.push('\n');
    }
    out
}
