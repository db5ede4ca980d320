//! Universal dependency graphs: the graph type, CoNLL-U ingestion, head-rule
//! conversion of bracketed constituency trees, a built-in shallow parser,
//! and attachment of graphs to BioC sentences.

mod attach;
mod conllu;
mod graph;
mod ptb;
pub mod shallow;
mod stages;
mod tree2dep;

pub use attach::{
    attach_document_graphs, attach_graph, attach_graph_numbered, graph_from_sentence, strip_graph, PARSE_TREE_INFON,
};
pub use conllu::{parse_conllu, write_conllu};
pub use graph::{lemmatize, DepEdge, DepGraph, DepNode, ROOT_LABEL};
pub use ptb::{parse_ptb, parse_ptb_lines, ParseTree};
pub use stages::{assign_graphs, assign_trees, parse_document, tree2dep_document};
pub use tree2dep::{tree2dep, Direction, HeadRule, HeadRuleTable};
