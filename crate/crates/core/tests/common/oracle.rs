//! A brute-force reference for the dependency pattern matcher. Patterns are
//! kept as plain data, rendered to source text for the real compiler, and
//! evaluated here by checking every injective assignment directly.

use proptest::prelude::*;

use radtext::depgraph::{DepEdge, DepGraph, DepNode};

pub const WORDS: &[&str] = &[
    "no",
    "pneumonia",
    "effusion",
    "or",
    "there",
    "without",
    "clear",
    "edema",
    "not",
    "and",
];
pub const TAGS: &[&str] = &["NN", "DT", "CC", "RB", "JJ", "IN"];
pub const LABELS: &[&str] = &["nsubj", "neg", "conj", "cc", "det", "amod", "case", "dep"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Word,
    Lemma,
    Tag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Gov,
    Dep,
    Anc,
    Desc,
}

#[derive(Debug, Clone)]
pub struct NodeSpec {
    /// Field and accepted values; `None` matches any node.
    pub test: Option<(Field, Vec<String>)>,
}

#[derive(Debug, Clone)]
pub struct Spec {
    pub nodes: Vec<NodeSpec>,
    pub edges: Vec<(Rel, Option<Vec<String>>)>,
    pub focus: usize,
}

impl Spec {
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                let (rel, label) = &self.edges[i - 1];
                out.push(' ');
                out.push_str(match rel {
                    Rel::Gov => ">",
                    Rel::Dep => "<",
                    Rel::Anc => ">>",
                    Rel::Desc => "<<",
                });
                if let Some(vals) = label {
                    out.push_str(&format!("{{dep:/{}/}}", vals.join("|")));
                }
                out.push(' ');
            }
            match &n.test {
                None => out.push_str("{}"),
                Some((field, vals)) => {
                    let name = match field {
                        Field::Word => "word",
                        Field::Lemma => "lemma",
                        Field::Tag => "tag",
                    };
                    out.push_str(&format!("{{{name}:/{}/}}", vals.join("|")));
                }
            }
            if i == self.focus {
                out.push_str("=f");
            } else {
                out.push_str(&format!("=n{i}"));
            }
        }
        out
    }
}

fn accepts(vals: &[String], s: &str) -> bool {
    vals.iter().any(|v| v.to_lowercase() == s.to_lowercase())
}

fn node_ok(spec: &NodeSpec, n: &DepNode) -> bool {
    match &spec.test {
        None => true,
        Some((Field::Word, v)) => accepts(v, &n.word),
        Some((Field::Lemma, v)) => accepts(v, &n.lemma),
        Some((Field::Tag, v)) => accepts(v, &n.tag),
    }
}

fn head(g: &DepGraph, i: usize) -> Option<&DepEdge> {
    g.edges.iter().find(|e| e.dependent == i)
}

fn label_ok(label: &Option<Vec<String>>, e: Option<&DepEdge>) -> bool {
    match (label, e) {
        (None, _) => true,
        (Some(v), Some(e)) => accepts(v, &e.label),
        (Some(_), None) => false,
    }
}

fn ancestor(g: &DepGraph, a: usize, b: usize) -> bool {
    let mut cur = b;
    for _ in 0..=g.nodes.len() {
        match head(g, cur) {
            Some(e) if e.governor == 0 => return false,
            Some(e) if e.governor == a => return true,
            Some(e) => cur = e.governor,
            None => return false,
        }
    }
    false
}

fn edge_ok(g: &DepGraph, rel: Rel, label: &Option<Vec<String>>, a: usize, b: usize) -> bool {
    match rel {
        Rel::Gov => head(g, b).is_some_and(|e| e.governor == a) && label_ok(label, head(g, b)),
        Rel::Dep => head(g, a).is_some_and(|e| e.governor == b) && label_ok(label, head(g, a)),
        Rel::Anc => ancestor(g, a, b) && label_ok(label, head(g, b)),
        Rel::Desc => ancestor(g, b, a) && label_ok(label, head(g, a)),
    }
}

/// Every satisfying assignment, sorted.
pub fn matches(spec: &Spec, g: &DepGraph, anchor: &[usize]) -> Vec<Vec<usize>> {
    let ids: Vec<usize> = g.nodes.iter().map(|n| n.index).collect();
    let k = spec.nodes.len();
    let mut out = Vec::new();
    let mut assign = vec![0; k];
    let total = ids.len().pow(k as u32);
    for code in 0..total {
        let mut c = code;
        for slot in assign.iter_mut() {
            *slot = ids[c % ids.len()];
            c /= ids.len();
        }
        let injective = (0..k).all(|i| (i + 1..k).all(|j| assign[i] != assign[j]));
        if !injective || !anchor.contains(&assign[spec.focus]) {
            continue;
        }
        let nodes_ok = (0..k).all(|i| node_ok(&spec.nodes[i], g.node(assign[i]).unwrap()));
        let edges_ok = spec
            .edges
            .iter()
            .enumerate()
            .all(|(i, (rel, label))| edge_ok(g, *rel, label, assign[i], assign[i + 1]));
        if nodes_ok && edges_ok {
            out.push(assign.clone());
        }
    }
    out.sort();
    out
}

/// A random tree over 1..=n: each node after the first attaches to a node
/// placed before it, in a random placement order.
pub fn tree(max: usize) -> impl Strategy<Value = DepGraph> {
    (1..=max)
        .prop_flat_map(|n| {
            (
                Just((1..=n).collect::<Vec<usize>>()).prop_shuffle(),
                prop::collection::vec(any::<prop::sample::Index>(), n),
                prop::collection::vec(prop::sample::select(WORDS), n),
                prop::collection::vec(prop::sample::select(TAGS), n),
                prop::collection::vec(prop::sample::select(LABELS), n),
            )
        })
        .prop_map(|(order, parents, words, tags, labels)| {
            let nodes = (0..order.len())
                .map(|i| DepNode::new(i + 1, words[i], tags[i]))
                .collect();
            let mut edges = vec![DepEdge::new(0, order[0], "root")];
            for i in 1..order.len() {
                let gov = order[parents[i].index(i)];
                edges.push(DepEdge::new(gov, order[i], labels[i]));
            }
            DepGraph { nodes, edges }
        })
}

fn values(pool: &'static [&'static str]) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec((prop::sample::select(pool), any::<bool>()), 1..3).prop_map(|v| {
        v.into_iter()
            .map(|(s, upper)| if upper { s.to_uppercase() } else { s.to_string() })
            .collect()
    })
}

fn node_spec() -> impl Strategy<Value = NodeSpec> {
    prop_oneof![
        1 => Just(NodeSpec { test: None }),
        2 => values(WORDS).prop_map(|v| NodeSpec { test: Some((Field::Lemma, v)) }),
        1 => values(WORDS).prop_map(|v| NodeSpec { test: Some((Field::Word, v)) }),
        1 => values(TAGS).prop_map(|v| NodeSpec { test: Some((Field::Tag, v)) }),
    ]
}

fn edge_spec() -> impl Strategy<Value = (Rel, Option<Vec<String>>)> {
    (
        prop::sample::select(vec![Rel::Gov, Rel::Dep, Rel::Anc, Rel::Desc]),
        prop::option::of(values(LABELS)),
    )
}

pub fn spec() -> impl Strategy<Value = Spec> {
    (1usize..=3)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(node_spec(), k),
                prop::collection::vec(edge_spec(), k - 1),
                0..k,
            )
        })
        .prop_map(|(nodes, edges, focus)| Spec { nodes, edges, focus })
}

/// A graph, a pattern, and an anchor set drawn from the graph's nodes.
pub fn trial() -> impl Strategy<Value = (DepGraph, Spec, Vec<usize>)> {
    (tree(8), spec()).prop_flat_map(|(g, s)| {
        let n = g.nodes.len();
        (
            Just(g),
            Just(s),
            prop::collection::btree_set(1..=n, 1..=n).prop_map(|a| a.into_iter().collect()),
        )
    })
}

/// Renumber the graph's nodes by `perm` (perm[i] is the new index of old
/// node i + 1) and return the new graph with node lists in new order.
pub fn permute(g: &DepGraph, perm: &[usize]) -> DepGraph {
    let map = |i: usize| if i == 0 { 0 } else { perm[i - 1] };
    let mut nodes: Vec<DepNode> = g
        .nodes
        .iter()
        .map(|n| DepNode {
            index: map(n.index),
            ..n.clone()
        })
        .collect();
    nodes.sort_by_key(|n| n.index);
    let edges = g
        .edges
        .iter()
        .map(|e| DepEdge::new(map(e.governor), map(e.dependent), e.label.clone()))
        .collect();
    DepGraph { nodes, edges }
}
