use std::collections::HashMap;

use super::pattern::{Attr, EdgeStep, NegPattern, NodeConstraint, Relation};
use crate::depgraph::{DepGraph, DepNode};

/// One solution: the graph node index bound to each query node, in query
/// order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding(pub Vec<usize>);

impl Binding {
    pub fn get(&self, pattern: &NegPattern, name: &str) -> Option<usize> {
        pattern.name_index(name).map(|i| self.0[i])
    }
}

pub(crate) fn node_matches(c: &NodeConstraint, n: &DepNode) -> bool {
    c.attrs.iter().all(|(attr, re)| {
        re.is_match(match attr {
            Attr::Word => &n.word,
            Attr::Lemma => &n.lemma,
            Attr::Tag => &n.tag,
        })
    })
}

struct Index<'g> {
    head: HashMap<usize, (usize, &'g str)>,
    children: HashMap<usize, Vec<usize>>,
}

impl<'g> Index<'g> {
    fn new(g: &'g DepGraph) -> Self {
        let mut head = HashMap::new();
        let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
        for e in &g.edges {
            head.insert(e.dependent, (e.governor, e.label.as_str()));
            children.entry(e.governor).or_default().push(e.dependent);
        }
        for c in children.values_mut() {
            c.sort_unstable();
        }
        Index { head, children }
    }

    fn label_ok(&self, lower: usize, step: &EdgeStep) -> bool {
        match &step.label {
            None => true,
            Some(re) => self.head.get(&lower).is_some_and(|(_, l)| re.is_match(l)),
        }
    }

    fn descendants(&self, n: usize, out: &mut Vec<usize>) {
        for &c in self.children.get(&n).into_iter().flatten() {
            out.push(c);
            self.descendants(c, out);
        }
    }

    fn ancestors(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = n;
        while let Some(&(g, _)) = self.head.get(&cur) {
            if g == 0 || out.contains(&g) {
                break;
            }
            out.push(g);
            cur = g;
        }
        out
    }

    /// Graph nodes related to `from` by `step`.
    fn step(&self, from: usize, step: &EdgeStep) -> Vec<usize> {
        match step.relation {
            Relation::Governs => self
                .children
                .get(&from)
                .into_iter()
                .flatten()
                .copied()
                .filter(|&c| self.label_ok(c, step))
                .collect(),
            Relation::GovernedBy => match self.head.get(&from) {
                Some(&(g, _)) if g != 0 && self.label_ok(from, step) => vec![g],
                _ => vec![],
            },
            Relation::GovernsTransitively => {
                let mut d = Vec::new();
                self.descendants(from, &mut d);
                d.retain(|&x| self.label_ok(x, step));
                d
            }
            Relation::GovernedByTransitively => {
                if self.label_ok(from, step) {
                    self.ancestors(from)
                } else {
                    vec![]
                }
            }
        }
    }
}

/// Every injective assignment of query nodes to graph nodes that satisfies
/// all node constraints and relations, with `f` bound inside `anchor`.
/// Results are sorted.
pub fn match_pattern(p: &NegPattern, g: &DepGraph, anchor: &[usize]) -> Vec<Binding> {
    let index = Index::new(g);
    let nodes: HashMap<usize, &DepNode> = g.nodes.iter().map(|n| (n.index, n)).collect();
    let ok = |k: usize, idx: usize, bound: &[usize]| {
        nodes.get(&idx).is_some_and(|n| node_matches(&p.nodes[k], n))
            && !bound.contains(&idx)
            && (k != p.focus || anchor.contains(&idx))
    };
    let mut out = Vec::new();
    let mut bound = Vec::with_capacity(p.nodes.len());
    let mut starts: Vec<usize> = nodes.keys().copied().collect();
    starts.sort_unstable();
    for s in starts {
        if ok(0, s, &[]) {
            bound.push(s);
            extend(p, &index, &ok, &mut bound, &mut out);
            bound.pop();
        }
    }
    out.sort();
    out.dedup();
    out
}

fn extend<F>(p: &NegPattern, index: &Index, ok: &F, bound: &mut Vec<usize>, out: &mut Vec<Binding>)
where
    F: Fn(usize, usize, &[usize]) -> bool,
{
    let k = bound.len();
    if k == p.nodes.len() {
        out.push(Binding(bound.clone()));
        return;
    }
    for cand in index.step(bound[k - 1], &p.edges[k - 1]) {
        if ok(k, cand, bound) {
            bound.push(cand);
            extend(p, index, ok, bound, out);
            bound.pop();
        }
    }
}
