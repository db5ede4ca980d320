use std::collections::HashMap;

use super::graph::{DepEdge, DepGraph, DepNode, ROOT_LABEL};
use super::ptb::ParseTree;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// Head-child preference for one constituent label: each priority set is
/// tried in turn, scanning the children in `direction`; the first child
/// whose label is in the set is the head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadRule {
    pub direction: Direction,
    pub priorities: Vec<Vec<String>>,
}

impl HeadRule {
    pub fn new(direction: Direction, priorities: &[&[&str]]) -> Self {
        HeadRule {
            direction,
            priorities: priorities
                .iter()
                .map(|set| set.iter().map(|s| s.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HeadRuleTable {
    rules: HashMap<String, HeadRule>,
    fallback: HeadRule,
}

const NOUNS: &[&str] = &["NN", "NNS", "NNP", "NNPS", "NX"];
const VERBS: &[&str] = &["VB", "VBD", "VBG", "VBN", "VBP", "VBZ"];
const ADJS: &[&str] = &["JJ", "JJR", "JJS"];

impl HeadRuleTable {
    pub fn new(fallback: HeadRule) -> Self {
        HeadRuleTable {
            rules: HashMap::new(),
            fallback,
        }
    }

    pub fn insert(&mut self, label: &str, rule: HeadRule) {
        self.rules.insert(label.to_string(), rule);
    }

    pub fn rule(&self, label: &str) -> &HeadRule {
        self.rules.get(label).unwrap_or(&self.fallback)
    }

    /// The built-in table: right-to-left noun preference for NP, verbal
    /// preference for VP (an embedded VP outranks a leading auxiliary), and
    /// the object rather than the preposition heading PP.
    pub fn standard() -> Self {
        use Direction::*;
        let mut t = HeadRuleTable::new(HeadRule::new(LeftToRight, &[]));
        let top: &[&[&str]] = &[&["S", "SINV", "SQ"], &["FRAG"], &["NP"], &["VP"]];
        for l in ["S1", "ROOT", "TOP", ""] {
            t.insert(l, HeadRule::new(LeftToRight, top));
        }
        t.insert(
            "S",
            HeadRule::new(
                LeftToRight,
                &[&["VP"], &["S"], &["SBAR"], &["FRAG"], &["ADJP"], &["NP"], &["UCP"]],
            ),
        );
        t.insert(
            "SINV",
            HeadRule::new(LeftToRight, &[&["VP"], VERBS, &["MD"], &["S"], &["NP"]]),
        );
        t.insert("SQ", HeadRule::new(LeftToRight, &[&["VP"], VERBS, &["MD"], &["NP"]]));
        t.insert(
            "SBAR",
            HeadRule::new(LeftToRight, &[&["S", "SQ", "SINV"], &["SBAR"], &["FRAG"]]),
        );
        t.insert(
            "VP",
            HeadRule::new(LeftToRight, &[&["VP"], VERBS, &["ADJP"], ADJS, &["NP"], &["MD", "TO"]]),
        );
        let np: &[&[&str]] = &[
            NOUNS,
            &["NP"],
            &["CD", "QP"],
            &["JJ", "JJR", "JJS", "ADJP"],
            &["PRP", "EX"],
            &["VBG", "VBN"],
        ];
        t.insert("NP", HeadRule::new(RightToLeft, np));
        t.insert("NX", HeadRule::new(RightToLeft, np));
        t.insert("WHNP", HeadRule::new(RightToLeft, &[NOUNS, &["WDT", "WP"]]));
        t.insert(
            "PP",
            HeadRule::new(
                LeftToRight,
                &[&["NP"], &["S", "SBAR", "VP"], &["ADJP"], &["PP"], &["IN", "TO"]],
            ),
        );
        t.insert(
            "ADVP",
            HeadRule::new(RightToLeft, &[&["RB", "RBR", "RBS"], &["ADVP"], ADJS, &["IN"]]),
        );
        t.insert(
            "ADJP",
            HeadRule::new(RightToLeft, &[ADJS, &["VBN", "VBG"], &["ADJP"], NOUNS, &["RB"]]),
        );
        t.insert("QP", HeadRule::new(RightToLeft, &[&["CD"]]));
        t.insert(
            "FRAG",
            HeadRule::new(LeftToRight, &[&["NP"], &["VP"], &["S"], &["ADJP"], &["PP"]]),
        );
        t
    }
}

impl Default for HeadRuleTable {
    fn default() -> Self {
        HeadRuleTable::standard()
    }
}

/// Strip function tags and indices: `NP-SBJ-1` -> `NP`. Bracket tags such
/// as `-LRB-` are left alone.
fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    label.split(['-', '=']).next().unwrap_or(label)
}

fn unescape(word: &str) -> &str {
    match word {
        "-LRB-" => "(",
        "-RRB-" => ")",
        "-LSB-" => "[",
        "-RSB-" => "]",
        "-LCB-" => "{",
        "-RCB-" => "}",
        "``" | "''" => "\"",
        w => w,
    }
}

fn is_punct_tag(tag: &str) -> bool {
    matches!(
        tag,
        "." | "," | ":" | "``" | "''" | "-LRB-" | "-RRB-" | "-LSB-" | "-RSB-" | "HYPH" | "#" | "$" | "-NONE-"
    )
}

const NEG_WORDS: &[&str] = &["no", "not", "n't", "never"];

fn is_nominal(label: &str) -> bool {
    matches!(label, "NP" | "NX" | "WHNP" | "PRP") || NOUNS.contains(&label)
}

/// Coarse category used to decide which siblings may be coordinated.
fn category(label: &str) -> &str {
    if is_nominal(label) || label == "CD" {
        "N"
    } else if ADJS.contains(&label) || label == "ADJP" {
        "A"
    } else if VERBS.contains(&label) || label == "VP" {
        "V"
    } else if matches!(label, "S" | "SBAR" | "SINV" | "SQ") {
        "S"
    } else if matches!(label, "RB" | "ADVP") {
        "R"
    } else {
        label
    }
}

#[derive(Debug, Clone)]
struct Unit {
    head: usize,
    label: String,
}

struct Builder<'r> {
    rules: &'r HeadRuleTable,
    nodes: Vec<DepNode>,
    edges: Vec<DepEdge>,
}

impl Builder<'_> {
    fn tag(&self, idx: usize) -> &str {
        &self.nodes[idx - 1].tag
    }

    fn lower(&self, idx: usize) -> String {
        self.nodes[idx - 1].word.to_lowercase()
    }

    fn token(&mut self, word: &str, tag: &str) -> Unit {
        let index = self.nodes.len() + 1;
        self.nodes.push(DepNode::new(index, unescape(word), tag));
        Unit {
            head: index,
            label: tag.to_string(),
        }
    }

    fn is_punct(&self, u: &Unit) -> bool {
        u.label == self.tag(u.head) && is_punct_tag(&u.label)
    }

    fn is_cc(u: &Unit) -> bool {
        matches!(u.label.as_str(), "CC" | "CONJP")
    }

    fn convert(&mut self, t: &ParseTree) -> Option<Unit> {
        match t {
            ParseTree::Leaf(w) => Some(self.token(w, "X")),
            ParseTree::Node { label, children } if t.is_preterminal() => {
                let ParseTree::Leaf(w) = &children[0] else {
                    unreachable!()
                };
                Some(self.token(w, label))
            }
            ParseTree::Node { label, children } => {
                let label = base_label(label).to_string();
                let units: Vec<Unit> = children.iter().filter_map(|c| self.convert(c)).collect();
                if units.is_empty() {
                    return None;
                }
                let units = self.coordinate(units);
                let units = self.reattach_negation(units);
                let h = self.choose_head(&label, &units);
                let head = units[h].clone();
                for (i, u) in units.iter().enumerate() {
                    if i != h {
                        let l = self.edge_label(&label, &head, u, i < h);
                        self.edges.push(DepEdge::new(head.head, u.head, l));
                    }
                }
                Some(Unit { head: head.head, label })
            }
        }
    }

    /// Collapse each coordination (`X , Y CC Z`) into one unit headed by the
    /// first conjunct; later conjuncts attach to it as `conj`, each
    /// conjunction and comma to the conjunct that follows it.
    fn coordinate(&mut self, mut units: Vec<Unit>) -> Vec<Unit> {
        let mut j = units.len();
        while j > 0 {
            j -= 1;
            if !Self::is_cc(&units[j])
                || j == 0
                || j + 1 >= units.len()
                || self.is_punct(&units[j + 1])
                || Self::is_cc(&units[j + 1])
            {
                continue;
            }
            let right = j + 1;
            let mut k = j - 1;
            if self.is_punct(&units[k]) && units[k].label == "," {
                if k == 0 {
                    continue;
                }
                k -= 1;
            }
            if self.is_punct(&units[k]) || Self::is_cc(&units[k]) {
                continue;
            }
            let cat = category(&units[right].label).to_string();
            let mut start = k;
            while start >= 2 {
                let sep = &units[start - 1];
                let prev = &units[start - 2];
                let sep_ok = Self::is_cc(sep) || (self.is_punct(sep) && sep.label == ",");
                if sep_ok && !self.is_punct(prev) && !Self::is_cc(prev) && category(&prev.label) == cat {
                    start -= 2;
                } else {
                    break;
                }
            }
            let members: Vec<Unit> = units[start..=right].to_vec();
            let first = members[0].clone();
            let mut pending: Vec<usize> = Vec::new();
            for m in &members[1..] {
                if Self::is_cc(m) || self.is_punct(m) {
                    pending.push(m.head);
                    continue;
                }
                self.edges.push(DepEdge::new(first.head, m.head, "conj"));
                for p in pending.drain(..) {
                    let l = if is_punct_tag(self.tag(p)) { "punct" } else { "cc" };
                    self.edges.push(DepEdge::new(m.head, p, l));
                }
            }
            units.splice(start..=right, std::iter::once(first));
            j = start;
        }
        units
    }

    /// A bare negation adverb ("no") directly before a nominal sibling
    /// modifies that nominal.
    fn reattach_negation(&mut self, units: Vec<Unit>) -> Vec<Unit> {
        let mut out: Vec<Unit> = Vec::with_capacity(units.len());
        let mut i = 0;
        while i < units.len() {
            let u = &units[i];
            let neg = matches!(u.label.as_str(), "ADVP" | "RB") && NEG_WORDS.contains(&self.lower(u.head).as_str());
            if neg && i + 1 < units.len() && is_nominal(&units[i + 1].label) {
                self.edges.push(DepEdge::new(units[i + 1].head, u.head, "neg"));
            } else {
                out.push(u.clone());
            }
            i += 1;
        }
        out
    }

    fn is_copula(&self, u: &Unit) -> bool {
        VERBS.contains(&u.label.as_str()) && self.nodes[u.head - 1].lemma == "be"
    }

    fn choose_head(&self, label: &str, units: &[Unit]) -> usize {
        let h = self.choose_head_by_rule(label, units);
        // An adjectival predicate heads its copula.
        if label == "VP" && self.is_copula(&units[h]) {
            if let Some(a) = (h + 1..units.len()).find(|&i| units[i].label == "ADJP") {
                return a;
            }
        }
        h
    }

    fn choose_head_by_rule(&self, label: &str, units: &[Unit]) -> usize {
        let rule = self.rules.rule(label);
        let order: Vec<usize> = match rule.direction {
            Direction::LeftToRight => (0..units.len()).collect(),
            Direction::RightToLeft => (0..units.len()).rev().collect(),
        };
        for set in &rule.priorities {
            if let Some(&i) = order.iter().find(|&&i| set.iter().any(|s| *s == units[i].label)) {
                return i;
            }
        }
        order
            .iter()
            .copied()
            .find(|&i| !self.is_punct(&units[i]))
            .unwrap_or(order[0])
    }

    fn edge_label(&self, parent: &str, head: &Unit, dep: &Unit, before_head: bool) -> &'static str {
        let tag = self.tag(dep.head);
        let word = self.lower(dep.head);
        let dl = dep.label.as_str();
        if self.is_punct(dep) {
            return "punct";
        }
        if NEG_WORDS.contains(&word.as_str()) && matches!(dl, "RB" | "ADVP") {
            return "neg";
        }
        if tag == "EX" {
            return "expl";
        }
        let nominal_parent = is_nominal(parent);
        match dl {
            "CC" | "CONJP" => "cc",
            "DT" | "PDT" | "WDT" => "det",
            "CD" | "QP" => "nummod",
            "PRP$" | "WP$" => "nmod:poss",
            "POS" => "case",
            "MD" => "aux",
            "RP" => "compound:prt",
            _ if parent == "VP" && head.label == "ADJP" && self.is_copula(dep) => "cop",
            "TO" if parent == "PP" => "case",
            "TO" => "mark",
            "IN" if parent == "SBAR" => "mark",
            "IN" => "case",
            "RB" | "RBR" | "RBS" | "ADVP" | "WHADVP" => "advmod",
            l if (ADJS.contains(&l) || l == "ADJP" || l == "VBN" || l == "VBG") && nominal_parent => "amod",
            l if (ADJS.contains(&l) || l == "ADJP") && parent == "VP" => "xcomp",
            l if VERBS.contains(&l) && parent == "VP" && head.label == "VP" => "aux",
            l if NOUNS.contains(&l) && nominal_parent => "compound",
            l if is_nominal(l) => match parent {
                "S" | "SINV" | "SQ" if before_head => "nsubj",
                "VP" if !before_head => "obj",
                "VP" => "nsubj",
                _ if nominal_parent => "nmod",
                "PP" | "ADJP" => "obl",
                _ => "dep",
            },
            "PP" => {
                if nominal_parent {
                    "nmod"
                } else {
                    "obl"
                }
            }
            "SBAR" => match parent {
                "VP" => "ccomp",
                _ if nominal_parent => "acl",
                _ => "advcl",
            },
            "S" if parent == "VP" => "ccomp",
            "S" => "parataxis",
            "VP" if nominal_parent => "acl",
            _ => "dep",
        }
    }
}

/// Convert a constituency tree to a dependency tree by head percolation.
/// Every leaf becomes one node; empty constituents are ignored.
pub fn tree2dep(tree: &ParseTree, rules: &HeadRuleTable) -> Result<DepGraph> {
    let mut b = Builder {
        rules,
        nodes: Vec::new(),
        edges: Vec::new(),
    };
    let Some(top) = b.convert(tree) else {
        return Err(Error::Tree {
            position: 0,
            message: "tree has no leaves".into(),
        });
    };
    b.edges.push(DepEdge::new(0, top.head, ROOT_LABEL));
    let g = DepGraph {
        nodes: b.nodes,
        edges: b.edges,
    }
    .normalized();
    g.validate()?;
    Ok(g)
}
