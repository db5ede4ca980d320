use crate::error::{Error, Result};

/// Label of the edge from the virtual root (governor 0).
pub const ROOT_LABEL: &str = "root";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepNode {
    /// 1-based position in the sentence.
    pub index: usize,
    pub word: String,
    pub lemma: String,
    pub tag: String,
    /// Document-global character offset, known once aligned to text.
    pub offset: Option<usize>,
}

impl DepNode {
    pub fn new(index: usize, word: impl Into<String>, tag: impl Into<String>) -> Self {
        let word = word.into();
        DepNode {
            index,
            lemma: lemmatize(&word),
            word,
            tag: tag.into(),
            offset: None,
        }
    }

    pub fn span(&self) -> Option<(usize, usize)> {
        self.offset.map(|o| (o, o + self.word.chars().count()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DepEdge {
    /// 0 is the virtual root.
    pub governor: usize,
    pub dependent: usize,
    pub label: String,
}

impl DepEdge {
    pub fn new(governor: usize, dependent: usize, label: impl Into<String>) -> Self {
        DepEdge {
            governor,
            dependent,
            label: label.into(),
        }
    }
}

/// A dependency tree. Nodes are numbered `1..=n` in sentence order; every
/// node has exactly one incoming edge and exactly one hangs off the root.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DepGraph {
    pub nodes: Vec<DepNode>,
    pub edges: Vec<DepEdge>,
}

impl DepGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, index: usize) -> Option<&DepNode> {
        index
            .checked_sub(1)
            .and_then(|i| self.nodes.get(i))
            .filter(|n| n.index == index)
            .or_else(|| self.nodes.iter().find(|n| n.index == index))
    }

    /// Incoming edge of `index`.
    pub fn head_edge(&self, index: usize) -> Option<&DepEdge> {
        self.edges.iter().find(|e| e.dependent == index)
    }

    pub fn children(&self, index: usize) -> impl Iterator<Item = &DepEdge> {
        self.edges.iter().filter(move |e| e.governor == index)
    }

    pub fn root(&self) -> Option<usize> {
        self.edges.iter().find(|e| e.governor == 0).map(|e| e.dependent)
    }

    /// Sort nodes by index and edges by dependent, so graphs that differ
    /// only in list order compare equal.
    pub fn normalized(&self) -> DepGraph {
        let mut g = self.clone();
        g.nodes.sort_by_key(|n| n.index);
        g.edges
            .sort_by(|a, b| (a.dependent, a.governor, &a.label).cmp(&(b.dependent, b.governor, &b.label)));
        g
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nodes.len();
        let mut seen = vec![false; n + 1];
        for node in &self.nodes {
            if node.index == 0 || node.index > n || seen[node.index] {
                return Err(Error::Graph(format!(
                    "node indices must be 1..={n} without repeats, found {}",
                    node.index
                )));
            }
            seen[node.index] = true;
        }
        let mut head = vec![None; n + 1];
        let mut roots = 0;
        for e in &self.edges {
            if e.label.is_empty() {
                return Err(Error::Graph(format!("edge into {} has an empty label", e.dependent)));
            }
            if e.dependent == 0 || e.dependent > n || e.governor > n {
                return Err(Error::Graph(format!(
                    "edge {} -> {} refers to a missing node",
                    e.governor, e.dependent
                )));
            }
            if e.dependent == e.governor {
                return Err(Error::Graph(format!("node {} governs itself", e.dependent)));
            }
            if head[e.dependent].replace(e.governor).is_some() {
                return Err(Error::Graph(format!("node {} has two governors", e.dependent)));
            }
            if e.governor == 0 {
                roots += 1;
            }
        }
        if n == 0 {
            return Ok(());
        }
        if roots != 1 {
            return Err(Error::Graph(format!("expected one root, found {roots}")));
        }
        for i in 1..=n {
            let Some(mut g) = head[i] else {
                return Err(Error::Graph(format!("node {i} has no governor")));
            };
            let mut steps = 0;
            while g != 0 {
                steps += 1;
                if steps > n {
                    return Err(Error::Graph(format!("cycle through node {i}")));
                }
                g = head[g].unwrap_or(0);
            }
        }
        Ok(())
    }
}

/// Lowercase, with a few irregular forms mapped to their base.
pub fn lemmatize(word: &str) -> String {
    let lower = word.to_lowercase();
    let base = match lower.as_str() {
        "is" | "are" | "was" | "were" | "am" | "been" | "being" => "be",
        "has" | "had" | "having" => "have",
        "does" | "did" => "do",
        "seen" | "saw" => "see",
        "n't" => "not",
        _ => return lower,
    };
    base.to_string()
}
