use std::fmt;

use crate::error::{Error, Result};

/// A bracketed constituency tree. Preterminals are nodes whose only child
/// is a leaf.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseTree {
    Node { label: String, children: Vec<ParseTree> },
    Leaf(String),
}

impl ParseTree {
    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree::Node {
            label: label.into(),
            children,
        }
    }

    /// Preterminal `(tag word)`.
    pub fn pre(tag: impl Into<String>, word: impl Into<String>) -> Self {
        ParseTree::node(tag, vec![ParseTree::Leaf(word.into())])
    }

    pub fn label(&self) -> &str {
        match self {
            ParseTree::Node { label, .. } => label,
            ParseTree::Leaf(w) => w,
        }
    }

    pub fn children(&self) -> &[ParseTree] {
        match self {
            ParseTree::Node { children, .. } => children,
            ParseTree::Leaf(_) => &[],
        }
    }

    pub fn is_preterminal(&self) -> bool {
        matches!(self, ParseTree::Node { children, .. }
            if children.len() == 1 && matches!(children[0], ParseTree::Leaf(_)))
    }

    pub fn leaves(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            ParseTree::Leaf(w) => out.push(w),
            ParseTree::Node { children, .. } => {
                for c in children {
                    c.collect_leaves(out);
                }
            }
        }
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseTree::Leaf(w) => f.write_str(w),
            ParseTree::Node { label, children } => {
                write!(f, "({label}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(s: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (b, c) in s.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((st, Tok::Atom(&s[st..b])));
            }
            match c {
                '(' => out.push((b, Tok::Open)),
                ')' => out.push((b, Tok::Close)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(b);
        }
    }
    if let Some(st) = start {
        out.push((st, Tok::Atom(&s[st..])));
    }
    out
}

/// Parse one Penn-Treebank bracketed tree. A node without a label (as in
/// `( (S ...))`) gets the empty label; empty constituents like `(NP)` are
/// kept as childless nodes. Error positions are character offsets.
pub fn parse_ptb(s: &str) -> Result<ParseTree> {
    let toks = lex(s);
    let char_pos = |b: usize| s[..b].chars().count();
    let err = |b: usize, message: &str| Error::Tree {
        position: char_pos(b),
        message: message.to_string(),
    };
    if toks.is_empty() {
        return Err(err(0, "empty tree"));
    }
    if toks[0].1 != Tok::Open {
        return Err(err(toks[0].0, "tree must start with '('"));
    }
    // stack of (label, children)
    let mut stack: Vec<(String, Vec<ParseTree>)> = Vec::new();
    let mut done: Option<ParseTree> = None;
    let mut i = 0;
    while i < toks.len() {
        let (b, ref t) = toks[i];
        if done.is_some() {
            return Err(err(b, "unexpected text after the tree"));
        }
        match t {
            Tok::Open => {
                let label = match toks.get(i + 1) {
                    Some((_, Tok::Atom(a))) => {
                        i += 1;
                        a.to_string()
                    }
                    _ => String::new(),
                };
                stack.push((label, Vec::new()));
            }
            Tok::Close => {
                let Some((label, children)) = stack.pop() else {
                    return Err(err(b, "unbalanced ')'"));
                };
                let node = ParseTree::Node { label, children };
                match stack.last_mut() {
                    Some(parent) => parent.1.push(node),
                    None => done = Some(node),
                }
            }
            Tok::Atom(a) => match stack.last_mut() {
                Some(parent) => parent.1.push(ParseTree::Leaf(a.to_string())),
                None => return Err(err(b, "leaf outside brackets")),
            },
        }
        i += 1;
    }
    match done {
        Some(t) => Ok(t),
        None => Err(err(s.len(), "unbalanced '(': tree is not closed")),
    }
}

/// One tree per non-blank line.
pub fn parse_ptb_lines(text: &str) -> Result<Vec<ParseTree>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(parse_ptb).collect()
}
