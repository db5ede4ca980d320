use std::fmt;

use regex::Regex;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PatternKind {
    Negation,
    Uncertainty,
}

impl fmt::Display for PatternKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternKind::Negation => "negation",
            PatternKind::Uncertainty => "uncertainty",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Attr {
    Word,
    Lemma,
    Tag,
}

/// Constraints on one graph node. Regexes are anchored and
/// case-insensitive; an empty list matches any node.
#[derive(Debug, Clone)]
pub struct NodeConstraint {
    pub attrs: Vec<(Attr, Regex)>,
    pub name: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `>`: the left node governs the right one.
    Governs,
    /// `<`: the left node is governed by the right one.
    GovernedBy,
    /// `>>`: the left node is a proper ancestor of the right one.
    GovernsTransitively,
    /// `<<`: the left node is a proper descendant of the right one.
    GovernedByTransitively,
}

/// Relation between consecutive query nodes. A label constraint applies to
/// the edge entering the lower node (for transitive steps, the last hop).
#[derive(Debug, Clone)]
pub struct EdgeStep {
    pub relation: Relation,
    pub label: Option<Regex>,
}

/// A compiled query: `nodes[i]` and `nodes[i + 1]` are related by
/// `edges[i]`. The node named `f` is the concept being tested.
#[derive(Debug, Clone)]
pub struct NegPattern {
    pub id: String,
    pub kind: PatternKind,
    pub source: String,
    pub nodes: Vec<NodeConstraint>,
    pub edges: Vec<EdgeStep>,
    pub focus: usize,
}

impl NegPattern {
    pub fn name_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name.as_deref() == Some(name))
    }
}

fn anchored(re: &str) -> std::result::Result<Regex, regex::Error> {
    Regex::new(&format!("(?i)^(?:{re})$"))
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Pattern {
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
        self.pos > start
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a name");
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    /// `/.../` with `\/` standing for a literal slash.
    fn regex(&mut self) -> Result<Regex> {
        let start = self.pos;
        self.expect('/')?;
        let mut body = String::new();
        loop {
            match self.peek() {
                None => {
                    self.pos = start;
                    return self.err("unterminated regex");
                }
                Some('/') => {
                    self.pos += 1;
                    break;
                }
                Some('\\') if self.chars.get(self.pos + 1) == Some(&'/') => {
                    body.push('/');
                    self.pos += 2;
                }
                Some(c) => {
                    body.push(c);
                    self.pos += 1;
                }
            }
        }
        anchored(&body).map_err(|e| Error::Pattern {
            column: start + 1,
            message: format!("bad regex /{body}/: {e}"),
        })
    }

    /// `{attr:/re/, ...}` returning (attribute name, regex) pairs.
    fn braces(&mut self) -> Result<Vec<(String, usize, Regex)>> {
        self.expect('{')?;
        let mut out = Vec::new();
        self.skip_ws();
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(out);
        }
        loop {
            self.skip_ws();
            let col = self.pos;
            let name = self.ident()?;
            self.skip_ws();
            self.expect(':')?;
            self.skip_ws();
            let re = self.regex()?;
            out.push((name, col, re));
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(out);
                }
                _ => return self.err("expected ',' or '}'"),
            }
        }
    }

    fn node(&mut self) -> Result<NodeConstraint> {
        let mut attrs = Vec::new();
        for (name, col, re) in self.braces()? {
            let attr = match name.as_str() {
                "word" => Attr::Word,
                "lemma" => Attr::Lemma,
                "tag" => Attr::Tag,
                other => {
                    return Err(Error::Pattern {
                        column: col + 1,
                        message: format!("unknown node attribute {other:?}"),
                    })
                }
            };
            attrs.push((attr, re));
        }
        let name = if self.peek() == Some('=') {
            self.pos += 1;
            Some(self.ident()?)
        } else {
            None
        };
        Ok(NodeConstraint { attrs, name })
    }

    fn edge(&mut self) -> Result<EdgeStep> {
        let relation = match (self.peek(), self.chars.get(self.pos + 1)) {
            (Some('>'), Some('>')) => {
                self.pos += 2;
                Relation::GovernsTransitively
            }
            (Some('<'), Some('<')) => {
                self.pos += 2;
                Relation::GovernedByTransitively
            }
            (Some('>'), _) => {
                self.pos += 1;
                Relation::Governs
            }
            (Some('<'), _) => {
                self.pos += 1;
                Relation::GovernedBy
            }
            _ => return self.err("expected '>', '<', '>>' or '<<'"),
        };
        // a brace glued to the operator constrains the dependency label
        let mut label = None;
        if self.peek() == Some('{') {
            for (name, col, re) in self.braces()? {
                if name != "dep" || label.is_some() {
                    return Err(Error::Pattern {
                        column: col + 1,
                        message: format!("edge constraints take a single 'dep', found {name:?}"),
                    });
                }
                label = Some(re);
            }
        }
        Ok(EdgeStep { relation, label })
    }
}

/// Compile a pattern in the grammar
/// `node (edge node)*` where a node is `{[attr:/re/[,attr:/re/]*]}[=name]`
/// with attr one of word, lemma, tag, and an edge is `>`, `<`, `>>` or `<<`,
/// optionally followed without whitespace by `{dep:/re/}` (or `{}` for any
/// label). Exactly one node must be named `f`.
pub fn compile_pattern(src: &str, id: &str, kind: PatternKind) -> Result<NegPattern> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
    };
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    p.skip_ws();
    nodes.push(p.node()?);
    loop {
        let had_ws = p.skip_ws();
        if p.peek().is_none() {
            break;
        }
        if !had_ws {
            return p.err("expected whitespace");
        }
        edges.push(p.edge()?);
        if !p.skip_ws() {
            return p.err("expected whitespace after relation");
        }
        if p.peek().is_none() {
            return p.err("relation without a target node");
        }
        nodes.push(p.node()?);
    }
    let mut names = std::collections::HashSet::new();
    for n in &nodes {
        if let Some(name) = &n.name {
            if !names.insert(name.as_str()) {
                return Err(Error::Pattern {
                    column: 0,
                    message: format!("name {name:?} used twice"),
                });
            }
        }
    }
    let Some(focus) = nodes.iter().position(|n| n.name.as_deref() == Some("f")) else {
        return Err(Error::Pattern {
            column: 0,
            message: "pattern has no node named f".into(),
        });
    };
    Ok(NegPattern {
        id: id.to_string(),
        kind,
        source: src.to_string(),
        nodes,
        edges,
        focus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Result<NegPattern> {
        compile_pattern(s, "t", PatternKind::Negation)
    }

    #[test]
    fn two_node_query() {
        let p = c("{}=f > {lemma:/no/}=k0").unwrap();
        assert_eq!(p.nodes.len(), 2);
        assert_eq!(p.edges[0].relation, Relation::Governs);
        assert!(p.edges[0].label.is_none());
        assert_eq!(p.focus, 0);
        assert!(p.nodes[1].attrs[0].1.is_match("NO"));
        assert!(!p.nodes[1].attrs[0].1.is_match("not"));
    }

    #[test]
    fn glued_empty_label_is_any() {
        let p = c("{}=f >{} {lemma:/no/}=k0").unwrap();
        assert!(p.edges[0].label.is_none());
        let p = c("{}=f <{dep:/nsubj|obj/} {}").unwrap();
        assert!(p.edges[0].label.as_ref().unwrap().is_match("obj"));
    }

    #[test]
    fn focus_required() {
        assert!(c("{}").is_err());
        assert_eq!(c("{}=f").unwrap().nodes.len(), 1);
    }

    #[test]
    fn focus_anywhere() {
        let p = compile_pattern("{lemma:/appear|suggest/}=k >> {}=f", "u", PatternKind::Uncertainty).unwrap();
        assert_eq!(p.focus, 1);
        assert_eq!(p.edges[0].relation, Relation::GovernsTransitively);
    }

    #[test]
    fn syntax_errors_carry_columns() {
        match c("{}=f >") {
            Err(Error::Pattern { column, .. }) => assert_eq!(column, 7),
            other => panic!("{other:?}"),
        }
        match c("{}=f > {lemma:/(/}") {
            Err(Error::Pattern { column, message }) => {
                assert_eq!(column, 15);
                assert!(message.contains("regex"));
            }
            other => panic!("{other:?}"),
        }
        assert!(c("{color:/x/}=f").is_err());
        assert!(c("{}=f {}").is_err());
        assert!(c("{}=f=g").is_err());
        assert!(c("{}=f > {}=f").is_err());
        assert!(c("{}=f >{lemma:/x/} {}").is_err());
    }

    #[test]
    fn escaped_slash() {
        let p = c(r"{}=f > {word:/and\/or/}").unwrap();
        assert!(p.nodes[1].attrs[0].1.is_match("and/or"));
    }
}
