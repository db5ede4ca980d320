use indexmap::IndexMap;

use crate::text::{char_len, char_slice};

pub const ROLE_GOVERNOR: &str = "governor";
pub const ROLE_DEPENDANT: &str = "dependant";

/// Ordered string map attached to every BioC element.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Infons(IndexMap<String, String>);

impl Infons {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// Insert or overwrite. An existing key keeps its position.
    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.0.insert(key.into(), value.into());
    }

    pub fn remove(&mut self, key: &str) -> Option<String> {
        self.0.shift_remove(key)
    }

    pub fn contains_key(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Infons {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        let mut infons = Infons::new();
        for (k, v) in iter {
            infons.insert(k, v);
        }
        infons
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Location {
    pub offset: usize,
    pub length: usize,
}

impl Location {
    pub fn new(offset: usize, length: usize) -> Self {
        Location { offset, length }
    }

    pub fn end(&self) -> usize {
        self.offset + self.length
    }

    pub fn overlaps(&self, other: &Location) -> bool {
        self.offset < other.end() && other.offset < self.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BiocAnnotation {
    pub id: String,
    pub infons: Infons,
    pub locations: Vec<Location>,
    pub text: String,
}

impl BiocAnnotation {
    pub fn new(id: impl Into<String>, offset: usize, text: impl Into<String>) -> Self {
        let text = text.into();
        BiocAnnotation {
            id: id.into(),
            infons: Infons::new(),
            locations: vec![Location::new(offset, char_len(&text))],
            text,
        }
    }

    /// Union span of all locations.
    pub fn span(&self) -> Option<Location> {
        let start = self.locations.iter().map(|l| l.offset).min()?;
        let end = self.locations.iter().map(Location::end).max()?;
        Some(Location::new(start, end - start))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiocNode {
    pub refid: String,
    pub role: String,
}

impl BiocNode {
    pub fn new(refid: impl Into<String>, role: impl Into<String>) -> Self {
        BiocNode {
            refid: refid.into(),
            role: role.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BiocRelation {
    pub id: String,
    pub infons: Infons,
    pub nodes: Vec<BiocNode>,
}

impl BiocRelation {
    pub fn new(id: impl Into<String>) -> Self {
        BiocRelation {
            id: id.into(),
            ..Default::default()
        }
    }

    pub fn node(&self, role: &str) -> Option<&BiocNode> {
        self.nodes.iter().find(|n| n.role == role)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BiocSentence {
    pub offset: usize,
    pub text: String,
    pub infons: Infons,
    pub annotations: Vec<BiocAnnotation>,
    pub relations: Vec<BiocRelation>,
}

impl BiocSentence {
    pub fn new(offset: usize, text: impl Into<String>) -> Self {
        BiocSentence {
            offset,
            text: text.into(),
            ..Default::default()
        }
    }

    pub fn span(&self) -> Location {
        Location::new(self.offset, char_len(&self.text))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BiocPassage {
    pub offset: usize,
    pub text: String,
    pub infons: Infons,
    pub sentences: Vec<BiocSentence>,
    pub annotations: Vec<BiocAnnotation>,
    pub relations: Vec<BiocRelation>,
}

impl BiocPassage {
    pub fn new(offset: usize, text: impl Into<String>) -> Self {
        BiocPassage {
            offset,
            text: text.into(),
            ..Default::default()
        }
    }

    pub fn span(&self) -> Location {
        Location::new(self.offset, char_len(&self.text))
    }

    /// Substring of this passage addressed by global offsets.
    pub fn substring(&self, loc: Location) -> Option<&str> {
        let rel = loc.offset.checked_sub(self.offset)?;
        char_slice(&self.text, rel, loc.length)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BiocDocument {
    pub id: String,
    pub infons: Infons,
    pub passages: Vec<BiocPassage>,
}

impl BiocDocument {
    /// A document holding one raw-text passage at offset 0.
    pub fn from_text(id: impl Into<String>, text: impl Into<String>) -> Self {
        BiocDocument {
            id: id.into(),
            infons: Infons::new(),
            passages: vec![BiocPassage::new(0, text)],
        }
    }

    /// The full document text, reassembled from passages. Gaps between
    /// passages are filled with spaces; overlapping passages are written in
    /// order, later ones winning.
    pub fn text(&self) -> String {
        let len = self
            .passages
            .iter()
            .map(|p| p.offset + char_len(&p.text))
            .max()
            .unwrap_or(0);
        let mut buf = vec![' '; len];
        for p in &self.passages {
            for (i, c) in p.text.chars().enumerate() {
                buf[p.offset + i] = c;
            }
        }
        buf.into_iter().collect()
    }

    /// Whether any passage or sentence carries text. Documents rebuilt from
    /// NOTE_NLP rows without the note table have none.
    pub fn has_text(&self) -> bool {
        self.passages
            .iter()
            .any(|p| !p.text.is_empty() || p.sentences.iter().any(|s| !s.text.is_empty()))
    }

    /// All annotations, passage-level and sentence-level, in document order.
    pub fn annotations(&self) -> impl Iterator<Item = &BiocAnnotation> {
        self.passages.iter().flat_map(|p| {
            p.annotations
                .iter()
                .chain(p.sentences.iter().flat_map(|s| s.annotations.iter()))
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BiocCollection {
    pub source: String,
    pub date: String,
    pub key: String,
    pub infons: Infons,
    pub documents: Vec<BiocDocument>,
}

impl BiocCollection {
    pub fn new(source: impl Into<String>, date: impl Into<String>) -> Self {
        BiocCollection {
            source: source.into(),
            date: date.into(),
            key: String::new(),
            infons: Infons::new(),
            documents: Vec::new(),
        }
    }
}
