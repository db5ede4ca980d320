//! Rule-based sentence splitting and tokenization.

use std::collections::HashSet;
use std::path::Path;

use crate::bioc::{BiocDocument, BiocSentence};
use crate::error::Result;
use crate::resources;
use crate::secsplit::is_title_text;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Document-global character offset.
    pub offset: usize,
    /// Length in characters.
    pub length: usize,
}

impl Token {
    pub fn end(&self) -> usize {
        self.offset + self.length
    }
}

/// Lowercase words that do not end a sentence when followed by '.'.
/// Entries are stored without trailing periods.
#[derive(Debug, Clone, Default)]
pub struct AbbreviationList(HashSet<String>);

impl AbbreviationList {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        AbbreviationList(
            entries
                .into_iter()
                .map(|e| normalize_abbrev(e.as_ref()))
                .filter(|e| !e.is_empty())
                .collect(),
        )
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&normalize_abbrev(word))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn normalize_abbrev(word: &str) -> String {
    word.trim()
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .trim_end_matches('.')
        .to_lowercase()
}

/// One entry per line; blank lines and `#` comments are skipped.
pub fn parse_abbreviations(text: &str) -> AbbreviationList {
    AbbreviationList::new(
        text.lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#')),
    )
}

pub fn load_abbreviations(path: &Path) -> Result<AbbreviationList> {
    Ok(parse_abbreviations(&resources::read_file(path)?))
}

pub fn default_abbreviations() -> Result<AbbreviationList> {
    let (text, _, _) = resources::load(None, resources::ABBREVIATIONS)?;
    Ok(parse_abbreviations(&text))
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Tokenize `text`, whose first character sits at global offset `base`.
///
/// Runs of alphanumerics (joined by internal hyphens or apostrophes, and
/// decimal points between digits) are single tokens; every other
/// non-whitespace character is a token on its own.
pub fn tokenize_text(text: &str, base: usize) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if is_word_char(c) {
            i += 1;
            while i < chars.len() {
                let c = chars[i];
                if is_word_char(c) {
                    i += 1;
                    continue;
                }
                let next_word = chars.get(i + 1).is_some_and(|&n| is_word_char(n));
                let joins = match c {
                    '-' | '\'' | '\u{2019}' => next_word,
                    '.' => chars[i - 1].is_ascii_digit() && chars.get(i + 1).is_some_and(|n| n.is_ascii_digit()),
                    _ => false,
                };
                if joins {
                    i += 1;
                } else {
                    break;
                }
            }
        } else {
            i += 1;
        }
        tokens.push(Token {
            text: chars[start..i].iter().collect(),
            offset: base + start,
            length: i - start,
        });
    }
    tokens
}

pub fn tokenize(sentence: &BiocSentence) -> Vec<Token> {
    tokenize_text(&sentence.text, sentence.offset)
}

fn is_terminator(t: &str) -> bool {
    matches!(t, "." | "!" | "?")
}

fn is_closer(t: &str) -> bool {
    matches!(t, ")" | "]" | "\"" | "'" | "\u{201D}" | "\u{2019}")
}

/// Character ranges `[start, end)` (relative to `text`) of each sentence.
pub fn sentence_spans(text: &str, abbrevs: &AbbreviationList) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let tokens = tokenize_text(text, 0);
    let mut spans = Vec::new();
    let mut start: Option<usize> = None;
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        if let (Some(s), Some(prev)) = (start, i.checked_sub(1).map(|p| &tokens[p])) {
            let gap = &chars[prev.end()..tok.offset];
            if gap.iter().filter(|&&c| c == '\n').count() >= 2 {
                spans.push((s, prev.end()));
                start = None;
            }
        }
        if start.is_none() {
            start = Some(tok.offset);
        }
        if is_terminator(&tok.text) && ends_sentence(&chars, &tokens, i, abbrevs) {
            let mut last = i;
            while let Some(next) = tokens.get(last + 1) {
                if next.offset == tokens[last].end() && (is_terminator(&next.text) || is_closer(&next.text)) {
                    last += 1;
                } else {
                    break;
                }
            }
            spans.push((start.take().unwrap(), tokens[last].end()));
            i = last + 1;
            continue;
        }
        i += 1;
    }
    if let (Some(s), Some(last)) = (start, tokens.last()) {
        spans.push((s, last.end()));
    }
    spans
}

fn ends_sentence(chars: &[char], tokens: &[crate::ssplit::Token], i: usize, abbrevs: &AbbreviationList) -> bool {
    let tok = &tokens[i];
    if tok.text != "." {
        return true;
    }
    // "e.g" style continuations
    if chars.get(tok.end()).is_some_and(|c| c.is_alphanumeric()) {
        return false;
    }
    // the whitespace-delimited word the period closes
    let mut ws = tok.offset;
    while ws > 0 && !chars[ws - 1].is_whitespace() {
        ws -= 1;
    }
    let word: String = chars[ws..tok.end()].iter().collect();
    let core = word
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .trim_end_matches('.');
    if core.is_empty() {
        return true;
    }
    if abbrevs.contains(core) {
        return false;
    }
    let mut it = core.chars();
    if let (Some(c), None) = (it.next(), it.next()) {
        if c.is_uppercase() {
            return false;
        }
    }
    true
}

/// Add sentences to every body passage. Title passages (a bare section
/// header) get none. Existing sentences are replaced.
pub fn split_sentences(doc: &BiocDocument, abbrevs: &AbbreviationList) -> BiocDocument {
    let mut out = doc.clone();
    for p in &mut out.passages {
        p.sentences.clear();
        if is_title_text(&p.text) {
            continue;
        }
        let chars: Vec<char> = p.text.chars().collect();
        for (s, e) in sentence_spans(&p.text, abbrevs) {
            p.sentences
                .push(BiocSentence::new(p.offset + s, chars[s..e].iter().collect::<String>()));
        }
    }
    out
}
