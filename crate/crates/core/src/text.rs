//! Character-offset helpers.
//!
//! Every offset in the document model counts Unicode scalar values, while
//! Rust strings and the `regex` crate work in bytes. These helpers convert
//! between the two.

/// Number of characters in `s`.
pub fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Substring of `s` covering characters `[start, start + len)`, or `None`
/// when the range is out of bounds.
pub fn char_slice(s: &str, start: usize, len: usize) -> Option<&str> {
    let begin = char_to_byte(s, start)?;
    let end = char_to_byte(s, start + len)?;
    Some(&s[begin..end])
}

/// Byte index of character `idx`; `idx == char_len(s)` maps to `s.len()`.
pub fn char_to_byte(s: &str, idx: usize) -> Option<usize> {
    if idx == 0 {
        return Some(0);
    }
    let mut count = 0;
    for (b, _) in s.char_indices() {
        if count == idx {
            return Some(b);
        }
        count += 1;
    }
    (count == idx).then_some(s.len())
}

/// Lookup table from byte index to character index for one string.
///
/// Built once per text so repeated regex-match conversions stay linear.
#[derive(Debug, Clone)]
pub struct CharIndex {
    byte_to_char: Vec<usize>,
}

impl CharIndex {
    pub fn new(s: &str) -> Self {
        let mut byte_to_char = vec![0; s.len() + 1];
        let mut ci = 0;
        for (b, c) in s.char_indices() {
            for slot in &mut byte_to_char[b..b + c.len_utf8()] {
                *slot = ci;
            }
            ci += 1;
        }
        byte_to_char[s.len()] = ci;
        CharIndex { byte_to_char }
    }

    /// Character index of byte `b` (which must sit on a char boundary).
    pub fn char_at(&self, b: usize) -> usize {
        self.byte_to_char[b]
    }
}

/// True when every character of `s` is 'X' (a masked span). Empty strings
/// are not masked spans.
pub fn is_masked(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c == 'X')
}
