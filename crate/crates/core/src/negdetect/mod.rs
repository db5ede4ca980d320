//! Negation and uncertainty detection by dependency-pattern matching.

mod detect;
mod matcher;
mod pattern;

pub use detect::{
    concept_anchor, default_patterns, detect, load_pattern_file, parse_pattern_file, PATTERN_ID_INFON,
    PATTERN_STR_INFON,
};
pub use matcher::{match_pattern, Binding};
pub use pattern::{compile_pattern, Attr, EdgeStep, NegPattern, NodeConstraint, PatternKind, Relation};
