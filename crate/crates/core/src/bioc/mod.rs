//! BioC document model, XML reader/writer and structural validation.
//!
//! Offsets are document-global character indices. Passages and sentences
//! carry their own global start offset, so an annotation's location can be
//! resolved without knowing which container holds it.

mod model;
mod validate;
mod xml;

pub use model::{
    BiocAnnotation, BiocCollection, BiocDocument, BiocNode, BiocPassage, BiocRelation, BiocSentence, Infons, Location,
    ROLE_DEPENDANT, ROLE_GOVERNOR,
};
pub use validate::{validate, Violation, ViolationKind};
pub use xml::{parse_bioc_xml, serialize_bioc_xml};

/// Serialize infon booleans the way BioC tools expect.
pub fn bool_infon(value: bool) -> &'static str {
    if value {
        "True"
    } else {
        "False"
    }
}

/// Read a "True"/"False" infon; anything else is `None`.
pub fn parse_bool_infon(value: &str) -> Option<bool> {
    match value {
        "True" | "true" => Some(true),
        "False" | "false" => Some(false),
        _ => None,
    }
}
