//! Radiology report text analysis.
//!
//! A set of independent annotators that read and write BioC collections:
//! rule-based de-identification, section segmentation, sentence splitting and
//! tokenization, vocabulary-driven concept recognition, dependency graphs
//! (CoNLL-U ingestion and head-rule conversion of bracketed trees) and
//! dependency-pattern negation/uncertainty detection. Results convert
//! losslessly to and from OMOP CDM `NOTE_NLP` rows and aggregate into a
//! document-by-finding label table.

pub mod bioc;
pub mod error;
pub mod text;

pub use error::{Error, Result};
pub mod cdm;
pub mod cli;
pub mod collect;
pub mod deid;
pub mod depgraph;
pub mod negdetect;
pub mod ner;
pub mod pipeline;
pub mod resources;
pub mod secsplit;
pub mod ssplit;
pub mod synth;
