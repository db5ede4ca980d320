//! Default resource files compiled into the library.
//!
//! Every loader accepts an explicit path. Without one, resources come from
//! the directory named by `RADTEXT_RESOURCES` when that variable is set, and
//! from the copies embedded here otherwise.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

pub const RESOURCES_ENV: &str = "RADTEXT_RESOURCES";

pub const PHI_RULES: &str = "phi_rules.yml";
pub const NAMES: &str = "names.txt";
pub const SECTION_TITLES: &str = "section_titles.csv";
pub const ABBREVIATIONS: &str = "abbreviations.txt";
pub const CONCEPTS: &str = "concepts.yml";
pub const NEG_PATTERNS: &str = "neg_patterns.tsv";
pub const UNCERTAINTY_PATTERNS: &str = "uncertainty_patterns.tsv";
pub const FINDINGS: &str = "findings.csv";

const BUNDLED: &[(&str, &str)] = &[
    (PHI_RULES, include_str!("../resources/phi_rules.yml")),
    (NAMES, include_str!("../resources/names.txt")),
    (SECTION_TITLES, include_str!("../resources/section_titles.csv")),
    (ABBREVIATIONS, include_str!("../resources/abbreviations.txt")),
    (CONCEPTS, include_str!("../resources/concepts.yml")),
    (NEG_PATTERNS, include_str!("../resources/neg_patterns.tsv")),
    (
        UNCERTAINTY_PATTERNS,
        include_str!("../resources/uncertainty_patterns.tsv"),
    ),
    (FINDINGS, include_str!("../resources/findings.csv")),
];

/// Where a resource file came from; relative references inside it (such as
/// a PHI name dictionary) resolve against the same origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Bundled,
    Dir(PathBuf),
}

impl Origin {
    pub fn of_file(path: &Path) -> Origin {
        Origin::Dir(
            path.parent()
                .map(Path::to_path_buf)
                .unwrap_or_else(|| PathBuf::from(".")),
        )
    }

    /// Read `name` relative to this origin.
    pub fn read(&self, name: &str) -> Result<String> {
        match self {
            Origin::Bundled => bundled(name)
                .map(str::to_string)
                .ok_or_else(|| Error::resource(name, "no bundled resource with this name")),
            Origin::Dir(dir) => read_file(&dir.join(name)),
        }
    }

    pub fn describe(&self, name: &str) -> String {
        match self {
            Origin::Bundled => format!("<bundled>/{name}"),
            Origin::Dir(dir) => dir.join(name).display().to_string(),
        }
    }
}

pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, c)| *c)
}

pub fn bundled_names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// The origin used when no explicit resource path is given.
pub fn default_origin() -> Origin {
    match std::env::var_os(RESOURCES_ENV) {
        Some(dir) if !dir.is_empty() => Origin::Dir(PathBuf::from(dir)),
        _ => Origin::Bundled,
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Resolve an optional explicit path into (contents, origin, display name).
pub(crate) fn load(path: Option<&Path>, default_name: &str) -> Result<(String, Origin, String)> {
    match path {
        Some(p) => Ok((read_file(p)?, Origin::of_file(p), p.display().to_string())),
        None => {
            let origin = default_origin();
            let text = origin.read(default_name)?;
            let label = origin.describe(default_name);
            Ok((text, origin, label))
        }
    }
}

/// Write every bundled resource into `dir`, creating it if needed. Files
/// already holding the bundled contents are left untouched, so repeated
/// runs are no-ops.
pub fn download(dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    for (name, contents) in BUNDLED {
        let path = dir.join(name);
        if fs::read_to_string(&path).ok().as_deref() == Some(*contents) {
            continue;
        }
        fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
