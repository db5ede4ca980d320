//! Annotator sequencing: resource loading, order checks, per-document
//! parallel stages and persisted intermediate files.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::bioc::{parse_bioc_xml, serialize_bioc_xml, BiocCollection, BiocDocument};
use crate::collect::{self, Finding, LabelRecord, Precedence};
use crate::deid::{self, PhiRule};
use crate::depgraph::{
    assign_graphs, parse_conllu, parse_document, parse_ptb_lines, tree2dep_document, DepGraph, HeadRuleTable, ParseTree,
};
use crate::error::{Error, Result};
use crate::negdetect::{detect, parse_pattern_file, NegPattern, PatternKind};
use crate::ner::{self, ConceptVocabulary};
use crate::resources;
use crate::secsplit::{self, SectionTitleVocab};
use crate::ssplit::{self, AbbreviationList};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Annotator {
    Deid,
    Secsplit,
    Ssplit,
    Ner,
    Parse,
    Tree2dep,
    Neg,
    Collect,
}

impl Annotator {
    /// Every annotator, in full-pipeline order.
    pub const ALL: [Annotator; 8] = [
        Annotator::Deid,
        Annotator::Secsplit,
        Annotator::Ssplit,
        Annotator::Ner,
        Annotator::Parse,
        Annotator::Tree2dep,
        Annotator::Neg,
        Annotator::Collect,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Annotator::Deid => "deid",
            Annotator::Secsplit => "secsplit",
            Annotator::Ssplit => "ssplit",
            Annotator::Ner => "ner",
            Annotator::Parse => "parse",
            Annotator::Tree2dep => "tree2dep",
            Annotator::Neg => "neg",
            Annotator::Collect => "collect",
        }
    }
}

impl fmt::Display for Annotator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Annotator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Annotator::ALL
            .into_iter()
            .find(|a| a.name() == s.trim())
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown annotator {s:?} (expected one of {})",
                    Annotator::ALL.map(|a| a.name()).join(", ")
                ))
            })
    }
}

/// Parse a comma-separated annotator list.
pub fn parse_annotators(s: &str) -> Result<Vec<Annotator>> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(Annotator::from_str)
        .collect()
}

/// Reject sequences whose stages would run before their inputs exist.
pub fn check_order(annotators: &[Annotator]) -> Result<()> {
    let pos = |a: Annotator| annotators.iter().position(|x| *x == a);
    let fail = |m: String| Err(Error::PipelineOrder(m));
    if annotators.is_empty() {
        return fail("no annotators given".into());
    }
    for (i, a) in annotators.iter().enumerate() {
        if annotators[..i].contains(a) {
            return fail(format!("{a} appears more than once"));
        }
    }
    if let Some(neg) = pos(Annotator::Neg) {
        if !pos(Annotator::Ner).is_some_and(|n| n < neg) {
            return fail("neg needs ner earlier in the pipeline".into());
        }
        let parsed = [Annotator::Parse, Annotator::Tree2dep]
            .into_iter()
            .any(|a| pos(a).is_some_and(|p| p < neg));
        if !parsed {
            return fail("neg needs parse or tree2dep earlier in the pipeline".into());
        }
    }
    if let (Some(sec), Some(ss)) = (pos(Annotator::Secsplit), pos(Annotator::Ssplit)) {
        if sec > ss {
            return fail("secsplit must run before ssplit".into());
        }
    }
    if let (Some(p), Some(t)) = (pos(Annotator::Parse), pos(Annotator::Tree2dep)) {
        if p > t {
            return fail("parse must run before tree2dep".into());
        }
    }
    if let Some(c) = pos(Annotator::Collect) {
        if c + 1 != annotators.len() {
            return fail("collect must be the last annotator".into());
        }
    }
    Ok(())
}

/// Explicit resource files; `None` falls back to the resource directory or
/// the bundled defaults.
#[derive(Debug, Clone, Default)]
pub struct ResourcePaths {
    pub phi_rules: Option<PathBuf>,
    pub section_titles: Option<PathBuf>,
    pub abbreviations: Option<PathBuf>,
    pub concepts: Option<PathBuf>,
    pub neg_patterns: Option<PathBuf>,
    pub uncertainty_patterns: Option<PathBuf>,
    pub findings: Option<PathBuf>,
}

/// Where sentence parses come from.
#[derive(Debug, Clone, Default)]
pub enum ParseSource {
    #[default]
    Builtin,
    /// Bracketed trees, one per sentence across the whole collection.
    Trees(Vec<ParseTree>),
    /// CoNLL-U graphs, one per sentence across the whole collection.
    Graphs(Vec<DepGraph>),
}

impl ParseSource {
    pub fn from_trees_file(path: &Path) -> Result<Self> {
        let text = resources::read_file(path)?;
        Ok(ParseSource::Trees(parse_ptb_lines(&text)?))
    }

    pub fn from_conllu_file(path: &Path) -> Result<Self> {
        let text = resources::read_file(path)?;
        Ok(ParseSource::Graphs(parse_conllu(&text)?))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub redact: bool,
    pub precedence: Precedence,
    pub parse_source: ParseSource,
}

/// Loaded, read-only resources for a set of annotators.
#[derive(Debug, Default)]
pub struct Resources {
    pub phi_rules: Vec<PhiRule>,
    pub sections: Option<SectionTitleVocab>,
    pub abbreviations: Option<AbbreviationList>,
    pub concepts: Option<ConceptVocabulary>,
    pub head_rules: Option<HeadRuleTable>,
    pub patterns: Vec<NegPattern>,
    pub findings: Vec<Finding>,
    pub options: Options,
}

fn load_patterns(path: Option<&Path>, name: &str, kind: PatternKind) -> Result<Vec<NegPattern>> {
    let (text, _, label) = resources::load(path, name)?;
    parse_pattern_file(&text, kind, &label)
}

impl Resources {
    /// Load only what `annotators` use.
    pub fn load(annotators: &[Annotator], paths: &ResourcePaths, options: Options) -> Result<Self> {
        let mut r = Resources {
            options,
            ..Default::default()
        };
        for a in annotators {
            match a {
                Annotator::Deid => {
                    r.phi_rules = match &paths.phi_rules {
                        Some(p) => deid::load_phi_rules(p)?,
                        None => deid::default_phi_rules()?,
                    }
                }
                Annotator::Secsplit => {
                    r.sections = Some(match &paths.section_titles {
                        Some(p) => secsplit::load_section_vocab(p)?,
                        None => secsplit::default_section_vocab()?,
                    })
                }
                Annotator::Ssplit => {
                    r.abbreviations = Some(match &paths.abbreviations {
                        Some(p) => ssplit::load_abbreviations(p)?,
                        None => ssplit::default_abbreviations()?,
                    })
                }
                Annotator::Ner => {
                    r.concepts = Some(match &paths.concepts {
                        Some(p) => ner::load_concept_vocab(p)?,
                        None => ner::default_concept_vocab()?,
                    })
                }
                Annotator::Parse => {}
                Annotator::Tree2dep => r.head_rules = Some(HeadRuleTable::standard()),
                Annotator::Neg => {
                    r.patterns = load_patterns(
                        paths.neg_patterns.as_deref(),
                        resources::NEG_PATTERNS,
                        PatternKind::Negation,
                    )?;
                    r.patterns.extend(load_patterns(
                        paths.uncertainty_patterns.as_deref(),
                        resources::UNCERTAINTY_PATTERNS,
                        PatternKind::Uncertainty,
                    )?);
                }
                Annotator::Collect => {
                    r.findings = match &paths.findings {
                        Some(p) => collect::load_findings(p)?,
                        None => collect::default_findings()?,
                    }
                }
            }
        }
        Ok(r)
    }
}

fn expect<T>(r: &Option<T>, stage: Annotator) -> Result<&T> {
    r.as_ref().ok_or_else(|| Error::Stage {
        stage: stage.to_string(),
        message: "resources were not loaded".into(),
    })
}

fn map_docs<F>(c: &BiocCollection, f: F) -> Result<BiocCollection>
where
    F: Fn(usize, &BiocDocument) -> Result<BiocDocument> + Sync,
{
    let documents = c
        .documents
        .par_iter()
        .enumerate()
        .map(|(i, d)| f(i, d))
        .collect::<Result<Vec<_>>>()?;
    Ok(BiocCollection {
        source: c.source.clone(),
        date: c.date.clone(),
        key: c.key.clone(),
        infons: c.infons.clone(),
        documents,
    })
}

/// Index of each document's first sentence in a collection-wide sequence.
fn sentence_starts(c: &BiocCollection) -> Vec<usize> {
    let mut starts = Vec::with_capacity(c.documents.len());
    let mut n = 0;
    for d in &c.documents {
        starts.push(n);
        n += d.passages.iter().map(|p| p.sentences.len()).sum::<usize>();
    }
    starts
}

/// Apply one document-level stage to every document. Must be called inside
/// the thread pool that should do the work. `collect` is not a document
/// stage; see [`collect_labels`].
pub fn run_stage(stage: Annotator, c: &BiocCollection, r: &Resources) -> Result<BiocCollection> {
    match stage {
        Annotator::Deid => map_docs(c, |_, d| Ok(deid::deidentify_with(d, &r.phi_rules, r.options.redact))),
        Annotator::Secsplit => {
            let v = expect(&r.sections, stage)?;
            map_docs(c, |_, d| Ok(secsplit::split_sections(d, v)))
        }
        Annotator::Ssplit => {
            let v = expect(&r.abbreviations, stage)?;
            map_docs(c, |_, d| Ok(ssplit::split_sentences(d, v)))
        }
        Annotator::Ner => {
            let v = expect(&r.concepts, stage)?;
            map_docs(c, |_, d| Ok(ner::match_concepts(d, v)))
        }
        Annotator::Parse => match &r.options.parse_source {
            ParseSource::Builtin => map_docs(c, |_, d| Ok(parse_document(d))),
            ParseSource::Trees(trees) => {
                let starts = sentence_starts(c);
                check_supply(c, &starts, trees.len(), "trees")?;
                map_docs(c, |i, d| {
                    let mut d = d.clone();
                    crate::depgraph::assign_trees(&mut d, trees, starts[i])?;
                    Ok(d)
                })
            }
            ParseSource::Graphs(graphs) => {
                let starts = sentence_starts(c);
                check_supply(c, &starts, graphs.len(), "graphs")?;
                map_docs(c, |i, d| Ok(assign_graphs(d, graphs, starts[i])?.0))
            }
        },
        Annotator::Tree2dep => {
            let rules = expect(&r.head_rules, stage)?;
            map_docs(c, |_, d| tree2dep_document(d, rules))
        }
        Annotator::Neg => map_docs(c, |_, d| detect(d, &r.patterns)),
        Annotator::Collect => Err(Error::Stage {
            stage: stage.to_string(),
            message: "collect produces a label table, not a collection".into(),
        }),
    }
}

/// Apply the document stages of `annotators` in order, in memory; a
/// trailing `collect` is ignored.
pub fn process(c: &BiocCollection, annotators: &[Annotator], r: &Resources) -> Result<BiocCollection> {
    let mut c = c.clone();
    for &stage in annotators.iter().filter(|a| **a != Annotator::Collect) {
        c = run_stage(stage, &c, r)?;
    }
    Ok(c)
}

fn check_supply(c: &BiocCollection, starts: &[usize], supplied: usize, what: &str) -> Result<()> {
    let needed = starts.last().copied().unwrap_or(0)
        + c.documents
            .last()
            .map(|d| d.passages.iter().map(|p| p.sentences.len()).sum::<usize>())
            .unwrap_or(0);
    if needed != supplied {
        return Err(Error::Stage {
            stage: "parse".into(),
            message: format!("collection has {needed} sentences but {supplied} {what} were supplied"),
        });
    }
    Ok(())
}

pub fn collect_labels(c: &BiocCollection, r: &Resources) -> Vec<LabelRecord> {
    collect::collect_labels_with(c, &r.findings, &r.options.precedence)
}

pub fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(format!("cannot start {jobs} worker threads: {e}")))
}

pub fn read_collection(path: &Path) -> Result<BiocCollection> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_bioc_xml(&bytes)
}

pub fn write_collection(path: &Path, c: &BiocCollection) -> Result<()> {
    let bytes = serialize_bioc_xml(c)?;
    write_file(path, &bytes)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub annotators: Vec<Annotator>,
    pub paths: ResourcePaths,
    pub options: Options,
    pub input: PathBuf,
    pub output: PathBuf,
    /// Directory for intermediates; defaults to the output's directory.
    pub workdir: Option<PathBuf>,
    pub jobs: usize,
}

/// Files written by a pipeline run.
#[derive(Debug, Clone, Default)]
pub struct PipelineReport {
    pub intermediates: Vec<PathBuf>,
    pub output: PathBuf,
}

/// Path of the intermediate written after `stage`.
pub fn intermediate_path(workdir: &Path, output: &Path, stage: Annotator) -> PathBuf {
    let stem = output
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "output".into());
    workdir.join(format!("{stem}.{stage}.xml"))
}

/// Run the configured annotators in order. Every document stage leaves
/// `<output-stem>.<stage>.xml` in the work directory; the output holds the
/// final collection, or the label table when the last annotator is
/// `collect`. A failing stage leaves earlier intermediates in place.
pub fn run(config: &PipelineConfig) -> Result<PipelineReport> {
    check_order(&config.annotators)?;
    let resources = Resources::load(&config.annotators, &config.paths, config.options.clone())?;
    let workdir = config.workdir.clone().unwrap_or_else(|| {
        config
            .output
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    });
    let pool = thread_pool(config.jobs)?;
    let mut c = read_collection(&config.input)?;
    let mut report = PipelineReport {
        output: config.output.clone(),
        ..Default::default()
    };
    for &stage in &config.annotators {
        if stage == Annotator::Collect {
            let records = pool.install(|| collect_labels(&c, &resources));
            write_file(&config.output, collect::write_labels_csv(&records)?.as_bytes())?;
            return Ok(report);
        }
        c = pool.install(|| run_stage(stage, &c, &resources))?;
        let path = intermediate_path(&workdir, &config.output, stage);
        write_collection(&path, &c)?;
        report.intermediates.push(path);
    }
    write_collection(&config.output, &c)?;
    Ok(report)
}

/// Run one annotator on `input` without order checks or intermediates, as
/// the single-stage commands do.
pub fn run_single(
    stage: Annotator,
    input: &Path,
    output: &Path,
    paths: &ResourcePaths,
    options: Options,
    jobs: usize,
) -> Result<()> {
    let resources = Resources::load(&[stage], paths, options)?;
    let pool = thread_pool(jobs)?;
    let c = read_collection(input)?;
    if stage == Annotator::Collect {
        let records = pool.install(|| collect_labels(&c, &resources));
        return write_file(output, collect::write_labels_csv(&records)?.as_bytes());
    }
    let c = pool.install(|| run_stage(stage, &c, &resources))?;
    write_collection(output, &c)
}
