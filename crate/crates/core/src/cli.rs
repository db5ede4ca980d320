//! Command-line front end. `radtext <command>` and the `radtext-<command>`
//! aliases share this parser.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::cdm;
use crate::collect::Precedence;
use crate::error::Error;
use crate::pipeline::{self, parse_annotators, Annotator, Options, ParseSource, PipelineConfig, ResourcePaths};
use crate::resources;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ORDER: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Parser)]
#[command(
    name = "radtext",
    version,
    about = "Radiology report text analysis",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Io {
    /// Input file
    #[arg(short, long)]
    input: PathBuf,
    /// Output file
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct Jobs {
    /// Documents processed concurrently
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

#[derive(Debug, Args)]
struct ParseArgs {
    /// Bracketed parse trees, one per line, one per sentence
    #[arg(long, conflicts_with = "conllu")]
    trees: Option<PathBuf>,
    /// CoNLL-U dependency graphs, one block per sentence
    #[arg(long)]
    conllu: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct NegArgs {
    /// Negation patterns (TSV)
    #[arg(long, value_name = "FILE")]
    neg_patterns: Option<PathBuf>,
    /// Uncertainty patterns (TSV)
    #[arg(long, value_name = "FILE")]
    uncertainty_patterns: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CollectArgs {
    /// CSV with columns concept_id,concept_name
    #[arg(long, value_name = "FILE")]
    findings: Option<PathBuf>,
    /// Which mention status wins, e.g. positive,uncertain,negative
    #[arg(long, default_value = "positive,uncertain,negative")]
    precedence: Precedence,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// Mask protected health information
    Deid {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
        /// PHI rule file (YAML)
        #[arg(long, visible_alias = "rules", value_name = "FILE")]
        phi_rules: Option<PathBuf>,
        /// Drop PHI annotations so original values are not kept
        #[arg(long)]
        redact: bool,
    },
    /// Split reports into section passages
    Secsplit {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
        /// Section title vocabulary (CSV)
        #[arg(long, visible_alias = "vocab", value_name = "FILE")]
        section_titles: Option<PathBuf>,
    },
    /// Split passages into sentences
    Ssplit {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
        /// Abbreviations, one per line
        #[arg(long, visible_alias = "abbrevs", value_name = "FILE")]
        abbreviations: Option<PathBuf>,
    },
    /// Annotate concept mentions
    Ner {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
        /// Concept vocabulary (YAML)
        #[arg(long, visible_alias = "vocab", value_name = "FILE")]
        concepts: Option<PathBuf>,
    },
    /// Parse sentences into bracketed trees, or attach supplied parses
    Parse {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
        #[command(flatten)]
        parse: ParseArgs,
    },
    /// Convert stored trees into dependency graphs
    Tree2dep {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
    },
    /// Flag negated and uncertain concepts
    Neg {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
        #[command(flatten)]
        neg: NegArgs,
    },
    /// Merge mention labels into a document-by-finding table
    Collect {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        collect: CollectArgs,
    },
    /// Build a collection from a CSV of notes
    Csv2bioc {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value = "id")]
        id_column: String,
        #[arg(long, default_value = "text")]
        text_column: String,
        /// Collection date (YYYY-MM-DD); defaults to today
        #[arg(long)]
        date: Option<String>,
    },
    /// Build a collection from NOTE_NLP rows
    Cdm2bioc {
        #[command(flatten)]
        io: Io,
        /// CSV with columns note_id,note_text
        #[arg(long, value_name = "FILE")]
        notes: Option<PathBuf>,
    },
    /// Export annotations as NOTE_NLP rows
    Bioc2cdm {
        #[command(flatten)]
        io: Io,
    },
    /// Write the default resource files into a directory
    Download {
        /// Target directory; defaults to $RADTEXT_RESOURCES or ~/.radtext/resources
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run several annotators in sequence, keeping every intermediate
    Run {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        jobs: Jobs,
        /// Comma-separated annotators, in order
        #[arg(long, default_value = "deid,secsplit,ssplit,ner,parse,tree2dep,neg")]
        annotators: String,
        /// Directory for intermediate files; defaults to the output's
        #[arg(long)]
        workdir: Option<PathBuf>,
        /// PHI rule file (YAML)
        #[arg(long, value_name = "FILE")]
        phi_rules: Option<PathBuf>,
        /// Drop PHI annotations so original values are not kept
        #[arg(long)]
        redact: bool,
        /// Section title vocabulary (CSV)
        #[arg(long, value_name = "FILE")]
        section_titles: Option<PathBuf>,
        /// Abbreviations, one per line
        #[arg(long, value_name = "FILE")]
        abbreviations: Option<PathBuf>,
        /// Concept vocabulary (YAML)
        #[arg(long, value_name = "FILE")]
        concepts: Option<PathBuf>,
        #[command(flatten)]
        parse: ParseArgs,
        #[command(flatten)]
        neg: NegArgs,
        #[command(flatten)]
        collect: CollectArgs,
    },
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PipelineOrder(_) => EXIT_ORDER,
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

fn parse_source(p: &ParseArgs) -> Result<ParseSource, Error> {
    match (&p.trees, &p.conllu) {
        (Some(t), _) => ParseSource::from_trees_file(t),
        (_, Some(c)) => ParseSource::from_conllu_file(c),
        _ => Ok(ParseSource::Builtin),
    }
}

fn default_download_dir() -> PathBuf {
    match std::env::var_os(resources::RESOURCES_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => match std::env::var_os("HOME") {
            Some(h) if !h.is_empty() => Path::new(&h).join(".radtext").join("resources"),
            _ => PathBuf::from("radtext-resources"),
        },
    }
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn single(stage: Annotator, io: &Io, paths: ResourcePaths, options: Options, jobs: u16) -> Result<(), Error> {
    pipeline::run_single(stage, &io.input, &io.output, &paths, options, jobs.into())
}

fn execute(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Deid {
            io,
            jobs,
            phi_rules,
            redact,
        } => single(
            Annotator::Deid,
            &io,
            ResourcePaths {
                phi_rules,
                ..Default::default()
            },
            Options {
                redact,
                ..Default::default()
            },
            jobs.jobs,
        ),
        Command::Secsplit {
            io,
            jobs,
            section_titles,
        } => single(
            Annotator::Secsplit,
            &io,
            ResourcePaths {
                section_titles,
                ..Default::default()
            },
            Options::default(),
            jobs.jobs,
        ),
        Command::Ssplit {
            io,
            jobs,
            abbreviations,
        } => single(
            Annotator::Ssplit,
            &io,
            ResourcePaths {
                abbreviations,
                ..Default::default()
            },
            Options::default(),
            jobs.jobs,
        ),
        Command::Ner { io, jobs, concepts } => single(
            Annotator::Ner,
            &io,
            ResourcePaths {
                concepts,
                ..Default::default()
            },
            Options::default(),
            jobs.jobs,
        ),
        Command::Parse { io, jobs, parse } => single(
            Annotator::Parse,
            &io,
            ResourcePaths::default(),
            Options {
                parse_source: parse_source(&parse)?,
                ..Default::default()
            },
            jobs.jobs,
        ),
        Command::Tree2dep { io, jobs } => single(
            Annotator::Tree2dep,
            &io,
            ResourcePaths::default(),
            Options::default(),
            jobs.jobs,
        ),
        Command::Neg { io, jobs, neg } => single(
            Annotator::Neg,
            &io,
            ResourcePaths {
                neg_patterns: neg.neg_patterns,
                uncertainty_patterns: neg.uncertainty_patterns,
                ..Default::default()
            },
            Options::default(),
            jobs.jobs,
        ),
        Command::Collect { io, collect } => single(
            Annotator::Collect,
            &io,
            ResourcePaths {
                findings: collect.findings,
                ..Default::default()
            },
            Options {
                precedence: collect.precedence,
                ..Default::default()
            },
            1,
        ),
        Command::Csv2bioc {
            io,
            id_column,
            text_column,
            date,
        } => {
            let date = date.unwrap_or_else(cdm::today);
            cdm::check_date(&date)?;
            let c = cdm::csv2bioc(&read_text(&io.input)?, &id_column, &text_column, &date)?;
            pipeline::write_collection(&io.output, &c)
        }
        Command::Cdm2bioc { io, notes } => {
            let rows = cdm::read_note_nlp_csv(&read_text(&io.input)?)?;
            let notes = match notes {
                Some(p) => Some(cdm::read_notes_csv(&read_text(&p)?)?),
                None => None,
            };
            let c = cdm::cdm2bioc(&rows, notes.as_deref())?;
            pipeline::write_collection(&io.output, &c)
        }
        Command::Bioc2cdm { io } => {
            let c = pipeline::read_collection(&io.input)?;
            let rows = cdm::bioc2cdm(&c)?;
            pipeline::write_file(&io.output, cdm::write_note_nlp_csv(&rows)?.as_bytes())
        }
        Command::Download { output } => {
            let dir = output.unwrap_or_else(default_download_dir);
            let written = resources::download(&dir)?;
            eprintln!("{}: {} file(s) written", dir.display(), written.len());
            Ok(())
        }
        Command::Run {
            io,
            jobs,
            annotators,
            workdir,
            phi_rules,
            redact,
            section_titles,
            abbreviations,
            concepts,
            parse,
            neg,
            collect,
        } => {
            let config = PipelineConfig {
                annotators: parse_annotators(&annotators)?,
                paths: ResourcePaths {
                    phi_rules,
                    section_titles,
                    abbreviations,
                    concepts,
                    neg_patterns: neg.neg_patterns,
                    uncertainty_patterns: neg.uncertainty_patterns,
                    findings: collect.findings,
                },
                options: Options {
                    redact,
                    precedence: collect.precedence,
                    parse_source: parse_source(&parse)?,
                },
                input: io.input,
                output: io.output,
                workdir,
                jobs: jobs.jobs.into(),
            };
            pipeline::run(&config).map(|_| ())
        }
    }
}

/// Parse `args` (program name first) and run the command; returns the exit
/// code.
pub fn run_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("radtext: error: {e}");
            exit_code(&e)
        }
    }
}

/// Entry point of the `radtext` binary.
pub fn main() -> i32 {
    run_args(std::env::args_os())
}

/// Entry point of a `radtext-<command>` alias.
pub fn main_for(command: &str) -> i32 {
    let mut argv: Vec<OsString> = vec!["radtext".into(), command.into()];
    argv.extend(std::env::args_os().skip(1));
    run_args(argv)
}
