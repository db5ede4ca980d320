//! C interface to radtext.
//!
//! Collections and pipelines are opaque handles owned by the caller and
//! released with their `_free` function. Strings returned through out
//! parameters are NUL-terminated UTF-8 and must be released with
//! [`rt_string_free`]. Every fallible call returns an [`RtStatus`]; on
//! failure [`rt_last_error_message`] describes the error.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::ptr;

use radtext::bioc::{parse_bioc_xml, serialize_bioc_xml, BiocCollection};
use radtext::cdm::{bioc2cdm, cdm2bioc, csv2bioc, read_note_nlp_csv, read_notes_csv, write_note_nlp_csv};
use radtext::collect::write_labels_csv;
use radtext::pipeline::{self, parse_annotators, Annotator, Options, ResourcePaths, Resources};
use radtext::resources;
use radtext::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Xml = 3,
    Schema = 4,
    Validation = 5,
    Conversion = 6,
    Config = 7,
    Csv = 8,
    Resource = 9,
    Pattern = 10,
    Parse = 11,
    PipelineOrder = 12,
    Stage = 13,
    Io = 14,
    Panic = 15,
}

impl From<&Error> for RtStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Xml { .. } => RtStatus::Xml,
            Error::Schema { .. } => RtStatus::Schema,
            Error::Validation(_) => RtStatus::Validation,
            Error::Conversion(_) => RtStatus::Conversion,
            Error::Config(_) => RtStatus::Config,
            Error::Csv { .. } => RtStatus::Csv,
            Error::Resource { .. } => RtStatus::Resource,
            Error::Pattern { .. } => RtStatus::Pattern,
            Error::Tree { .. } | Error::Conllu { .. } | Error::Graph(_) | Error::Alignment(_) => RtStatus::Parse,
            Error::PipelineOrder(_) => RtStatus::PipelineOrder,
            Error::Stage { .. } => RtStatus::Stage,
            Error::Io { .. } => RtStatus::Io,
        }
    }
}

/// An annotated document collection.
pub struct RtCollection {
    inner: BiocCollection,
}

/// A checked annotator sequence with its resources loaded.
pub struct RtPipeline {
    annotators: Vec<Annotator>,
    resources: Resources,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(RtStatus::from(&e), e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

/// Run `f`, recording its error and turning panics into a status.
fn guard(f: impl FnOnce() -> Outcome<()>) -> RtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RtStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal error: panic inside radtext".into());
            RtStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(Failure(RtStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(RtStatus::InvalidUtf8, format!("{what} is not UTF-8: {e}")))
}

unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Outcome<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        text(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Outcome<&'a T> {
    p.as_ref()
        .ok_or_else(|| Failure(RtStatus::NullArgument, format!("{what} is null")))
}

fn check_out<T>(out: *mut *mut T) -> Outcome<()> {
    if out.is_null() {
        return Err(Failure(RtStatus::NullArgument, "output pointer is null".into()));
    }
    Ok(())
}

unsafe fn give_collection(out: *mut *mut RtCollection, c: BiocCollection) {
    *out = Box::into_raw(Box::new(RtCollection { inner: c }));
}

unsafe fn give_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    let c = CString::new(s).map_err(|_| Failure(RtStatus::Conversion, "output contains a NUL character".into()))?;
    *out = c.into_raw();
    Ok(())
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next radtext call on the same thread.
#[no_mangle]
pub extern "C" fn rt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn rt_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse BioC XML.
///
/// # Safety
/// `xml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_collection_parse_xml(xml: *const c_char, out: *mut *mut RtCollection) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let c = parse_bioc_xml(text(xml, "xml")?.as_bytes())?;
        give_collection(out, c);
        Ok(())
    })
}

/// Build a collection from a CSV of notes. `date` may be null for today.
///
/// # Safety
/// String arguments must be NUL-terminated or, where allowed, null; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_collection_from_csv(
    csv: *const c_char,
    id_column: *const c_char,
    text_column: *const c_char,
    date: *const c_char,
    out: *mut *mut RtCollection,
) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let today = radtext::cdm::today();
        let date = optional_text(date, "date")?.unwrap_or(&today);
        let c = csv2bioc(
            text(csv, "csv")?,
            text(id_column, "id_column")?,
            text(text_column, "text_column")?,
            date,
        )?;
        give_collection(out, c);
        Ok(())
    })
}

/// Rebuild a collection from NOTE_NLP CSV. `notes_csv` (columns
/// note_id,note_text) may be null.
///
/// # Safety
/// String arguments must be NUL-terminated or null where allowed; `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_collection_from_note_nlp_csv(
    rows_csv: *const c_char,
    notes_csv: *const c_char,
    out: *mut *mut RtCollection,
) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let rows = read_note_nlp_csv(text(rows_csv, "rows_csv")?)?;
        let notes = optional_text(notes_csv, "notes_csv")?.map(read_notes_csv).transpose()?;
        let c = cdm2bioc(&rows, notes.as_deref())?;
        give_collection(out, c);
        Ok(())
    })
}

/// Serialize to BioC XML.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_collection_to_xml(c: *const RtCollection, out: *mut *mut c_char) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let bytes = serialize_bioc_xml(&handle(c, "collection")?.inner)?;
        give_string(out, String::from_utf8(bytes).expect("serializer writes UTF-8"))
    })
}

/// Export annotations as NOTE_NLP CSV.
///
/// # Safety
/// `c` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rt_collection_to_note_nlp_csv(c: *const RtCollection, out: *mut *mut c_char) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let rows = bioc2cdm(&handle(c, "collection")?.inner)?;
        give_string(out, write_note_nlp_csv(&rows)?)
    })
}

/// Number of documents; 0 for a null handle.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rt_collection_document_count(c: *const RtCollection) -> usize {
    c.as_ref().map_or(0, |c| c.inner.documents.len())
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rt_collection_free(c: *mut RtCollection) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

fn paths_in(dir: &Path) -> ResourcePaths {
    let file = |name: &str| -> Option<PathBuf> { Some(dir.join(name)).filter(|p| p.exists()) };
    ResourcePaths {
        phi_rules: file(resources::PHI_RULES),
        section_titles: file(resources::SECTION_TITLES),
        abbreviations: file(resources::ABBREVIATIONS),
        concepts: file(resources::CONCEPTS),
        neg_patterns: file(resources::NEG_PATTERNS),
        uncertainty_patterns: file(resources::UNCERTAINTY_PATTERNS),
        findings: file(resources::FINDINGS),
    }
}

/// Check an annotator list such as "deid,secsplit,ssplit,ner,parse,tree2dep,neg"
/// and load its resources. Files present in `resource_dir` (may be null)
/// replace the built-in ones.
///
/// # Safety
/// `annotators` must be NUL-terminated; `resource_dir` NUL-terminated or
/// null; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rt_pipeline_new(
    annotators: *const c_char,
    resource_dir: *const c_char,
    out: *mut *mut RtPipeline,
) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let annotators = parse_annotators(text(annotators, "annotators")?)?;
        pipeline::check_order(&annotators)?;
        let paths = optional_text(resource_dir, "resource_dir")?
            .map(|d| paths_in(Path::new(d)))
            .unwrap_or_default();
        // findings are always loaded so labels can be collected
        let mut needed = annotators.clone();
        if !needed.contains(&Annotator::Collect) {
            needed.push(Annotator::Collect);
        }
        let resources = Resources::load(&needed, &paths, Options::default())?;
        *out = Box::into_raw(Box::new(RtPipeline { annotators, resources }));
        Ok(())
    })
}

/// Apply the pipeline's document stages to a copy of `input`.
///
/// # Safety
/// `p` and `input` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rt_pipeline_run(
    p: *const RtPipeline,
    input: *const RtCollection,
    out: *mut *mut RtCollection,
) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p, "pipeline")?;
        let c = pipeline::process(&handle(input, "collection")?.inner, &p.annotators, &p.resources)?;
        give_collection(out, c);
        Ok(())
    })
}

/// Document-by-finding labels of an annotated collection, as CSV.
///
/// # Safety
/// `p` and `c` must be live handles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rt_pipeline_collect_labels_csv(
    p: *const RtPipeline,
    c: *const RtCollection,
    out: *mut *mut c_char,
) -> RtStatus {
    guard(|| {
        check_out(out)?;
        let p = handle(p, "pipeline")?;
        let records = pipeline::collect_labels(&handle(c, "collection")?.inner, &p.resources);
        give_string(out, write_labels_csv(&records)?)
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rt_pipeline_free(p: *mut RtPipeline) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}
