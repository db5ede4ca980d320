use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use radtext_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    rt_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = rt_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_str().unwrap().to_owned()
}

const NOTES: &str =
    "id,text\nr1,\"FINDINGS: There is no pneumothorax. The aorta is tortuous.\"\nr2,Heart size is normal.\n";

#[test]
fn csv_to_labels() {
    unsafe {
        let mut notes = ptr::null_mut();
        let csv = cstr(NOTES);
        let (id, text) = (cstr("id"), cstr("text"));
        assert_eq!(
            rt_collection_from_csv(csv.as_ptr(), id.as_ptr(), text.as_ptr(), ptr::null(), &mut notes),
            RtStatus::Ok
        );
        assert_eq!(rt_collection_document_count(notes), 2);

        let mut p = ptr::null_mut();
        let annotators = cstr("deid,secsplit,ssplit,ner,parse,tree2dep,neg,collect");
        assert_eq!(rt_pipeline_new(annotators.as_ptr(), ptr::null(), &mut p), RtStatus::Ok);
        let mut done = ptr::null_mut();
        assert_eq!(rt_pipeline_run(p, notes, &mut done), RtStatus::Ok);

        let mut labels = ptr::null_mut();
        assert_eq!(rt_pipeline_collect_labels_csv(p, done, &mut labels), RtStatus::Ok);
        let labels = take(labels);
        assert!(labels.contains("r1,C1522460,Tortuous Aorta,positive\n"), "{labels}");
        assert!(labels.contains("r2,C1522460,Tortuous Aorta,absent\n"), "{labels}");

        let mut xml = ptr::null_mut();
        assert_eq!(rt_collection_to_xml(done, &mut xml), RtStatus::Ok);
        let xml = cstr(&take(xml));
        let mut back = ptr::null_mut();
        assert_eq!(rt_collection_parse_xml(xml.as_ptr(), &mut back), RtStatus::Ok);
        assert!(rt_last_error_message().is_null());

        let mut rows = ptr::null_mut();
        assert_eq!(rt_collection_to_note_nlp_csv(back, &mut rows), RtStatus::Ok);
        let rows = take(rows);
        assert!(rows.starts_with("note_nlp_id,note_id,"));
        let rows_c = cstr(&rows);
        let mut rebuilt = ptr::null_mut();
        assert_eq!(
            rt_collection_from_note_nlp_csv(rows_c.as_ptr(), ptr::null(), &mut rebuilt),
            RtStatus::Ok
        );
        assert_eq!(rt_collection_document_count(rebuilt), 1);

        for c in [notes, done, back, rebuilt] {
            rt_collection_free(c);
        }
        rt_pipeline_free(p);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut c = ptr::null_mut();
        let bad = cstr("<collection><source>");
        assert_eq!(rt_collection_parse_xml(bad.as_ptr(), &mut c), RtStatus::Xml);
        assert!(c.is_null());
        assert!(last_error().contains("XML"), "{}", last_error());

        assert_eq!(rt_collection_parse_xml(ptr::null(), &mut c), RtStatus::NullArgument);
        let xml = cstr("<collection/>");
        assert_eq!(
            rt_collection_parse_xml(xml.as_ptr(), ptr::null_mut()),
            RtStatus::NullArgument
        );

        let mut p = ptr::null_mut();
        let order = cstr("ner,neg");
        assert_eq!(
            rt_pipeline_new(order.as_ptr(), ptr::null(), &mut p),
            RtStatus::PipelineOrder
        );
        let unknown = cstr("deid,frob");
        assert_eq!(rt_pipeline_new(unknown.as_ptr(), ptr::null(), &mut p), RtStatus::Config);
        assert!(p.is_null());

        let csv = cstr("id,body\n1,x\n");
        let (id, text, date) = (cstr("id"), cstr("text"), cstr("2024-02-30"));
        assert_eq!(
            rt_collection_from_csv(csv.as_ptr(), id.as_ptr(), text.as_ptr(), ptr::null(), &mut c),
            RtStatus::Config
        );
        let body = cstr("body");
        assert_eq!(
            rt_collection_from_csv(csv.as_ptr(), id.as_ptr(), body.as_ptr(), date.as_ptr(), &mut c),
            RtStatus::Config
        );

        let invalid = [0xffu8, 0];
        assert_eq!(
            rt_collection_parse_xml(invalid.as_ptr().cast(), &mut c),
            RtStatus::InvalidUtf8
        );

        rt_collection_free(ptr::null_mut());
        rt_pipeline_free(ptr::null_mut());
        rt_string_free(ptr::null_mut());
        assert_eq!(rt_collection_document_count(ptr::null()), 0);
    }
}

#[test]
fn resource_directory_overrides() {
    let dir = tempfile::TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("findings.csv"),
        "concept_id,concept_name\nRID5352,Pneumothorax\n",
    )
    .unwrap();
    unsafe {
        let mut p = ptr::null_mut();
        let annotators = cstr("secsplit,ssplit,ner,parse,tree2dep,neg");
        let d = cstr(dir.path().to_str().unwrap());
        assert_eq!(rt_pipeline_new(annotators.as_ptr(), d.as_ptr(), &mut p), RtStatus::Ok);
        let csv = cstr(NOTES);
        let (id, text) = (cstr("id"), cstr("text"));
        let mut notes = ptr::null_mut();
        assert_eq!(
            rt_collection_from_csv(csv.as_ptr(), id.as_ptr(), text.as_ptr(), ptr::null(), &mut notes),
            RtStatus::Ok
        );
        let mut done = ptr::null_mut();
        assert_eq!(rt_pipeline_run(p, notes, &mut done), RtStatus::Ok);
        let mut labels = ptr::null_mut();
        assert_eq!(rt_pipeline_collect_labels_csv(p, done, &mut labels), RtStatus::Ok);
        let labels = take(labels);
        assert!(labels.contains("r1,RID5352,Pneumothorax,negative\n"), "{labels}");
        assert!(!labels.contains("Tortuous"));
        rt_collection_free(notes);
        rt_collection_free(done);
        rt_pipeline_free(p);

        let bad = dir.path().join("neg_patterns.tsv");
        std::fs::write(&bad, "nn1\t{lemma:/no/=f\n").unwrap();
        let mut p = ptr::null_mut();
        assert_eq!(
            rt_pipeline_new(annotators.as_ptr(), d.as_ptr(), &mut p),
            RtStatus::Resource
        );
        assert!(last_error().contains("neg_patterns.tsv"), "{}", last_error());
    }
}

/// target/<profile>/deps, where the test build leaves every crate type.
fn deps_dir() -> PathBuf {
    std::env::current_exe().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header_and_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = deps_dir().join("libradtext_ffi.a");
    assert!(lib.exists(), "{} missing", lib.display());
    let out = tempfile::TempDir::new().unwrap();
    let exe = out.path().join("smoke");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("cc not available");
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("note_nlp_id,"));
}
