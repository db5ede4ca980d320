//! Invariant checks shared by the property suite and the acceptance run.

use radtext::bioc::{parse_bioc_xml, serialize_bioc_xml, validate, BiocCollection, BiocDocument};
use radtext::cdm::{bioc2cdm, cdm2bioc, read_note_nlp_csv, write_note_nlp_csv, CdmNoteNlpRow};
use radtext::deid::{deidentify, PhiRule};
use radtext::depgraph::DepGraph;
use radtext::negdetect::{compile_pattern, match_pattern, PatternKind};
use radtext::synth::SyntheticReport;

use super::oracle::{self, Spec};

pub type Check = Result<(), String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

pub fn bioc_round_trip(c: &BiocCollection) -> Check {
    let v = validate(c);
    if !v.is_empty() {
        return Err(format!("generated collection invalid: {v:?}"));
    }
    let xml = serialize_bioc_xml(c).map_err(err)?;
    let back = parse_bioc_xml(&xml).map_err(err)?;
    if &back != c {
        return Err(format!(
            "round trip changed the collection\n{}",
            String::from_utf8_lossy(&xml)
        ));
    }
    Ok(())
}

/// rows -> CSV -> rows -> BioC -> XML -> BioC -> rows.
pub fn cdm_round_trip(rows: &[CdmNoteNlpRow]) -> Check {
    let csv = write_note_nlp_csv(rows).map_err(err)?;
    let read = read_note_nlp_csv(&csv).map_err(err)?;
    if read != rows {
        return Err(format!("CSV round trip changed rows\n{csv}"));
    }
    let c = cdm2bioc(&read, None).map_err(err)?;
    let v = validate(&c);
    if !v.is_empty() {
        return Err(format!("converted collection invalid: {v:?}"));
    }
    let xml = serialize_bioc_xml(&c).map_err(err)?;
    let c = parse_bioc_xml(&xml).map_err(err)?;
    let back = bioc2cdm(&c).map_err(err)?;
    // documents come out grouped by note, in order of first appearance
    let mut notes: Vec<&str> = Vec::new();
    for r in rows {
        if !notes.contains(&r.note_id.as_str()) {
            notes.push(&r.note_id);
        }
    }
    let mut rows = rows.to_vec();
    rows.sort_by_key(|r| notes.iter().position(|n| *n == r.note_id));
    if back != rows {
        return Err(format!("rows differ after conversion\nwant {rows:#?}\ngot {back:#?}"));
    }
    Ok(())
}

pub fn matcher_agrees(g: &DepGraph, spec: &Spec, anchor: &[usize]) -> Check {
    let src = spec.render();
    let p = compile_pattern(&src, "t", PatternKind::Negation).map_err(|e| format!("{src}: {e}"))?;
    let got: Vec<Vec<usize>> = match_pattern(&p, g, anchor).into_iter().map(|b| b.0).collect();
    let want = oracle::matches(spec, g, anchor);
    if got != want {
        return Err(format!(
            "{src} on {g:?} anchor {anchor:?}: matcher {got:?}, oracle {want:?}"
        ));
    }
    Ok(())
}

/// Renumbering the graph renumbers the bindings and nothing else.
pub fn matcher_permutation_invariant(g: &DepGraph, spec: &Spec, anchor: &[usize], perm: &[usize]) -> Check {
    let p = compile_pattern(&spec.render(), "t", PatternKind::Negation).map_err(err)?;
    let mut want: Vec<Vec<usize>> = match_pattern(&p, g, anchor)
        .into_iter()
        .map(|b| b.0.iter().map(|&i| perm[i - 1]).collect())
        .collect();
    want.sort();
    let moved: Vec<usize> = anchor.iter().map(|&i| perm[i - 1]).collect();
    let got: Vec<Vec<usize>> = match_pattern(&p, &oracle::permute(g, perm), &moved)
        .into_iter()
        .map(|b| b.0)
        .collect();
    if got != want {
        return Err(format!("permutation {perm:?} changed matches: {got:?} vs {want:?}"));
    }
    Ok(())
}

/// Length preserved, planted PHI masked, nothing masked outside a PHI
/// annotation.
pub fn deid_sound(report: &SyntheticReport, rules: &[PhiRule]) -> Check {
    let doc = BiocDocument::from_text(report.id.clone(), report.text.clone());
    let out = deidentify(&doc, rules);
    let before: Vec<char> = report.text.chars().collect();
    let after: Vec<char> = out.text().chars().collect();
    if before.len() != after.len() {
        return Err(format!("{}: length {} became {}", report.id, before.len(), after.len()));
    }
    let mut covered = vec![false; before.len()];
    for a in out.annotations() {
        for l in &a.locations {
            covered[l.offset..l.end()].iter_mut().for_each(|c| *c = true);
        }
    }
    for phi in &report.phi {
        let n = phi.value.chars().count();
        let span = &after[phi.offset..phi.offset + n];
        if !span.iter().all(|&c| c == 'X') {
            return Err(format!(
                "{}: {} {:?} left as {:?}",
                report.id,
                phi.category,
                phi.value,
                span.iter().collect::<String>()
            ));
        }
    }
    for (i, (b, a)) in before.iter().zip(&after).enumerate() {
        if b != a && !covered[i] {
            return Err(format!("{}: character {i} changed outside any annotation", report.id));
        }
    }
    Ok(())
}
