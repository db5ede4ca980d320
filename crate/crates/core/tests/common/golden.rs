//! Reconstructed report fragments and the exact annotations each stage must
//! produce on them.

use radtext::bioc::{
    parse_bioc_xml, serialize_bioc_xml, validate, BiocAnnotation, BiocCollection, BiocDocument, BiocSentence, Location,
};
use radtext::cdm::bioc2cdm;
use radtext::deid::{default_phi_rules, deidentify};
use radtext::depgraph::{attach_graph_numbered, parse_ptb, tree2dep, HeadRuleTable};
use radtext::negdetect::{default_patterns, detect};
use radtext::ner::{default_concept_vocab, match_concepts};
use radtext::secsplit::{default_section_vocab, split_sections};
use radtext::ssplit::{default_abbreviations, split_sentences};

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

pub type Check = Result<(), String>;

pub const HEADER: &str = "Patient's Name: LATTE, MONICA\n\
Referred by: SAVEM, CARL MD\n\
Date Taken: 02/07/2016\n\
Date of Report: 02/07/2016\n\
\n\
Clinical statement: Shortness of breath, wheezing, and bilateral lower extremity edema.\n\
Technique: AP and lateral chest radiographs.\n\
\n\
Comparison: July 18, 2015.";

pub const SECTIONED: &str = "INDICATION: Please evaluate for pneumonia, effusions, edema\n\
FINDINGS: The lungs are clear without consolidation, effusion or edema.\n\
IMPRESSION: No acute cardiopulmonary process.";

pub const PARAGRAPH: &str =
    "PA and lateral radiographs demonstrate clear lungs. Heart size is normal. There is no pneumothorax or pleural effusion.";

pub const NEGATED: &str = "There is no pneumonia or pneumothorax.";

/// Two coordinated findings under one negation cue.
pub const TREE: &str = "(S1 (S (S (NP (EX There)) (VP (VBZ is) (ADVP (RB no)) (NP  (NP) (JJ pleural) (NN effusion)) (CC or) (NP (NN pneumothorax))))) (. .))";
pub const TREE_SENTENCE: &str = "There is no pleural effusion or pneumothorax .";

fn substring(doc: &BiocDocument, loc: Location) -> String {
    doc.text().chars().skip(loc.offset).take(loc.length).collect()
}

/// Masked text, PHI categories, concept ids and offsets.
pub fn deid() -> Check {
    let doc = BiocDocument::from_text("report", HEADER);
    let out = deidentify(&doc, &default_phi_rules().map_err(|e| e.to_string())?);
    let p = &out.passages[0];
    ensure!(p.text.chars().count() == HEADER.chars().count(), "length changed");
    ensure!(
        p.text
            .starts_with("Patient's Name: XXXXXXXXXXXXX\nReferred by: XXXXXXXXXXX XX\nDate Taken: XXXXXXXXXX"),
        "masked header: {:?}",
        p.text
    );
    let mut got: Vec<(String, String, String, usize, usize)> = p
        .annotations
        .iter()
        .map(|a| {
            (
                a.text.clone(),
                a.infons.get("source_concept").unwrap_or_default().to_string(),
                a.infons.get("source_concept_id").unwrap_or_default().to_string(),
                a.locations[0].offset,
                a.locations[0].length,
            )
        })
        .collect();
    got.sort_by_key(|g| g.3);
    let s = |x: &str| x.to_string();
    let want = vec![
        (s("LATTE, MONICA"), s("Person Name"), s("C1547383"), 16, 13),
        (s("SAVEM, CARL"), s("Person Name"), s("C1547383"), 43, 11),
        (s("MD"), s("Degree/license/certificate"), s("C1547754"), 55, 2),
        (s("02/07/2016"), s("Date"), s("C1547350"), 70, 10),
        (s("02/07/2016"), s("Date"), s("C1547350"), 97, 10),
        (s("July 18, 2015"), s("Date"), s("C1547350"), 255, 13),
    ];
    ensure!(got == want, "PHI annotations {got:#?}");
    for a in &p.annotations {
        let loc = a.locations[0];
        ensure!(
            substring(&doc, loc) == a.text,
            "original text at {loc:?} is not {:?}",
            a.text
        );
        ensure!(
            substring(&out, loc).chars().all(|c| c == 'X'),
            "{:?} not masked",
            a.text
        );
    }
    Ok(())
}

pub fn secsplit() -> Check {
    let out = split_sections(
        &BiocDocument::from_text("report", SECTIONED),
        &default_section_vocab().map_err(|e| e.to_string())?,
    );
    let p = &out.passages;
    ensure!(p.len() == 6, "{} passages", p.len());
    let title = |i: usize, off: usize, text: &str, concept: &str, id: &str| -> Check {
        ensure!(
            p[i].offset == off && p[i].text == text,
            "passage {i}: {} {:?}",
            p[i].offset,
            p[i].text
        );
        ensure!(
            p[i].infons.get("section_concept") == Some(concept),
            "passage {i} concept {:?}",
            p[i].infons
        );
        ensure!(
            p[i].infons.get("section_concept_id") == Some(id),
            "passage {i} id {:?}",
            p[i].infons
        );
        Ok(())
    };
    title(0, 0, "INDICATION:", "clinical information section", "RID13166")?;
    title(2, 60, "FINDINGS:", "observations section", "RID28486")?;
    ensure!(
        p[1].offset == 12 && p[1].text.starts_with("Please evaluate for"),
        "indication body {:?}",
        p[1]
    );
    ensure!(
        p[3].offset == 70 && p[3].text.starts_with("The lungs are clear"),
        "findings body {:?}",
        p[3]
    );
    ensure!(p[3].text.ends_with("edema."), "findings body {:?}", p[3].text);
    Ok(())
}

pub fn ssplit() -> Check {
    let out = split_sentences(
        &BiocDocument::from_text("report", PARAGRAPH),
        &default_abbreviations().map_err(|e| e.to_string())?,
    );
    let got: Vec<(usize, &str)> = out.passages[0]
        .sentences
        .iter()
        .map(|s| (s.offset, s.text.as_str()))
        .collect();
    let want = vec![
        (0, "PA and lateral radiographs demonstrate clear lungs."),
        (52, "Heart size is normal."),
        (74, "There is no pneumothorax or pleural effusion."),
    ];
    ensure!(got == want, "sentences {got:?}");
    Ok(())
}

fn ner_doc() -> Result<BiocDocument, String> {
    let mut doc = BiocDocument::from_text("report", NEGATED);
    doc.passages[0].sentences.push(BiocSentence::new(0, NEGATED));
    Ok(match_concepts(
        &doc,
        &default_concept_vocab().map_err(|e| e.to_string())?,
    ))
}

pub fn ner() -> Check {
    let out = ner_doc()?;
    let got: Vec<(&str, &str, &str, Location)> = out
        .annotations()
        .map(|a| {
            (
                a.id.as_str(),
                a.infons.get("source_concept").unwrap_or_default(),
                a.infons.get("source_concept_id").unwrap_or_default(),
                a.locations[0],
            )
        })
        .collect();
    let want = vec![
        ("a1", "Pneumonia", "RID5350", Location::new(12, 9)),
        ("a2", "Pneumothorax", "RID5352", Location::new(25, 12)),
    ];
    ensure!(got == want, "concepts {got:?}");
    Ok(())
}

/// A concept annotation written by hand parses into the model.
pub fn bioc_snippet() -> Check {
    let xml = r#"<?xml version="1.0" encoding="UTF-8"?>
<collection><source>MetaMap</source><date>2022-01-14</date><key></key>
<infon key="nlp_system">MetaMap</infon>
<document><id>report</id>
<passage><offset>0</offset>
<text>There is no pneumonia or pneumothorax.</text>
<annotation id="a1">
  <infon key="source_concept">Pneumonia</infon>
  <infon key="source_concept_id">RID5350</infon>
  <location offset="12" length="9"/>
  <text>pneumonia</text>
</annotation>
</passage></document></collection>"#;
    let c = parse_bioc_xml(xml.as_bytes()).map_err(|e| e.to_string())?;
    let a = &c.documents[0].passages[0].annotations[0];
    ensure!(a.id == "a1", "id {}", a.id);
    ensure!(
        a.infons.get("source_concept_id") == Some("RID5350"),
        "infons {:?}",
        a.infons
    );
    ensure!(validate(&c).is_empty(), "violations {:?}", validate(&c));
    Ok(())
}

/// conj(T31, T33) and the negation cue inside the clause.
pub fn parse_tree() -> Check {
    let tree = parse_ptb(TREE).map_err(|e| e.to_string())?;
    let g = tree2dep(&tree, &HeadRuleTable::standard()).map_err(|e| e.to_string())?;
    g.validate().map_err(|e| e.to_string())?;
    let idx = |w: &str| g.nodes.iter().find(|n| n.word == w).map(|n| n.index).unwrap();
    let (eff, ptx, no) = (idx("effusion"), idx("pneumothorax"), idx("no"));
    let head = |d: usize| g.edges.iter().find(|e| e.dependent == d).unwrap();
    ensure!(
        head(ptx).governor == eff && head(ptx).label == "conj",
        "pneumothorax head {:?}",
        head(ptx)
    );
    ensure!(
        head(no).governor == eff,
        "\"no\" attaches to node {}",
        head(no).governor
    );
    ensure!(g.nodes.iter().any(|n| n.lemma == "no"), "no lemma \"no\"");

    let s = attach_graph_numbered(&BiocSentence::new(0, TREE_SENTENCE), &g, 27).map_err(|e| e.to_string())?;
    let text_of = |id: &str| s.annotations.iter().find(|a| a.id == id).map(|a| a.text.as_str());
    ensure!(text_of("T31") == Some("effusion"), "T31 {:?}", text_of("T31"));
    ensure!(text_of("T33") == Some("pneumothorax"), "T33 {:?}", text_of("T33"));
    let r = s.relations.iter().find(|r| r.id == "R33").ok_or("no relation R33")?;
    ensure!(r.infons.get("dependency") == Some("conj"), "R33 {:?}", r.infons);
    let nodes: Vec<(&str, &str)> = r.nodes.iter().map(|n| (n.refid.as_str(), n.role.as_str())).collect();
    ensure!(
        nodes == [("T33", "dependant"), ("T31", "governor")],
        "R33 nodes {nodes:?}"
    );
    Ok(())
}

/// Both findings negated by nn180, with the pattern written escaped.
pub fn negation() -> Check {
    let doc = radtext::depgraph::parse_document(&ner_doc()?);
    let doc = radtext::depgraph::tree2dep_document(&doc, &HeadRuleTable::standard()).map_err(|e| e.to_string())?;
    let out = detect(&doc, &default_patterns().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let concepts: Vec<&BiocAnnotation> = out.annotations().filter(|a| !a.infons.contains_key("tag")).collect();
    ensure!(concepts.len() == 2, "{} concepts", concepts.len());
    for a in &concepts {
        ensure!(
            a.infons.get("exists") == Some("False"),
            "{} exists {:?}",
            a.text,
            a.infons
        );
        ensure!(a.infons.get("negation") == Some("True"), "{} negation", a.text);
        ensure!(
            a.infons.get("negbio_pattern_id") == Some("nn180"),
            "{} pattern {:?}",
            a.text,
            a.infons
        );
        ensure!(
            a.infons.get("negbio_pattern_str") == Some("{}=f >{} {lemma:/no/}=k0"),
            "pattern string"
        );
    }
    let mut c = BiocCollection::new("NegBio", "2022-01-14");
    c.documents.push(out);
    let xml = String::from_utf8(serialize_bioc_xml(&c).map_err(|e| e.to_string())?).unwrap();
    ensure!(
        xml.contains(r#"<infon key="negbio_pattern_str">{}=f &gt;{} {lemma:/no/}=k0</infon>"#),
        "serialized pattern string missing"
    );
    Ok(())
}

/// The NOTE_NLP row for an aorta annotation deep in a report.
pub fn cdm() -> Check {
    let mut text = "x".repeat(518);
    text.push_str("tortuosity of the thoracic aorta.");
    let mut doc = BiocDocument::from_text("report", text);
    let mut a = BiocAnnotation::new("0", 518, "tortuosity of the thoracic aorta");
    for (k, v) in [
        ("source_concept_id", "C1522460"),
        ("source", "UMLS"),
        ("nlp_date", "2022-01-14"),
        ("nlp_system", "RadText"),
    ] {
        a.infons.insert(k, v);
    }
    ensure!(
        a.locations[0] == Location::new(518, 32),
        "location {:?}",
        a.locations[0]
    );
    doc.passages[0].annotations.push(a);
    let mut c = BiocCollection::new("t", "2023-01-01");
    c.documents.push(doc);
    ensure!(validate(&c).is_empty(), "{:?}", validate(&c));
    let rows = bioc2cdm(&c).map_err(|e| e.to_string())?;
    ensure!(rows.len() == 1, "{} rows", rows.len());
    let r = &rows[0];
    ensure!(r.note_nlp_id == "report.0" && r.note_id == "report", "ids {r:?}");
    ensure!(
        r.offset == 518 && r.lexical_variant == "tortuosity of the thoracic aorta",
        "span {r:?}"
    );
    ensure!(r.note_nlp_source_concept_id == "C1522460", "concept {r:?}");
    ensure!(r.nlp_system == "RadText" && r.nlp_date == "2022-01-14", "system {r:?}");
    ensure!(r.term_modifiers == "source=UMLS", "modifiers {r:?}");
    Ok(())
}

/// Sections feed the NOTE_NLP section column.
pub fn section_column() -> Check {
    let sections = default_section_vocab().map_err(|e| e.to_string())?;
    let doc = split_sections(&BiocDocument::from_text("r", "FINDINGS: No pneumothorax."), &sections);
    let doc = match_concepts(&doc, &default_concept_vocab().map_err(|e| e.to_string())?);
    let mut c = BiocCollection::new("t", "2023-01-01");
    c.documents.push(doc);
    let rows = bioc2cdm(&c).map_err(|e| e.to_string())?;
    ensure!(
        rows.len() == 1 && rows[0].section_concept_id == "RID28486",
        "rows {rows:?}"
    );
    Ok(())
}

pub fn all() -> Vec<(&'static str, Check)> {
    vec![
        ("bioc snippet", bioc_snippet()),
        ("deid", deid()),
        ("secsplit", secsplit()),
        ("ssplit", ssplit()),
        ("ner", ner()),
        ("parse tree", parse_tree()),
        ("negation", negation()),
        ("cdm", cdm()),
        ("section column", section_column()),
    ]
}
