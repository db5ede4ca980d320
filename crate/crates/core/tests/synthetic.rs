use radtext::bioc::BiocCollection;
use radtext::collect::{collect_labels, Finding, LabelStatus};
use radtext::pipeline::{process, Annotator, Options, ResourcePaths, Resources};
use radtext::synth::{
    fill, generate_reports, pair_compatible, reports_collection, score, FINDINGS, NEGATIVE_PAIR_TEMPLATE,
    NEGATIVE_TEMPLATES, POSITIVE_TEMPLATES, UNCERTAIN_TEMPLATES,
};

const STAGES: [Annotator; 7] = [
    Annotator::Deid,
    Annotator::Secsplit,
    Annotator::Ssplit,
    Annotator::Ner,
    Annotator::Parse,
    Annotator::Tree2dep,
    Annotator::Neg,
];

fn resources() -> Resources {
    let mut all = STAGES.to_vec();
    all.push(Annotator::Collect);
    Resources::load(&all, &ResourcePaths::default(), Options::default()).unwrap()
}

fn findings() -> Vec<Finding> {
    FINDINGS
        .iter()
        .map(|f| Finding {
            concept_id: f.concept_id.into(),
            concept_name: f.concept_name.into(),
        })
        .collect()
}

fn status_of(r: &Resources, sentence: &str, concept_id: &str) -> LabelStatus {
    let mut c = BiocCollection::new("t", "2024-01-01");
    c.documents.push(radtext::bioc::BiocDocument::from_text(
        "d",
        format!("FINDINGS: {sentence}"),
    ));
    let out = process(&c, &STAGES, r).unwrap();
    let recs = collect_labels(&out, &findings());
    recs.iter().find(|x| x.concept_id == concept_id).unwrap().status
}

#[test]
fn every_template_and_surface_is_labelled() {
    let r = resources();
    let mut failures = Vec::new();
    for f in FINDINGS {
        for s in f.surfaces {
            for (templates, want) in [
                (POSITIVE_TEMPLATES, LabelStatus::Positive),
                (NEGATIVE_TEMPLATES, LabelStatus::Negative),
                (UNCERTAIN_TEMPLATES, LabelStatus::Uncertain),
            ] {
                for t in templates {
                    let sentence = fill(t, &[s]);
                    let got = status_of(&r, &sentence, f.concept_id);
                    if got != want {
                        failures.push(format!("{sentence:?}: {got} (want {want})"));
                    }
                }
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn every_negated_pair_is_labelled() {
    let r = resources();
    let mut failures = Vec::new();
    for a in FINDINGS {
        for b in FINDINGS {
            if a.concept_id == b.concept_id {
                continue;
            }
            for sa in a.surfaces.iter().filter(|s| pair_compatible(s)) {
                for sb in b.surfaces {
                    let sentence = fill(NEGATIVE_PAIR_TEMPLATE, &[sa, sb]);
                    for id in [a.concept_id, b.concept_id] {
                        let got = status_of(&r, &sentence, id);
                        if got != LabelStatus::Negative {
                            failures.push(format!("{sentence:?} {id}: {got}"));
                        }
                    }
                }
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn generated_corpus_is_labelled_exactly() {
    let reports = generate_reports(200, 11);
    let r = resources();
    let out = process(&reports_collection(&reports), &STAGES, &r).unwrap();
    let predicted = collect_labels(&out, &findings());
    let gold: Vec<_> = reports.iter().flat_map(|r| r.gold_records()).collect();
    let mismatches: Vec<String> = gold
        .iter()
        .zip(&predicted)
        .filter(|(g, p)| g != p)
        .map(|(g, p)| format!("{} {}: gold {} got {}", g.doc_id, g.concept_id, g.status, p.status))
        .collect();
    assert!(mismatches.is_empty(), "{}", mismatches.join("\n"));
    assert_eq!(score(&gold, &predicted).f1, 1.0);
}
