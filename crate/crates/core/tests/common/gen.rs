//! Proptest strategies for structurally valid collections and NOTE_NLP rows.

use proptest::prelude::*;

use radtext::bioc::{
    BiocAnnotation, BiocCollection, BiocDocument, BiocNode, BiocPassage, BiocRelation, BiocSentence, Infons,
    ROLE_DEPENDANT, ROLE_GOVERNOR,
};
use radtext::cdm::CdmNoteNlpRow;

/// Includes every character the serializer must escape, plus multi-byte text.
const CHARS: &[char] = &[
    'a', 'b', 'e', 'n', 'o', 'r', 't', 'A', 'Z', '0', '7', ' ', ' ', '.', ',', ':', '/', '-', '<', '>', '&', '"', '\'',
    '\n', '\r', '\t', 'é', 'ü', 'ß', '中', '文', '😀', '→',
];

pub fn text(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(CHARS), 0..max).prop_map(String::from_iter)
}

fn non_empty_text(max: usize) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(CHARS), 1..max).prop_map(String::from_iter)
}

pub fn infons() -> impl Strategy<Value = Infons> {
    prop::collection::vec(("[a-z_]{1,6}", text(12)), 0..3).prop_map(|kv| {
        let mut i = Infons::new();
        for (k, v) in kv {
            i.insert(k, v);
        }
        i
    })
}

pub fn date() -> impl Strategy<Value = String> {
    (1990u32..2031, 1u32..13, 1u32..29).prop_map(|(y, m, d)| format!("{y:04}-{m:02}-{d:02}"))
}

fn slice(text: &str, start: usize, len: usize) -> String {
    text.chars().skip(start).take(len).collect()
}

/// A span inside `[0, n)` chosen by two raw numbers; `None` if `n == 0`.
fn pick(n: usize, a: u16, b: u16) -> Option<(usize, usize)> {
    if n == 0 {
        return None;
    }
    let start = a as usize % n;
    Some((start, 1 + b as usize % (n - start)))
}

#[derive(Debug, Clone)]
struct PassageSpec {
    text: String,
    gap: usize,
    infons: Infons,
    anns: Vec<(u16, u16, Infons)>,
    cut: Option<u16>,
    sent_ann: Option<(u16, u16)>,
    relate: bool,
}

fn passage_spec() -> impl Strategy<Value = PassageSpec> {
    (
        text(40),
        0usize..4,
        infons(),
        prop::collection::vec((any::<u16>(), any::<u16>(), infons()), 0..4),
        prop::option::of(any::<u16>()),
        prop::option::of((any::<u16>(), any::<u16>())),
        any::<bool>(),
    )
        .prop_map(|(text, gap, infons, anns, cut, sent_ann, relate)| PassageSpec {
            text,
            gap,
            infons,
            anns,
            cut,
            sent_ann,
            relate,
        })
}

struct Ids(usize);

impl Ids {
    fn next(&mut self, prefix: &str) -> String {
        self.0 += 1;
        format!("{prefix}{}", self.0)
    }
}

fn relation(ids: &mut Ids, anns: &[BiocAnnotation]) -> BiocRelation {
    let mut r = BiocRelation::new(ids.next("R"));
    r.infons.insert("dependency", "dep");
    r.nodes.push(BiocNode::new(anns[1].id.clone(), ROLE_DEPENDANT));
    r.nodes.push(BiocNode::new(anns[0].id.clone(), ROLE_GOVERNOR));
    r
}

fn build_passage(spec: PassageSpec, offset: usize, ids: &mut Ids) -> BiocPassage {
    let n = spec.text.chars().count();
    let mut p = BiocPassage::new(offset, spec.text.clone());
    p.infons = spec.infons;
    for (a, b, infons) in spec.anns {
        if let Some((s, len)) = pick(n, a, b) {
            let mut ann = BiocAnnotation::new(ids.next("A"), offset + s, slice(&spec.text, s, len));
            ann.infons = infons;
            p.annotations.push(ann);
        }
    }
    if spec.relate && p.annotations.len() >= 2 {
        let r = relation(ids, &p.annotations);
        p.relations.push(r);
    }
    if let Some(cut) = spec.cut.filter(|_| n > 0) {
        let k = cut as usize % (n + 1);
        for (s, len) in [(0, k), (k, n - k)] {
            if len == 0 {
                continue;
            }
            let mut sent = BiocSentence::new(offset + s, slice(&spec.text, s, len));
            if let Some((a, b)) = spec.sent_ann {
                let (rs, rl) = pick(len, a, b).unwrap();
                sent.annotations.push(BiocAnnotation::new(
                    ids.next("S"),
                    offset + s + rs,
                    slice(&spec.text, s + rs, rl),
                ));
            }
            p.sentences.push(sent);
        }
    }
    p
}

pub fn document() -> impl Strategy<Value = BiocDocument> {
    ("[a-z0-9]{1,8}", infons(), prop::collection::vec(passage_spec(), 0..4)).prop_map(|(id, infons, specs)| {
        let mut doc = BiocDocument {
            id,
            infons,
            passages: Vec::new(),
        };
        let mut ids = Ids(0);
        let mut end = 0;
        for spec in specs {
            let offset = end + spec.gap;
            end = offset + spec.text.chars().count();
            doc.passages.push(build_passage(spec, offset, &mut ids));
        }
        doc
    })
}

pub fn collection() -> impl Strategy<Value = BiocCollection> {
    (
        text(12),
        date(),
        text(8),
        infons(),
        prop::collection::vec(document(), 0..4),
    )
        .prop_map(|(source, date, key, infons, mut documents)| {
            for (i, d) in documents.iter_mut().enumerate() {
                d.id = format!("{}-{i}", d.id);
            }
            BiocCollection {
                source,
                date,
                key,
                infons,
                documents,
            }
        })
}

fn cell() -> impl Strategy<Value = String> {
    prop_oneof![Just(String::new()), text(10)]
}

/// Rows with unique ids, note ids from a small pool, and a non-empty
/// lexical variant.
pub fn note_nlp_rows(size: impl Into<prop::collection::SizeRange>) -> impl Strategy<Value = Vec<CdmNoteNlpRow>> {
    let row = (
        0usize..6,
        non_empty_text(16),
        0usize..2000,
        (cell(), cell(), cell(), cell(), cell()),
        (
            cell(),
            prop_oneof![Just(String::new()), date()],
            cell(),
            prop::sample::select(&["", "True", "False"][..]),
            cell(),
        ),
    );
    prop::collection::vec(row, size).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (note, lexical_variant, offset, a, b))| CdmNoteNlpRow {
                note_nlp_id: if i % 3 == 0 {
                    format!("x{i}")
                } else {
                    format!("n{note}.{i}")
                },
                note_id: format!("n{note}"),
                section_concept_id: a.0,
                snippet: a.1,
                offset,
                lexical_variant,
                note_nlp_concept_id: a.2,
                note_nlp_source_concept_id: a.3,
                nlp_system: a.4,
                nlp_date: b.1,
                nlp_datetime: b.0,
                term_exists: b.3.to_string(),
                term_temporal: b.2,
                term_modifiers: b.4,
            })
            .collect()
    })
}
