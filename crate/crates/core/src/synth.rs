//! Seeded generator of small radiology reports with known finding labels
//! and planted PHI, for end-to-end checks and benchmarks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bioc::{BiocCollection, BiocDocument};
use crate::collect::{LabelRecord, LabelStatus};

/// A finding the generator can write about, with surface forms the bundled
/// vocabulary recognizes.
#[derive(Debug, Clone, Copy)]
pub struct SynthFinding {
    pub concept_id: &'static str,
    pub concept_name: &'static str,
    pub surfaces: &'static [&'static str],
}

pub const FINDINGS: [SynthFinding; 5] = [
    SynthFinding {
        concept_id: "C0264951",
        concept_name: "Calcification of the Aorta",
        surfaces: &[
            "calcification of the aorta",
            "aortic calcification",
            "calcified aortic knob",
        ],
    },
    SynthFinding {
        concept_id: "C0032297",
        concept_name: "Pneumomediastinum",
        surfaces: &["pneumomediastinum", "mediastinal emphysema"],
    },
    SynthFinding {
        concept_id: "C0032320",
        concept_name: "Pneumoperitoneum",
        surfaces: &[
            "pneumoperitoneum",
            "free intraperitoneal air",
            "subdiaphragmatic free air",
        ],
    },
    SynthFinding {
        concept_id: "C0038536",
        concept_name: "Subcutaneous Emphysema",
        surfaces: &["subcutaneous emphysema", "subcutaneous air", "soft tissue emphysema"],
    },
    SynthFinding {
        concept_id: "C1522460",
        concept_name: "Tortuous Aorta",
        surfaces: &[
            "tortuous aorta",
            "tortuosity of the thoracic aorta",
            "aortic tortuosity",
        ],
    },
];

pub const POSITIVE_TEMPLATES: &[&str] = &["There is {}.", "{} is noted.", "{} is seen.", "{}."];
pub const NEGATIVE_TEMPLATES: &[&str] = &[
    "There is no {}.",
    "No {}.",
    "No evidence of {}.",
    "{} is not seen.",
    "Negative for {}.",
];
pub const UNCERTAIN_TEMPLATES: &[&str] = &[
    "Possible {}.",
    "{} cannot be excluded.",
    "Findings suggest {}.",
    "Questionable {}.",
];
/// Two negated findings in one coordinated sentence.
pub const NEGATIVE_PAIR_TEMPLATE: &str = "There is no {} or {}.";

/// Whether `surface` may open the pair template. After a prepositional
/// phrase the built-in parser coordinates the second finding with the
/// prepositional object, out of reach of the leading "no".
pub fn pair_compatible(surface: &str) -> bool {
    !surface.split(' ').any(|w| w == "of")
}

const FILLER: &[&str] = &[
    "The lungs are clear.",
    "Heart size is normal.",
    "The cardiomediastinal silhouette is within normal limits.",
    "Osseous structures are intact.",
];

const SYLLABLES: &[&str] = &[
    "LA", "TTE", "MO", "NI", "KA", "SA", "VEM", "RO", "BER", "TIN", "DU", "PRE", "GAL", "HO", "WEN",
];
const MONTHS: &[&str] = &[
    "January",
    "February",
    "March",
    "April",
    "May",
    "June",
    "July",
    "August",
    "September",
    "October",
    "November",
    "December",
];

/// A planted PHI value and its character span in the report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantedPhi {
    pub category: &'static str,
    pub offset: usize,
    pub value: String,
}

#[derive(Debug, Clone)]
pub struct SyntheticReport {
    pub id: String,
    pub text: String,
    /// Status of every generated finding, in [`FINDINGS`] order.
    pub gold: Vec<LabelStatus>,
    pub phi: Vec<PlantedPhi>,
}

impl SyntheticReport {
    pub fn gold_records(&self) -> Vec<LabelRecord> {
        FINDINGS
            .iter()
            .zip(&self.gold)
            .map(|(f, s)| LabelRecord {
                doc_id: self.id.clone(),
                concept_id: f.concept_id.into(),
                concept_name: f.concept_name.into(),
                status: *s,
            })
            .collect()
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

/// Fill a template; a sentence-initial slot is capitalized.
pub fn fill(template: &str, surfaces: &[&str]) -> String {
    let mut out = String::new();
    let mut rest = template;
    let mut i = 0;
    while let Some(p) = rest.find("{}") {
        out.push_str(&rest[..p]);
        let s = surfaces[i];
        if out.is_empty() {
            out.push_str(&capitalize(s));
        } else {
            out.push_str(s);
        }
        rest = &rest[p + 2..];
        i += 1;
    }
    out.push_str(rest);
    out
}

fn name(rng: &mut ChaCha8Rng) -> String {
    let n = rng.gen_range(2..=3);
    (0..n).map(|_| *SYLLABLES.choose(rng).unwrap()).collect()
}

struct Builder {
    text: String,
    len: usize,
    phi: Vec<PlantedPhi>,
}

impl Builder {
    fn push(&mut self, s: &str) {
        self.text.push_str(s);
        self.len += s.chars().count();
    }

    fn plant(&mut self, category: &'static str, value: String) {
        self.phi.push(PlantedPhi {
            category,
            offset: self.len,
            value: value.clone(),
        });
        self.push(&value);
    }
}

/// Generate `n` reports from `seed`. Identical arguments give identical
/// reports.
pub fn generate_reports(n: usize, seed: u64) -> Vec<SyntheticReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|i| generate_one(&mut rng, i)).collect()
}

fn generate_one(rng: &mut ChaCha8Rng, index: usize) -> SyntheticReport {
    let mut b = Builder {
        text: String::new(),
        len: 0,
        phi: Vec::new(),
    };
    b.push("Patient's Name: ");
    b.plant("Person Name", format!("{}, {}", name(rng), name(rng)));
    b.push("\nReferred by: ");
    b.plant("Person Name", format!("{}, {}", name(rng), name(rng)));
    b.push(" MD\nDate Taken: ");
    let (m, d, y) = (rng.gen_range(1..=12), rng.gen_range(1..=28), rng.gen_range(2005..=2020));
    b.plant("Date", format!("{m:02}/{d:02}/{y}"));
    if rng.gen_bool(0.5) {
        b.push("\nMRN: ");
        b.plant("MRN", format!("{}", rng.gen_range(100_000..10_000_000)));
    }
    b.push("\n\nINDICATION: Please evaluate for pneumonia.\n");

    let statuses = [
        LabelStatus::Positive,
        LabelStatus::Negative,
        LabelStatus::Uncertain,
        LabelStatus::Absent,
    ];
    let gold: Vec<LabelStatus> = FINDINGS.iter().map(|_| *statuses.choose(rng).unwrap()).collect();
    let surface = |rng: &mut ChaCha8Rng, f: usize| *FINDINGS[f].surfaces.choose(rng).unwrap();

    let mut sentences: Vec<String> = Vec::new();
    let mut negatives: Vec<usize> = (0..FINDINGS.len())
        .filter(|&f| gold[f] == LabelStatus::Negative)
        .collect();
    negatives.shuffle(rng);
    while !negatives.is_empty() {
        if negatives.len() >= 2 && rng.gen_bool(0.4) {
            let (a, c) = (negatives.pop().unwrap(), negatives.pop().unwrap());
            let (sa, sc) = (surface(rng, a), surface(rng, c));
            if pair_compatible(sa) {
                sentences.push(fill(NEGATIVE_PAIR_TEMPLATE, &[sa, sc]));
            } else if pair_compatible(sc) {
                sentences.push(fill(NEGATIVE_PAIR_TEMPLATE, &[sc, sa]));
            } else {
                for s in [sa, sc] {
                    let t = *NEGATIVE_TEMPLATES.choose(rng).unwrap();
                    sentences.push(fill(t, &[s]));
                }
            }
        } else {
            let f = negatives.pop().unwrap();
            let t = *NEGATIVE_TEMPLATES.choose(rng).unwrap();
            let s = surface(rng, f);
            sentences.push(fill(t, &[s]));
        }
    }
    for (f, status) in gold.iter().enumerate() {
        let templates = match status {
            LabelStatus::Positive => POSITIVE_TEMPLATES,
            LabelStatus::Uncertain => UNCERTAIN_TEMPLATES,
            _ => continue,
        };
        let t = *templates.choose(rng).unwrap();
        let s = surface(rng, f);
        sentences.push(fill(t, &[s]));
    }
    sentences.push(FILLER.choose(rng).unwrap().to_string());
    sentences.shuffle(rng);

    b.push("FINDINGS: ");
    b.push(&sentences.join(" "));
    if rng.gen_bool(0.5) {
        b.push(" Comparison is made to the study of ");
        let month = *MONTHS.choose(rng).unwrap();
        b.plant(
            "Date",
            format!("{month} {}, {}", rng.gen_range(1..=28), rng.gen_range(2005..=2020)),
        );
        b.push(".");
    }
    b.push("\nIMPRESSION: No acute cardiopulmonary process.");

    SyntheticReport {
        id: format!("synth{:04}", index + 1),
        text: b.text,
        gold,
        phi: b.phi,
    }
}

/// One raw-text document per report.
pub fn reports_collection(reports: &[SyntheticReport]) -> BiocCollection {
    let mut c = BiocCollection::new("synthetic", "2024-01-01");
    c.documents = reports
        .iter()
        .map(|r| BiocDocument::from_text(r.id.as_str(), r.text.as_str()))
        .collect();
    c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Micro-averaged scores over non-absent labels: a predicted label counts
/// when the gold table has the same document, finding and status.
pub fn score(gold: &[LabelRecord], predicted: &[LabelRecord]) -> Scores {
    let key = |r: &LabelRecord| (r.doc_id.clone(), r.concept_id.clone(), r.status);
    let gold: std::collections::HashSet<_> = gold
        .iter()
        .filter(|r| r.status != LabelStatus::Absent)
        .map(key)
        .collect();
    let pred: std::collections::HashSet<_> = predicted
        .iter()
        .filter(|r| r.status != LabelStatus::Absent)
        .map(key)
        .collect();
    let tp = gold.intersection(&pred).count() as f64;
    let ratio = |n: f64, d: usize| if d == 0 { 1.0 } else { n / d as f64 };
    let precision = ratio(tp, pred.len());
    let recall = ratio(tp, gold.len());
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Scores { precision, recall, f1 }
}
