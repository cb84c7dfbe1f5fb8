//! Sample dictionary and a seeded generator of synthetic radiology-style notes, for tests,
//! examples and benchmarks.

use std::io::{self, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::LocationHierarchy;
use crate::engine::Note;

/// Term file covering the vocabulary the generator uses.
pub const FIXTURE_TERMS: &str = include_str!("../data/fixture_terms.tsv");
/// Location hierarchy matching [`FIXTURE_TERMS`].
pub const FIXTURE_HIERARCHY: &str = include_str!("../data/fixture_hierarchy.tsv");

/// Average serialized JSONL line length; 10,330 notes come to about 18 MB.
pub const DEFAULT_MEAN_NOTE_BYTES: usize = 1742;

pub fn fixture_hierarchy() -> LocationHierarchy {
    LocationHierarchy::parse(FIXTURE_HIERARCHY, Path::new("fixture_hierarchy.tsv"))
        .expect("bundled hierarchy parses")
}

const FINDINGS: &[&str] = &[
    "pulmonary embolism",
    "filling defects",
    "pleural effusion",
    "atelectasis",
    "consolidation",
    "pneumonia",
    "nodules",
    "pneumothorax",
    "cardiomegaly",
    "emphysema",
    "lymphadenopathy",
    "thrombus",
    "pericardial effusion",
];
const HISTORY: &[&str] = &[
    "diabetes",
    "hypertension",
    "breast cancer",
    "dvt",
    "emphysema",
    "pneumonia",
];
const SYMPTOMS: &[&str] = &["dyspnea", "chest pain", "cough", "fever", "shortness of breath"];
const LOBES: &[&str] = &[
    "right upper lobe",
    "right middle lobe",
    "right lower lobe",
    "left upper lobe",
    "left lower lobe",
    "lingula",
];
const SEGMENTS: &[&str] = &[
    "superior segment",
    "anterior basal segment",
    "posterior basal segment",
    "lateral basal segment",
];
const SIZES: &[&str] = &["small", "large", "moderate", "mild", "severe", "tiny"];
const TIMING: &[&str] = &["acute", "chronic"];
const RELATIVES: &[&str] = &["Mother", "Father", "Sister", "Brother", "Grandmother", "Uncle"];
const FILLERS: &[&str] = &[
    "Heart size is normal.",
    "The airways are patent.",
    "The visualized upper abdomen is unremarkable.",
    "Osseous structures are intact.",
    "Image quality is adequate for interpretation.",
    "Dr. Lee reviewed the images with the team on the same day.",
    "Pt. tolerated the procedure well, i.e. no immediate complications.",
    "Comparison is made to the prior study from 3.5 months ago.",
];

struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn pick(&mut self, items: &[&'static str]) -> &'static str {
        items.choose(&mut self.rng).expect("non-empty list")
    }

    fn pick_other(&mut self, items: &[&'static str], not: &str) -> &'static str {
        loop {
            let x = self.pick(items);
            if x != not {
                return x;
            }
        }
    }

    fn positive_sentence(&mut self) -> String {
        let fact = self.pick(FINDINGS);
        let lobe = self.pick(LOBES);
        match self.rng.gen_range(0..4) {
            0 => format!("There is {} {fact} in the {lobe}.", self.pick(SIZES)),
            1 => format!(
                "{} {fact} is noted in the {} of the {}.",
                capitalize(self.pick(TIMING)),
                self.pick(SEGMENTS),
                self.pick(&LOBES[..5])
            ),
            2 => format!(
                "There are segmental and subsegmental filling defects in the {lobe}, {} of the right lower lobe, and subsegmental filling defect in the segment of the left lower lobe pulmonary arteries.",
                self.pick(SEGMENTS)
            ),
            _ => format!("{} {fact} within the {lobe}.", capitalize(self.pick(SIZES))),
        }
    }

    fn sentence(&mut self) -> String {
        let fact = self.pick(FINDINGS);
        let other = self.pick_other(FINDINGS, fact);
        let lobe = self.pick(LOBES);
        match self.rng.gen_range(0..18) {
            0..=2 => self.positive_sentence(),
            3 => format!("No {fact} is seen."),
            4 => format!("No {fact} or {other}."),
            5 => "No filling defects are seen to suggest pulmonary embolism.".to_string(),
            6 => "No filling defects are seen, suggesting pulmonary embolism.".to_string(),
            7 => format!("Findings suggest {fact} in the {lobe}."),
            8 => format!("{} has not been found.", capitalize(fact)),
            9 => format!("The previously seen {fact} has resolved."),
            10 => format!("Possible {fact} in the {lobe}."),
            11 => "No change in the pleural effusion.".to_string(),
            12 => format!("{} had {}.", self.pick(RELATIVES), self.pick(HISTORY)),
            13 => "No mediastinal, hilar, or axillary lymphadenopathy.".to_string(),
            14 => format!(
                "Patient denies {} or {}.",
                self.pick(SYMPTOMS),
                self.pick(SYMPTOMS)
            ),
            15 => format!("{} +.", capitalize(fact)),
            _ => self.pick(FILLERS).to_string(),
        }
    }

    fn note(&mut self, target: usize) -> String {
        let mut text = format!(
            "INDICATION: {}, assess for pulmonary embolism.\n\nFINDINGS:\n{}",
            self.pick(SYMPTOMS),
            self.positive_sentence()
        );
        let impression = format!("\n\nIMPRESSION:\n{}", self.positive_sentence());
        // id, keys and the escaped newlines of the JSON line
        let overhead = 30 + 6;
        while text.len() + impression.len() + overhead < target {
            text.push(if self.rng.gen_bool(0.2) { '\n' } else { ' ' });
            text.push_str(&self.sentence());
        }
        text.push_str(&impression);
        text
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Lazily generated notes `note-000001`, `note-000002`, ... Same seed, same notes.
pub fn synthetic_notes(n_notes: usize, seed: u64, mean_bytes: usize) -> impl Iterator<Item = Note> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    let spread = mean_bytes / 4;
    (1..=n_notes).map(move |i| {
        let target = g.rng.gen_range(mean_bytes - spread..=mean_bytes + spread);
        Note {
            id: format!("note-{i:06}"),
            text: g.note(target),
        }
    })
}

pub fn generate_synthetic_corpus(n_notes: usize, seed: u64) -> Vec<Note> {
    synthetic_notes(n_notes, seed, DEFAULT_MEAN_NOTE_BYTES).collect()
}

/// One `{"id": ..., "text": ...}` object per line. Returns the number of bytes written.
pub fn write_jsonl<W: Write>(mut out: W, notes: impl IntoIterator<Item = Note>) -> io::Result<u64> {
    let mut written = 0u64;
    for note in notes {
        let line = serde_json::to_string(&note).map_err(io::Error::other)?;
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
        written += line.len() as u64 + 1;
    }
    out.flush()?;
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        assert_eq!(generate_synthetic_corpus(5, 7), generate_synthetic_corpus(5, 7));
        assert_ne!(generate_synthetic_corpus(5, 7), generate_synthetic_corpus(5, 8));
    }

    #[test]
    fn ids_are_sequential() {
        let notes = generate_synthetic_corpus(3, 1);
        let ids: Vec<_> = notes.iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, ["note-000001", "note-000002", "note-000003"]);
    }

    #[test]
    fn line_sizes_track_the_mean() {
        let mut buf = Vec::new();
        let n = 400;
        let bytes = write_jsonl(&mut buf, generate_synthetic_corpus(n, 3)).unwrap();
        assert_eq!(bytes as usize, buf.len());
        let mean = bytes as f64 / n as f64;
        let target = DEFAULT_MEAN_NOTE_BYTES as f64;
        assert!((mean - target).abs() < target * 0.1, "mean line {mean}");
    }

    #[test]
    fn fixture_data_parses() {
        let mut lex = crate::Lexicon::base();
        lex.load_terms_str(FIXTURE_TERMS, Path::new("fixture_terms.tsv"))
            .unwrap();
        assert!(lex.lookup(&["right", "lower", "lobe"]).is_some());
        assert_eq!(fixture_hierarchy().parent_of("superior segment"), Some("right lower lobe"));
    }
}
