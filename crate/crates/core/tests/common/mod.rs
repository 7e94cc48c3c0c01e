#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::Rng;

use signgloss::annotation::{AnnotatedSentence, AnnotationElement};
use signgloss::augment::{parse_template, DaDictionary, LexiconEntry, ParallelTemplate};

const LETTERS: &[char] = &['a', 'b', 'e', 'k', 'n', 'o', 's', 't', 'y', '-', '가', '나', '수'];
const CODES: &[&str] = &["BE", "HS", "HN", "PL", "X1"];

fn word(rng: &mut impl Rng) -> String {
    let len = rng.random_range(1..=6);
    let mut w: String = (0..len).map(|_| *LETTERS.choose(rng).unwrap()).collect();
    if rng.random_bool(0.15) {
        w.push('?');
    }
    w
}

fn phrase(rng: &mut impl Rng) -> String {
    let n = rng.random_range(1..=3);
    (0..n).map(|_| word(rng)).collect::<Vec<_>>().join(" ")
}

/// A valid sentence of one to six elements built from the constructors.
pub fn random_sentence(rng: &mut impl Rng) -> AnnotatedSentence {
    let n = rng.random_range(1..=6);
    let elements = (0..n)
        .map(|_| {
            if rng.random_bool(0.3) {
                AnnotationElement::icon(phrase(rng)).unwrap()
            } else {
                let tags = rng.random_range(0..=2);
                let codes: Vec<&str> = (0..tags).map(|_| *CODES.choose(rng).unwrap()).collect();
                AnnotationElement::gloss(phrase(rng), codes).unwrap()
            }
        })
        .collect();
    AnnotatedSentence::new(elements).unwrap()
}

pub fn family_dictionary() -> DaDictionary {
    DaDictionary::from_tsv(
        "Family member\tbrother\tbrother\n\
         Family member\tsister-in-law\tsister-in-law\n\
         Disease name\tkidney disease\tkidney disease\n\
         Disease name\tdiabetes\tdiabetes\n",
    )
    .unwrap()
}

pub fn family_template() -> ParallelTemplate {
    parse_template(
        "Is my [a_Family member_a] suffering from [a_Disease name_a]?",
        "[a_Family member_a] / [a_Disease name_a] / in-progress?",
        "fam",
    )
    .unwrap()
}

/// 609 one-slot templates over a 66-entry category and one template with
/// slots of 14 and 26 entries: 609 * 66 + 14 * 26 = 40,558 pairs.
pub fn synthetic_610() -> (Vec<ParallelTemplate>, DaDictionary) {
    let mut dictionary = DaDictionary::new();
    for (name, size) in [("Term", 66), ("Ward", 14), ("Drug", 26)] {
        for i in 0..size {
            let spoken = format!("{}{i}", name.to_lowercase());
            dictionary
                .insert(name, LexiconEntry::new(spoken.clone(), spoken).unwrap())
                .unwrap();
        }
    }
    let mut templates: Vec<ParallelTemplate> = (0..609)
        .map(|i| {
            parse_template(
                &format!("Sentence number {i} mentions [a_Term_a]."),
                &format!("number / {i} / [a_Term_a] / mention"),
                &format!("s{i:03}"),
            )
            .unwrap()
        })
        .collect();
    templates.push(
        parse_template(
            "Bring [a_Drug_a] to [a_Ward_a].",
            "[a_Ward_a] / [a_Drug_a] / bring",
            "s609",
        )
        .unwrap(),
    );
    (templates, dictionary)
}

pub fn sample_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample")
}
