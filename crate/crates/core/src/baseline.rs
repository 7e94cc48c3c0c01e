//! Template-memory translator.
//!
//! Dictionary terms in a spoken sentence are abstracted back to category
//! slots; the abstract pattern is looked up exactly and the stored target is
//! re-instantiated with the sign forms of the terms found in the input.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{AnnotatedSentence, AnnotationElement, AnnotationError};
use crate::augment::{slot_marker, DaDictionary, LexiconEntry, ParallelPair};
use crate::eval::Translator;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BaselineError {
    #[error("no stored pattern matches '{pattern}'")]
    NoMatch { pattern: String },
    #[error("target needs slot {slot} ({category}) but the input bound {bound}")]
    UnboundSlot {
        slot: usize,
        category: String,
        bound: usize,
    },
    #[error("re-instantiated target does not parse: {0}")]
    Annotation(#[from] AnnotationError),
    #[error("memory file: {0}")]
    Format(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// One element of an abstract target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetPiece {
    Elem(AnnotationElement),
    /// Filled with the sign form bound to source slot `binding`. `extra_tags`
    /// are non-manual codes the stored target carried on top of the sign
    /// form; they are re-attached to its last element.
    Slot {
        category: String,
        binding: usize,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        extra_tags: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryEntry {
    pub source: String,
    pub target: Vec<TargetPiece>,
    /// First training pair that produced this entry.
    pub origin: String,
}

impl MemoryEntry {
    /// Target in template notation, slots written as `[a_Category_a]`.
    pub fn target_template(&self) -> String {
        let parts: Vec<String> = self
            .target
            .iter()
            .map(|p| match p {
                TargetPiece::Elem(e) => e.to_string(),
                TargetPiece::Slot {
                    category, extra_tags, ..
                } => {
                    let tags: String = extra_tags.iter().map(|t| format!("[{t}]")).collect();
                    format!("{}{tags}", slot_marker(category))
                }
            })
            .collect();
        parts.join(" / ")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conflict {
    pub pattern: String,
    pub kept: String,
    pub rejected: String,
}

/// Abstract source pattern to abstract target, plus the dictionary used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationMemory {
    pub dictionary: DaDictionary,
    pub entries: BTreeMap<String, MemoryEntry>,
    pub conflicts: Vec<Conflict>,
}

/// A sentence with its dictionary terms replaced by slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abstraction {
    pub pattern: String,
    /// Entries bound to the slots, left to right.
    pub terms: Vec<(String, LexiconEntry)>,
}

fn normalize_spaces(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Replaces leftmost-longest dictionary terms by slots. Idempotent: slots
/// already present are left alone.
pub fn abstract_source(dictionary: &DaDictionary, text: &str) -> Abstraction {
    let text = normalize_spaces(text);
    let mut pattern = String::new();
    let mut terms = Vec::new();
    let mut last = 0;
    for m in dictionary.find_terms(&text) {
        let category = dictionary.category_name(m.category);
        pattern.push_str(&text[last..m.start]);
        pattern.push_str(&slot_marker(category));
        terms.push((category.to_string(), dictionary.entry(m.category, m.entry).clone()));
        last = m.end;
    }
    pattern.push_str(&text[last..]);
    Abstraction { pattern, terms }
}

/// Surface and tags of `target` start with those of `sign`; returns the
/// tags left over.
fn element_prefix(sign: &AnnotationElement, target: &AnnotationElement) -> Option<Vec<String>> {
    match (sign, target) {
        (AnnotationElement::Icon { description: a }, AnnotationElement::Icon { description: b }) if a == b => {
            Some(vec![])
        }
        (AnnotationElement::Gloss { surface: a, nms: na }, AnnotationElement::Gloss { surface: b, nms: nb })
            if a == b && nb.starts_with(na) =>
        {
            Some(nb[na.len()..].to_vec())
        }
        _ => None,
    }
}

/// Finds `sign` as a contiguous run of unclaimed target elements. Inner
/// elements must match exactly; the last may carry extra tags.
fn find_sign(
    target: &[AnnotationElement],
    claimed: &[bool],
    sign: &[AnnotationElement],
) -> Option<(usize, Vec<String>)> {
    if sign.is_empty() || sign.len() > target.len() {
        return None;
    }
    'start: for start in 0..=target.len() - sign.len() {
        if claimed[start..start + sign.len()].iter().any(|&c| c) {
            continue;
        }
        for (k, s) in sign.iter().enumerate().take(sign.len() - 1) {
            if s != &target[start + k] {
                continue 'start;
            }
        }
        if let Some(extra) = element_prefix(&sign[sign.len() - 1], &target[start + sign.len() - 1]) {
            return Some((start, extra));
        }
    }
    None
}

/// Abstracts a pair. Terms whose sign form cannot be located in the target
/// stay literal on the source side.
fn abstract_pair(dictionary: &DaDictionary, source: &str, target: &AnnotatedSentence) -> (String, Vec<TargetPiece>) {
    let text = normalize_spaces(source);
    let elements = target.elements();
    let mut claimed = vec![false; elements.len()];
    // Start index in the target, consumed length, binding index, extras.
    let mut placed: Vec<(usize, usize, usize, String, Vec<String>)> = Vec::new();
    let mut pattern = String::new();
    let mut last = 0;
    let mut binding = 0;
    for m in dictionary.find_terms(&text) {
        let entry = dictionary.entry(m.category, m.entry);
        let sign = entry.sign_sentence();
        let Some((start, extra)) = find_sign(elements, &claimed, sign.elements()) else {
            continue;
        };
        let category = dictionary.category_name(m.category).to_string();
        claimed[start..start + sign.len()].iter_mut().for_each(|c| *c = true);
        pattern.push_str(&text[last..m.start]);
        pattern.push_str(&slot_marker(&category));
        last = m.end;
        placed.push((start, sign.len(), binding, category, extra));
        binding += 1;
    }
    pattern.push_str(&text[last..]);

    placed.sort_by_key(|p| p.0);
    let mut pieces = Vec::new();
    let mut i = 0;
    let mut next = placed.into_iter().peekable();
    while i < elements.len() {
        match next.peek() {
            Some(p) if p.0 == i => {
                let (_, len, binding, category, extra_tags) = next.next().expect("peeked");
                pieces.push(TargetPiece::Slot {
                    category,
                    binding,
                    extra_tags,
                });
                i += len;
            }
            _ => {
                pieces.push(TargetPiece::Elem(elements[i].clone()));
                i += 1;
            }
        }
    }
    (pattern, pieces)
}

/// Entries of `dictionary` whose spoken form occurs in some source.
pub fn observed_lexicon<'a, I>(dictionary: &DaDictionary, sources: I) -> DaDictionary
where
    I: IntoIterator<Item = &'a str>,
{
    let mut seen = Vec::new();
    for source in sources {
        for m in dictionary.find_terms(&normalize_spaces(source)) {
            seen.push((dictionary.category_name(m.category).to_string(), m.entry));
        }
    }
    dictionary.restricted_to(&seen)
}

/// Builds a memory from training pairs. The memory only knows the
/// dictionary entries that occur in the training sources, so a term never
/// seen in training is not abstracted and its sentence will not match.
pub fn build_memory(train: &[ParallelPair], dictionary: &DaDictionary) -> TranslationMemory {
    let dictionary = observed_lexicon(dictionary, train.iter().map(|p| p.source.as_str()));
    let mut entries: BTreeMap<String, MemoryEntry> = BTreeMap::new();
    let mut conflicts = Vec::new();
    for pair in train {
        let (pattern, target) = abstract_pair(&dictionary, &pair.source, &pair.target);
        let entry = MemoryEntry {
            source: pattern.clone(),
            target,
            origin: pair.id.clone(),
        };
        match entries.get(&pattern) {
            None => {
                entries.insert(pattern, entry);
            }
            Some(kept) if kept.target != entry.target => conflicts.push(Conflict {
                pattern,
                kept: kept.target_template(),
                rejected: entry.target_template(),
            }),
            Some(_) => {}
        }
    }
    TranslationMemory {
        dictionary,
        entries,
        conflicts,
    }
}

impl TranslationMemory {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn translate(&self, sentence: &str) -> Result<AnnotatedSentence, BaselineError> {
        let abs = abstract_source(&self.dictionary, sentence);
        let entry = self.entries.get(&abs.pattern).ok_or_else(|| BaselineError::NoMatch {
            pattern: abs.pattern.clone(),
        })?;
        let mut elements = Vec::new();
        for piece in &entry.target {
            match piece {
                TargetPiece::Elem(e) => elements.push(e.clone()),
                TargetPiece::Slot {
                    category,
                    binding,
                    extra_tags,
                } => {
                    let (bound, term) = abs.terms.get(*binding).ok_or_else(|| BaselineError::UnboundSlot {
                        slot: *binding,
                        category: category.clone(),
                        bound: abs.terms.len(),
                    })?;
                    if bound != category {
                        return Err(BaselineError::UnboundSlot {
                            slot: *binding,
                            category: category.clone(),
                            bound: abs.terms.len(),
                        });
                    }
                    let mut sign = term.sign_sentence().into_elements();
                    if !extra_tags.is_empty() {
                        let last = sign.pop().expect("sign forms are non-empty");
                        let mut tags = last.nms().to_vec();
                        tags.extend(extra_tags.iter().cloned());
                        sign.push(AnnotationElement::gloss(last.text(), tags)?);
                    }
                    elements.extend(sign);
                }
            }
        }
        Ok(AnnotatedSentence::new(elements)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("memory serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self, BaselineError> {
        serde_json::from_str(text).map_err(|e| BaselineError::Format(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), BaselineError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| BaselineError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, BaselineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| BaselineError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }
}

impl Translator for TranslationMemory {
    type Error = BaselineError;

    fn translate_text(&self, source: &str) -> Result<String, BaselineError> {
        self.translate(source).map(|s| s.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{expand_sr, parse_template};

    fn dictionary() -> DaDictionary {
        DaDictionary::from_tsv(
            "Family member\tbrother\tbrother\n\
             Family member\tsister-in-law\tsister-in-law\n\
             Disease name\tkidney disease\tkidney disease\n\
             Disease name\tdiabetes\tdiabetes\n\
             Disease name\tkidney\tkidney\n\
             Disease name\tflu\tflu\n",
        )
        .unwrap()
    }

    fn family_pairs() -> Vec<ParallelPair> {
        let d = DaDictionary::from_tsv(
            "Family member\tbrother\tbrother\nFamily member\tsister-in-law\tsister-in-law\n\
             Disease name\tkidney disease\tkidney disease\nDisease name\tdiabetes\tdiabetes\n",
        )
        .unwrap();
        let t = parse_template(
            "Is my [a_Family member_a] suffering from [a_Disease name_a]?",
            "[a_Family member_a] / [a_Disease name_a] / in-progress?",
            "t1",
        )
        .unwrap();
        expand_sr(&t, &d).unwrap()
    }

    #[test]
    fn family_pairs_collapse_to_one_template() {
        let m = build_memory(&family_pairs(), &dictionary());
        assert_eq!(m.len(), 1);
        assert!(m.conflicts.is_empty());
        let entry = m.entries.values().next().unwrap();
        assert_eq!(
            entry.source,
            "Is my [a_Family member_a] suffering from [a_Disease name_a]?"
        );
        assert_eq!(
            entry.target_template(),
            "[a_Family member_a] / [a_Disease name_a] / in-progress?"
        );
    }

    #[test]
    fn held_out_recombination_translates() {
        let pairs = family_pairs();
        // Leave out brother + kidney disease.
        let train: Vec<_> = pairs.iter().filter(|p| p.id != "t1#0").cloned().collect();
        let m = build_memory(&train, &dictionary());
        let out = m.translate("Is my brother suffering from kidney disease?").unwrap();
        assert_eq!(out.to_string(), "brother / kidney disease / in-progress?");
        assert_eq!(out.to_string(), pairs[0].target.to_string());
    }

    #[test]
    fn unseen_term_is_no_match() {
        let m = build_memory(&family_pairs()[..1], &dictionary());
        assert!(m.translate("Is my brother suffering from kidney disease?").is_ok());
        assert!(matches!(
            m.translate("Is my brother suffering from diabetes?"),
            Err(BaselineError::NoMatch { .. })
        ));
    }

    #[test]
    fn verbatim_pairs_and_abstraction_idempotence() {
        let pair = ParallelPair {
            id: "v".into(),
            template_id: "v".into(),
            source: "Hello, doctor.".into(),
            target: "hello / doctor".parse().unwrap(),
            bindings: vec![],
        };
        let m = build_memory(std::slice::from_ref(&pair), &dictionary());
        assert_eq!(m.translate("Hello, doctor.").unwrap(), pair.target);
        let d = dictionary();
        let once = abstract_source(&d, "my brother has kidney disease and flu");
        assert_eq!(
            once.pattern,
            "my [a_Family member_a] has [a_Disease name_a] and [a_Disease name_a]"
        );
        assert_eq!(once.terms[1].1.spoken, "kidney disease");
        let twice = abstract_source(&d, &once.pattern);
        assert_eq!(twice.pattern, once.pattern);
        assert!(twice.terms.is_empty());
    }

    #[test]
    fn extra_tags_and_reordered_slots() {
        let d = dictionary();
        let pair = ParallelPair {
            id: "r".into(),
            template_id: "r".into(),
            source: "Does flu worry my brother?".into(),
            target: "brother / flu[BE] / worry?".parse().unwrap(),
            bindings: vec![],
        };
        let other = ParallelPair {
            id: "s".into(),
            template_id: "s".into(),
            source: "My sister-in-law has diabetes.".into(),
            target: "sister-in-law / diabetes / have".parse().unwrap(),
            bindings: vec![],
        };
        let clash = ParallelPair {
            target: "flu / brother / worry?".parse().unwrap(),
            id: "c".into(),
            ..pair.clone()
        };
        let m = build_memory(&[pair, other, clash], &d);
        assert_eq!(m.len(), 2);
        assert_eq!(m.conflicts.len(), 1);
        assert_eq!(
            m.conflicts[0].rejected,
            "[a_Disease name_a] / [a_Family member_a] / worry?"
        );
        let out = m.translate("Does diabetes worry my sister-in-law?").unwrap();
        assert_eq!(out.to_string(), "sister-in-law / diabetes[BE] / worry?");
    }

    #[test]
    fn memory_json_roundtrip() {
        let m = build_memory(&family_pairs(), &dictionary());
        let back = TranslationMemory::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), m.to_json());
    }
}
