//! Synonym-replacement augmentation over parallel templates.
//!
//! A template is a spoken sentence and its annotation, both carrying aligned
//! `[a_<Category>_a]` slots. Expansion takes the Cartesian product of the
//! category lexicons and writes each entry's spoken form into the source and
//! its sign form into the target.
//!
//! The other three easy-data-augmentation operations live in [`eda`]; they
//! treat an annotation element as the atomic unit so that the annotation
//! structure survives.

mod dictionary;
pub mod eda;

use std::collections::HashMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::{AnnotatedSentence, AnnotationError};

pub use dictionary::{DaDictionary, LexiconEntry, TermMatch};

pub const SLOT_OPEN: &str = "[a_";
pub const SLOT_CLOSE: &str = "_a]";

/// `(category, entry index)` used to fill one slot.
pub type Binding = (String, usize);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AugmentError {
    #[error("template {id}: slot categories differ between source {source_slots:?} and target {target_slots:?}")]
    SlotMismatch {
        id: String,
        source_slots: Vec<String>,
        target_slots: Vec<String>,
    },
    #[error("template {id}: unterminated slot at byte {offset}")]
    MalformedSlot { id: String, offset: usize },
    #[error("template {id}: invalid slot category '{category}'")]
    InvalidSlotCategory { id: String, category: String },
    #[error("template {id}: empty {side} text")]
    EmptyTemplate { id: String, side: &'static str },
    #[error("template {id}: target is not a valid annotation: {source}")]
    InvalidTarget { id: String, source: AnnotationError },
    #[error("template {id}: unknown category '{category}'")]
    UnknownCategory { id: String, category: String },
    #[error("template {id}: expansion {bindings:?} does not parse: {source}")]
    InvalidExpansion {
        id: String,
        bindings: Vec<Binding>,
        source: AnnotationError,
    },
    #[error("template {id}: expansion size overflows")]
    ExpansionOverflow { id: String },
    #[error("{} template(s) failed: {}", .0.len(), .0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
    Corpus(Vec<AugmentError>),
    #[error("invalid lexicon entry '{spoken}': {message}")]
    InvalidEntry { spoken: String, message: String },
    #[error("invalid category name '{category}'")]
    InvalidCategory { category: String },
    #[error("dictionary line {line}: {message}")]
    DictionaryLine { line: usize, message: String },
    #[error("template line {line}: {message}")]
    TemplateLine { line: usize, message: String },
    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),
    #[error("{0}")]
    Io(String),
}

/// A slot occurrence inside a template text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slot {
    pub category: String,
    /// Byte range of the whole `[a_..._a]` marker.
    pub start: usize,
    pub end: usize,
}

/// Finds slots left to right. An opener without its closer is an error.
pub fn extract_slots(text: &str, id: &str) -> Result<Vec<Slot>, AugmentError> {
    let mut slots = Vec::new();
    let mut pos = 0;
    while let Some(found) = text[pos..].find(SLOT_OPEN) {
        let start = pos + found;
        let body_start = start + SLOT_OPEN.len();
        let close = text[body_start..]
            .find(SLOT_CLOSE)
            .ok_or_else(|| AugmentError::MalformedSlot {
                id: id.to_string(),
                offset: start,
            })?;
        let category = &text[body_start..body_start + close];
        if !dictionary::is_valid_category(category) {
            return Err(AugmentError::InvalidSlotCategory {
                id: id.to_string(),
                category: category.to_string(),
            });
        }
        let end = body_start + close + SLOT_CLOSE.len();
        slots.push(Slot {
            category: category.to_string(),
            start,
            end,
        });
        pos = end;
    }
    Ok(slots)
}

pub fn slot_marker(category: &str) -> String {
    format!("{SLOT_OPEN}{category}{SLOT_CLOSE}")
}

/// Replaces each slot with the text returned for its position.
pub(crate) fn fill(text: &str, slots: &[Slot], mut fill_with: impl FnMut(usize) -> String) -> String {
    let mut out = String::with_capacity(text.len());
    let mut cursor = 0;
    for (k, slot) in slots.iter().enumerate() {
        out.push_str(&text[cursor..slot.start]);
        out.push_str(&fill_with(k));
        cursor = slot.end;
    }
    out.push_str(&text[cursor..]);
    out
}

/// A spoken/annotated sentence pair with aligned slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelTemplate {
    pub id: String,
    pub source: String,
    pub target: String,
    source_slots: Vec<Slot>,
    target_slots: Vec<Slot>,
    /// For each target slot, the source slot it pairs with.
    target_to_source: Vec<usize>,
}

impl ParallelTemplate {
    /// Slot categories of the source side, left to right.
    pub fn source_slots(&self) -> Vec<&str> {
        self.source_slots.iter().map(|s| s.category.as_str()).collect()
    }

    pub fn target_slots(&self) -> Vec<&str> {
        self.target_slots.iter().map(|s| s.category.as_str()).collect()
    }

    pub fn slot_count(&self) -> usize {
        self.source_slots.len()
    }

    /// Number of pairs [`expand_sr`] will produce with `dictionary`.
    pub fn expansion_size(&self, dictionary: &DaDictionary) -> Result<usize, AugmentError> {
        self.category_sizes(dictionary)?
            .into_iter()
            .try_fold(1usize, |acc, n| acc.checked_mul(n))
            .ok_or_else(|| AugmentError::ExpansionOverflow { id: self.id.clone() })
    }

    fn category_sizes(&self, dictionary: &DaDictionary) -> Result<Vec<usize>, AugmentError> {
        self.source_slots
            .iter()
            .map(|s| {
                dictionary
                    .get(&s.category)
                    .map(<[LexiconEntry]>::len)
                    .ok_or_else(|| AugmentError::UnknownCategory {
                        id: self.id.clone(),
                        category: s.category.clone(),
                    })
            })
            .collect()
    }
}

/// Builds a template, checking slot syntax and that both sides carry the
/// same multiset of categories. Category existence is checked at expansion.
pub fn parse_template(source: &str, target: &str, id: &str) -> Result<ParallelTemplate, AugmentError> {
    if source.trim().is_empty() {
        return Err(AugmentError::EmptyTemplate {
            id: id.to_string(),
            side: "source",
        });
    }
    if target.trim().is_empty() {
        return Err(AugmentError::EmptyTemplate {
            id: id.to_string(),
            side: "target",
        });
    }
    let source_slots = extract_slots(source, id)?;
    let target_slots = extract_slots(target, id)?;

    let mut src_sorted: Vec<&str> = source_slots.iter().map(|s| s.category.as_str()).collect();
    let mut tgt_sorted: Vec<&str> = target_slots.iter().map(|s| s.category.as_str()).collect();
    src_sorted.sort_unstable();
    tgt_sorted.sort_unstable();
    if src_sorted != tgt_sorted {
        return Err(AugmentError::SlotMismatch {
            id: id.to_string(),
            source_slots: source_slots.iter().map(|s| s.category.clone()).collect(),
            target_slots: target_slots.iter().map(|s| s.category.clone()).collect(),
        });
    }

    // k-th target occurrence of a category pairs with its k-th source occurrence.
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let target_to_source = target_slots
        .iter()
        .map(|t| {
            let k = seen.entry(t.category.as_str()).or_insert(0);
            let source_index = source_slots
                .iter()
                .enumerate()
                .filter(|(_, s)| s.category == t.category)
                .nth(*k)
                .map(|(i, _)| i)
                .expect("multisets are equal");
            *k += 1;
            source_index
        })
        .collect();

    // Placeholder gloss in every slot must give a valid annotation.
    let probe = fill(target, &target_slots, |_| "x".to_string());
    probe
        .parse::<AnnotatedSentence>()
        .map_err(|source| AugmentError::InvalidTarget {
            id: id.to_string(),
            source,
        })?;

    Ok(ParallelTemplate {
        id: id.to_string(),
        source: source.to_string(),
        target: target.to_string(),
        source_slots,
        target_slots,
        target_to_source,
    })
}

/// A concrete sentence pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelPair {
    pub id: String,
    pub template_id: String,
    pub source: String,
    pub target: AnnotatedSentence,
    /// One binding per source slot, in source order.
    pub bindings: Vec<Binding>,
}

/// Synonym replacement: every combination of lexicon entries over the
/// template's slots, in odometer order (last slot varies fastest).
///
/// Pair ids are `<template id>#<k>` with `k` the position in that order.
pub fn expand_sr(template: &ParallelTemplate, dictionary: &DaDictionary) -> Result<Vec<ParallelPair>, AugmentError> {
    let sizes = template.category_sizes(dictionary)?;
    let total = template.expansion_size(dictionary)?;
    let entries: Vec<&[LexiconEntry]> = template
        .source_slots
        .iter()
        .map(|s| dictionary.get(&s.category).expect("checked in category_sizes"))
        .collect();

    let mut pairs = Vec::with_capacity(total);
    let mut odometer = vec![0usize; sizes.len()];
    for k in 0..total {
        let source = fill(&template.source, &template.source_slots, |i| {
            entries[i][odometer[i]].spoken.clone()
        });
        let target_text = fill(&template.target, &template.target_slots, |j| {
            let i = template.target_to_source[j];
            entries[i][odometer[i]].sign.clone()
        });
        let bindings: Vec<Binding> = template
            .source_slots
            .iter()
            .zip(&odometer)
            .map(|(s, &e)| (s.category.clone(), e))
            .collect();
        let target = target_text
            .parse::<AnnotatedSentence>()
            .map_err(|source| AugmentError::InvalidExpansion {
                id: template.id.clone(),
                bindings: bindings.clone(),
                source,
            })?;
        pairs.push(ParallelPair {
            id: format!("{}#{k}", template.id),
            template_id: template.id.clone(),
            source,
            target,
            bindings,
        });

        for pos in (0..odometer.len()).rev() {
            odometer[pos] += 1;
            if odometer[pos] < sizes[pos] {
                break;
            }
            odometer[pos] = 0;
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationStats {
    pub original: usize,
    pub expanded: usize,
    pub factor: f64,
}

/// Expands every template, keeping template order. Fails as a whole if any
/// template fails, reporting all failures.
pub fn expand_corpus(
    templates: &[ParallelTemplate],
    dictionary: &DaDictionary,
) -> Result<(Vec<ParallelPair>, AugmentationStats), AugmentError> {
    let results: Vec<Result<Vec<ParallelPair>, AugmentError>> =
        templates.par_iter().map(|t| expand_sr(t, dictionary)).collect();
    let mut pairs = Vec::new();
    let mut errors = Vec::new();
    for result in results {
        match result {
            Ok(p) => pairs.extend(p),
            Err(e) => errors.push(e),
        }
    }
    if !errors.is_empty() {
        return Err(AugmentError::Corpus(errors));
    }
    let original = templates.len();
    let expanded = pairs.len();
    let factor = if original == 0 {
        0.0
    } else {
        expanded as f64 / original as f64
    };
    Ok((
        pairs,
        AugmentationStats {
            original,
            expanded,
            factor,
        },
    ))
}

#[derive(Debug, Deserialize, Serialize)]
struct TemplateLine {
    id: String,
    source: String,
    target: String,
}

/// Reads the JSON Lines template format (`id`, `source`, `target`).
pub fn read_templates(text: &str) -> Result<Vec<ParallelTemplate>, AugmentError> {
    let mut templates = Vec::new();
    let mut ids = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let bad = |message: String| AugmentError::TemplateLine { line: i + 1, message };
        let raw: TemplateLine = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        if let Some(prev) = ids.insert(raw.id.clone(), i + 1) {
            return Err(bad(format!("duplicate id '{}' (first on line {prev})", raw.id)));
        }
        templates.push(parse_template(&raw.source, &raw.target, &raw.id).map_err(|e| bad(e.to_string()))?);
    }
    Ok(templates)
}

pub fn load_templates(path: impl AsRef<Path>) -> Result<Vec<ParallelTemplate>, AugmentError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| AugmentError::Io(format!("{}: {e}", path.display())))?;
    read_templates(&text)
}

pub fn write_templates(templates: &[ParallelTemplate]) -> String {
    templates
        .iter()
        .map(|t| {
            let line = TemplateLine {
                id: t.id.clone(),
                source: t.source.clone(),
                target: t.target.clone(),
            };
            serde_json::to_string(&line).expect("plain strings serialize") + "\n"
        })
        .collect()
}
