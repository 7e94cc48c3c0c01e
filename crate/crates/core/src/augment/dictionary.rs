use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::AugmentError;
use crate::annotation::{AnnotatedSentence, RESERVED};

/// One replaceable term, present in both modalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexiconEntry {
    pub spoken: String,
    pub sign: String,
}

impl LexiconEntry {
    pub fn new(spoken: impl Into<String>, sign: impl Into<String>) -> Result<Self, AugmentError> {
        let spoken = spoken.into().trim().to_string();
        let sign = sign.into().trim().to_string();
        if spoken.is_empty() || sign.is_empty() {
            return Err(AugmentError::InvalidEntry {
                spoken,
                message: "spoken and sign forms must be non-empty".into(),
            });
        }
        if spoken.contains("[a_") {
            return Err(AugmentError::InvalidEntry {
                spoken,
                message: "spoken form contains slot syntax".into(),
            });
        }
        if let Err(e) = sign.parse::<AnnotatedSentence>() {
            return Err(AugmentError::InvalidEntry {
                spoken,
                message: format!("sign form does not parse: {e}"),
            });
        }
        Ok(Self { spoken, sign })
    }

    /// Sign form as parsed elements.
    pub fn sign_sentence(&self) -> AnnotatedSentence {
        self.sign.parse().expect("validated at construction")
    }
}

/// A dictionary term found in running text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermMatch {
    /// Byte offsets into the searched text.
    pub start: usize,
    pub end: usize,
    pub category: usize,
    pub entry: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct Category {
    name: String,
    entries: Vec<LexiconEntry>,
}

/// Category lexicon driving synonym replacement. Categories and entries keep
/// their load order, which also breaks ties between equal-length matches.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<Category>", into = "Vec<Category>")]
pub struct DaDictionary {
    categories: Vec<Category>,
    index: HashMap<String, usize>,
    /// First character of each spoken form -> (length, category, entry),
    /// sorted longest first, then by load order.
    by_first_char: HashMap<char, Vec<(usize, usize, usize)>>,
}

impl From<Vec<Category>> for DaDictionary {
    fn from(categories: Vec<Category>) -> Self {
        let mut dict = DaDictionary::new();
        for c in categories {
            for e in c.entries {
                dict.insert_unchecked(&c.name, e);
            }
        }
        dict
    }
}

impl From<DaDictionary> for Vec<Category> {
    fn from(dict: DaDictionary) -> Self {
        dict.categories
    }
}

pub(crate) fn is_valid_category(name: &str) -> bool {
    !name.trim().is_empty() && !name.contains(RESERVED) && name.trim() == name
}

impl DaDictionary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, category: &str, entry: LexiconEntry) -> Result<(), AugmentError> {
        if !is_valid_category(category) {
            return Err(AugmentError::InvalidCategory {
                category: category.to_string(),
            });
        }
        self.insert_unchecked(category, entry);
        Ok(())
    }

    fn insert_unchecked(&mut self, category: &str, entry: LexiconEntry) {
        let ci = match self.index.get(category) {
            Some(&i) => i,
            None => {
                self.index.insert(category.to_string(), self.categories.len());
                self.categories.push(Category {
                    name: category.to_string(),
                    entries: Vec::new(),
                });
                self.categories.len() - 1
            }
        };
        let ei = self.categories[ci].entries.len();
        let first = entry.spoken.chars().next().expect("non-empty spoken form");
        let candidates = self.by_first_char.entry(first).or_default();
        candidates.push((entry.spoken.len(), ci, ei));
        // Stable sort keeps load order among equal lengths.
        candidates.sort_by_key(|c| std::cmp::Reverse(c.0));
        self.categories[ci].entries.push(entry);
    }

    /// Parses `category<TAB>spoken<TAB>sign` lines; `#` starts a comment line.
    pub fn from_tsv(text: &str) -> Result<Self, AugmentError> {
        let mut dict = Self::new();
        for (i, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |message: String| AugmentError::DictionaryLine { line: i + 1, message };
            if fields.len() != 3 {
                return Err(bad(format!("expected 3 tab-separated fields, found {}", fields.len())));
            }
            let entry = LexiconEntry::new(fields[1], fields[2]).map_err(|e| bad(e.to_string()))?;
            dict.insert(fields[0].trim(), entry).map_err(|e| bad(e.to_string()))?;
        }
        Ok(dict)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, AugmentError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| AugmentError::Io(format!("{}: {e}", path.display())))?;
        Self::from_tsv(&text)
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for c in &self.categories {
            for e in &c.entries {
                out.push_str(&format!("{}\t{}\t{}\n", c.name, e.spoken, e.sign));
            }
        }
        out
    }

    pub fn get(&self, category: &str) -> Option<&[LexiconEntry]> {
        self.index.get(category).map(|&i| self.categories[i].entries.as_slice())
    }

    pub fn category_index(&self, category: &str) -> Option<usize> {
        self.index.get(category).copied()
    }

    pub fn category_name(&self, index: usize) -> &str {
        &self.categories[index].name
    }

    pub fn entry(&self, category: usize, entry: usize) -> &LexiconEntry {
        &self.categories[category].entries[entry]
    }

    /// Category names in load order.
    pub fn categories(&self) -> impl Iterator<Item = &str> {
        self.categories.iter().map(|c| c.name.as_str())
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }

    pub fn entry_count(&self) -> usize {
        self.categories.iter().map(|c| c.entries.len()).sum()
    }

    /// Sub-dictionary holding only the `(category, entry index)` pairs
    /// listed, in this dictionary's order. Unknown bindings are ignored.
    pub fn restricted_to<'a, I>(&self, bindings: I) -> DaDictionary
    where
        I: IntoIterator<Item = &'a (String, usize)>,
    {
        let mut keep = std::collections::HashSet::new();
        for (category, index) in bindings {
            if let Some(ci) = self.category_index(category) {
                keep.insert((ci, *index));
            }
        }
        let mut out = DaDictionary::new();
        for (ci, c) in self.categories.iter().enumerate() {
            for (ei, e) in c.entries.iter().enumerate() {
                if keep.contains(&(ci, ei)) {
                    out.insert_unchecked(&c.name, e.clone());
                }
            }
        }
        out
    }

    /// Leftmost, longest, non-overlapping occurrences of spoken forms.
    ///
    /// A match must start and end on a word boundary (string edge or a
    /// non-alphanumeric neighbour). Existing `[a_..._a]` slots are skipped.
    pub fn find_terms(&self, text: &str) -> Vec<TermMatch> {
        let mut found = Vec::new();
        let mut pos = 0;
        while pos < text.len() {
            let rest = &text[pos..];
            if let Some(inner) = rest.strip_prefix("[a_") {
                if let Some(close) = inner.find("_a]") {
                    pos += 3 + close + 3;
                    continue;
                }
            }
            let ch = rest.chars().next().expect("pos on a char boundary");
            if boundary_before(text, pos) {
                if let Some(candidates) = self.by_first_char.get(&ch) {
                    let hit = candidates.iter().find(|&&(len, ci, ei)| {
                        rest.starts_with(self.categories[ci].entries[ei].spoken.as_str())
                            && boundary_after(text, pos + len)
                    });
                    if let Some(&(len, ci, ei)) = hit {
                        found.push(TermMatch {
                            start: pos,
                            end: pos + len,
                            category: ci,
                            entry: ei,
                        });
                        pos += len;
                        continue;
                    }
                }
            }
            pos += ch.len_utf8();
        }
        found
    }
}

pub(crate) fn boundary_before(text: &str, pos: usize) -> bool {
    text[..pos].chars().next_back().is_none_or(|c| !c.is_alphanumeric())
}

pub(crate) fn boundary_after(text: &str, pos: usize) -> bool {
    text[pos..].chars().next().is_none_or(|c| !c.is_alphanumeric())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dict() -> DaDictionary {
        DaDictionary::from_tsv(
            "# test\n\
             Disease name\tkidney\tkidney\n\
             Disease name\tkidney disease\tkidney disease\n\
             Family member\tbrother\tbrother\n\
             Body part\tkidney\tkidney-organ\n",
        )
        .unwrap()
    }

    /// Exhaustive oracle: enumerate every (start, end) span that equals some
    /// spoken form on word boundaries, then take leftmost-longest greedily,
    /// first-loaded wins among equal spans.
    fn brute_force(dict: &DaDictionary, text: &str) -> Vec<(usize, usize, usize, usize)> {
        let mut spans = Vec::new();
        let bounds: Vec<usize> = text.char_indices().map(|(i, _)| i).chain([text.len()]).collect();
        for &s in &bounds {
            for &e in &bounds {
                if e <= s {
                    continue;
                }
                let sub = &text[s..e];
                let mut order = 0;
                for ci in 0..dict.len() {
                    for (ei, entry) in dict.get(dict.category_name(ci)).unwrap().iter().enumerate() {
                        if entry.spoken == sub && boundary_before(text, s) && boundary_after(text, e) {
                            spans.push((s, e, ci, ei, order));
                        }
                        order += 1;
                    }
                }
            }
        }
        spans.sort_by_key(|&(s, e, _, _, order)| (s, std::cmp::Reverse(e), order));
        let mut out = Vec::new();
        let mut cursor = 0;
        for (s, e, ci, ei, _) in spans {
            if s >= cursor {
                out.push((s, e, ci, ei));
                cursor = e;
            }
        }
        out
    }

    #[test]
    fn longest_match_wins() {
        let d = dict();
        let text = "Is my brother suffering from kidney disease? kidney, kidneys";
        let got: Vec<_> = d
            .find_terms(text)
            .iter()
            .map(|m| (m.start, m.end, m.category, m.entry))
            .collect();
        assert_eq!(got, brute_force(&d, text));
        assert_eq!(&text[got[1].0..got[1].1], "kidney disease");
        // Equal-length tie goes to the first loaded entry.
        assert_eq!((got[2].2, got[2].3), (0, 0));
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn matches_agree_with_oracle_on_fixture_lines() {
        let d = dict();
        for text in [
            "kidney disease kidney disease",
            "brotherkidney",
            "brother-kidney disease.",
            "",
            "[a_Disease name_a] kidney",
            "kidney diseases",
        ] {
            let got: Vec<_> = d
                .find_terms(text)
                .iter()
                .map(|m| (m.start, m.end, m.category, m.entry))
                .collect();
            let slot_free = !text.contains("[a_");
            if slot_free {
                assert_eq!(got, brute_force(&d, text), "{text}");
            }
        }
        let got = d.find_terms("[a_Disease name_a] kidney");
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].start, 19);
    }

    #[test]
    fn tsv_errors_and_roundtrip() {
        let d = dict();
        assert_eq!(DaDictionary::from_tsv(&d.to_tsv()).unwrap(), d);
        assert!(matches!(
            DaDictionary::from_tsv("a\tb\n"),
            Err(AugmentError::DictionaryLine { line: 1, .. })
        ));
        assert!(matches!(
            DaDictionary::from_tsv("Bad/cat\tx\ty\n"),
            Err(AugmentError::DictionaryLine { line: 1, .. })
        ));
        assert!(matches!(
            DaDictionary::from_tsv("# c\nC\tx\t(unclosed\n"),
            Err(AugmentError::DictionaryLine { line: 2, .. })
        ));
    }

    #[test]
    fn restriction_keeps_order() {
        let d = dict();
        let r = d.restricted_to(&[("Family member".to_string(), 0), ("Disease name".to_string(), 1)]);
        assert_eq!(r.categories().collect::<Vec<_>>(), ["Disease name", "Family member"]);
        assert_eq!(r.get("Disease name").unwrap()[0].spoken, "kidney disease");
        assert_eq!(r.entry_count(), 2);
    }

    #[test]
    fn serde_roundtrip() {
        let d = dict();
        let json = serde_json::to_string(&d).unwrap();
        let back: DaDictionary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.find_terms("kidney disease").len(), 1);
    }
}
