//! Corpus files, rule-based filtering, deterministic splits and statistics.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::annotation::AnnotatedSentence;
use crate::augment::{Binding, ParallelPair};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{path}:{line}: {message}")]
    MalformedLine { path: String, line: usize, message: String },
    #[error("{path}: duplicate id '{id}' on lines {first} and {second}")]
    DuplicateId {
        path: String,
        id: String,
        first: usize,
        second: usize,
    },
    #[error("invalid rule on line {line}: {message}")]
    InvalidRule { line: usize, message: String },
    #[error("invalid split ratios: {0}")]
    InvalidSpec(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    #[default]
    Unassigned,
    Train,
    Valid,
    Test,
}

impl Split {
    fn is_unassigned(&self) -> bool {
        *self == Split::Unassigned
    }
}

/// One line of a corpus file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusRecord {
    pub id: String,
    pub template_id: String,
    pub source: String,
    pub target: String,
    #[serde(default)]
    pub bindings: Vec<Binding>,
    #[serde(default, skip_serializing_if = "Split::is_unassigned")]
    pub split: Split,
}

impl CorpusRecord {
    pub fn to_pair(&self) -> ParallelPair {
        ParallelPair {
            id: self.id.clone(),
            template_id: self.template_id.clone(),
            source: self.source.clone(),
            target: self.target.parse().expect("validated on read"),
            bindings: self.bindings.clone(),
        }
    }
}

impl From<&ParallelPair> for CorpusRecord {
    fn from(pair: &ParallelPair) -> Self {
        Self {
            id: pair.id.clone(),
            template_id: pair.template_id.clone(),
            source: pair.source.clone(),
            target: pair.target.to_string(),
            bindings: pair.bindings.clone(),
            split: Split::Unassigned,
        }
    }
}

/// Parses and validates JSON Lines corpus text. `origin` names the source
/// in error messages.
pub fn parse_corpus(text: &str, origin: &str) -> Result<Vec<CorpusRecord>, DatasetError> {
    let mut records = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| DatasetError::MalformedLine {
            path: origin.to_string(),
            line: line_no,
            message,
        };
        let record: CorpusRecord = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        record
            .target
            .parse::<AnnotatedSentence>()
            .map_err(|e| malformed(format!("target: {e}")))?;
        if let Some(first) = seen.insert(record.id.clone(), line_no) {
            return Err(DatasetError::DuplicateId {
                path: origin.to_string(),
                id: record.id,
                first,
                second: line_no,
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<CorpusRecord>, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    parse_corpus(&text, &path.display().to_string())
}

/// Canonical JSON Lines text: one compact object per line, fixed field order.
pub fn corpus_to_string(records: &[CorpusRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_corpus(records: &[CorpusRecord], path: impl AsRef<Path>) -> Result<(), DatasetError> {
    let path = path.as_ref();
    std::fs::write(path, corpus_to_string(records)).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Grouping {
    #[default]
    ByRecord,
    ByTemplate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_ratio: f64,
    pub valid_ratio: f64,
    pub seed: u64,
    pub grouping: Grouping,
    /// When false records keep their input order (audit mode).
    pub shuffle: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_ratio: 0.70,
            valid_ratio: 0.20,
            seed: 0,
            grouping: Grouping::ByRecord,
            shuffle: true,
        }
    }
}

impl SplitSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        let ok = self.train_ratio > 0.0 && self.valid_ratio > 0.0 && self.train_ratio + self.valid_ratio < 1.0;
        if ok {
            Ok(())
        } else {
            Err(DatasetError::InvalidSpec(format!(
                "train {} valid {}",
                self.train_ratio, self.valid_ratio
            )))
        }
    }

    /// `(train, valid, test)` target sizes for `n` records: train and valid
    /// are floored, test takes the remainder.
    pub fn counts(&self, n: usize) -> (usize, usize, usize) {
        // The epsilon keeps exact products such as 0.7 * 10 from flooring low.
        let floor = |r: f64| ((r * n as f64) + 1e-9).floor() as usize;
        let train = floor(self.train_ratio).min(n);
        let valid = floor(self.valid_ratio).min(n - train);
        (train, valid, n - train - valid)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SplitResult {
    pub train: Vec<CorpusRecord>,
    pub valid: Vec<CorpusRecord>,
    pub test: Vec<CorpusRecord>,
}

impl SplitResult {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.train.len(), self.valid.len(), self.test.len())
    }
}

/// Splits a corpus deterministically.
///
/// Records are sorted by id and permuted with a seeded Fisher-Yates shuffle,
/// so the assignment does not depend on input order. Under by-template
/// grouping whole templates go, in shuffled order, to the split whose quota
/// is least filled.
pub fn split(corpus: &[CorpusRecord], spec: &SplitSpec) -> Result<SplitResult, DatasetError> {
    if corpus.is_empty() {
        return Err(DatasetError::EmptyCorpus);
    }
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<&CorpusRecord> = corpus.iter().collect();
    if spec.shuffle {
        order.sort_by(|a, b| a.id.cmp(&b.id));
        order.shuffle(&mut rng);
    }
    let (n_train, n_valid, _) = spec.counts(corpus.len());

    let assign = |r: &CorpusRecord, split: Split| CorpusRecord { split, ..r.clone() };
    let mut result = SplitResult::default();
    match spec.grouping {
        Grouping::ByRecord => {
            for (i, r) in order.into_iter().enumerate() {
                if i < n_train {
                    result.train.push(assign(r, Split::Train));
                } else if i < n_train + n_valid {
                    result.valid.push(assign(r, Split::Valid));
                } else {
                    result.test.push(assign(r, Split::Test));
                }
            }
        }
        Grouping::ByTemplate => {
            let mut groups: Vec<(&str, Vec<&CorpusRecord>)> = Vec::new();
            let mut index: HashMap<&str, usize> = HashMap::new();
            for r in order {
                let gi = *index.entry(r.template_id.as_str()).or_insert_with(|| {
                    groups.push((r.template_id.as_str(), Vec::new()));
                    groups.len() - 1
                });
                groups[gi].1.push(r);
            }
            let quotas = [n_train, n_valid, corpus.len() - n_train - n_valid];
            let mut filled = [0usize; 3];
            for (_, members) in groups {
                // Largest remaining deficit first; ties in train, valid, test order.
                let target = (0..3)
                    .max_by(|&a, &b| {
                        let da = quotas[a] as i64 - filled[a] as i64;
                        let db = quotas[b] as i64 - filled[b] as i64;
                        da.cmp(&db).then(b.cmp(&a))
                    })
                    .expect("three splits");
                filled[target] += members.len();
                let (split, bucket) = match target {
                    0 => (Split::Train, &mut result.train),
                    1 => (Split::Valid, &mut result.valid),
                    _ => (Split::Test, &mut result.test),
                };
                bucket.extend(members.into_iter().map(|r| assign(r, split)));
            }
        }
    }
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub spec: SplitSpec,
    pub seed: u64,
    pub total: usize,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub files: Vec<String>,
}

/// Writes `train.jsonl`, `valid.jsonl`, `test.jsonl` and `manifest.json`.
pub fn write_split(
    result: &SplitResult,
    spec: &SplitSpec,
    dir: impl AsRef<Path>,
) -> Result<SplitManifest, DatasetError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    for (name, records) in [
        ("train", &result.train),
        ("valid", &result.valid),
        ("test", &result.test),
    ] {
        let file = format!("{name}.jsonl");
        write_corpus(records, dir.join(&file))?;
        files.push(file);
    }
    let (train, valid, test) = result.counts();
    let manifest = SplitManifest {
        spec: *spec,
        seed: spec.seed,
        total: train + valid + test,
        train,
        valid,
        test,
        files,
    };
    let path: PathBuf = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    std::fs::write(&path, json).map_err(io_err(&path))?;
    Ok(manifest)
}

#[derive(Debug, Clone)]
pub enum RulePattern {
    Literal(String),
    Regex(Regex),
}

/// A deny rule over the spoken side. `re:` prefixes a regular expression;
/// anything else is a literal substring.
#[derive(Debug, Clone)]
pub struct DenyRule {
    pub raw: String,
    pub pattern: RulePattern,
}

impl DenyRule {
    pub fn parse(raw: &str) -> Result<Self, String> {
        let raw = raw.trim();
        if raw.is_empty() {
            return Err("empty rule".into());
        }
        let pattern = match raw.strip_prefix("re:") {
            Some(expr) => RulePattern::Regex(Regex::new(expr).map_err(|e| e.to_string())?),
            None => RulePattern::Literal(raw.to_string()),
        };
        Ok(Self {
            raw: raw.to_string(),
            pattern,
        })
    }

    pub fn matches(&self, text: &str) -> bool {
        match &self.pattern {
            RulePattern::Literal(s) => text.contains(s.as_str()),
            RulePattern::Regex(re) => re.is_match(text),
        }
    }
}

/// Reads a rule file: one rule per line, `#` comments.
pub fn parse_rules(text: &str) -> Result<Vec<DenyRule>, DatasetError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| DenyRule::parse(l).map_err(|message| DatasetError::InvalidRule { line: i + 1, message }))
        .collect()
}

#[derive(Debug, Clone)]
pub struct FilterOutcome<T = CorpusRecord> {
    pub kept: Vec<T>,
    /// Removed items with the raw text of the first matching rule.
    pub removed: Vec<(T, String)>,
}

impl<T> Default for FilterOutcome<T> {
    fn default() -> Self {
        Self {
            kept: Vec::new(),
            removed: Vec::new(),
        }
    }
}

/// Splits `items` by the deny rules applied to the text `source` picks out.
pub fn filter_by<T: Clone>(items: &[T], rules: &[DenyRule], source: impl Fn(&T) -> &str) -> FilterOutcome<T> {
    let mut outcome = FilterOutcome::default();
    for item in items {
        match rules.iter().find(|r| r.matches(source(item))) {
            Some(rule) => outcome.removed.push((item.clone(), rule.raw.clone())),
            None => outcome.kept.push(item.clone()),
        }
    }
    outcome
}

/// Deny rules over the spoken side of corpus records.
pub fn filter(corpus: &[CorpusRecord], rules: &[DenyRule]) -> FilterOutcome {
    filter_by(corpus, rules, |r| &r.source)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: usize,
    pub templates: usize,
    pub per_split: BTreeMap<Split, usize>,
    pub augmentation_factor: f64,
    /// Records binding each category at least once.
    pub category_coverage: BTreeMap<String, usize>,
    /// Distinct non-whitespace characters over both sides.
    pub alphabet_size: usize,
}

pub fn stats(corpus: &[CorpusRecord]) -> CorpusStats {
    let mut per_split = BTreeMap::new();
    let mut templates = BTreeSet::new();
    let mut coverage: BTreeMap<String, usize> = BTreeMap::new();
    let mut alphabet = BTreeSet::new();
    for r in corpus {
        *per_split.entry(r.split).or_default() += 1;
        templates.insert(r.template_id.as_str());
        let categories: BTreeSet<&str> = r.bindings.iter().map(|(c, _)| c.as_str()).collect();
        for c in categories {
            *coverage.entry(c.to_string()).or_default() += 1;
        }
        alphabet.extend(r.source.chars().chain(r.target.chars()).filter(|c| !c.is_whitespace()));
    }
    let augmentation_factor = if templates.is_empty() {
        0.0
    } else {
        corpus.len() as f64 / templates.len() as f64
    };
    CorpusStats {
        total: corpus.len(),
        templates: templates.len(),
        per_split,
        augmentation_factor,
        category_coverage: coverage,
        alphabet_size: alphabet.len(),
    }
}
