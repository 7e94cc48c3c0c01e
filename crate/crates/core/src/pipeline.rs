//! End-to-end run from one config file: lint, filter, augment, layers,
//! split, tokenizers, memories, translation and evaluation.
//!
//! All randomness derives from the config seed through named sub-seeds, and
//! every file written is listed in `manifest.json` with its size and hash.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::annotation::{lint_annotation, LintWarning, NmsRegistry};
use crate::augment::{self, eda, extract_slots, DaDictionary, ParallelPair, ParallelTemplate};
use crate::baseline::{build_memory, BaselineError, TranslationMemory};
use crate::dataset::{self, CorpusRecord, Grouping, SplitSpec};
use crate::eval::{self, ComparisonReport, Level, Smoothing, UnkReport};
use crate::layers::{self, ICON_MARKER, NMS_MARKER};
use crate::tokenize::{train_bpe, CohesionTokenizer, Tokenizer};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub dictionary: PathBuf,
    pub templates: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deny: Option<PathBuf>,
    /// Left out of run manifests so a tree does not record its own location.
    #[serde(default = "default_output", skip_serializing)]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AugmentConfig {
    pub sr: bool,
    /// Swaps per pair; 0 disables random swap.
    pub rs: usize,
    /// Deletion probability; 0 disables random deletion.
    pub rd: f64,
    /// Insertions per pair; 0 disables random insertion.
    pub ri: usize,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        Self {
            sr: true,
            rs: 0,
            rd: 0.0,
            ri: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SplitConfig {
    pub train_ratio: f64,
    pub valid_ratio: f64,
    pub grouping: Grouping,
    pub shuffle: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        let s = SplitSpec::default();
        Self {
            train_ratio: s.train_ratio,
            valid_ratio: s.valid_ratio,
            grouping: s.grouping,
            shuffle: s.shuffle,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TokenizerConfig {
    pub vocab_size: usize,
    pub min_count: usize,
    pub max_len: usize,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            vocab_size: 1000,
            min_count: 2,
            max_len: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub level: Level,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Unknown non-manual codes become errors instead of warnings.
    #[serde(default)]
    pub strict: bool,
    pub paths: Paths,
    #[serde(default)]
    pub augment: AugmentConfig,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub tokenizer: TokenizerConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    /// Directory relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn from_toml(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.base_dir = base_dir.into();
        Ok(config)
    }

    /// Reads a config file; relative paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, base)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn split_spec(&self) -> SplitSpec {
        SplitSpec {
            train_ratio: self.split.train_ratio,
            valid_ratio: self.split.valid_ratio,
            seed: sub_seed(self.seed, "split"),
            grouping: self.split.grouping,
            shuffle: self.split.shuffle,
        }
    }

    /// Checks that every input exists.
    pub fn validate(&self) -> Result<()> {
        let p = &self.paths;
        let inputs = [
            Some(&p.dictionary),
            Some(&p.templates),
            p.registry.as_ref(),
            p.deny.as_ref(),
        ];
        for path in inputs.into_iter().flatten() {
            let full = self.resolve(path);
            if !full.is_file() {
                return Err(Error::Config(format!("input file {} does not exist", full.display())));
            }
        }
        if !(0.0..=1.0).contains(&self.augment.rd) {
            return Err(Error::Config(format!("augment.rd {} outside [0, 1]", self.augment.rd)));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Seed for one named random stage.
pub fn sub_seed(seed: u64, name: &str) -> u64 {
    splitmix64(seed ^ fnv1a64(name.as_bytes()))
}

pub const SEED_NAMES: [&str; 4] = ["split", "rs", "rd", "ri"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub bytes: usize,
    pub fnv1a64: String,
}

struct Outputs {
    root: PathBuf,
    files: Vec<FileEntry>,
}

impl Outputs {
    fn write(&mut self, relative: &str, contents: &str) -> Result<()> {
        let path = self.root.join(relative);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileEntry {
            path: relative.to_string(),
            bytes: contents.len(),
            fnv1a64: format!("{:016x}", fnv1a64(contents.as_bytes())),
        });
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, relative: &str, value: &T) -> Result<()> {
        let text = serde_json::to_string_pretty(value).expect("outputs serialize") + "\n";
        self.write(relative, &text)
    }

    fn write_lines<T: Serialize>(&mut self, relative: &str, values: &[T]) -> Result<()> {
        let mut text = String::new();
        for v in values {
            text.push_str(&serde_json::to_string(v).expect("outputs serialize"));
            text.push('\n');
        }
        self.write(relative, &text)
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Record per-stage wall-clock times. Off by default so repeated runs
    /// produce identical manifests.
    pub timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub templates: usize,
    pub filtered_out: usize,
    pub kept_templates: usize,
    pub expanded: usize,
    pub expansion_factor: f64,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub extra_train: usize,
    pub lint_warnings: usize,
    pub memory_da: usize,
    pub memory_non_da: usize,
    pub memory_conflicts: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generalization {
    /// Held-out sentences with at least one filled slot, and how many of
    /// them the memory built from the expanded training split translates
    /// exactly.
    pub recombinations: usize,
    pub da_exact: usize,
    pub da_exact_rate: f64,
    /// Exact translations over the whole held-out split, including
    /// slot-free sentences no memory can have seen.
    pub held_out: usize,
    pub da_exact_all: usize,
    /// Held-out sentences binding some entry other than the first of its
    /// category, i.e. a term the one-pair-per-template corpus never shows.
    pub unseen: usize,
    pub non_da_no_match: usize,
    pub non_da_no_match_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationSummary {
    pub bleu_da: f64,
    pub bleu_non_da: f64,
    pub tokenizers: ComparisonReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputEntry {
    pub path: String,
    pub fnv1a64: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub sub_seeds: BTreeMap<String, u64>,
    pub config: PipelineConfig,
    pub inputs: Vec<InputEntry>,
    pub counts: Counts,
    pub generalization: Generalization,
    pub bleu: BTreeMap<String, f64>,
    pub files: Vec<FileEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Serialize)]
struct LintRecord {
    template: String,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct RemovedRecord<'a> {
    id: &'a str,
    source: &'a str,
    rule: &'a str,
}

#[derive(Debug, Serialize)]
struct LayerLine<'a> {
    id: &'a str,
    #[serde(flatten)]
    layers: layers::MultiLayerRecord,
}

#[derive(Debug, Serialize)]
struct TranslationLine<'a> {
    id: &'a str,
    source: &'a str,
    reference: &'a str,
    da: Option<String>,
    non_da: Option<String>,
}

/// Template target with every slot filled by a neutral gloss, for lint.
fn lint_view(template: &ParallelTemplate) -> Result<String> {
    let slots = extract_slots(&template.target, &template.id)?;
    Ok(augment::fill(&template.target, &slots, |_| "x".to_string()))
}

/// One pair per template with every slot bound to its category's first
/// entry.
pub fn first_entry_corpus(templates: &[ParallelTemplate], dictionary: &DaDictionary) -> Result<Vec<ParallelPair>> {
    let mut pairs = Vec::with_capacity(templates.len());
    for t in templates {
        if let Some(first) = augment::expand_sr(t, dictionary)?.into_iter().next() {
            pairs.push(first);
        }
    }
    Ok(pairs)
}

/// Symbols both tokenizers keep whole: layer markers, grammar marks and
/// every registered non-manual tag.
pub fn protected_symbols(registry: &NmsRegistry) -> Vec<String> {
    let mut symbols: Vec<String> = [ICON_MARKER, NMS_MARKER, "(", ")", "/"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    symbols.extend(registry.iter().map(|t| format!("[{}]", t.code())));
    symbols
}

fn extra_ops(config: &PipelineConfig, train: &[ParallelPair], dictionary: &DaDictionary) -> Result<Vec<ParallelPair>> {
    let a = &config.augment;
    let mut extra = Vec::new();
    for (i, pair) in train.iter().enumerate() {
        let i = i as u64;
        if a.rs > 0 {
            let mut p = eda::random_swap(pair, a.rs, sub_seed(config.seed, "rs") ^ splitmix64(i)).pair;
            p.id = format!("{}~rs", pair.id);
            extra.push(p);
        }
        if a.rd > 0.0 {
            let mut p = eda::random_deletion(pair, a.rd, sub_seed(config.seed, "rd") ^ splitmix64(i))?.pair;
            p.id = format!("{}~rd", pair.id);
            extra.push(p);
        }
        if a.ri > 0 {
            let mut p = eda::random_insertion(pair, dictionary, a.ri, sub_seed(config.seed, "ri") ^ splitmix64(i)).pair;
            p.id = format!("{}~ri", pair.id);
            extra.push(p);
        }
    }
    Ok(extra)
}

fn score_memory(memory: &TranslationMemory, test: &[CorpusRecord]) -> Result<(f64, Vec<Option<String>>)> {
    let outputs: Vec<Option<String>> = test
        .iter()
        .map(|r| memory.translate(&r.source).ok().map(|s| s.to_string()))
        .collect();
    let refs: Vec<Vec<&str>> = test.iter().map(|r| eval::split_tokens(&r.target)).collect();
    let hyps: Vec<Vec<&str>> = outputs
        .iter()
        .map(|o| o.as_deref().map(eval::split_tokens).unwrap_or_default())
        .collect();
    let bleu = eval::corpus_bleu(&refs, &hyps, eval::MAX_ORDER, Smoothing::None)?;
    Ok((bleu.score, outputs))
}

/// Clears a previous run's tree. A non-empty directory without a run
/// manifest is left alone and reported.
fn prepare_output(root: &Path) -> Result<()> {
    if !root.exists() {
        return Ok(());
    }
    let mut entries = std::fs::read_dir(root).map_err(|e| Error::io(root, e))?;
    if entries.next().is_none() {
        return Ok(());
    }
    if !root.join("manifest.json").is_file() {
        return Err(Error::Config(format!(
            "output directory {} is not empty and holds no previous run",
            root.display()
        )));
    }
    std::fs::remove_dir_all(root).map_err(|e| Error::io(root, e))
}

/// Runs every stage and writes the output tree under `paths.output`.
pub fn run_pipeline(config: &PipelineConfig, options: &RunOptions) -> Result<RunManifest> {
    config.validate()?;
    let mut timings = BTreeMap::new();
    let mut clock = Instant::now();
    let mut lap = |name: &str, timings: &mut BTreeMap<String, f64>| {
        timings.insert(name.to_string(), clock.elapsed().as_secs_f64() * 1000.0);
        clock = Instant::now();
    };

    let paths = &config.paths;
    let mut input_entries = Vec::new();
    let mut read_input = |path: &Path| -> Result<String> {
        let full = config.resolve(path);
        let text = std::fs::read_to_string(&full).map_err(|e| Error::io(&full, e))?;
        input_entries.push(InputEntry {
            path: path.display().to_string(),
            fnv1a64: format!("{:016x}", fnv1a64(text.as_bytes())),
        });
        Ok(text)
    };
    let dictionary =
        DaDictionary::from_tsv(&read_input(&paths.dictionary)?).map_err(|e| Error::in_file(&paths.dictionary, e))?;
    let templates =
        augment::read_templates(&read_input(&paths.templates)?).map_err(|e| Error::in_file(&paths.templates, e))?;
    let registry = match &paths.registry {
        Some(p) => NmsRegistry::from_tsv(&read_input(p)?).map_err(|e| Error::in_file(p, e))?,
        None => NmsRegistry::with_defaults(),
    };
    let rules = match &paths.deny {
        Some(p) => dataset::parse_rules(&read_input(p)?).map_err(|e| Error::in_file(p, e))?,
        None => Vec::new(),
    };

    let root = config.resolve(&paths.output);
    prepare_output(&root)?;
    let mut out = Outputs {
        root,
        files: Vec::new(),
    };

    let mut lint = Vec::new();
    for t in &templates {
        let warnings = lint_annotation(&lint_view(t)?, &registry);
        if let Some(w) = warnings
            .iter()
            .find(|w| w.is_fatal() || (config.strict && matches!(w, LintWarning::UnknownCode { .. })))
        {
            return Err(Error::Config(format!("template {}: {w}", t.id)));
        }
        if !warnings.is_empty() {
            lint.push(LintRecord {
                template: t.id.clone(),
                warnings: warnings.iter().map(|w| w.to_string()).collect(),
            });
        }
    }
    let lint_warnings = lint.iter().map(|l| l.warnings.len()).sum();
    out.write_json("lint.json", &lint)?;
    lap("lint", &mut timings);

    let filtered = dataset::filter_by(&templates, &rules, |t| &t.source);
    let removed: Vec<RemovedRecord> = filtered
        .removed
        .iter()
        .map(|(t, rule)| RemovedRecord {
            id: &t.id,
            source: &t.source,
            rule,
        })
        .collect();
    out.write_json("filtered.json", &removed)?;
    let kept = filtered.kept;
    lap("filter", &mut timings);

    let pairs = if config.augment.sr {
        augment::expand_corpus(&kept, &dictionary)?.0
    } else {
        first_entry_corpus(&kept, &dictionary)?
    };
    let records: Vec<CorpusRecord> = pairs.iter().map(CorpusRecord::from).collect();
    out.write("corpus.jsonl", &dataset::corpus_to_string(&records))?;
    let corpus_stats = dataset::stats(&records);
    lap("augment", &mut timings);

    let layer_lines: Vec<LayerLine> = pairs
        .iter()
        .map(|p| LayerLine {
            id: &p.id,
            layers: layers::extract_layers(&p.target),
        })
        .collect();
    out.write_lines("layers.jsonl", &layer_lines)?;
    lap("layers", &mut timings);

    let spec = config.split_spec();
    let split = dataset::split(&records, &spec)?;
    for (name, part) in [("train", &split.train), ("valid", &split.valid), ("test", &split.test)] {
        out.write(&format!("split/{name}.jsonl"), &dataset::corpus_to_string(part))?;
    }
    let train_pairs: Vec<ParallelPair> = split.train.iter().map(CorpusRecord::to_pair).collect();
    let extra = extra_ops(config, &train_pairs, &dictionary)?;
    if !extra.is_empty() {
        let extra_records: Vec<CorpusRecord> = extra.iter().map(CorpusRecord::from).collect();
        out.write("split/train_extra.jsonl", &dataset::corpus_to_string(&extra_records))?;
    }
    lap("split", &mut timings);

    let tok = &config.tokenizer;
    let mut lines: Vec<String> = Vec::new();
    for p in train_pairs.iter().chain(&extra) {
        lines.push(p.source.clone());
        lines.push(p.target.to_string());
    }
    let protected = protected_symbols(&registry);
    let protected_refs: Vec<&str> = protected.iter().map(String::as_str).collect();
    let bpe = train_bpe(&lines, tok.vocab_size, &protected_refs)?;
    let cohesion = CohesionTokenizer::train(&lines, tok.min_count, tok.max_len)?;
    out.write("tokenizers/bpe.model", &bpe.to_model_string())?;
    out.write("tokenizers/cohesion.model", &cohesion.to_model_string())?;
    lap("tokenizers", &mut timings);

    let mut memory_pairs = train_pairs.clone();
    memory_pairs.extend(extra.iter().cloned());
    let da = build_memory(&memory_pairs, &dictionary);
    let non_da = build_memory(&first_entry_corpus(&kept, &dictionary)?, &dictionary);
    out.write("memory/da.json", &da.to_json())?;
    out.write("memory/non_da.json", &non_da.to_json())?;
    lap("memory", &mut timings);

    let test = &split.test;
    let (bleu_da, da_out) = score_memory(&da, test)?;
    let (bleu_non_da, non_da_out) = score_memory(&non_da, test)?;
    let translations: Vec<TranslationLine> = test
        .iter()
        .zip(da_out.iter().zip(&non_da_out))
        .map(|(r, (d, n))| TranslationLine {
            id: &r.id,
            source: &r.source,
            reference: &r.target,
            da: d.clone(),
            non_da: n.clone(),
        })
        .collect();
    out.write_lines("translations.jsonl", &translations)?;
    lap("translate", &mut timings);

    let exact: Vec<bool> = test
        .iter()
        .zip(&da_out)
        .map(|(r, o)| o.as_deref() == Some(r.target.as_str()))
        .collect();
    let recombinations = test.iter().filter(|r| !r.bindings.is_empty()).count();
    let da_exact = test
        .iter()
        .zip(&exact)
        .filter(|(r, &e)| e && !r.bindings.is_empty())
        .count();
    let unseen: Vec<&CorpusRecord> = test
        .iter()
        .filter(|r| r.bindings.iter().any(|(_, e)| *e != 0))
        .collect();
    let non_da_no_match = unseen
        .iter()
        .filter(|r| matches!(non_da.translate(&r.source), Err(BaselineError::NoMatch { .. })))
        .count();
    let rate = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let generalization = Generalization {
        recombinations,
        da_exact,
        da_exact_rate: rate(da_exact, recombinations),
        held_out: test.len(),
        da_exact_all: exact.iter().filter(|&&e| e).count(),
        unseen: unseen.len(),
        non_da_no_match,
        non_da_no_match_rate: rate(non_da_no_match, unseen.len()),
    };

    let eval_pairs: Vec<(String, String)> = test.iter().map(|r| (r.source.clone(), r.target.clone())).collect();
    let tokenizers: [(&str, &(dyn Tokenizer + Sync)); 2] = [("bpe", &bpe), ("cohesion", &cohesion)];
    let comparison = eval::compare_tokenizers(&eval_pairs, &tokenizers, &da, config.eval.level)?;
    out.write("eval/compare.txt", &comparison.to_table())?;
    let unk_rows: BTreeMap<&str, &UnkReport> = comparison
        .rows
        .iter()
        .map(|r| (r.tokenizer.as_str(), &r.report))
        .collect();
    out.write_json("eval/unk.json", &unk_rows)?;
    let summary = EvaluationSummary {
        bleu_da,
        bleu_non_da,
        tokenizers: comparison.clone(),
    };
    out.write_json("eval/summary.json", &summary)?;
    lap("evaluate", &mut timings);

    let mut bleu = BTreeMap::new();
    bleu.insert("memory_da".to_string(), bleu_da);
    bleu.insert("memory_non_da".to_string(), bleu_non_da);
    for row in &comparison.rows {
        bleu.insert(format!("tokenizer_{}", row.tokenizer), row.bleu);
    }
    let (train, valid, test_n) = split.counts();
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        sub_seeds: SEED_NAMES
            .iter()
            .map(|n| (n.to_string(), sub_seed(config.seed, n)))
            .collect(),
        config: config.clone(),
        inputs: input_entries,
        counts: Counts {
            templates: templates.len(),
            filtered_out: removed.len(),
            kept_templates: kept.len(),
            expanded: records.len(),
            expansion_factor: corpus_stats.augmentation_factor,
            train,
            valid,
            test: test_n,
            extra_train: extra.len(),
            lint_warnings,
            memory_da: da.len(),
            memory_non_da: non_da.len(),
            memory_conflicts: da.conflicts.len(),
        },
        generalization,
        bleu,
        files: out.files.clone(),
        timings_ms: options.timings.then_some(timings),
    };
    out.write_json("manifest.json", &manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sub_seeds_are_distinct_and_stable() {
        let seeds: Vec<u64> = SEED_NAMES.iter().map(|n| sub_seed(7, n)).collect();
        for i in 0..seeds.len() {
            for j in i + 1..seeds.len() {
                assert_ne!(seeds[i], seeds[j]);
            }
        }
        assert_eq!(sub_seed(7, "split"), sub_seed(7, "split"));
        assert_ne!(sub_seed(7, "split"), sub_seed(8, "split"));
        // Reference FNV-1a values.
        assert_eq!(fnv1a64(b""), 0xcbf2_9ce4_8422_2325);
        assert_eq!(fnv1a64(b"a"), 0xaf63_dc4c_8601_ec8c);
    }

    #[test]
    fn config_defaults_and_unknown_keys() {
        let c = PipelineConfig::from_toml(
            "seed = 3\n[paths]\ndictionary = \"d.tsv\"\ntemplates = \"t.jsonl\"\noutput = \"out\"\n",
            "base",
        )
        .unwrap();
        assert!(c.augment.sr);
        assert_eq!(c.split.train_ratio, 0.7);
        assert_eq!(c.resolve(Path::new("d.tsv")), Path::new("base/d.tsv"));
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        assert!(PipelineConfig::from_toml("seed = 1\nbogus = 2\n", ".").is_err());
    }
}
