//! Command-line front end. Each subcommand wraps one library operation.
//!
//! Exit status: 0 on success, 1 on data errors, 2 on usage errors.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::annotation::{lint_annotation, LintWarning, NmsRegistry};
use crate::augment::{self, DaDictionary};
use crate::baseline::{build_memory, TranslationMemory};
use crate::dataset::{self, CorpusRecord, Grouping, SplitSpec};
use crate::eval::{self, Level, Smoothing};
use crate::layers;
use crate::pipeline::{run_pipeline, PipelineConfig, RunOptions};
use crate::tokenize::{train_bpe, CohesionTokenizer, Tokenizer, TokenizerModel};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "signgloss", version, about = "Sign-annotation corpus toolkit")]
pub struct Cli {
    /// Machine-readable JSON on standard output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TokenizerKind {
    Bpe,
    Cohesion,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LevelArg {
    Piece,
    Text,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::Piece => Level::Piece,
            LevelArg::Text => Level::Text,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check annotation lines from a file or standard input.
    Lint {
        file: Option<PathBuf>,
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Treat unknown non-manual codes as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Drop corpus records whose spoken side matches a deny rule.
    Filter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        removed: Option<PathBuf>,
    },
    /// Expand templates by synonym replacement.
    Augment {
        #[arg(long)]
        dictionary: PathBuf,
        #[arg(long)]
        templates: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Extract manual, iconic and non-manual layers.
    Layers {
        /// Corpus file; annotation lines are read from standard input if absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Deterministic train/valid/test split.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.7)]
        train_ratio: f64,
        #[arg(long, default_value_t = 0.2)]
        valid_ratio: f64,
        /// Keep all records of a template in one split.
        #[arg(long)]
        by_template: bool,
        /// Split in input order.
        #[arg(long)]
        no_shuffle: bool,
    },
    /// Train a tokenizer on a corpus file (both sides) or plain text lines.
    TokTrain {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "bpe")]
        kind: TokenizerKind,
        #[arg(long, default_value_t = 1000)]
        vocab_size: usize,
        #[arg(long, default_value_t = 2)]
        min_count: usize,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
        /// Symbols kept whole (bpe only); defaults to the layer markers.
        #[arg(long = "protect")]
        protect: Vec<String>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Encode lines from standard input into space-separated pieces.
    TokEncode {
        #[arg(long)]
        model: PathBuf,
    },
    /// Decode space-separated pieces from standard input.
    TokDecode {
        #[arg(long)]
        model: PathBuf,
    },
    /// Build a translation memory from training pairs.
    MemoryBuild {
        #[arg(long)]
        dictionary: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Translate spoken sentences from standard input.
    Translate {
        #[arg(long)]
        memory: PathBuf,
    },
    /// Corpus BLEU of two aligned token files.
    Bleu {
        #[arg(long = "ref")]
        reference: PathBuf,
        #[arg(long)]
        hyp: PathBuf,
        /// Also report the unk diagnostic for this symbol.
        #[arg(long)]
        unk: Option<String>,
        /// Add-one smoothing above unigrams. Diagnostic only.
        #[arg(long)]
        smooth: bool,
        #[arg(long, default_value_t = eval::MAX_ORDER)]
        max_order: usize,
    },
    /// Compare tokenizers through translation and BLEU.
    Compare {
        #[arg(long)]
        memory: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        /// `name=model-file`, repeatable; rows follow this order.
        #[arg(long = "tokenizer", required = true)]
        tokenizers: Vec<String>,
        #[arg(long, value_enum, default_value = "piece")]
        level: LevelArg,
    },
    /// Corpus statistics.
    Stats {
        #[arg(long)]
        input: PathBuf,
    },
    /// Run every stage from a config file.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config output directory.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum)]
        level: Option<LevelArg>,
        /// Record stage timings in the manifest.
        #[arg(long)]
        timings: bool,
    },
}

pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

const STDOUT: &str = "<stdout>";
const BROKEN_PIPE: &str = "broken pipe";

fn out_err(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::BrokenPipe {
        return Error::Io {
            path: STDOUT.into(),
            message: BROKEN_PIPE.into(),
        };
    }
    Error::io(Path::new(STDOUT), e)
}

fn emit<T: Serialize>(io: &mut Io, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("output serializes");
    writeln!(io.stdout, "{text}").map_err(out_err)
}

fn stdin_lines(io: &mut Io) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for line in io.stdin.lines() {
        lines.push(line.map_err(|e| Error::io(Path::new("<stdin>"), e))?);
    }
    Ok(lines)
}

fn load_model(path: &Path) -> Result<TokenizerModel> {
    Ok(TokenizerModel::from_model_str(&read(path)?)?)
}

/// Training lines: both sides of a corpus file, or the lines of a text file.
fn training_lines(path: &Path) -> Result<Vec<String>> {
    if path.extension().is_some_and(|e| e == "jsonl") {
        let records = dataset::read_corpus(path)?;
        Ok(records.into_iter().flat_map(|r| [r.source, r.target]).collect())
    } else {
        Ok(read(path)?
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::to_string)
            .collect())
    }
}

/// Parses arguments and runs one subcommand.
pub fn run<I, T>(args: I, io: &mut Io) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(io.stderr, "{text}")
            } else {
                write!(io.stdout, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, io) {
        Ok(code) => code,
        // A closed reader such as `head` is not a failure.
        Err(Error::Io { path, message }) if path == STDOUT && message == BROKEN_PIPE => EXIT_OK,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e}");
            EXIT_DATA
        }
    }
}

fn execute(cli: &Cli, io: &mut Io) -> Result<i32> {
    let json = cli.json;
    match &cli.command {
        Command::Lint { file, registry, strict } => {
            let registry = match registry {
                Some(p) => NmsRegistry::load(p).map_err(|e| Error::in_file(p, e))?,
                None => NmsRegistry::with_defaults(),
            };
            let lines: Vec<String> = match file {
                Some(p) => read(p)?.lines().map(str::to_string).collect(),
                None => stdin_lines(io)?,
            };
            let mut failed = false;
            let mut report = Vec::new();
            for (i, line) in lines.iter().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                for w in lint_annotation(line, &registry) {
                    failed |= w.is_fatal() || (*strict && matches!(w, LintWarning::UnknownCode { .. }));
                    report.push((i + 1, w.to_string()));
                }
            }
            if json {
                #[derive(Serialize)]
                struct Item {
                    line: usize,
                    message: String,
                }
                let items: Vec<Item> = report
                    .into_iter()
                    .map(|(line, message)| Item { line, message })
                    .collect();
                emit(io, &items)?;
            } else {
                for (line, message) in report {
                    writeln!(io.stdout, "line {line}: {message}").map_err(out_err)?;
                }
            }
            Ok(if failed { EXIT_DATA } else { EXIT_OK })
        }
        Command::Filter {
            input,
            rules,
            output,
            removed,
        } => {
            let corpus = dataset::read_corpus(input)?;
            let rules = dataset::parse_rules(&read(rules)?).map_err(|e| Error::in_file(rules, e))?;
            let outcome = dataset::filter(&corpus, &rules);
            dataset::write_corpus(&outcome.kept, output)?;
            if let Some(path) = removed {
                #[derive(Serialize)]
                struct Removed<'a> {
                    id: &'a str,
                    rule: &'a str,
                }
                let mut text = String::new();
                for (r, rule) in &outcome.removed {
                    text.push_str(&serde_json::to_string(&Removed { id: &r.id, rule }).expect("serializes"));
                    text.push('\n');
                }
                write(path, &text)?;
            }
            if json {
                emit(
                    io,
                    &serde_json::json!({"kept": outcome.kept.len(), "removed": outcome.removed.len()}),
                )?;
            } else {
                writeln!(
                    io.stdout,
                    "kept {} removed {}",
                    outcome.kept.len(),
                    outcome.removed.len()
                )
                .map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::Augment {
            dictionary,
            templates,
            output,
        } => {
            let dictionary = DaDictionary::load(dictionary).map_err(|e| Error::in_file(dictionary, e))?;
            let templates = augment::load_templates(templates).map_err(|e| Error::in_file(templates, e))?;
            let (pairs, stats) = augment::expand_corpus(&templates, &dictionary)?;
            let records: Vec<CorpusRecord> = pairs.iter().map(CorpusRecord::from).collect();
            dataset::write_corpus(&records, output)?;
            if json {
                emit(io, &stats)?;
            } else {
                writeln!(
                    io.stdout,
                    "templates {} pairs {} factor {:.3}",
                    stats.original, stats.expanded, stats.factor
                )
                .map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::Layers { input, output } => {
            let items: Vec<(String, crate::annotation::AnnotatedSentence)> = match input {
                Some(p) => dataset::read_corpus(p)?
                    .iter()
                    .map(|r| (r.id.clone(), r.to_pair().target))
                    .collect(),
                None => {
                    let mut items = Vec::new();
                    for (i, line) in stdin_lines(io)?.iter().enumerate() {
                        if !line.trim().is_empty() {
                            items.push(((i + 1).to_string(), line.parse()?));
                        }
                    }
                    items
                }
            };
            let mut text = String::new();
            for (id, sentence) in &items {
                let record = layers::extract_layers(sentence);
                debug_assert_eq!(&layers::merge_layers(&record)?, sentence);
                #[derive(Serialize)]
                struct Line<'a> {
                    id: &'a str,
                    #[serde(flatten)]
                    layers: layers::MultiLayerRecord,
                }
                text.push_str(&serde_json::to_string(&Line { id, layers: record }).expect("serializes"));
                text.push('\n');
            }
            match output {
                Some(p) => write(p, &text)?,
                None => write!(io.stdout, "{text}").map_err(out_err)?,
            }
            Ok(EXIT_OK)
        }
        Command::Split {
            input,
            output_dir,
            seed,
            train_ratio,
            valid_ratio,
            by_template,
            no_shuffle,
        } => {
            let corpus = dataset::read_corpus(input)?;
            let spec = SplitSpec {
                train_ratio: *train_ratio,
                valid_ratio: *valid_ratio,
                seed: *seed,
                grouping: if *by_template {
                    Grouping::ByTemplate
                } else {
                    Grouping::ByRecord
                },
                shuffle: !*no_shuffle,
            };
            let result = dataset::split(&corpus, &spec)?;
            let manifest = dataset::write_split(&result, &spec, output_dir)?;
            if json {
                emit(io, &manifest)?;
            } else {
                writeln!(
                    io.stdout,
                    "train {} valid {} test {}",
                    manifest.train, manifest.valid, manifest.test
                )
                .map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::TokTrain {
            input,
            kind,
            vocab_size,
            min_count,
            max_len,
            protect,
            output,
        } => {
            let lines = training_lines(input)?;
            let text = match kind {
                TokenizerKind::Bpe => {
                    let protect: Vec<&str> = if protect.is_empty() {
                        vec![layers::ICON_MARKER, layers::NMS_MARKER]
                    } else {
                        protect.iter().map(String::as_str).collect()
                    };
                    train_bpe(&lines, *vocab_size, &protect)?.to_model_string()
                }
                TokenizerKind::Cohesion => CohesionTokenizer::train(&lines, *min_count, *max_len)?.to_model_string(),
            };
            write(output, &text)?;
            if !json {
                writeln!(
                    io.stdout,
                    "trained on {} lines, wrote {}",
                    lines.len(),
                    output.display()
                )
                .map_err(out_err)?;
            } else {
                emit(
                    io,
                    &serde_json::json!({"lines": lines.len(), "model": output.display().to_string()}),
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::TokEncode { model } => {
            let model = load_model(model)?;
            for line in stdin_lines(io)? {
                writeln!(io.stdout, "{}", model.encode_pieces(&line).join(" ")).map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::TokDecode { model } => {
            let model = load_model(model)?;
            for line in stdin_lines(io)? {
                let pieces: Vec<String> = line.split(' ').filter(|p| !p.is_empty()).map(str::to_string).collect();
                writeln!(io.stdout, "{}", model.decode_pieces(&pieces)).map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::MemoryBuild {
            dictionary,
            input,
            output,
        } => {
            let dictionary = DaDictionary::load(dictionary).map_err(|e| Error::in_file(dictionary, e))?;
            let pairs: Vec<_> = dataset::read_corpus(input)?.iter().map(CorpusRecord::to_pair).collect();
            let memory = build_memory(&pairs, &dictionary);
            memory.save(output)?;
            for c in &memory.conflicts {
                writeln!(
                    io.stderr,
                    "conflict: {} keeps {} over {}",
                    c.pattern, c.kept, c.rejected
                )
                .map_err(out_err)?;
            }
            if json {
                emit(
                    io,
                    &serde_json::json!({"entries": memory.len(), "conflicts": memory.conflicts.len()}),
                )?;
            } else {
                writeln!(
                    io.stdout,
                    "entries {} conflicts {}",
                    memory.len(),
                    memory.conflicts.len()
                )
                .map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::Translate { memory } => {
            let memory = TranslationMemory::load(memory)?;
            let mut failed = false;
            for (i, line) in stdin_lines(io)?.iter().enumerate() {
                match memory.translate(line) {
                    Ok(s) => writeln!(io.stdout, "{s}").map_err(out_err)?,
                    Err(e) => {
                        failed = true;
                        writeln!(io.stdout).map_err(out_err)?;
                        writeln!(io.stderr, "line {}: {e}", i + 1).map_err(out_err)?;
                    }
                }
            }
            Ok(if failed { EXIT_DATA } else { EXIT_OK })
        }
        Command::Bleu {
            reference,
            hyp,
            unk,
            smooth,
            max_order,
        } => {
            let refs_text = read(reference)?;
            let hyps_text = read(hyp)?;
            let refs: Vec<Vec<&str>> = refs_text.lines().map(eval::split_tokens).collect();
            let hyps: Vec<Vec<&str>> = hyps_text.lines().map(eval::split_tokens).collect();
            let smoothing = if *smooth { Smoothing::AddOne } else { Smoothing::None };
            let report = eval::corpus_bleu(&refs, &hyps, *max_order, smoothing)?;
            let diagnostic = match unk {
                Some(symbol) => Some(eval::unk_diagnostic(&refs, &hyps, symbol, *max_order)?),
                None => None,
            };
            if json {
                emit(io, &serde_json::json!({"bleu": report, "unk": diagnostic}))?;
            } else {
                let precisions: Vec<String> = report.precisions.iter().map(|p| format!("{:.4}", p)).collect();
                writeln!(
                    io.stdout,
                    "BLEU = {:.2} ({}) BP = {:.4} hyp_len = {} ref_len = {}{}",
                    report.score,
                    precisions.join("/"),
                    report.brevity_penalty,
                    report.hyp_length,
                    report.ref_length,
                    if *smooth { " [add-one smoothing]" } else { "" }
                )
                .map_err(out_err)?;
                if let Some(d) = diagnostic {
                    let masked = d
                        .bleu_unk_masked
                        .map_or_else(|| "n/a".to_string(), |b| format!("{:.2}", b.score));
                    writeln!(
                        io.stdout,
                        "unk tokens {:.4} unk matches {}/{} ({:.4}) masked BLEU = {masked}",
                        d.unk_token_fraction, d.unk_matches, d.total_matches, d.unk_match_fraction
                    )
                    .map_err(out_err)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Compare {
            memory,
            corpus,
            tokenizers,
            level,
        } => {
            let memory = TranslationMemory::load(memory)?;
            let records = dataset::read_corpus(corpus)?;
            let mut models = Vec::new();
            for spec in tokenizers {
                let (name, path) = spec
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("tokenizer '{spec}' is not name=path")))?;
                models.push((name.to_string(), load_model(Path::new(path))?));
            }
            let refs: Vec<(&str, &(dyn Tokenizer + Sync))> = models
                .iter()
                .map(|(n, m)| (n.as_str(), m as &(dyn Tokenizer + Sync)))
                .collect();
            let pairs: Vec<(String, String)> = records.into_iter().map(|r| (r.source, r.target)).collect();
            let report = eval::compare_tokenizers(&pairs, &refs, &memory, (*level).into())?;
            if json {
                writeln!(io.stdout, "{}", report.to_json()).map_err(out_err)?;
            } else {
                write!(io.stdout, "{}", report.to_table()).map_err(out_err)?;
            }
            Ok(EXIT_OK)
        }
        Command::Stats { input } => {
            let stats = dataset::stats(&dataset::read_corpus(input)?);
            if json {
                emit(io, &stats)?;
            } else {
                writeln!(
                    io.stdout,
                    "records {} templates {} factor {:.3} alphabet {}",
                    stats.total, stats.templates, stats.augmentation_factor, stats.alphabet_size
                )
                .map_err(out_err)?;
                for (split, n) in &stats.per_split {
                    writeln!(io.stdout, "split {split:?} {n}").map_err(out_err)?;
                }
                for (category, n) in &stats.category_coverage {
                    writeln!(io.stdout, "category {category} {n}").map_err(out_err)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Pipeline {
            config,
            seed,
            output,
            strict,
            level,
            timings,
        } => {
            let mut config = PipelineConfig::load(config)?;
            if let Some(seed) = seed {
                config.seed = *seed;
            }
            if let Some(output) = output {
                // Flag paths are relative to the working directory.
                config.paths.output = std::env::current_dir()
                    .map_err(|e| Error::io(Path::new("."), e))?
                    .join(output);
            }
            config.strict |= *strict;
            if let Some(level) = level {
                config.eval.level = (*level).into();
            }
            let manifest = run_pipeline(&config, &RunOptions { timings: *timings })?;
            if json {
                emit(io, &manifest)?;
            } else {
                let c = &manifest.counts;
                let g = &manifest.generalization;
                writeln!(
                    io.stdout,
                    "templates {} kept {} pairs {} factor {:.3}\nsplit {}/{}/{}\nda exact {}/{} non-da no-match {}/{}",
                    c.templates,
                    c.kept_templates,
                    c.expanded,
                    c.expansion_factor,
                    c.train,
                    c.valid,
                    c.test,
                    g.da_exact,
                    g.recombinations,
                    g.non_da_no_match,
                    g.unseen
                )
                .map_err(out_err)?;
                for (name, score) in &manifest.bleu {
                    writeln!(io.stdout, "bleu {name} {score:.2}").map_err(out_err)?;
                }
            }
            Ok(EXIT_OK)
        }
    }
}
