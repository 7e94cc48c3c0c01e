//! Corpus BLEU, the unk-inflation diagnostic and tokenizer comparison.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tokenize::Tokenizer;

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{references} references but {hypotheses} hypotheses")]
    LengthMismatch { references: usize, hypotheses: usize },
    #[error("nothing to score")]
    EmptyCorpus,
    #[error("max order must be at least 1")]
    InvalidOrder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Smoothing {
    #[default]
    None,
    /// Add one to matches and totals for orders above 1. Diagnostic only.
    AddOne,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    /// 0 to 100.
    pub score: f64,
    /// Modified precisions for orders `1..=effective_order`.
    pub precisions: Vec<f64>,
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
    /// Clipped matches and hypothesis totals per order `1..=max_order`.
    pub matches: Vec<usize>,
    pub totals: Vec<usize>,
    /// Highest order with at least one hypothesis n-gram, capped by
    /// `max_order`. Orders above it have no evidence and are left out of the
    /// geometric mean, so a short identical pair still scores 100.
    pub effective_order: usize,
    pub smoothing: Smoothing,
}

impl BleuReport {
    /// Score recomputed from the reported components.
    pub fn reconstruct(&self) -> f64 {
        if self.precisions.is_empty() || self.precisions.contains(&0.0) {
            return 0.0;
        }
        let log_mean = self.precisions.iter().map(|p| p.ln()).sum::<f64>() / self.precisions.len() as f64;
        self.brevity_penalty * log_mean.exp() * 100.0
    }
}

type Counts = HashMap<Vec<String>, usize>;

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize, keep: impl Fn(&[S]) -> bool) -> Counts {
    let mut counts = Counts::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            if keep(window) {
                *counts
                    .entry(window.iter().map(|t| t.as_ref().to_string()).collect())
                    .or_default() += 1;
            }
        }
    }
    counts
}

#[derive(Debug, Clone, Default)]
struct Tally {
    matches: Vec<usize>,
    totals: Vec<usize>,
    /// Clipped matches whose n-gram contains the unk symbol.
    unk_matches: Vec<usize>,
    hyp_len: usize,
    ref_len: usize,
}

impl Tally {
    fn new(max_n: usize) -> Self {
        Self {
            matches: vec![0; max_n],
            totals: vec![0; max_n],
            unk_matches: vec![0; max_n],
            ..Self::default()
        }
    }

    fn add(mut self, other: Self) -> Self {
        for n in 0..self.matches.len() {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
            self.unk_matches[n] += other.unk_matches[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
        self
    }
}

/// Counts one pair. With `mask`, n-grams containing it are dropped and
/// lengths count only the remaining tokens.
fn tally<S: AsRef<str>>(
    reference: &[S],
    hypothesis: &[S],
    max_n: usize,
    mask: Option<&str>,
    unk: Option<&str>,
) -> Tally {
    let has = |w: &[S], sym: Option<&str>| sym.is_some_and(|s| w.iter().any(|t| t.as_ref() == s));
    let keep = |w: &[S]| !has(w, mask);
    let mut t = Tally::new(max_n);
    let len = |s: &[S]| s.iter().filter(|tok| Some(tok.as_ref()) != mask).count();
    t.hyp_len = len(hypothesis);
    t.ref_len = len(reference);
    for n in 1..=max_n {
        let hyp = ngram_counts(hypothesis, n, keep);
        let refs = ngram_counts(reference, n, keep);
        for (gram, count) in hyp {
            let clipped = count.min(refs.get(&gram).copied().unwrap_or(0));
            t.totals[n - 1] += count;
            t.matches[n - 1] += clipped;
            if unk.is_some_and(|u| gram.iter().any(|g| g == u)) {
                t.unk_matches[n - 1] += clipped;
            }
        }
    }
    t
}

fn check_lengths<S>(references: &[S], hypotheses: &[S], max_n: usize) -> Result<(), EvalError> {
    if references.len() != hypotheses.len() {
        return Err(EvalError::LengthMismatch {
            references: references.len(),
            hypotheses: hypotheses.len(),
        });
    }
    if references.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    if max_n == 0 {
        return Err(EvalError::InvalidOrder);
    }
    Ok(())
}

fn corpus_tally<S: AsRef<str> + Sync>(
    references: &[Vec<S>],
    hypotheses: &[Vec<S>],
    max_n: usize,
    mask: Option<&str>,
    unk: Option<&str>,
) -> Tally {
    references
        .par_iter()
        .zip(hypotheses)
        .map(|(r, h)| tally(r, h, max_n, mask, unk))
        .reduce(|| Tally::new(max_n), Tally::add)
}

fn report(t: &Tally, smoothing: Smoothing) -> Result<BleuReport, EvalError> {
    if t.hyp_len == 0 && t.ref_len == 0 {
        return Err(EvalError::EmptyCorpus);
    }
    let effective_order = t.totals.iter().take_while(|&&total| total > 0).count();
    let precisions: Vec<f64> = (0..effective_order)
        .map(|n| match smoothing {
            Smoothing::AddOne if n > 0 => (t.matches[n] + 1) as f64 / (t.totals[n] + 1) as f64,
            _ => t.matches[n] as f64 / t.totals[n] as f64,
        })
        .collect();
    let brevity_penalty = if t.hyp_len == 0 {
        0.0
    } else if t.hyp_len < t.ref_len {
        (1.0 - t.ref_len as f64 / t.hyp_len as f64).exp()
    } else {
        1.0
    };
    let mut r = BleuReport {
        score: 0.0,
        precisions,
        brevity_penalty,
        hyp_length: t.hyp_len,
        ref_length: t.ref_len,
        matches: t.matches.clone(),
        totals: t.totals.clone(),
        effective_order,
        smoothing,
    };
    r.score = r.reconstruct();
    Ok(r)
}

/// Corpus BLEU over pre-tokenized streams, one reference per hypothesis.
pub fn corpus_bleu<S: AsRef<str> + Sync>(
    references: &[Vec<S>],
    hypotheses: &[Vec<S>],
    max_n: usize,
    smoothing: Smoothing,
) -> Result<BleuReport, EvalError> {
    check_lengths(references, hypotheses, max_n)?;
    report(&corpus_tally(references, hypotheses, max_n, None, None), smoothing)
}

/// Whitespace tokenization for plain-text lines.
pub fn split_tokens(line: &str) -> Vec<&str> {
    line.split_whitespace().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnkReport {
    pub unk_symbol: String,
    /// Share of tokens, references and hypotheses together, that are unk.
    pub unk_token_fraction: f64,
    /// Share of clipped matches, over all orders, whose n-gram contains unk.
    pub unk_match_fraction: f64,
    pub unk_matches: usize,
    pub total_matches: usize,
    pub bleu_raw: BleuReport,
    /// `None` when masking leaves nothing to score.
    pub bleu_unk_masked: Option<BleuReport>,
}

pub fn unk_diagnostic<S: AsRef<str> + Sync>(
    references: &[Vec<S>],
    hypotheses: &[Vec<S>],
    unk_symbol: &str,
    max_n: usize,
) -> Result<UnkReport, EvalError> {
    check_lengths(references, hypotheses, max_n)?;
    let raw = corpus_tally(references, hypotheses, max_n, None, Some(unk_symbol));
    let bleu_raw = report(&raw, Smoothing::None)?;
    let masked = corpus_tally(references, hypotheses, max_n, Some(unk_symbol), None);
    let bleu_unk_masked = match report(&masked, Smoothing::None) {
        Ok(r) if r.effective_order > 0 => Some(r),
        _ => None,
    };
    let unk_tokens: usize = references
        .iter()
        .chain(hypotheses)
        .map(|s| s.iter().filter(|t| t.as_ref() == unk_symbol).count())
        .sum();
    let fraction = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let unk_matches = raw.unk_matches.iter().sum();
    let total_matches = raw.matches.iter().sum();
    Ok(UnkReport {
        unk_symbol: unk_symbol.to_string(),
        unk_token_fraction: fraction(unk_tokens, raw.hyp_len + raw.ref_len),
        unk_match_fraction: fraction(unk_matches, total_matches),
        unk_matches,
        total_matches,
        bleu_raw,
        bleu_unk_masked,
    })
}

/// Anything that maps a spoken sentence to an annotation string.
pub trait Translator {
    type Error: fmt::Display;
    fn translate_text(&self, source: &str) -> Result<String, Self::Error>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Score the tokenizer's pieces.
    #[default]
    Piece,
    /// Score whitespace tokens of the detokenized text.
    Text,
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "piece" => Ok(Level::Piece),
            "text" => Ok(Level::Text),
            other => Err(format!("unknown level '{other}', expected piece or text")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub tokenizer: String,
    pub level: Level,
    pub sentences: usize,
    pub translated: usize,
    pub failed: usize,
    pub bleu: f64,
    pub unk_token_fraction: f64,
    pub unk_match_fraction: f64,
    pub bleu_unk_masked: Option<f64>,
    pub report: UnkReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub level: Level,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_table(&self) -> String {
        let header = [
            "tokenizer",
            "level",
            "n",
            "ok",
            "fail",
            "bleu",
            "unk_tok",
            "unk_match",
            "bleu_masked",
        ];
        let mut rows: Vec<Vec<String>> = vec![header.iter().map(|h| h.to_string()).collect()];
        for r in &self.rows {
            rows.push(vec![
                r.tokenizer.clone(),
                format!("{:?}", r.level).to_lowercase(),
                r.sentences.to_string(),
                r.translated.to_string(),
                r.failed.to_string(),
                format!("{:.2}", r.bleu),
                format!("{:.4}", r.unk_token_fraction),
                format!("{:.4}", r.unk_match_fraction),
                r.bleu_unk_masked.map_or_else(|| "-".to_string(), |b| format!("{b:.2}")),
            ]);
        }
        let widths: Vec<usize> = (0..header.len())
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in rows {
            let cells: Vec<String> = row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

fn text_units(tok: &dyn Tokenizer, text: &str, level: Level) -> Vec<String> {
    let pieces = tok.encode_pieces(text);
    match level {
        Level::Piece => pieces,
        Level::Text => split_tokens(&tok.decode_pieces(&pieces))
            .into_iter()
            .map(str::to_string)
            .collect(),
    }
}

/// For each tokenizer: the source is encoded and decoded (losing anything
/// out of vocabulary), translated, and scored against the reference with
/// both sides passed through the same tokenizer. Failed translations score
/// as empty hypotheses. Rows follow the order of `tokenizers`.
pub fn compare_tokenizers<T: Translator + Sync>(
    pairs: &[(String, String)],
    tokenizers: &[(&str, &(dyn Tokenizer + Sync))],
    translator: &T,
    level: Level,
) -> Result<ComparisonReport, EvalError> {
    let mut rows = Vec::with_capacity(tokenizers.len());
    for &(name, tok) in tokenizers {
        let scored: Vec<(Vec<String>, Option<Vec<String>>)> = pairs
            .par_iter()
            .map(|(source, reference)| {
                let seen = tok.decode_pieces(&tok.encode_pieces(source));
                let hyp = translator
                    .translate_text(&seen)
                    .ok()
                    .map(|h| text_units(tok, &h, level));
                (text_units(tok, reference, level), hyp)
            })
            .collect();
        let translated = scored.iter().filter(|(_, h)| h.is_some()).count();
        let (references, hypotheses): (Vec<_>, Vec<_>) =
            scored.into_iter().map(|(r, h)| (r, h.unwrap_or_default())).unzip();
        let report = unk_diagnostic(&references, &hypotheses, tok.unk_symbol(), MAX_ORDER)?;
        rows.push(ComparisonRow {
            tokenizer: name.to_string(),
            level,
            sentences: pairs.len(),
            translated,
            failed: pairs.len() - translated,
            bleu: report.bleu_raw.score,
            unk_token_fraction: report.unk_token_fraction,
            unk_match_fraction: report.unk_match_fraction,
            bleu_unk_masked: report.bleu_unk_masked.as_ref().map(|b| b.score),
            report,
        });
    }
    Ok(ComparisonReport { level, rows })
}
