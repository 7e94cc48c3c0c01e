use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{join_pieces, TokenizeError, BOUNDARY, BOUNDARY_STR, UNK};

pub(crate) const HEADER: &str = "signgloss-cohesion";
const VERSION: &str = "v1";

/// Cohesion scores of unit prefixes.
///
/// The score of a prefix `w` of length `n >= 2` is the geometric mean of its
/// extension probabilities from the first character:
/// `(freq(w) / freq(w[..1])) ^ (1 / (n - 1))`.
#[derive(Debug, Clone, PartialEq)]
pub struct CohesionModel {
    scores: BTreeMap<String, f64>,
    min_count: usize,
    max_len: usize,
}

pub fn train_cohesion<S: AsRef<str>>(
    corpus: &[S],
    min_count: usize,
    max_len: usize,
) -> Result<CohesionModel, TokenizeError> {
    if min_count < 1 {
        return Err(TokenizeError::InvalidParameter("min_count must be at least 1".into()));
    }
    if max_len < 2 {
        return Err(TokenizeError::InvalidParameter("max_len must be at least 2".into()));
    }
    let mut prefix_freq: HashMap<String, usize> = HashMap::new();
    let mut any = false;
    for line in corpus {
        for unit in line.as_ref().split_whitespace() {
            any = true;
            for (n, (end, c)) in unit.char_indices().enumerate() {
                if n >= max_len {
                    break;
                }
                *prefix_freq.entry(unit[..end + c.len_utf8()].to_string()).or_default() += 1;
            }
        }
    }
    if !any {
        return Err(TokenizeError::EmptyCorpus);
    }
    let mut scores = BTreeMap::new();
    for (prefix, &freq) in &prefix_freq {
        let len = prefix.chars().count();
        if len < 2 || freq < min_count {
            continue;
        }
        let first = prefix.chars().next().expect("non-empty");
        let base = prefix_freq[&first.to_string()];
        let score = (freq as f64 / base as f64).powf(1.0 / (len - 1) as f64);
        scores.insert(prefix.clone(), score);
    }
    Ok(CohesionModel {
        scores,
        min_count,
        max_len,
    })
}

impl CohesionModel {
    /// Builds a model from an explicit score table.
    pub fn from_scores(scores: BTreeMap<String, f64>, min_count: usize, max_len: usize) -> Self {
        Self {
            scores,
            min_count,
            max_len,
        }
    }

    pub fn scores(&self) -> &BTreeMap<String, f64> {
        &self.scores
    }

    pub fn score(&self, prefix: &str) -> Option<f64> {
        self.scores.get(prefix).copied()
    }

    pub fn min_count(&self) -> usize {
        self.min_count
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    /// Splits a unit into its most cohesive scored prefix and the rest.
    /// Equal scores prefer the longer prefix. Without any scored prefix the
    /// whole unit is the left part.
    pub fn l_tokenize<'a>(&self, unit: &'a str) -> (&'a str, &'a str) {
        let mut best: Option<(f64, usize)> = None;
        for (n, (start, c)) in unit.char_indices().enumerate() {
            let end = start + c.len_utf8();
            if n + 1 < 2 {
                continue;
            }
            if n + 1 > self.max_len {
                break;
            }
            if let Some(&score) = self.scores.get(&unit[..end]) {
                if best.is_none_or(|(b, _)| score >= b) {
                    best = Some((score, end));
                }
            }
        }
        match best {
            Some((_, end)) => unit.split_at(end),
            None => (unit, ""),
        }
    }

    pub fn to_model_string(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{HEADER}\t{VERSION}\tmin_count={}\tmax_len={}",
            self.min_count, self.max_len
        )
        .unwrap();
        writeln!(out, "scores\t{}", self.scores.len()).unwrap();
        for (w, s) in &self.scores {
            writeln!(out, "{w}\t{s}").unwrap();
        }
        out
    }

    fn parse_lines<'a, I>(lines: &mut I) -> Result<Self, TokenizeError>
    where
        I: Iterator<Item = (usize, &'a str)>,
    {
        let bad = |line: usize, message: &str| TokenizeError::ModelFormat {
            line,
            message: message.to_string(),
        };
        let (n, header) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
        let fields: Vec<&str> = header.split('\t').collect();
        if fields.first() != Some(&HEADER) || fields.get(1) != Some(&VERSION) {
            return Err(bad(n, "not a cohesion model v1 file"));
        }
        let param = |key: &str| {
            fields
                .iter()
                .find_map(|f| f.strip_prefix(key))
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| bad(n, &format!("missing {key}")))
        };
        let min_count = param("min_count=")?;
        let max_len = param("max_len=")?;
        let (n, line) = lines.next().ok_or_else(|| bad(0, "missing scores"))?;
        let count: usize = line
            .strip_prefix("scores\t")
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| bad(n, "expected scores count"))?;
        let mut scores = BTreeMap::new();
        for _ in 0..count {
            let (n, line) = lines.next().ok_or_else(|| bad(0, "truncated scores"))?;
            let (w, s) = line
                .split_once('\t')
                .ok_or_else(|| bad(n, "expected prefix<TAB>score"))?;
            let s: f64 = s.parse().map_err(|_| bad(n, "bad score"))?;
            scores.insert(w.to_string(), s);
        }
        Ok(Self {
            scores,
            min_count,
            max_len,
        })
    }

    pub fn from_model_str(text: &str) -> Result<Self, TokenizeError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        Self::parse_lines(&mut lines)
    }
}

/// L-tokenizer with a closed vocabulary of the pieces seen in training.
///
/// Each unit yields `▁L` and, when non-empty, `R`. Pieces outside the
/// vocabulary become `<unk>` (preceded by a bare `▁` in word-initial
/// position).
#[derive(Debug, Clone, PartialEq)]
pub struct CohesionTokenizer {
    model: CohesionModel,
    vocab: BTreeSet<String>,
}

impl CohesionTokenizer {
    pub fn train<S: AsRef<str>>(corpus: &[S], min_count: usize, max_len: usize) -> Result<Self, TokenizeError> {
        let model = train_cohesion(corpus, min_count, max_len)?;
        let mut vocab = BTreeSet::new();
        for line in corpus {
            for unit in line.as_ref().split_whitespace() {
                let (l, r) = model.l_tokenize(unit);
                vocab.insert(format!("{BOUNDARY}{l}"));
                if !r.is_empty() {
                    vocab.insert(r.to_string());
                }
            }
        }
        Ok(Self { model, vocab })
    }

    pub fn model(&self) -> &CohesionModel {
        &self.model
    }

    pub fn vocab(&self) -> &BTreeSet<String> {
        &self.vocab
    }

    pub fn encode_pieces(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for unit in text.split_whitespace() {
            let (l, r) = self.model.l_tokenize(unit);
            let left = format!("{BOUNDARY}{l}");
            if self.vocab.contains(&left) {
                out.push(left);
            } else {
                out.push(BOUNDARY_STR.to_string());
                out.push(UNK.to_string());
            }
            if !r.is_empty() {
                out.push(if self.vocab.contains(r) {
                    r.to_string()
                } else {
                    UNK.to_string()
                });
            }
        }
        out
    }

    pub fn decode_pieces<S: AsRef<str>>(&self, pieces: &[S]) -> String {
        join_pieces(pieces)
    }

    pub fn to_model_string(&self) -> String {
        let mut out = self.model.to_model_string();
        writeln!(out, "vocab\t{}", self.vocab.len()).unwrap();
        for piece in &self.vocab {
            writeln!(out, "{piece}").unwrap();
        }
        out
    }

    pub fn from_model_str(text: &str) -> Result<Self, TokenizeError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let model = CohesionModel::parse_lines(&mut lines)?;
        let (n, line) = lines.next().ok_or(TokenizeError::ModelFormat {
            line: 0,
            message: "missing vocab".into(),
        })?;
        let count: usize =
            line.strip_prefix("vocab\t")
                .and_then(|c| c.parse().ok())
                .ok_or(TokenizeError::ModelFormat {
                    line: n,
                    message: "expected vocab count".into(),
                })?;
        let vocab: BTreeSet<String> = lines.take(count).map(|(_, l)| l.to_string()).collect();
        if vocab.len() != count {
            return Err(TokenizeError::ModelFormat {
                line: 0,
                message: "truncated vocab".into(),
            });
        }
        Ok(Self { model, vocab })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_cohesive_unit() {
        let corpus = vec!["abc"; 10];
        let model = train_cohesion(&corpus, 1, 4).unwrap();
        assert_eq!(model.score("abc"), Some(1.0));
        assert_eq!(model.score("ab"), Some(1.0));
    }

    #[test]
    fn hand_counted_ratio() {
        // "a" starts 16 units, "ab" starts 8 of them.
        let mut corpus = vec!["ab"; 8];
        corpus.extend(vec!["ax"; 8]);
        let model = train_cohesion(&corpus, 1, 4).unwrap();
        assert_eq!(model.score("ab"), Some(0.5));
        assert_eq!(model.score("ax"), Some(0.5));
    }

    #[test]
    fn high_threshold_filters_everything() {
        let corpus = vec!["some short line"; 10];
        let model = train_cohesion(&corpus, 100, 5).unwrap();
        assert!(model.scores().is_empty());
        assert_eq!(model.l_tokenize("some"), ("some", ""));
    }

    #[test]
    fn parameter_errors() {
        assert_eq!(train_cohesion::<&str>(&[], 1, 3), Err(TokenizeError::EmptyCorpus));
        assert!(train_cohesion(&["a"], 0, 3).is_err());
        assert!(train_cohesion(&["a"], 1, 1).is_err());
    }

    #[test]
    fn l_tokenize_cases() {
        let empty = CohesionModel::from_scores(BTreeMap::new(), 1, 5);
        assert_eq!(empty.l_tokenize("unit"), ("unit", ""));

        let single = CohesionModel::from_scores([("ab".to_string(), 0.4)].into(), 1, 5);
        assert_eq!(single.l_tokenize("abX"), ("ab", "X"));

        // Argmax over the enumerated table: ab=0.5, abc=0.7 -> abc.
        let table: BTreeMap<String, f64> = [("ab".to_string(), 0.5), ("abc".to_string(), 0.7)].into();
        let expected = table
            .iter()
            .filter(|(w, _)| "abcd".starts_with(w.as_str()))
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(w, _)| w.clone())
            .unwrap();
        let model = CohesionModel::from_scores(table, 1, 5);
        assert_eq!(model.l_tokenize("abcd"), (expected.as_str(), "d"));

        let tie = CohesionModel::from_scores([("ab".to_string(), 0.5), ("abc".to_string(), 0.5)].into(), 1, 5);
        assert_eq!(tie.l_tokenize("abcd"), ("abc", "d"));
    }

    #[test]
    fn scores_stay_in_unit_interval() {
        let corpus = ["신장병이 있어요", "신장이 아파요", "신장병을 치료해요", "병원에 가요"];
        let model = train_cohesion(&corpus, 1, 4).unwrap();
        assert!(model.scores().values().all(|&s| s > 0.0 && s <= 1.0));
        for unit in corpus.iter().flat_map(|l| l.split_whitespace()) {
            let (l, r) = model.l_tokenize(unit);
            assert_eq!(format!("{l}{r}"), unit);
        }
    }

    #[test]
    fn tokenizer_vocab_and_unk() {
        let corpus = ["kidney disease now", "kidney pain"];
        let tok = CohesionTokenizer::train(&corpus, 1, 6).unwrap();
        let pieces = tok.encode_pieces("kidney pain");
        assert!(!pieces.iter().any(|p| p == UNK));
        assert_eq!(tok.decode_pieces(&pieces), "kidney pain");
        let pieces = tok.encode_pieces("zebra pain");
        assert_eq!(pieces.iter().filter(|p| p.as_str() == UNK).count(), 1);
        assert_eq!(tok.decode_pieces(&pieces), "<unk> pain");

        let text = tok.to_model_string();
        let back = CohesionTokenizer::from_model_str(&text).unwrap();
        assert_eq!(back, tok);
        assert_eq!(back.to_model_string(), text);
    }
}
