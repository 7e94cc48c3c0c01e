use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::{join_pieces, TokenStream, TokenizeError, BOUNDARY, BOUNDARY_STR, UNK};

pub(crate) const HEADER: &str = "signgloss-bpe";
const VERSION: &str = "v1";

/// Byte-pair subword model with a word-boundary marker.
///
/// Vocabulary layout: `<unk>`, the bare boundary marker, protected symbols
/// in the order given, the sorted initial alphabet, then one piece per merge
/// that produced a new string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubwordModel {
    vocab_size: usize,
    vocab: Vec<String>,
    ids: HashMap<String, u32>,
    merges: Vec<(String, String)>,
    ranks: HashMap<(String, String), usize>,
    protected: Vec<String>,
    /// Protected symbols plus `<unk>`, longest first, for scanning.
    atomic: Vec<String>,
}

enum Item<'a> {
    Atomic(&'a str),
    Plain(&'a str),
}

fn split_atomic<'a>(word: &'a str, atomic: &[String]) -> Vec<Item<'a>> {
    let mut items = Vec::new();
    let mut plain_start = 0;
    let mut pos = 0;
    while pos < word.len() {
        if let Some(sym) = atomic.iter().find(|s| word[pos..].starts_with(s.as_str())) {
            if plain_start < pos {
                items.push(Item::Plain(&word[plain_start..pos]));
            }
            items.push(Item::Atomic(&word[pos..pos + sym.len()]));
            pos += sym.len();
            plain_start = pos;
        } else {
            pos += word[pos..].chars().next().map_or(1, char::len_utf8);
        }
    }
    if plain_start < word.len() {
        items.push(Item::Plain(&word[plain_start..]));
    }
    items
}

fn initial_symbols(chunk: &str, word_initial: bool) -> Vec<String> {
    chunk
        .chars()
        .enumerate()
        .map(|(i, c)| {
            if i == 0 && word_initial {
                format!("{BOUNDARY}{c}")
            } else {
                c.to_string()
            }
        })
        .collect()
}

fn apply_merge(symbols: &mut Vec<String>, left: &str, right: &str) {
    let mut i = 0;
    while i + 1 < symbols.len() {
        if symbols[i] == left && symbols[i + 1] == right {
            let merged = format!("{left}{right}");
            symbols[i] = merged;
            symbols.remove(i + 1);
        }
        i += 1;
    }
}

fn atomic_list(protected: &[String]) -> Vec<String> {
    let mut atomic: Vec<String> = protected.to_vec();
    if !atomic.iter().any(|s| s == UNK) {
        atomic.push(UNK.to_string());
    }
    atomic.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    atomic
}

fn validate_protected(protected: &[&str]) -> Result<Vec<String>, TokenizeError> {
    let mut out: Vec<String> = Vec::new();
    for &sym in protected {
        if sym.is_empty() || sym.chars().any(char::is_whitespace) || sym.contains(BOUNDARY) {
            return Err(TokenizeError::InvalidProtected(sym.to_string()));
        }
        if sym != UNK && !out.iter().any(|s| s == sym) {
            out.push(sym.to_string());
        }
    }
    Ok(out)
}

/// Trains a subword model on raw lines.
///
/// Words are whitespace-delimited; the first character of each word carries
/// the boundary marker. The most frequent adjacent pair is merged until the
/// vocabulary reaches `vocab_size` or no pair occurs twice. Equal counts are
/// broken by the lexicographically smallest `(left, right)`. Protected
/// symbols are single pieces and never take part in a merge.
pub fn train_bpe<S: AsRef<str>>(
    corpus: &[S],
    vocab_size: usize,
    protected: &[&str],
) -> Result<SubwordModel, TokenizeError> {
    let protected = validate_protected(protected)?;
    let atomic = atomic_list(&protected);

    let mut chunk_counts: HashMap<(String, bool), usize> = HashMap::new();
    let mut any_word = false;
    for (i, line) in corpus.iter().enumerate() {
        let line = line.as_ref();
        if line.contains(BOUNDARY) {
            return Err(TokenizeError::ReservedSymbol { line: i + 1 });
        }
        for word in line.split_whitespace() {
            any_word = true;
            for (k, item) in split_atomic(word, &atomic).into_iter().enumerate() {
                if let Item::Plain(chunk) = item {
                    *chunk_counts.entry((chunk.to_string(), k == 0)).or_default() += 1;
                }
            }
        }
    }
    if !any_word {
        return Err(TokenizeError::EmptyCorpus);
    }

    let mut alphabet: BTreeSet<String> = BTreeSet::new();
    for (chunk, initial) in chunk_counts.keys() {
        for (i, c) in chunk.chars().enumerate() {
            alphabet.insert(c.to_string());
            if i == 0 && *initial {
                alphabet.insert(format!("{BOUNDARY}{c}"));
            }
        }
    }

    let mut vocab: Vec<String> = vec![UNK.to_string(), BOUNDARY_STR.to_string()];
    vocab.extend(protected.iter().cloned());
    vocab.extend(alphabet);
    let minimum = vocab.len();
    if vocab_size < minimum {
        return Err(TokenizeError::VocabTooSmall {
            requested: vocab_size,
            minimum,
        });
    }
    let mut ids: HashMap<String, u32> = vocab.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();

    // Sorted so that training is independent of hash order.
    let mut sequences: Vec<(Vec<String>, usize)> = chunk_counts
        .into_iter()
        .map(|((chunk, initial), n)| (initial_symbols(&chunk, initial), n))
        .collect();
    sequences.sort();

    let mut merges = Vec::new();
    while vocab.len() < vocab_size {
        let mut pair_counts: HashMap<(&str, &str), usize> = HashMap::new();
        for (symbols, n) in &sequences {
            for w in symbols.windows(2) {
                *pair_counts.entry((w[0].as_str(), w[1].as_str())).or_default() += n;
            }
        }
        let best = pair_counts
            .into_iter()
            .max_by(|(pa, ca), (pb, cb)| ca.cmp(cb).then_with(|| pb.cmp(pa)));
        let Some(((left, right), count)) = best else { break };
        if count < 2 {
            break;
        }
        let (left, right) = (left.to_string(), right.to_string());
        for (symbols, _) in sequences.iter_mut() {
            apply_merge(symbols, &left, &right);
        }
        let merged = format!("{left}{right}");
        if !ids.contains_key(&merged) {
            ids.insert(merged.clone(), vocab.len() as u32);
            vocab.push(merged);
        }
        merges.push((left, right));
    }

    Ok(SubwordModel::assemble(vocab_size, vocab, merges, protected))
}

impl SubwordModel {
    fn assemble(vocab_size: usize, vocab: Vec<String>, merges: Vec<(String, String)>, protected: Vec<String>) -> Self {
        let ids = vocab.iter().enumerate().map(|(i, p)| (p.clone(), i as u32)).collect();
        let ranks = merges.iter().cloned().enumerate().map(|(r, m)| (m, r)).collect();
        let atomic = atomic_list(&protected);
        Self {
            vocab_size,
            vocab,
            ids,
            merges,
            ranks,
            protected,
            atomic,
        }
    }

    pub fn vocab(&self) -> &[String] {
        &self.vocab
    }

    pub fn vocab_len(&self) -> usize {
        self.vocab.len()
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn protected(&self) -> &[String] {
        &self.protected
    }

    pub fn is_protected(&self, symbol: &str) -> bool {
        self.protected.iter().any(|p| p == symbol)
    }

    pub fn unk_id(&self) -> u32 {
        0
    }

    pub fn piece_to_id(&self, piece: &str) -> Option<u32> {
        self.ids.get(piece).copied()
    }

    pub fn id_to_piece(&self, id: u32) -> Option<&str> {
        self.vocab.get(id as usize).map(String::as_str)
    }

    /// Characters of the initial alphabet.
    pub fn alphabet(&self) -> BTreeSet<char> {
        self.vocab
            .iter()
            .filter_map(|p| {
                let mut chars = p.chars();
                match (chars.next(), chars.next()) {
                    (Some(c), None) if c != BOUNDARY => Some(c),
                    _ => None,
                }
            })
            .collect()
    }

    fn encode_chunk(&self, chunk: &str, word_initial: bool, out: &mut Vec<String>) {
        let mut symbols = Vec::with_capacity(chunk.len() + 1);
        for (i, c) in chunk.chars().enumerate() {
            let bare = c.to_string();
            if i == 0 && word_initial {
                let marked = format!("{BOUNDARY}{c}");
                if self.ids.contains_key(&marked) {
                    symbols.push(marked);
                    continue;
                }
                symbols.push(BOUNDARY_STR.to_string());
            }
            if self.ids.contains_key(&bare) {
                symbols.push(bare);
            } else {
                symbols.push(UNK.to_string());
            }
        }
        loop {
            let best = symbols
                .windows(2)
                .filter_map(|w| {
                    self.ranks
                        .get(&(w[0].clone(), w[1].clone()))
                        .map(|&r| (r, w[0].clone(), w[1].clone()))
                })
                .min();
            let Some((_, left, right)) = best else { break };
            apply_merge(&mut symbols, &left, &right);
        }
        out.extend(symbols);
    }

    /// Pieces for `text`. Whitespace runs are canonicalized to single spaces.
    pub fn encode_pieces(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        for word in text.split_whitespace() {
            for (k, item) in split_atomic(word, &self.atomic).into_iter().enumerate() {
                match item {
                    Item::Atomic(sym) => {
                        if k == 0 {
                            out.push(BOUNDARY_STR.to_string());
                        }
                        out.push(sym.to_string());
                    }
                    Item::Plain(chunk) => self.encode_chunk(chunk, k == 0, &mut out),
                }
            }
        }
        out
    }

    pub fn encode(&self, text: &str) -> TokenStream {
        TokenStream {
            ids: self
                .encode_pieces(text)
                .iter()
                .map(|p| self.ids.get(p).copied().unwrap_or(0))
                .collect(),
        }
    }

    pub fn pieces<'a>(&'a self, stream: &TokenStream) -> Vec<&'a str> {
        stream
            .ids
            .iter()
            .map(|&id| self.id_to_piece(id).unwrap_or(UNK))
            .collect()
    }

    pub fn decode_pieces<S: AsRef<str>>(&self, pieces: &[S]) -> String {
        join_pieces(pieces)
    }

    pub fn decode(&self, stream: &TokenStream) -> Result<String, TokenizeError> {
        let pieces = stream
            .ids
            .iter()
            .map(|&id| {
                self.id_to_piece(id).ok_or(TokenizeError::UnknownId {
                    id,
                    size: self.vocab.len(),
                })
            })
            .collect::<Result<Vec<&str>, _>>()?;
        Ok(join_pieces(&pieces))
    }

    /// Versioned text serialization; identical models give identical bytes.
    pub fn to_model_string(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{HEADER}\t{VERSION}\tvocab_size={}\tunk={UNK}\tboundary={BOUNDARY}",
            self.vocab_size
        )
        .unwrap();
        out.push_str("protected");
        for p in &self.protected {
            write!(out, "\t{p}").unwrap();
        }
        out.push('\n');
        writeln!(out, "vocab\t{}", self.vocab.len()).unwrap();
        for (i, p) in self.vocab.iter().enumerate() {
            writeln!(out, "{i}\t{p}").unwrap();
        }
        writeln!(out, "merges\t{}", self.merges.len()).unwrap();
        for (l, r) in &self.merges {
            writeln!(out, "{l}\t{r}").unwrap();
        }
        out
    }

    pub fn from_model_str(text: &str) -> Result<Self, TokenizeError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let bad = |line: usize, message: &str| TokenizeError::ModelFormat {
            line,
            message: message.to_string(),
        };
        let mut next = |what: &str| lines.next().ok_or_else(|| bad(0, &format!("missing {what}")));

        let (n, header) = next("header")?;
        let fields: Vec<&str> = header.split('\t').collect();
        if fields.first() != Some(&HEADER) || fields.get(1) != Some(&VERSION) {
            return Err(bad(n, "not a subword model v1 file"));
        }
        let vocab_size = fields
            .iter()
            .find_map(|f| f.strip_prefix("vocab_size="))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| bad(n, "missing vocab_size"))?;

        let (n, line) = next("protected")?;
        let mut fields = line.split('\t');
        if fields.next() != Some("protected") {
            return Err(bad(n, "expected protected line"));
        }
        let protected: Vec<String> = fields.map(str::to_string).collect();

        let count = |line: (usize, &str), key: &str| -> Result<usize, TokenizeError> {
            line.1
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix('\t'))
                .and_then(|c| c.parse().ok())
                .ok_or_else(|| bad(line.0, &format!("expected {key} count")))
        };
        let vocab_len = count(next("vocab")?, "vocab")?;
        let mut vocab = Vec::with_capacity(vocab_len);
        for expected in 0..vocab_len {
            let (n, line) = next("vocab entry")?;
            let (id, piece) = line.split_once('\t').ok_or_else(|| bad(n, "expected id<TAB>piece"))?;
            if id.parse::<usize>().ok() != Some(expected) {
                return Err(bad(n, "ids must be dense from 0"));
            }
            vocab.push(piece.to_string());
        }
        if vocab.first().map(String::as_str) != Some(UNK) {
            return Err(bad(0, "id 0 must be <unk>"));
        }
        let merge_len = count(next("merges")?, "merges")?;
        let mut merges = Vec::with_capacity(merge_len);
        for _ in 0..merge_len {
            let (n, line) = next("merge rule")?;
            let (l, r) = line.split_once('\t').ok_or_else(|| bad(n, "expected left<TAB>right"))?;
            merges.push((l.to_string(), r.to_string()));
        }
        Ok(Self::assemble(vocab_size, vocab, merges, protected))
    }
}
