//! Tokenizers shared by the spoken and annotated sides.
//!
//! Two models are provided: a subword model trained directly on raw lines
//! with a word-boundary marker ([`SubwordModel`]), and a cohesion-based
//! L-tokenizer that splits each space-delimited unit into a cohesive left
//! part and a remainder ([`CohesionModel`], wrapped for vocabulary lookup by
//! [`CohesionTokenizer`]).
//!
//! Both render out-of-vocabulary material as [`UNK`].

mod bpe;
mod cohesion;

use thiserror::Error;

use crate::augment::ParallelPair;

pub use bpe::{train_bpe, SubwordModel};
pub use cohesion::{train_cohesion, CohesionModel, CohesionTokenizer};

/// Word-initial marker. Never valid in raw corpus text.
pub const BOUNDARY: char = '\u{2581}';
pub const BOUNDARY_STR: &str = "\u{2581}";
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TokenizeError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("vocabulary size {requested} is below the initial vocabulary of {minimum} pieces")]
    VocabTooSmall { requested: usize, minimum: usize },
    #[error("token id {id} is outside the vocabulary of {size}")]
    UnknownId { id: u32, size: usize },
    #[error("invalid protected symbol '{0}'")]
    InvalidProtected(String),
    #[error("corpus contains the reserved boundary marker on line {line}")]
    ReservedSymbol { line: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("model file line {line}: {message}")]
    ModelFormat { line: usize, message: String },
}

/// Ids into a model's vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TokenStream {
    pub ids: Vec<u32>,
}

impl TokenStream {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Text-level interface used by evaluation; pieces are plain strings.
pub trait Tokenizer {
    fn encode_pieces(&self, text: &str) -> Vec<String>;
    fn decode_pieces(&self, pieces: &[String]) -> String;
    fn unk_symbol(&self) -> &str {
        UNK
    }
}

impl Tokenizer for SubwordModel {
    fn encode_pieces(&self, text: &str) -> Vec<String> {
        SubwordModel::encode_pieces(self, text)
    }

    fn decode_pieces(&self, pieces: &[String]) -> String {
        SubwordModel::decode_pieces(self, pieces)
    }
}

impl Tokenizer for CohesionTokenizer {
    fn encode_pieces(&self, text: &str) -> Vec<String> {
        CohesionTokenizer::encode_pieces(self, text)
    }

    fn decode_pieces(&self, pieces: &[String]) -> String {
        CohesionTokenizer::decode_pieces(self, pieces)
    }
}

/// Either model kind, as read from a model file.
#[derive(Debug, Clone, PartialEq)]
pub enum TokenizerModel {
    Subword(SubwordModel),
    Cohesion(CohesionTokenizer),
}

impl TokenizerModel {
    /// Dispatches on the header of the first line.
    pub fn from_model_str(text: &str) -> Result<Self, TokenizeError> {
        let first = text.lines().next().unwrap_or_default();
        if first.starts_with(bpe::HEADER) {
            Ok(Self::Subword(SubwordModel::from_model_str(text)?))
        } else if first.starts_with(cohesion::HEADER) {
            Ok(Self::Cohesion(CohesionTokenizer::from_model_str(text)?))
        } else {
            Err(TokenizeError::ModelFormat {
                line: 1,
                message: "unrecognized model header".into(),
            })
        }
    }

    pub fn to_model_string(&self) -> String {
        match self {
            Self::Subword(m) => m.to_model_string(),
            Self::Cohesion(m) => m.to_model_string(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Subword(_) => "bpe",
            Self::Cohesion(_) => "cohesion",
        }
    }
}

impl Tokenizer for TokenizerModel {
    fn encode_pieces(&self, text: &str) -> Vec<String> {
        match self {
            Self::Subword(m) => m.encode_pieces(text),
            Self::Cohesion(m) => m.encode_pieces(text),
        }
    }

    fn decode_pieces(&self, pieces: &[String]) -> String {
        match self {
            Self::Subword(m) => m.decode_pieces(pieces),
            Self::Cohesion(m) => m.decode_pieces(pieces),
        }
    }
}

/// Concatenates pieces, turning boundary markers into single spaces.
pub(crate) fn join_pieces<S: AsRef<str>>(pieces: &[S]) -> String {
    let mut text = String::new();
    for piece in pieces {
        text.push_str(piece.as_ref());
    }
    let text = text.replace(BOUNDARY, " ");
    text.strip_prefix(' ').map(str::to_string).unwrap_or(text)
}

/// Encodes both sides of a pair with one shared model. The target is
/// encoded in its canonical annotation form.
pub fn tokenize_pair(model: &SubwordModel, pair: &ParallelPair) -> (TokenStream, TokenStream) {
    (model.encode(&pair.source), model.encode(&pair.target.to_string()))
}
