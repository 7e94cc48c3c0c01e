//! Tools for building spoken-language to sign-annotation parallel corpora
//! from a small set of templates and a domain dictionary.
//!
//! The stages, in pipeline order: [`annotation`] parsing and lint, deny-rule
//! filtering and splitting in [`dataset`], slot-based expansion in
//! [`augment`], layer separation in [`layers`], the two tokenizers in
//! [`tokenize`], a template-memory translator in [`baseline`] and BLEU in
//! [`eval`]. [`pipeline`] chains all of them from one config file.

pub mod annotation;
pub mod augment;
pub mod baseline;
pub mod cli;
pub mod dataset;
pub mod eval;
pub mod layers;
pub mod pipeline;
pub mod tokenize;

use thiserror::Error;

/// Any data error from a library stage.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Annotation(#[from] annotation::AnnotationError),
    #[error(transparent)]
    Augment(#[from] augment::AugmentError),
    #[error(transparent)]
    Dataset(#[from] dataset::DatasetError),
    #[error(transparent)]
    Layer(#[from] layers::LayerError),
    #[error(transparent)]
    Tokenize(#[from] tokenize::TokenizeError),
    #[error(transparent)]
    Eval(#[from] eval::EvalError),
    #[error(transparent)]
    Baseline(#[from] baseline::BaselineError),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    /// A parse error inside a named input file.
    #[error("{path}: {source}")]
    InFile {
        path: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, e: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    /// Attaches the file a parse error came from.
    pub(crate) fn in_file(path: &std::path::Path, e: impl Into<Error>) -> Self {
        match e.into() {
            e @ (Error::Io { .. }
            | Error::InFile { .. }
            | Error::Augment(augment::AugmentError::Io(_))
            | Error::Annotation(annotation::AnnotationError::Io(_))) => e,
            e => Error::InFile {
                path: path.display().to_string(),
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
