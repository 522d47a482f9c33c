//! Static sense embeddings and the norm/log-frequency relation.
//!
//! The crate trains skip-gram and GloVe vectors over sense-annotated corpora,
//! measures how the squared ℓ2 norm of a sense vector tracks the logarithm of
//! the sense's corpus frequency, and uses that norm as a feature for
//! most-frequent-sense prediction, word sense disambiguation and
//! word-in-context classification.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common choices.

pub mod convert;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod glove;
mod hogwild;
pub mod logreg;
pub mod mfs;
pub mod normlab;
pub mod scalar;
pub mod senseclf;
pub mod sgns;
pub mod stats;
pub mod synthgen;

pub use corpus::{
    build_inventory, build_vocab, gold_mfs, Corpus, Pos, SenseInventory, SenseStats, Token, Vocab, WordKey,
};
pub use embedding::EmbeddingMatrix;
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision embeddings.
pub type Embeddings = EmbeddingMatrix<f64>;
/// Single-precision embeddings.
pub type Embeddings32 = EmbeddingMatrix<f32>;
/// Double-precision logistic-regression model.
pub type LogReg = logreg::LogRegModel<f64>;
/// Double-precision contextual vectors.
pub type Contexts = senseclf::ContextStore<f64>;
