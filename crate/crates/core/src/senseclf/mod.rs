//! Sense classifiers that combine contextual similarities with the norm of a
//! static sense embedding.

mod context;
pub mod eval;
pub mod wic;
pub mod wsd;

pub use context::ContextStore;
pub use eval::{read_keys, wic_accuracy, write_keys, PrfScore, WsdMetrics};
pub use wic::{NormMode, WicFeatures, WicOptions, WicPair};
pub use wsd::{WsdInstance, WsdPrediction, WsdTrainingSet};

use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingMatrix;
use crate::scalar::{squared_norm, Scalar};

/// Which form of the norm enters the feature vector.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormForm {
    #[default]
    Squared,
    Plain,
}

/// Norm feature source with mean imputation for senses the norm embeddings
/// do not cover.
#[derive(Clone, Debug)]
pub struct NormLookup<'a, T> {
    emb: &'a EmbeddingMatrix<T>,
    form: NormForm,
    imputed: T,
}

impl<'a, T: Scalar> NormLookup<'a, T> {
    pub fn new(emb: &'a EmbeddingMatrix<T>, form: NormForm) -> Self {
        let n = T::of(emb.len().max(1) as f64);
        let imputed = emb.iter().map(|(_, v)| Self::value(form, v)).sum::<T>() / n;
        NormLookup { emb, form, imputed }
    }

    fn value(form: NormForm, v: &[T]) -> T {
        match form {
            NormForm::Squared => squared_norm(v),
            NormForm::Plain => squared_norm(v).sqrt(),
        }
    }

    /// Returns the feature and whether it was imputed.
    pub fn get(&self, sense: &str) -> (T, bool) {
        match self.emb.get(sense) {
            Some(v) => (Self::value(self.form, v), false),
            None => (self.imputed, true),
        }
    }

    pub fn imputed_value(&self) -> T {
        self.imputed
    }

    pub fn form(&self) -> NormForm {
        self.form
    }
}
