//! Hashed word n-gram text classifier (averaged embeddings, softmax output),
//! shared by the incident-type and comment-sentiment tasks.

mod eval;
mod features;
mod labels;
mod model;
mod tokenize;

pub use eval::{evaluate, Evaluation};
pub use features::{featurize, fnv1a};
pub use labels::{IncidentLabel, SentimentLabel};
pub use model::{softmax, train, ClassifierConfig, LabeledDoc, Prediction, TextModel, TrainStats};
pub use tokenize::{token_spans, tokenize, Token};
