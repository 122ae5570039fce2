//! Comment preprocessing and sentiment, annotator agreement, and
//! reaction/interaction statistics.

mod agreement;
mod comments;
mod interactions;
mod kappa;

pub use agreement::{
    load_annotations, pairwise_agreement, AgreementReport, Annotations, PairAgreement,
};
pub use crate::classifier::SentimentLabel;
pub use comments::{
    filter_comments, is_classifiable, is_emoji, sentiment_classify, strip_emoji, MIN_COMMENT_WORDS,
};
pub use interactions::{interaction_summary, reaction_distribution, InteractionSummary, ReactionTable};
pub use kappa::{cohen_kappa, AgreementResult};
