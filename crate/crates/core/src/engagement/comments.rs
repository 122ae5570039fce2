use std::collections::BTreeMap;

use crate::classifier::{tokenize, SentimentLabel, TextModel};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ingest::Comment;

/// Comments need at least this many word tokens to be classified.
pub const MIN_COMMENT_WORDS: usize = 4;

pub fn is_emoji(c: char) -> bool {
    matches!(c as u32,
        0x1F600..=0x1F64F // emoticons
        | 0x1F300..=0x1F5FF // symbols and pictographs
        | 0x1F680..=0x1F6FF // transport and map
        | 0x1F900..=0x1F9FF // supplemental symbols and pictographs
        | 0x1FA70..=0x1FAFF // symbols and pictographs extended-A
        | 0x1F1E6..=0x1F1FF // regional indicators
        | 0x2600..=0x26FF   // miscellaneous symbols
        | 0x2700..=0x27BF   // dingbats
        | 0xFE0F | 0x200D   // variation selector, zero-width joiner
    )
}

pub fn strip_emoji(text: &str) -> String {
    text.chars().filter(|&c| !is_emoji(c)).collect()
}

pub fn is_classifiable(text: &str) -> bool {
    let stripped = strip_emoji(text);
    !stripped.trim().is_empty() && tokenize(&stripped).len() >= MIN_COMMENT_WORDS
}

/// Drops short comments and emoji- or picture-only comments (pictures arrive
/// as empty text).
pub fn filter_comments(comments: &[Comment]) -> Vec<Comment> {
    comments.iter().filter(|c| is_classifiable(&c.text)).cloned().collect()
}

/// Labels each comment with a three-class sentiment model. Comments that
/// would not survive [`filter_comments`] are rejected.
pub fn sentiment_classify(
    model: &TextModel,
    comments: &[Comment],
    exec: Execution,
) -> Result<BTreeMap<String, SentimentLabel>> {
    let mut expected = SentimentLabel::label_set();
    let mut actual = model.label_set().to_vec();
    expected.sort();
    actual.sort();
    if expected != actual {
        return Err(Error::invalid(format!(
            "sentiment model labels {:?} are not positive/neutral/negative",
            model.label_set()
        )));
    }
    if let Some(c) = comments.iter().find(|c| !is_classifiable(&c.text)) {
        return Err(Error::invalid(format!(
            "comment `{}` has fewer than {MIN_COMMENT_WORDS} words; filter comments first",
            c.id
        )));
    }
    let texts: Vec<String> = comments.iter().map(|c| strip_emoji(&c.text)).collect();
    let predictions = model.predict_batch(&texts, exec);
    comments
        .iter()
        .zip(predictions)
        .map(|(c, p)| {
            let label = p.label.parse().map_err(Error::invalid)?;
            Ok((c.id.clone(), label))
        })
        .collect()
}
