use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classifier::{token_spans, tokenize};
use crate::error::{Error, Result};

const DEFAULT_TRIGGERS: &str = include_str!("../../data/triggers.txt");

/// Words that introduce a place name ("ul.", "na", "przy", ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggerLexicon {
    triggers: Vec<Vec<String>>,
    max_span: usize,
}

impl Default for TriggerLexicon {
    fn default() -> Self {
        Self::parse(DEFAULT_TRIGGERS, 4).expect("bundled trigger list is valid")
    }
}

impl TriggerLexicon {
    pub fn new<I, S>(triggers: I, max_span: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if max_span == 0 {
            return Err(Error::invalid("max_span must be positive"));
        }
        let mut out: Vec<Vec<String>> = Vec::new();
        for t in triggers {
            let toks = tokenize(t.as_ref());
            if toks.is_empty() {
                return Err(Error::invalid(format!("trigger `{}` has no tokens", t.as_ref())));
            }
            if !out.contains(&toks) {
                out.push(toks);
            }
        }
        if out.is_empty() {
            return Err(Error::invalid("trigger lexicon is empty"));
        }
        Ok(TriggerLexicon {
            triggers: out,
            max_span,
        })
    }

    /// One trigger per line; blank lines and `#` comments are ignored.
    pub fn parse(raw: &str, max_span: usize) -> Result<Self> {
        Self::new(
            raw.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
            max_span,
        )
    }

    pub fn load(path: impl AsRef<Path>, max_span: usize) -> Result<Self> {
        let path = path.as_ref();
        let raw = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&raw, max_span).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
    }

    pub fn triggers(&self) -> &[Vec<String>] {
        &self.triggers
    }

    pub fn max_span(&self) -> usize {
        self.max_span
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpatialMention {
    /// Lowercased tokens of the candidate place name.
    pub surface: Vec<String>,
    /// Byte offsets of the candidate in the original text.
    pub char_span: (usize, usize),
    pub trigger: String,
}

impl SpatialMention {
    pub fn text(&self) -> String {
        self.surface.join(" ")
    }
}

/// Sentence or list punctuation between two tokens ends a candidate run.
fn breaks_run(gap: &str) -> bool {
    gap.chars().any(|c| matches!(c, '.' | ',' | ';' | ':' | '!' | '?' | '(' | ')' | '\n'))
}

/// Left-to-right scan: after every trigger occurrence, the following run of
/// up to `max_span` capitalized or digit-bearing tokens becomes a candidate.
pub fn detect_mentions(text: &str, lexicon: &TriggerLexicon) -> Vec<SpatialMention> {
    let tokens = token_spans(text);
    let mut out = Vec::new();
    for i in 0..tokens.len() {
        for trigger in &lexicon.triggers {
            let end = i + trigger.len();
            if end >= tokens.len() || tokens[i..end].iter().zip(trigger).any(|(t, w)| t.lower != *w) {
                continue;
            }
            let mut run = Vec::new();
            for j in end..tokens.len().min(end + lexicon.max_span) {
                let tok = &tokens[j];
                if !(tok.is_capitalized() || tok.has_digit()) {
                    break;
                }
                if j > end && breaks_run(&text[tokens[j - 1].end..tok.start]) {
                    break;
                }
                run.push(tok);
            }
            if let (Some(first), Some(last)) = (run.first(), run.last()) {
                out.push(SpatialMention {
                    surface: run.iter().map(|t| t.lower.clone()).collect(),
                    char_span: (first.start, last.end),
                    trigger: trigger.join(" "),
                });
            }
        }
    }
    out
}
