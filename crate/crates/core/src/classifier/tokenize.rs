/// A token with its byte range in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub start: usize,
    pub end: usize,
    /// The token as written, case preserved.
    pub raw: &'a str,
    pub lower: String,
}

impl Token<'_> {
    pub fn is_capitalized(&self) -> bool {
        self.raw.chars().next().is_some_and(char::is_uppercase)
    }

    pub fn has_digit(&self) -> bool {
        self.raw.chars().any(|c| c.is_numeric())
    }
}

/// Splits on every character that is neither a letter nor a digit.
pub fn token_spans(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(make(text, s, i));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(make(text, s, text.len()));
    }
    out
}

fn make(text: &str, start: usize, end: usize) -> Token<'_> {
    let raw = &text[start..end];
    Token {
        start,
        end,
        raw,
        lower: raw.to_lowercase(),
    }
}

/// Lowercased letter/digit runs; diacritics are kept.
pub fn tokenize(text: &str) -> Vec<String> {
    token_spans(text).into_iter().map(|t| t.lower).collect()
}
