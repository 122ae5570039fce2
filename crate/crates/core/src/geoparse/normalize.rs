use serde::{Deserialize, Serialize};

/// Canonical form used for gazetteer keys and mention matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameNormalizer {
    /// Generic abbreviations dropped from the front of a name ("ul.", "pl.", "al.").
    pub strip_prefixes: Vec<String>,
}

impl Default for NameNormalizer {
    fn default() -> Self {
        NameNormalizer {
            strip_prefixes: ["ul", "pl", "al"].iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl NameNormalizer {
    pub fn new<I, S>(prefixes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        NameNormalizer {
            strip_prefixes: prefixes.into_iter().map(|p| p.into().to_lowercase()).collect(),
        }
    }

    pub fn normalize(&self, s: &str) -> String {
        let lower = s.to_lowercase();
        let mut words: Vec<&str> = lower.split_whitespace().collect();
        if let Some(first) = words.first().copied() {
            if let Some(rest) = self.strip_prefix(first) {
                if rest.is_empty() {
                    if words.len() > 1 {
                        words.remove(0);
                    }
                } else {
                    words[0] = rest;
                }
            }
        }
        words.join(" ")
    }

    /// For a leading word such as `ul.` or `ul.legnicka`, returns what remains
    /// after the prefix; `None` when the word is not a strippable prefix.
    fn strip_prefix<'a>(&self, word: &'a str) -> Option<&'a str> {
        self.strip_prefixes.iter().find_map(|p| {
            let rest = word.strip_prefix(p.as_str())?;
            if rest.is_empty() {
                Some(rest)
            } else {
                rest.strip_prefix('.')
            }
        })
    }
}

/// [`NameNormalizer::normalize`] with the default prefix list.
pub fn normalize_name(s: &str) -> String {
    NameNormalizer::default().normalize(s)
}
