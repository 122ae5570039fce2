use std::collections::BTreeMap;
use std::hash::Hasher;

use fnv::FnvHasher;

/// 64-bit FNV-1a over the UTF-8 bytes of `s`.
pub fn fnv1a(s: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(s.as_bytes());
    h.finish()
}

/// Feature rows for a token sequence: the vocab row of each known token,
/// followed at each position by the hashed rows of the n-grams (order
/// 2..=`ngram_order`) starting there. Hashed rows live past the vocab rows.
pub fn featurize(
    tokens: &[String],
    vocab: &BTreeMap<String, usize>,
    ngram_order: usize,
    hash_buckets: usize,
) -> Vec<usize> {
    let mut out = Vec::with_capacity(tokens.len() * ngram_order.max(1));
    let offset = vocab.len();
    for i in 0..tokens.len() {
        if let Some(&row) = vocab.get(&tokens[i]) {
            out.push(row);
        }
        for n in 2..=ngram_order {
            if i + n > tokens.len() {
                break;
            }
            let gram = tokens[i..i + n].join(" ");
            out.push(offset + (fnv1a(&gram) % hash_buckets as u64) as usize);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(words: &[&str]) -> BTreeMap<String, usize> {
        words.iter().enumerate().map(|(i, w)| (w.to_string(), i)).collect()
    }

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn fnv1a_reference_vectors() {
        assert_eq!(fnv1a(""), 0xcbf29ce484222325);
        assert_eq!(fnv1a("a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a("foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn counts_unigrams_and_ngrams() {
        let v = vocab(&["a", "b"]);
        assert_eq!(featurize(&toks(&["a"]), &v, 1, 16).len(), 1);
        let f = featurize(&toks(&["a", "b"]), &v, 2, 16);
        assert_eq!(f.len(), 3);
        assert_eq!(&f[..2], &[0, 2 + (fnv1a("a b") % 16) as usize]);
        assert_eq!(f[2], 1);
        assert_eq!(featurize(&toks(&["a", "b", "a"]), &v, 3, 16).len(), 3 + 2 + 1);
    }

    #[test]
    fn deterministic_and_bounded() {
        let v = vocab(&["x"]);
        let t = toks(&["x", "y", "z", "x"]);
        let a = featurize(&t, &v, 3, 7);
        assert_eq!(a, featurize(&t, &v, 3, 7));
        assert!(a.iter().all(|&r| r < 1 + 7));
        assert!(featurize(&toks(&["q"]), &v, 1, 7).is_empty(), "unknown unigram has no row");
    }
}
