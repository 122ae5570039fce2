/// Levenshtein distance from `a` to every prefix of `b`: element `j` is the
/// distance between all of `a` and the first `j` characters of `b`.
pub fn distances_to_prefixes(a: &[char], b: &[char]) -> Vec<usize> {
    // prev[j] = distance(a[..i], b[..j]) for the row being built
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev
}

/// Unit-cost insert/delete/substitute distance over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    distances_to_prefixes(long, short)[short.len()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_cases() {
        assert_eq!(edit_distance("legnicka", "legnicka"), 0);
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("abc", ""), 3);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
        assert_eq!(edit_distance("kasprowicza", "kasprowicz"), 1);
    }

    #[test]
    fn counts_characters_not_bytes() {
        assert_eq!(edit_distance("śląska", "slaska"), 2);
        assert_eq!(edit_distance("ż", "z"), 1);
    }

    #[test]
    fn prefix_row() {
        let a: Vec<char> = "legnickiej".chars().collect();
        let b: Vec<char> = "legnicka".chars().collect();
        let row = distances_to_prefixes(&a, &b);
        assert_eq!(row.len(), 9);
        assert_eq!(row[8], 3);
        assert_eq!(row[7], 3);
        assert_eq!(row[6], 4);
    }
}
