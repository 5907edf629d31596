use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

/// A word over the letters `a0..ak`, stored as letter indices.
///
/// Ordering is length first, then lexicographic, which is the canonical
/// iteration order of every coefficient map in the crate.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: u8) -> Self {
        Word(vec![i])
    }

    pub fn from_letters(letters: impl Into<Vec<u8>>) -> Self {
        Word(letters.into())
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of occurrences of the drift letter `a0`.
    pub fn a0_degree(&self) -> usize {
        self.0.iter().filter(|&&l| l == 0).count()
    }

    pub fn max_letter(&self) -> Option<u8> {
        self.0.iter().copied().max()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Parses `"a1a0a2"`; the empty string and `"1"` denote the empty word.
    pub fn parse(s: &str) -> Option<Word> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Some(Word::empty());
        }
        let mut out = Vec::new();
        for part in s.split('a').skip(1) {
            out.push(part.parse::<u8>().ok()?);
        }
        if !s.starts_with('a') {
            return None;
        }
        Some(Word(out))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "a{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_length_then_lex() {
        let mut ws = vec![
            Word::from_letters(vec![1, 0]),
            Word::letter(2),
            Word::empty(),
            Word::from_letters(vec![0, 1]),
        ];
        ws.sort();
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["1", "a2", "a0a1", "a1a0"]);
    }

    #[test]
    fn parse_and_degree() {
        let w = Word::parse("a1a0a12").unwrap();
        assert_eq!(w.letters(), &[1, 0, 12]);
        assert_eq!(w.a0_degree(), 1);
        assert_eq!(Word::parse("1").unwrap(), Word::empty());
        assert!(Word::parse("b1").is_none());
    }
}
