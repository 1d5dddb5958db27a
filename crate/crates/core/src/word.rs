//! Finite words over `{0, ..., m}` with cached prefix sums.
//!
//! Conventions: `Pre(w)` and `Suf(w)` are the *nonempty* prefixes and
//! suffixes; the empty word is a valid `Word`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Default)]
pub struct Word {
    letters: Vec<u8>,
    // prefix[i] = letters[0] + ... + letters[i-1]
    prefix: Vec<u64>,
}

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        let mut prefix = Vec::with_capacity(letters.len() + 1);
        let mut acc = 0u64;
        prefix.push(0);
        for &a in &letters {
            acc += u64::from(a);
            prefix.push(acc);
        }
        Self { letters, prefix }
    }

    pub fn empty() -> Self {
        Self::new(Vec::new())
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.prefix[self.letters.len()]
    }

    /// Sum of `letters[start..end]`.
    #[inline]
    pub fn range_sum(&self, start: usize, end: usize) -> u64 {
        self.prefix[end] - self.prefix[start]
    }

    pub fn prefix_sums(&self) -> &[u64] {
        &self.prefix
    }

    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word::new(self.letters[start..end].to_vec())
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.slice(0, len)
    }

    pub fn suffix(&self, len: usize) -> Word {
        self.slice(self.len() - len, self.len())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::new(letters)
    }

    pub fn concat_all<'a>(words: impl IntoIterator<Item = &'a Word>) -> Word {
        let mut letters = Vec::new();
        for w in words {
            letters.extend_from_slice(&w.letters);
        }
        Word::new(letters)
    }

    pub fn repeat(&self, times: usize) -> Word {
        Word::new(self.letters.repeat(times))
    }

    /// Coordinatewise `self <= other`, equal lengths required.
    pub fn dominated_by(&self, other: &Word) -> bool {
        self.len() == other.len() && self.letters.iter().zip(&other.letters).all(|(a, b)| a <= b)
    }

    pub fn check_alphabet(&self, max_letter: u8) -> Result<()> {
        match self.letters.iter().position(|&a| a > max_letter) {
            Some(position) => Err(Error::LetterOutOfAlphabet {
                letter: self.letters[position],
                position,
                max_letter,
            }),
            None => Ok(()),
        }
    }

    /// Does `needle` occur as a factor?
    pub fn contains(&self, needle: &Word) -> bool {
        needle.is_empty() || self.letters.windows(needle.len()).any(|w| w == needle.letters())
    }

    /// Shortlex order: by length, then lexicographically.
    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.letters == other.letters
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.letters.hash(state);
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Plain lexicographic order on letters.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.letters.cmp(&other.letters)
    }
}

impl From<Vec<u8>> for Word {
    fn from(letters: Vec<u8>) -> Self {
        Word::new(letters)
    }
}

impl From<&[u8]> for Word {
    fn from(letters: &[u8]) -> Self {
        Word::new(letters.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ε");
        }
        if self.letters.iter().all(|&a| a <= 9) {
            for &a in &self.letters {
                write!(f, "{a}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.letters.iter().map(u8::to_string).collect();
            write!(f, "[{}]", parts.join(","))
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

/// Accepts compact digit strings (`"1011"`), comma lists (`"1,0,11"` or
/// `"[1,0,11]"`), and `""` / `"ε"` for the empty word.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "ε" || s == "eps" {
            return Ok(Word::empty());
        }
        let inner = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(s);
        let letters = if inner.contains(',') {
            inner
                .split(',')
                .map(|t| t.trim().parse::<u8>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("bad word {s:?}: {e}")))?
        } else {
            inner
                .chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad letter {c:?} in word {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?
        };
        Ok(Word::new(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.letters.iter().all(|&a| a <= 9) {
            let text: String = self.letters.iter().map(|a| char::from(b'0' + a)).collect();
            s.serialize_str(&text)
        } else {
            self.letters.serialize(s)
        }
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Letters(Vec<u8>),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Repr::Letters(v) => Ok(Word::new(v)),
        }
    }
}

/// Shorthand for tests and examples: `w("101")`.
pub fn w(s: &str) -> Word {
    s.parse().expect("valid word literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_sums_track_letters() {
        let x = w("1021");
        assert_eq!(x.prefix_sums(), &[0, 1, 1, 3, 4]);
        assert_eq!(x.range_sum(1, 3), 2);
        assert_eq!(x.sum(), 4);
        assert_eq!(Word::empty().sum(), 0);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(w("101").letters(), &[1, 0, 1]);
        assert_eq!(w("1,0,12").letters(), &[1, 0, 12]);
        assert_eq!(w("[3,4]").letters(), &[3, 4]);
        assert!(w("").is_empty());
        assert!(w("ε").is_empty());
        assert!("1a".parse::<Word>().is_err());
    }

    #[test]
    fn display_compact_and_list() {
        assert_eq!(w("0120").to_string(), "0120");
        assert_eq!(Word::new(vec![1, 11]).to_string(), "[1,11]");
        assert_eq!(Word::empty().to_string(), "ε");
    }

    #[test]
    fn json_forms() {
        let a: Word = serde_json::from_str("\"101\"").unwrap();
        let b: Word = serde_json::from_str("[1,0,1]").unwrap();
        assert_eq!(a, b);
        assert_eq!(serde_json::to_string(&a).unwrap(), "\"101\"");
        let big = Word::new(vec![10, 2]);
        assert_eq!(serde_json::to_string(&big).unwrap(), "[10,2]");
    }

    #[test]
    fn alphabet_check() {
        assert!(w("0120").check_alphabet(2).is_ok());
        assert!(matches!(
            w("0130").check_alphabet(2),
            Err(Error::LetterOutOfAlphabet {
                letter: 3,
                position: 2,
                ..
            })
        ));
    }

    #[test]
    fn factors_and_order() {
        assert!(w("00101").contains(&w("10")));
        assert!(!w("00101").contains(&w("11")));
        assert!(w("0").contains(&Word::empty()));
        assert_eq!(w("1").shortlex_cmp(&w("00")), Ordering::Less);
        assert_eq!(w("01").cmp(&w("1")), Ordering::Less);
        assert!(w("001").dominated_by(&w("101")));
        assert!(!w("010").dominated_by(&w("101")));
    }
}
