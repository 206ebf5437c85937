//! Words over the generators `a, b, c` and their inverses.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A generator or its inverse. Inverses print as upper case letters. The
/// declaration order is the lexicographic order used for enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A,
    AInv,
    B,
    BInv,
    C,
    CInv,
}

impl Letter {
    pub const ALL: [Letter; 6] = [Letter::A, Letter::AInv, Letter::B, Letter::BInv, Letter::C, Letter::CInv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::A => Letter::AInv,
            Letter::AInv => Letter::A,
            Letter::B => Letter::BInv,
            Letter::BInv => Letter::B,
            Letter::C => Letter::CInv,
            Letter::CInv => Letter::C,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::AInv => 'A',
            Letter::B => 'b',
            Letter::BInv => 'B',
            Letter::C => 'c',
            Letter::CInv => 'C',
        }
    }

    pub fn from_char(ch: char) -> Option<Letter> {
        Some(match ch {
            'a' => Letter::A,
            'A' => Letter::AInv,
            'b' => Letter::B,
            'B' => Letter::BInv,
            'c' => Letter::C,
            'C' => Letter::CInv,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
#[error("invalid letter {0:?} in word (expected a, b, c, A, B, C or \"id\")")]
pub struct ParseWordError(pub char);

/// A freely reduced word. Ordered by length, then lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Word {
        Word(Vec::new())
    }

    /// Builds a word, cancelling adjacent inverse pairs.
    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "id");
        }
        for l in &self.0 {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = ParseWordError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "id" {
            return Ok(Word::identity());
        }
        let letters = s
            .chars()
            .map(|ch| Letter::from_char(ch).ok_or(ParseWordError(ch)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Word::new(letters))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parse_and_display() {
        let w: Word = "abC".parse().unwrap();
        assert_eq!(w.to_string(), "abC");
        assert_eq!(w.inverse().to_string(), "cBA");
        assert_eq!("id".parse::<Word>().unwrap(), Word::identity());
        assert_eq!(Word::identity().to_string(), "id");
        assert_eq!("aAb".parse::<Word>().unwrap().to_string(), "b");
        assert!("abx".parse::<Word>().is_err());
    }

    #[test]
    fn shortlex_order() {
        let w = |s: &str| s.parse::<Word>().unwrap();
        assert!(w("c") < w("aa"));
        assert!(w("a") < w("A"));
        assert!(w("A") < w("b"));
        assert!(Word::identity() < w("a"));
    }

    fn any_word() -> impl Strategy<Value = Word> {
        prop::collection::vec(0usize..6, 0..12).prop_map(|v| Word::new(v.into_iter().map(|i| Letter::ALL[i])))
    }

    proptest! {
        #[test]
        fn words_stay_reduced(w in any_word(), v in any_word()) {
            let p = w.concat(&v);
            for pair in p.letters().windows(2) {
                prop_assert_ne!(pair[0].inverse(), pair[1]);
            }
            prop_assert!(w.concat(&w.inverse()).is_empty());
            prop_assert_eq!(p.inverse(), v.inverse().concat(&w.inverse()));
        }
    }
}
