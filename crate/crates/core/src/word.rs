//! Words over the alphabet `{0, .., d-1}`: the multi-indices labelling
//! monomials, moments and cumulants.
//!
//! Letters are stored 0-based. Every external form (JSON, LaTeX, `Display`)
//! is 1-based, matching `x_1, .., x_d`.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A finite sequence of variable indices. Ordered graded-lexicographically:
/// shorter words first, then lexicographic.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    /// Builds a word from 1-based letters, checking the range `1..=d`.
    pub fn from_one_based(letters: &[usize], d: usize) -> Result<Self> {
        let mut out = Vec::with_capacity(letters.len());
        for &l in letters {
            if l == 0 || l > d {
                return Err(Error::IndexOutOfRange { index: l, d });
            }
            out.push((l - 1) as u8);
        }
        Ok(Word(out))
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i as u8])
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

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().map(|&l| l as usize)
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().map(|&l| l as usize)
    }

    pub fn get(&self, pos: usize) -> usize {
        self.0[pos] as usize
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|&l| l as usize + 1).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, letter: usize) -> Word {
        let mut v = self.0.clone();
        v.push(letter as u8);
        Word(v)
    }

    pub fn prepend(&self, letter: usize) -> Word {
        let mut v = Vec::with_capacity(self.len() + 1);
        v.push(letter as u8);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        let mut v = self.0.clone();
        v.reverse();
        Word(v)
    }

    /// Letters in `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Drops the first letter.
    pub fn tail(&self) -> Word {
        self.slice(1.min(self.len()), self.len())
    }

    /// Drops the last letter.
    pub fn init(&self) -> Word {
        self.slice(0, self.len().saturating_sub(1))
    }

    /// The subword at the given (sorted) positions.
    pub fn restrict(&self, positions: &[usize]) -> Word {
        Word(positions.iter().map(|&p| self.0[p]).collect())
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.0.iter().max().map(|&l| l as usize)
    }

    pub fn check_alphabet(&self, d: usize) -> Result<()> {
        match self.max_letter() {
            Some(m) if m >= d => Err(Error::IndexOutOfRange { index: m + 1, d }),
            _ => Ok(()),
        }
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

impl From<&[u8]> for Word {
    fn from(v: &[u8]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", *l as usize + 1)?;
        }
        write!(f, ")")
    }
}

/// All words of length exactly `n` over `d` letters, in lexicographic order.
pub fn words_of_length(d: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Word::empty()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * d);
        for w in &out {
            for l in 0..d {
                next.push(w.push(l));
            }
        }
        out = next;
    }
    out
}

/// All words of length `0..=n` in graded-lex order.
pub fn words_up_to(d: usize, n: usize) -> Vec<Word> {
    (0..=n).flat_map(|k| words_of_length(d, k)).collect()
}

/// Number of words of length `<= n` over `d` letters, saturating.
pub fn word_count(d: usize, n: usize) -> u128 {
    let mut total: u128 = 0;
    let mut pow: u128 = 1;
    for _ in 0..=n {
        total = total.saturating_add(pow);
        pow = pow.saturating_mul(d as u128);
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_order() {
        let mut ws = [
            Word::new(vec![1, 0]),
            Word::new(vec![0]),
            Word::empty(),
            Word::new(vec![0, 1]),
            Word::new(vec![1]),
        ];
        ws.sort();
        let shown: Vec<String> = ws.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["()", "(1)", "(2)", "(1,2)", "(2,1)"]);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(words_up_to(2, 3).len(), 15);
        assert_eq!(word_count(2, 3), 15);
        assert_eq!(word_count(1, 8), 9);
        let ws = words_up_to(3, 2);
        assert!(ws.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn one_based_conversion() {
        let w = Word::from_one_based(&[1, 2, 1], 2).unwrap();
        assert_eq!(w.letters(), &[0, 1, 0]);
        assert_eq!(w.one_based(), vec![1, 2, 1]);
        assert!(Word::from_one_based(&[3], 2).is_err());
        assert!(Word::from_one_based(&[0], 2).is_err());
    }
}
