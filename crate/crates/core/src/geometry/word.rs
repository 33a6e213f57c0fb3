use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A finite word over the alphabet `{1, …, m}`. Digits are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word, rejecting the digit 0.
    pub fn new(digits: Vec<u8>) -> Result<Self> {
        if let Some(&d) = digits.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDigit {
                digit: d as usize,
                alphabet: 0,
            });
        }
        Ok(Word(digits))
    }

    pub(crate) fn from_digits_unchecked(digits: Vec<u8>) -> Self {
        Word(digits)
    }

    /// The word `d d … d` of the given length.
    pub fn repeat(digit: u8, len: usize) -> Self {
        Word(vec![digit; len])
    }

    pub fn digits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Checks every digit lies in `1..=alphabet`.
    pub fn validate(&self, alphabet: usize) -> Result<()> {
        match self.0.iter().find(|&&d| d == 0 || d as usize > alphabet) {
            Some(&d) => Err(Error::InvalidDigit {
                digit: d as usize,
                alphabet,
            }),
            None => Ok(()),
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, digit: u8) {
        self.0.push(digit);
    }

    pub fn pop(&mut self) -> Option<u8> {
        self.0.pop()
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    /// All words of exactly `len` digits over `1..=alphabet` in lexicographic order.
    pub fn all_of_length(alphabet: usize, len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..len {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (1..=alphabet as u8).map(move |d| {
                        let mut v = w.0.clone();
                        v.push(d);
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&d| d < 10) {
            for d in &self.0 {
                write!(f, "{d}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
            write!(f, "{}", parts.join("."))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    /// Parses a digit string such as `"1231"`; a dotted form `"1.12.3"` is
    /// accepted for alphabets with more than nine symbols.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" {
            return Ok(Word::empty());
        }
        let digits: Option<Vec<u8>> = if s.contains('.') {
            s.split('.').map(|p| p.parse::<u8>().ok()).collect()
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as u8)).collect()
        };
        let digits = digits.ok_or_else(|| Error::InvalidAddress(format!("not a word: {s:?}")))?;
        Word::new(digits)
    }
}

/// An eventually periodic infinite address `u v v v …` with `v` non-empty.
///
/// Addresses are kept in a canonical form: the period is primitive and the
/// preperiod is as short as possible, so structural equality is equality of
/// the infinite sequences.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Address {
    preperiod: Word,
    period: Word,
}

impl Address {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidAddress("period must be non-empty".into()));
        }
        Word::new(preperiod.0.clone())?;
        Word::new(period.0.clone())?;
        Ok(Self::normalized(preperiod.0, period.0))
    }

    /// The constant address `d d d …`.
    pub fn constant(digit: u8) -> Self {
        Address {
            preperiod: Word::empty(),
            period: Word(vec![digit]),
        }
    }

    pub fn periodic(period: Word) -> Result<Self> {
        Self::new(Word::empty(), period)
    }

    /// The concatenation of every word of length `1..=depth` over the
    /// alphabet, in length-then-lexicographic order, used as a period. Every
    /// word of length at most `depth` occurs in the resulting address.
    pub fn disjunctive(alphabet: usize, depth: usize) -> Self {
        let mut block = Vec::new();
        for len in 1..=depth.max(1) {
            for w in Word::all_of_length(alphabet, len) {
                block.extend_from_slice(w.digits());
            }
        }
        Self::normalized(Vec::new(), block)
    }

    fn normalized(mut pre: Vec<u8>, period: Vec<u8>) -> Self {
        let mut period = primitive_root(&period).to_vec();
        while let (Some(&a), Some(&b)) = (pre.last(), period.last()) {
            if a != b {
                break;
            }
            pre.pop();
            period.rotate_right(1);
        }
        Address {
            preperiod: Word(pre),
            period: Word(period),
        }
    }

    pub fn preperiod(&self) -> &Word {
        &self.preperiod
    }

    pub fn period(&self) -> &Word {
        &self.period
    }

    /// The `k`-th digit, 1-based.
    pub fn digit(&self, k: usize) -> u8 {
        assert!(k >= 1, "digits are 1-based");
        let i = k - 1;
        let pre = self.preperiod.len();
        if i < pre {
            self.preperiod.0[i]
        } else {
            self.period.0[(i - pre) % self.period.len()]
        }
    }

    /// The finite prefix `i|k`.
    pub fn prefix(&self, k: usize) -> Word {
        Word((1..=k).map(|j| self.digit(j)).collect())
    }

    /// The shift `σᵖ`.
    pub fn shift(&self, p: usize) -> Address {
        let pre = self.preperiod.len();
        if p <= pre {
            return Self::normalized(self.preperiod.0[p..].to_vec(), self.period.0.clone());
        }
        let mut period = self.period.0.clone();
        let r = (p - pre) % period.len();
        period.rotate_left(r);
        Self::normalized(Vec::new(), period)
    }

    /// Prepends a finite word.
    pub fn prepend(&self, w: &Word) -> Address {
        let mut pre = w.0.clone();
        pre.extend_from_slice(&self.preperiod.0);
        Self::normalized(pre, self.period.0.clone())
    }

    pub fn validate(&self, alphabet: usize) -> Result<()> {
        self.preperiod.validate(alphabet)?;
        self.period.validate(alphabet)
    }

    /// First position `k ≤ search_depth` with `digits k+1 ..= k+|w|` equal to
    /// `w`. A finite scan can only ever produce a witness, never a proof of
    /// disjunctiveness.
    pub fn find_word(&self, w: &Word, search_depth: usize) -> Option<usize> {
        // Past preperiod + period the digit pattern repeats, so there is no
        // point scanning further than that.
        let horizon = search_depth.min(self.preperiod.len() + self.period.len());
        (0..=horizon).find(|&k| w.0.iter().enumerate().all(|(j, &d)| self.digit(k + j + 1) == d))
    }
}

/// Witness search used by tests of disjunctiveness.
pub fn is_disjunctive_witness(a: &Address, w: &Word, search_depth: usize) -> Option<usize> {
    a.find_word(w, search_depth)
}

impl fmt::Display for Address {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.preperiod, self.period)
    }
}

impl FromStr for Address {
    type Err = Error;

    /// Parses `"12(21)"` as `12 21 21 …`. A bare finite string `"112"` is
    /// read as that prefix followed by its last digit repeated.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.find('(') {
            Some(open) => {
                let close = s
                    .rfind(')')
                    .filter(|&c| c == s.len() - 1 && c > open)
                    .ok_or_else(|| Error::InvalidAddress(format!("unbalanced parentheses in {s:?}")))?;
                let pre: Word = s[..open].parse()?;
                let period: Word = s[open + 1..close].parse()?;
                Address::new(pre, period)
            }
            None => {
                let w: Word = s.parse()?;
                let last = *w.digits().last().ok_or_else(|| Error::InvalidAddress("empty address".into()))?;
                Address::new(w, Word(vec![last]))
            }
        }
    }
}

fn primitive_root(v: &[u8]) -> &[u8] {
    let n = v.len();
    (1..=n)
        .filter(|&p| n.is_multiple_of(p))
        .find(|&p| (p..n).all(|i| v[i] == v[i - p]))
        .map(|p| &v[..p])
        .unwrap_or(v)
}
