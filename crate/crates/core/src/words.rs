//! Reduced words in the generators, enumerated breadth first.
//!
//! Letters print as `a, b, c, ...` for generators and `A, B, C, ...` for their
//! inverses; past the alphabet the forms `g27` / `G27` are used. The empty word
//! prints as `1`.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::hermitian::{Mat3, Su21Element};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter { generator, inverse }
    }

    pub fn inverse(self) -> Self {
        Letter { inverse: !self.inverse, ..self }
    }

    fn matrix(self, gens: &[Su21Element]) -> Mat3 {
        let g = &gens[self.generator];
        if self.inverse {
            *g.inverse().matrix()
        } else {
            *g.matrix()
        }
    }
}

/// A word in the generators, read left to right as a matrix product.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn generator(k: usize) -> Self {
        Word(vec![Letter::new(k, false)])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// Concatenation followed by free reduction.
    pub fn concat(&self, other: &Word) -> Self {
        let mut out = self.0.clone();
        for &l in &other.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn pow(&self, n: usize) -> Self {
        (0..n).fold(Word::empty(), |acc, _| acc.concat(self))
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.generator).max()
    }

    /// Replaces generator `k` by `images[k]` and reduces.
    pub fn substitute(&self, images: &[Word]) -> Word {
        self.0.iter().fold(Word::empty(), |acc, l| {
            let img = &images[l.generator];
            acc.concat(&if l.inverse { img.inverse() } else { img.clone() })
        })
    }

    pub fn evaluate(&self, gens: &[Su21Element]) -> Su21Element {
        let m = self.0.iter().fold(Mat3::identity(), |acc, l| acc * l.matrix(gens));
        Su21Element::trusted(m)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            if l.generator < 26 {
                let c = (b'a' + l.generator as u8) as char;
                write!(f, "{}", if l.inverse { c.to_ascii_uppercase() } else { c })?;
            } else {
                write!(f, "{}{}", if l.inverse { 'G' } else { 'g' }, l.generator + 1)?;
            }
        }
        Ok(())
    }
}

impl serde::Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s == "1" || s.is_empty() {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        let chars: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if (c == 'g' || c == 'G') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let n: usize = chars[i + 1..j].iter().collect::<String>().parse().map_err(|_| bad_word(s))?;
                if n == 0 {
                    return Err(bad_word(s));
                }
                letters.push(Letter::new(n - 1, c == 'G'));
                i = j;
            } else if c.is_ascii_alphabetic() {
                let k = (c.to_ascii_lowercase() as u8 - b'a') as usize;
                letters.push(Letter::new(k, c.is_ascii_uppercase()));
                i += 1;
            } else {
                return Err(bad_word(s));
            }
        }
        Ok(Word(letters))
    }
}

fn bad_word(s: &str) -> Error {
    Error::Parse(format!("malformed word {s:?}"))
}

/// Enumeration parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WordSampler {
    pub max_length: usize,
    pub include_inverses: bool,
    /// Quantization step for trace-key deduplication; `None` keeps every word.
    pub dedup_step: Option<f64>,
}

impl Default for WordSampler {
    fn default() -> Self {
        WordSampler { max_length: 6, include_inverses: true, dedup_step: Some(1e-8) }
    }
}

impl WordSampler {
    pub fn with_max_length(max_length: usize) -> Self {
        WordSampler { max_length, ..Self::default() }
    }
}

/// Lazy breadth-first enumeration of reduced words, including the empty word.
///
/// Order: by length; within a length, by parent order then generator index
/// then inverse flag of the appended letter.
pub struct Words<'a> {
    gens: &'a [Su21Element],
    letters: Vec<Letter>,
    max_length: usize,
    level: Vec<(Word, Mat3)>,
    pos: usize,
    length: usize,
}

impl<'a> Words<'a> {
    pub fn new(gens: &'a [Su21Element], max_length: usize, include_inverses: bool) -> Self {
        let letters = (0..gens.len())
            .flat_map(|k| {
                let inv = if include_inverses { vec![false, true] } else { vec![false] };
                inv.into_iter().map(move |i| Letter::new(k, i))
            })
            .collect();
        Words { gens, letters, max_length, level: vec![(Word::empty(), Mat3::identity())], pos: 0, length: 0 }
    }

    fn advance_level(&mut self) -> bool {
        if self.length >= self.max_length || self.letters.is_empty() {
            return false;
        }
        let mats: Vec<Mat3> = self.letters.iter().map(|l| l.matrix(self.gens)).collect();
        let mut next = Vec::with_capacity(self.level.len() * self.letters.len());
        for (w, m) in &self.level {
            let last = w.0.last().copied();
            for (l, lm) in self.letters.iter().zip(&mats) {
                if last == Some(l.inverse()) {
                    continue;
                }
                let mut word = w.0.clone();
                word.push(*l);
                next.push((Word(word), *m * *lm));
            }
        }
        self.level = next;
        self.pos = 0;
        self.length += 1;
        !self.level.is_empty()
    }
}

impl Iterator for Words<'_> {
    type Item = (Word, Su21Element);

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos >= self.level.len() && !self.advance_level() {
            return None;
        }
        let (w, m) = &self.level[self.pos];
        self.pos += 1;
        Some((w.clone(), Su21Element::trusted(*m)))
    }
}

/// All reduced words up to `sampler.max_length`, with their matrices.
pub fn enumerate(gens: &[Su21Element], sampler: &WordSampler) -> Vec<(Word, Su21Element)> {
    Words::new(gens, sampler.max_length, sampler.include_inverses).collect()
}
