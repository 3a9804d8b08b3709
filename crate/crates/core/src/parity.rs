//! Parity filtration of chords and the word it induces.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagram::{Chord, ChordDiagram};
use crate::error::{Error, Result};

/// A letter of the alphabet attached to a filtration of depth `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Letter {
    /// Odd chord of level `k` that is odd within its own level.
    Prime(usize),
    /// Odd chord of level `k` that is even within its own level.
    DoublePrime(usize),
    /// Chord surviving all `m` extractions.
    Final,
}

impl Letter {
    pub fn level(self) -> Option<usize> {
        match self {
            Letter::Prime(k) | Letter::DoublePrime(k) => Some(k),
            Letter::Final => None,
        }
    }

    pub fn check(self, m: usize) -> Result<()> {
        match self.level() {
            Some(level) if level >= m => Err(Error::LevelOutOfRange { level, m }),
            _ => Ok(()),
        }
    }

    /// All `2m + 1` letters for depth `m`, in a fixed order.
    pub fn alphabet(m: usize) -> Vec<Letter> {
        (0..m)
            .flat_map(|k| [Letter::Prime(k), Letter::DoublePrime(k)])
            .chain(std::iter::once(Letter::Final))
            .collect()
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::Prime(k) => write!(f, "P{k}"),
            Letter::DoublePrime(k) => write!(f, "D{k}"),
            Letter::Final => f.write_str("F"),
        }
    }
}

impl FromStr for Letter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::BadLetter(s.to_string());
        if s == "F" {
            return Ok(Letter::Final);
        }
        let (head, tail) = s.split_at_checked(1).ok_or_else(bad)?;
        if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let k = tail.parse().map_err(|_| bad())?;
        match head {
            "P" => Ok(Letter::Prime(k)),
            "D" => Ok(Letter::DoublePrime(k)),
            _ => Err(bad()),
        }
    }
}

impl From<Letter> for String {
    fn from(l: Letter) -> Self {
        l.to_string()
    }
}

impl TryFrom<String> for Letter {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// A word over the alphabet of depth `m`. Every letter is in range for `m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "WordJson")]
pub struct Word {
    m: usize,
    letters: Vec<Letter>,
}

#[derive(Deserialize)]
struct WordJson {
    m: usize,
    letters: Vec<Letter>,
}

impl TryFrom<WordJson> for Word {
    type Error = Error;

    fn try_from(w: WordJson) -> Result<Self> {
        Word::new(w.m, w.letters)
    }
}

impl Word {
    pub fn new(m: usize, letters: Vec<Letter>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidM(m));
        }
        for l in &letters {
            l.check(m)?;
        }
        Ok(Word { m, letters })
    }

    pub fn empty(m: usize) -> Result<Self> {
        Self::new(m, Vec::new())
    }

    /// Parses space separated tokens such as `"D0 F D0"`.
    pub fn parse(m: usize, text: &str) -> Result<Self> {
        let letters = text.split_whitespace().map(str::parse).collect::<Result<_>>()?;
        Self::new(m, letters)
    }

    pub(crate) fn from_letters_unchecked(m: usize, letters: Vec<Letter>) -> Self {
        Word { m, letters }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Reversed word. Every generator is an involution, so this is the inverse.
    pub fn reversed(&self) -> Word {
        Word { m: self.m, letters: self.letters.iter().rev().copied().collect() }
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        if self.m != other.m {
            return Err(Error::MixedM(self.m, other.m));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word { m: self.m, letters })
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<String> = self.letters.iter().map(Letter::to_string).collect();
        f.write_str(&toks.join(" "))
    }
}

/// Level assignment of every chord of a diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Filtration {
    m: usize,
    /// Letter of each chord, indexed like `ChordDiagram::chords`.
    classes: Vec<Letter>,
    #[serde(skip)]
    chords: Vec<Chord>,
}

impl Filtration {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn letter_of_index(&self, i: usize) -> Letter {
        self.classes[i]
    }

    pub fn letter_of(&self, c: Chord) -> Option<Letter> {
        self.chords.iter().position(|&x| x == c).map(|i| self.classes[i])
    }

    /// Level `k` for `k < m`, or the residue for `k == m`.
    pub fn level(&self, k: usize) -> Vec<Chord> {
        self.select(|l| match l {
            Letter::Final => k == self.m,
            _ => l.level() == Some(k),
        })
    }

    /// Chords of level `k` that are odd within the level.
    pub fn primes(&self, k: usize) -> Vec<Chord> {
        self.select(|l| l == Letter::Prime(k))
    }

    /// Chords of level `k` that are even within the level.
    pub fn double_primes(&self, k: usize) -> Vec<Chord> {
        self.select(|l| l == Letter::DoublePrime(k))
    }

    fn select(&self, f: impl Fn(Letter) -> bool) -> Vec<Chord> {
        self.chords
            .iter()
            .zip(&self.classes)
            .filter(|(_, &l)| f(l))
            .map(|(&c, _)| c)
            .collect()
    }

    /// One-line summary like `a0: P=0 D=2 | a1: 1`.
    pub fn summary(&self) -> String {
        let mut parts: Vec<String> = (0..self.m)
            .map(|k| format!("a{k}: P={} D={}", self.primes(k).len(), self.double_primes(k).len()))
            .collect();
        parts.push(format!("a{}: {}", self.m, self.level(self.m).len()));
        parts.join(" | ")
    }
}

/// Iterated odd-chord extraction to depth `m`.
pub fn filtration(d: &ChordDiagram, m: usize) -> Result<Filtration> {
    if m == 0 {
        return Err(Error::InvalidM(m));
    }
    let link = d.link_matrix();
    let n = d.n();
    let count_in = |i: usize, set: &[usize]| set.iter().filter(|&&j| link[i][j]).count();
    let mut classes = vec![Letter::Final; n];
    let mut alive: Vec<usize> = (0..n).collect();
    for k in 0..m {
        let (odd, even): (Vec<usize>, Vec<usize>) =
            alive.iter().partition(|&&i| count_in(i, &alive) % 2 == 1);
        for &i in &odd {
            classes[i] = if count_in(i, &odd) % 2 == 1 {
                Letter::Prime(k)
            } else {
                Letter::DoublePrime(k)
            };
        }
        alive = even;
    }
    Ok(Filtration { m, classes, chords: d.chords().to_vec() })
}

/// Removes every chord that is odd in the whole diagram, renumbering the rest.
pub fn delete_odd(d: &ChordDiagram) -> ChordDiagram {
    let link = d.link_matrix();
    d.restrict(|i| link[i].iter().filter(|&&l| l).count() % 2 == 0)
}

/// The word read along positions `1..=2n`; both ends of a chord carry the
/// letter of its class.
pub fn word_of(d: &ChordDiagram, m: usize) -> Result<Word> {
    let f = filtration(d, m)?;
    let letters = d.owners().into_iter().map(|i| f.classes[i]).collect();
    Ok(Word::from_letters_unchecked(m, letters))
}
