//! Based chord diagrams and Gauss codes.
//!
//! A diagram with `n` chords partitions the positions `1..=2n` into pairs.
//! The base point sits before position 1. Chords are stored with `p < q`
//! and the chord list is kept sorted by `p`, so two diagrams are equal
//! exactly when they are the same partition.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 2]", into = "[usize; 2]")]
pub struct Chord {
    pub p: usize,
    pub q: usize,
}

impl Chord {
    /// Builds a chord with its ends in increasing order.
    pub fn new(a: usize, b: usize) -> Self {
        Chord { p: a.min(b), q: a.max(b) }
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.p == pos || self.q == pos
    }

    /// Distance between the two ends along the line.
    pub fn span(&self) -> usize {
        self.q - self.p
    }
}

impl From<[usize; 2]> for Chord {
    fn from(v: [usize; 2]) -> Self {
        Chord::new(v[0], v[1])
    }
}

impl From<Chord> for [usize; 2] {
    fn from(c: Chord) -> Self {
        [c.p, c.q]
    }
}

impl fmt::Display for Chord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// Sign test on the four end differences. Symmetric in its arguments.
pub fn linked(a: Chord, b: Chord) -> Result<bool> {
    if a.contains(b.p) || a.contains(b.q) {
        return Err(Error::SharedEndpoint(a, b));
    }
    Ok(linked_unchecked(a, b))
}

#[inline]
pub(crate) fn linked_unchecked(a: Chord, b: Chord) -> bool {
    // ends are positive, so the product sign is decided by how many ends of
    // `b` fall strictly inside `a`
    let inside = (a.p < b.p && b.p < a.q) as u8 + (a.p < b.q && b.q < a.q) as u8;
    inside == 1
}

/// Number of chords in `set` linked with `p`; `p` itself is skipped.
pub fn link_count(p: Chord, set: &[Chord]) -> usize {
    set.iter()
        .filter(|&&c| c != p && linked_unchecked(p, c))
        .count()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Violation {
    DegenerateChord(usize),
    PositionOutOfRange { pos: usize, max: usize },
    PositionReused(usize),
    PositionMissing(usize),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DegenerateChord(p) => write!(f, "chord ({p},{p}) has equal ends"),
            Violation::PositionOutOfRange { pos, max } => {
                write!(f, "position {pos} outside 1..={max}")
            }
            Violation::PositionReused(p) => write!(f, "position {p} used more than once"),
            Violation::PositionMissing(p) => write!(f, "position {p} not covered"),
        }
    }
}

/// Checks that `pairs` partition `1..=2n` where `n = pairs.len()`.
pub fn validate(pairs: &[(usize, usize)]) -> Vec<Violation> {
    let max = 2 * pairs.len();
    let mut seen = vec![0usize; max + 1];
    let mut out = Vec::new();
    for &(a, b) in pairs {
        if a == b {
            out.push(Violation::DegenerateChord(a));
        }
        for pos in [a, b] {
            if pos == 0 || pos > max {
                out.push(Violation::PositionOutOfRange { pos, max });
            } else {
                seen[pos] += 1;
                if seen[pos] == 2 {
                    out.push(Violation::PositionReused(pos));
                }
            }
        }
    }
    out.extend((1..=max).filter(|&p| seen[p] == 0).map(Violation::PositionMissing));
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "DiagramJson", into = "DiagramJson")]
pub struct ChordDiagram {
    chords: Vec<Chord>,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    n: usize,
    chords: Vec<[usize; 2]>,
}

impl TryFrom<DiagramJson> for ChordDiagram {
    type Error = Error;

    fn try_from(v: DiagramJson) -> Result<Self> {
        let d = ChordDiagram::new(v.chords.iter().map(|c| (c[0], c[1])))?;
        if d.n() != v.n {
            return Err(Error::InvalidDiagram(vec![Violation::PositionMissing(2 * v.n)]));
        }
        Ok(d)
    }
}

impl From<ChordDiagram> for DiagramJson {
    fn from(d: ChordDiagram) -> Self {
        DiagramJson { n: d.n(), chords: d.chords.iter().map(|&c| c.into()).collect() }
    }
}

impl ChordDiagram {
    pub fn empty() -> Self {
        ChordDiagram { chords: Vec::new() }
    }

    /// Builds a diagram from chord end pairs, rejecting anything that is not
    /// a partition of `1..=2n`.
    pub fn new<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Result<Self> {
        let pairs: Vec<_> = pairs.into_iter().collect();
        let violations = validate(&pairs);
        if !violations.is_empty() {
            return Err(Error::InvalidDiagram(violations));
        }
        Ok(Self::from_chords_unchecked(pairs.into_iter().map(|(a, b)| Chord::new(a, b)).collect()))
    }

    pub(crate) fn from_chords_unchecked(mut chords: Vec<Chord>) -> Self {
        chords.sort_unstable();
        ChordDiagram { chords }
    }

    /// Order-preserving renumbering of chords whose ends are distinct but
    /// arbitrary positive integers.
    pub(crate) fn compress<I: IntoIterator<Item = Chord>>(chords: I) -> Self {
        let chords: Vec<Chord> = chords.into_iter().collect();
        let mut ends: Vec<usize> = chords.iter().flat_map(|c| [c.p, c.q]).collect();
        ends.sort_unstable();
        let rank = |x: usize| ends.binary_search(&x).unwrap() + 1;
        Self::from_chords_unchecked(chords.iter().map(|c| Chord::new(rank(c.p), rank(c.q))).collect())
    }

    /// Number of chords.
    pub fn n(&self) -> usize {
        self.chords.len()
    }

    /// Number of chord ends, `2n`.
    pub fn len(&self) -> usize {
        2 * self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    pub fn chords(&self) -> &[Chord] {
        &self.chords
    }

    pub fn contains(&self, c: Chord) -> bool {
        self.chords.binary_search(&c).is_ok()
    }

    /// For each position `1..=2n` (stored at index `pos - 1`), the index of
    /// the chord owning it.
    pub fn owners(&self) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (i, c) in self.chords.iter().enumerate() {
            out[c.p - 1] = i;
            out[c.q - 1] = i;
        }
        out
    }

    /// Pairwise linking matrix indexed by chord index.
    pub fn link_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.n();
        let mut m = vec![vec![false; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let l = linked_unchecked(self.chords[i], self.chords[j]);
                m[i][j] = l;
                m[j][i] = l;
            }
        }
        m
    }

    /// Parses a whitespace separated Gauss code.
    pub fn parse_gauss_code(text: &str) -> Result<Self> {
        Self::from_labels(&text.split_whitespace().collect::<Vec<_>>())
    }

    /// Builds a diagram from a sequence of labels, each of which must occur
    /// exactly twice. Only label equality matters.
    pub fn from_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        let mut first: HashMap<&str, (usize, usize)> = HashMap::new();
        let mut order = Vec::new();
        let mut pairs = Vec::with_capacity(labels.len() / 2);
        for (i, l) in labels.iter().enumerate() {
            let l = l.as_ref();
            if l.is_empty() {
                return Err(Error::EmptyToken { index: i + 1 });
            }
            let e = first.entry(l).or_insert_with(|| {
                order.push(l);
                (i + 1, 0)
            });
            e.1 += 1;
            if e.1 == 2 {
                pairs.push((e.0, i + 1));
            }
        }
        for l in order {
            let count = first[l].1;
            if count != 2 {
                return Err(Error::LabelCount { label: l.to_string(), count });
            }
        }
        Self::new(pairs)
    }

    /// First-occurrence labels along positions, starting at 1.
    pub fn canonical_labels(&self) -> Vec<usize> {
        // chords are sorted by first end, so the chord index is the label
        self.owners().into_iter().map(|i| i + 1).collect()
    }

    /// Canonical Gauss code, e.g. `"1 2 1 2"`.
    pub fn serialize(&self) -> String {
        self.canonical_labels()
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// The diagram with its base point moved forward past `steps` ends
    /// (backwards for negative `steps`). Position `p` goes to
    /// `((p - 1 - steps) mod 2n) + 1`.
    pub fn rotate(&self, steps: i64) -> Self {
        if self.is_empty() {
            return self.clone();
        }
        let len = self.len() as i64;
        let map = |p: usize| ((p as i64 - 1 - steps).rem_euclid(len) + 1) as usize;
        Self::from_chords_unchecked(self.chords.iter().map(|c| Chord::new(map(c.p), map(c.q))).collect())
    }

    /// Lexicographically least label sequence over all base point choices.
    /// Used as a visited-set key for unbased diagrams.
    pub fn rotation_key(&self) -> Vec<usize> {
        (0..self.len().max(1) as i64)
            .map(|s| self.rotate(s).canonical_labels())
            .min()
            .unwrap_or_default()
    }

    /// Keeps only the chords selected by `keep` (indexed like `chords()`),
    /// renumbering the survivors.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self::compress(
            self.chords
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, &c)| c),
        )
    }
}

impl fmt::Display for ChordDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

impl FromStr for ChordDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_gauss_code(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> ChordDiagram {
        s.parse().unwrap()
    }

    fn chords(v: &[(usize, usize)]) -> Vec<Chord> {
        v.iter().map(|&(a, b)| Chord::new(a, b)).collect()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(d("1 2 1 2").chords(), chords(&[(1, 3), (2, 4)]).as_slice());
        assert!(d("").is_empty());
        assert_eq!(d("1 2 1 3 2 3").chords(), chords(&[(1, 3), (2, 5), (4, 6)]).as_slice());
        assert!(matches!(
            ChordDiagram::parse_gauss_code("1 2 1"),
            Err(Error::LabelCount { ref label, count: 1 }) if label == "2"
        ));
        assert!(matches!(
            ChordDiagram::parse_gauss_code("a a a"),
            Err(Error::LabelCount { count: 3, .. })
        ));
    }

    #[test]
    fn arbitrary_labels() {
        assert_eq!(d("x yy x yy"), d("1 2 1 2"));
        assert_eq!(
            ChordDiagram::from_labels(&["a", "", "a"]),
            Err(Error::EmptyToken { index: 2 })
        );
    }

    #[test]
    fn serialize_examples() {
        assert_eq!(ChordDiagram::new([(1, 3), (2, 4)]).unwrap().serialize(), "1 2 1 2");
        assert_eq!(ChordDiagram::empty().serialize(), "");
        assert_eq!(
            ChordDiagram::new([(1, 6), (2, 3), (4, 5)]).unwrap().serialize(),
            "1 2 2 3 3 1"
        );
        assert_eq!(d("b a a b").serialize(), "1 2 2 1");
    }

    #[test]
    fn linked_examples() {
        assert!(linked(Chord::new(1, 3), Chord::new(2, 4)).unwrap());
        assert!(!linked(Chord::new(1, 2), Chord::new(3, 4)).unwrap());
        assert!(!linked(Chord::new(2, 8), Chord::new(4, 6)).unwrap());
        assert_eq!(
            linked(Chord::new(1, 3), Chord::new(3, 4)),
            Err(Error::SharedEndpoint(Chord::new(1, 3), Chord::new(3, 4)))
        );
    }

    #[test]
    fn link_count_examples() {
        let a = d("1 2 1 3 2 3");
        assert_eq!(link_count(Chord::new(1, 3), a.chords()), 1);
        let b = d("1 2 3 1 2 3");
        assert_eq!(link_count(Chord::new(1, 4), b.chords()), 2);
        assert_eq!(link_count(Chord::new(1, 4), &[]), 0);
    }

    #[test]
    fn validate_examples() {
        assert!(validate(&[(1, 3), (2, 4)]).is_empty());
        let v = validate(&[(1, 2), (2, 4)]);
        assert!(v.contains(&Violation::PositionReused(2)));
        assert_eq!(validate(&[(1, 5), (2, 4)]), vec![
            Violation::PositionOutOfRange { pos: 5, max: 4 },
            Violation::PositionMissing(3)
        ]);
        assert_eq!(validate(&[(1, 1)]), vec![
            Violation::DegenerateChord(1),
            Violation::PositionReused(1),
            Violation::PositionMissing(2)
        ]);
        assert!(ChordDiagram::new([(1, 2), (2, 4)]).is_err());
    }

    #[test]
    fn rotation() {
        assert_eq!(d("1 1 2 2").rotate(1), d("1 2 2 1"));
        assert_eq!(d("1 2 1 2").rotate(1), d("1 2 1 2"));
        let x = d("1 2 3 1 4 2 4 3");
        assert_eq!(x.rotate(8), x);
        assert_eq!(x.rotate(3).rotate(-3), x);
        assert_eq!(x.rotate(-1), x.rotate(7));
        assert_eq!(ChordDiagram::empty().rotate(5), ChordDiagram::empty());
    }

    #[test]
    fn json_form() {
        let x = d("1 2 1 2");
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"n":2,"chords":[[1,3],[2,4]]}"#);
        assert_eq!(serde_json::from_str::<ChordDiagram>(&s).unwrap(), x);
        assert!(serde_json::from_str::<ChordDiagram>(r#"{"n":2,"chords":[[1,2],[2,4]]}"#).is_err());
        assert!(serde_json::from_str::<ChordDiagram>(r#"{"n":3,"chords":[[1,2],[3,4]]}"#).is_err());
    }

    #[test]
    fn restrict_renumbers() {
        let x = d("1 2 1 3 2 3");
        assert_eq!(x.restrict(|i| i == 1), d("1 1"));
    }
}
