//! Reidemeister moves on based chord diagrams and the base point rotation.
//!
//! Gaps are numbered `0..=2n`; gap `g` sits between positions `g` and `g + 1`
//! (gap 0 is right after the base point). Adjacency never wraps around the
//! base point; only [`Move::Rotate`] crosses it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::diagram::{link_count, Chord, ChordDiagram};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// `a b a b`
    Crossed,
    /// `a b b a`
    Nested,
}

/// Three chords whose six ends are `{r, r+1, s, s+1, t, t+1}` with every
/// adjacent pair spanning two different chords of the triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AdjointTriple {
    /// Pair anchors `r < s < t`.
    pub anchors: [usize; 3],
    pub chords: [Chord; 3],
}

impl AdjointTriple {
    /// Swap `r <-> r+1`, `s <-> s+1`, `t <-> t+1`.
    pub fn involution(&self, pos: usize) -> usize {
        for a in self.anchors {
            if pos == a {
                return a + 1;
            }
            if pos == a + 1 {
                return a;
            }
        }
        pos
    }

    /// The rewired triple.
    pub fn image(&self) -> AdjointTriple {
        let mut chords = self.chords.map(|c| Chord::new(self.involution(c.p), self.involution(c.q)));
        chords.sort_unstable();
        AdjointTriple { anchors: self.anchors, chords }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Move {
    R1Add { gap: usize },
    R1Remove { chord: Chord },
    R2Add { gap1: usize, gap2: usize, pattern: Pattern },
    R2Remove { first: Chord, second: Chord },
    R3 { triple: AdjointTriple },
    Rotate { steps: i64 },
}

impl Move {
    pub fn is_rotation(&self) -> bool {
        matches!(self, Move::Rotate { .. })
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, Move::R1Add { .. } | Move::R2Add { .. })
    }

    /// Short tag for per-kind bookkeeping.
    pub fn kind(&self) -> &'static str {
        match self {
            Move::R1Add { .. } => "R1Add",
            Move::R1Remove { .. } => "R1Remove",
            Move::R2Add { .. } => "R2Add",
            Move::R2Remove { .. } => "R2Remove",
            Move::R3 { .. } => "R3",
            Move::Rotate { .. } => "Rotate",
        }
    }

    pub fn apply(&self, d: &ChordDiagram) -> Result<ChordDiagram> {
        match *self {
            Move::R1Add { gap } => r1_add(d, gap),
            Move::R1Remove { chord } => r1_remove(d, chord),
            Move::R2Add { gap1, gap2, pattern } => r2_add(d, gap1, gap2, pattern),
            Move::R2Remove { first, second } => r2_remove(d, (first, second)),
            Move::R3 { ref triple } => r3_apply(d, triple),
            Move::Rotate { steps } => Ok(d.rotate(steps)),
        }
    }

    /// A move taking `self.apply(d)` back to `d`.
    pub fn inverse(&self, d: &ChordDiagram) -> Result<Move> {
        Ok(match *self {
            Move::R1Add { gap } => Move::R1Remove { chord: Chord::new(gap + 1, gap + 2) },
            Move::R1Remove { chord } => {
                check_r1(d, chord)?;
                Move::R1Add { gap: chord.p - 1 }
            }
            Move::R2Add { gap1, gap2, pattern } => {
                let (a, b) = r2_block_chords(gap1, gap2, pattern);
                Move::R2Remove { first: a, second: b }
            }
            Move::R2Remove { first, second } => {
                let (a, b, pattern) = check_r2(d, first, second)?;
                let lo = a.p;
                let hi = if pattern == Pattern::Crossed { a.q } else { b.q };
                Move::R2Add { gap1: lo - 1, gap2: hi - 3, pattern }
            }
            Move::R3 { ref triple } => {
                check_r3(d, triple)?;
                Move::R3 { triple: triple.image() }
            }
            Move::Rotate { steps } => Move::Rotate { steps: -steps },
        })
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::R1Add { gap } => write!(f, "R1Add gap={gap}"),
            Move::R1Remove { chord } => write!(f, "R1Remove {chord}"),
            Move::R2Add { gap1, gap2, pattern } => {
                write!(f, "R2Add gaps={gap1},{gap2} {pattern:?}")
            }
            Move::R2Remove { first, second } => write!(f, "R2Remove {first} {second}"),
            Move::R3 { triple } => {
                let [a, b, c] = triple.chords;
                let [r, s, t] = triple.anchors;
                write!(f, "R3 {a} {b} {c} anchors={r},{s},{t}")
            }
            Move::Rotate { steps } => write!(f, "Rotate {steps}"),
        }
    }
}

/// Chords with adjacent ends, in position order.
pub fn r1_sites(d: &ChordDiagram) -> Vec<Chord> {
    d.chords().iter().copied().filter(|c| c.span() == 1).collect()
}

fn check_r1(d: &ChordDiagram, c: Chord) -> Result<()> {
    if c.span() == 1 && d.contains(c) {
        Ok(())
    } else {
        Err(Error::NotAnR1Site(c))
    }
}

fn check_gap(d: &ChordDiagram, gap: usize) -> Result<()> {
    if gap > d.len() {
        Err(Error::GapOutOfRange { gap, max: d.len() })
    } else {
        Ok(())
    }
}

fn without(d: &ChordDiagram, drop: &[Chord]) -> ChordDiagram {
    ChordDiagram::compress(d.chords().iter().copied().filter(|c| !drop.contains(c)))
}

/// Shifts every end after each gap in `gaps` (ascending) by two per gap
/// passed, leaving room for two new ends at each.
pub(crate) fn open_gaps(d: &ChordDiagram, gaps: &[usize]) -> Vec<Chord> {
    let shift = |p: usize| p + 2 * gaps.iter().filter(|&&g| g < p).count();
    d.chords().iter().map(|c| Chord::new(shift(c.p), shift(c.q))).collect()
}

pub fn r1_remove(d: &ChordDiagram, c: Chord) -> Result<ChordDiagram> {
    check_r1(d, c)?;
    Ok(without(d, &[c]))
}

/// Inserts a chord on the two new positions `gap + 1, gap + 2`.
pub fn r1_add(d: &ChordDiagram, gap: usize) -> Result<ChordDiagram> {
    check_gap(d, gap)?;
    let mut chords = open_gaps(d, &[gap]);
    chords.push(Chord::new(gap + 1, gap + 2));
    Ok(ChordDiagram::from_chords_unchecked(chords))
}

/// Classifies an adjacent pair, returning it ordered by first end.
fn adjacent(a: Chord, b: Chord) -> Option<(Chord, Chord, Pattern)> {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a == b || b.p != a.p + 1 || a.q.abs_diff(b.q) != 1 {
        return None;
    }
    let pattern = if b.q > a.q { Pattern::Crossed } else { Pattern::Nested };
    Some((a, b, pattern))
}

fn check_r2(d: &ChordDiagram, a: Chord, b: Chord) -> Result<(Chord, Chord, Pattern)> {
    match adjacent(a, b) {
        Some(x) if d.contains(a) && d.contains(b) => Ok(x),
        _ => Err(Error::NotAnR2Site(a, b)),
    }
}

/// All unordered adjacent pairs, crossed or nested.
pub fn r2_sites(d: &ChordDiagram) -> Vec<(Chord, Chord)> {
    let owners = d.owners();
    let chords = d.chords();
    let mut out = Vec::new();
    for c in chords {
        // the partner's first end sits right after this chord's first end
        if c.p < d.len() {
            let other = chords[owners[c.p]];
            if other.p != c.p + 1 {
                continue;
            }
            if let Some((a, b, _)) = adjacent(*c, other) {
                out.push((a, b));
            }
        }
    }
    out
}

pub fn r2_remove(d: &ChordDiagram, pair: (Chord, Chord)) -> Result<ChordDiagram> {
    check_r2(d, pair.0, pair.1)?;
    Ok(without(d, &[pair.0, pair.1]))
}

fn r2_block_chords(gap1: usize, gap2: usize, pattern: Pattern) -> (Chord, Chord) {
    let (a1, a2) = (gap1 + 1, gap1 + 2);
    let (b1, b2) = (gap2 + 3, gap2 + 4);
    match pattern {
        Pattern::Crossed => (Chord::new(a1, b1), Chord::new(a2, b2)),
        Pattern::Nested => (Chord::new(a1, b2), Chord::new(a2, b1)),
    }
}

/// Inserts two ends at `gap1` and two at `gap2`, joined crossed or nested.
pub fn r2_add(d: &ChordDiagram, gap1: usize, gap2: usize, pattern: Pattern) -> Result<ChordDiagram> {
    check_gap(d, gap1)?;
    check_gap(d, gap2)?;
    if gap1 > gap2 {
        return Err(Error::GapOutOfRange { gap: gap1, max: gap2 });
    }
    let mut chords = open_gaps(d, &[gap1, gap2]);
    let (a, b) = r2_block_chords(gap1, gap2, pattern);
    chords.push(a);
    chords.push(b);
    Ok(ChordDiagram::from_chords_unchecked(chords))
}

/// Every completely adjoint triple, ordered by anchors.
pub fn r3_sites(d: &ChordDiagram) -> Vec<AdjointTriple> {
    let owners = d.owners();
    // positions p (1-based) where p and p + 1 belong to different chords
    let bonds: Vec<(usize, usize, usize)> = (1..d.len())
        .filter(|&p| owners[p - 1] != owners[p])
        .map(|p| {
            let (x, y) = (owners[p - 1], owners[p]);
            (p, x.min(y), x.max(y))
        })
        .collect();
    let mut out = Vec::new();
    for (i, &(r, a1, b1)) in bonds.iter().enumerate() {
        for (j, &(s, a2, b2)) in bonds.iter().enumerate().skip(i + 1) {
            if s <= r + 1 {
                continue;
            }
            // the second bond shares exactly one chord with the first
            let shared = [a2, b2].iter().filter(|&&c| c == a1 || c == b1).count();
            if shared != 1 {
                continue;
            }
            let mut three = [a1, b1, a2, b2];
            three.sort_unstable();
            let mut uniq: Vec<usize> = three.to_vec();
            uniq.dedup();
            for &(t, a3, b3) in bonds.iter().skip(j + 1) {
                if t <= s + 1 {
                    continue;
                }
                // third bond must join the two chords seen only once
                let once: Vec<usize> = uniq
                    .iter()
                    .copied()
                    .filter(|c| three.iter().filter(|&&x| x == *c).count() == 1)
                    .collect();
                if once == [a3, b3] {
                    let mut chords = [d.chords()[uniq[0]], d.chords()[uniq[1]], d.chords()[uniq[2]]];
                    chords.sort_unstable();
                    out.push(AdjointTriple { anchors: [r, s, t], chords });
                }
            }
        }
    }
    out
}

fn check_r3(d: &ChordDiagram, t: &AdjointTriple) -> Result<()> {
    let [r, s, u] = t.anchors;
    let ok = r + 1 < s
        && s + 1 < u
        && t.chords.iter().all(|&c| d.contains(c))
        && {
            let mut ends: Vec<usize> = t.chords.iter().flat_map(|c| [c.p, c.q]).collect();
            ends.sort_unstable();
            ends == [r, r + 1, s, s + 1, u, u + 1]
        }
        && t.anchors.iter().all(|&a| {
            let owner = |p: usize| t.chords.iter().position(|c| c.contains(p));
            owner(a) != owner(a + 1)
        });
    if ok {
        Ok(())
    } else {
        Err(Error::NotAnR3Site)
    }
}

/// Rewires the triple through the pair-swapping involution; no renumbering.
pub fn r3_apply(d: &ChordDiagram, t: &AdjointTriple) -> Result<ChordDiagram> {
    check_r3(d, t)?;
    let image = t.image();
    let mut chords: Vec<Chord> = d.chords().iter().copied().filter(|c| !t.chords.contains(c)).collect();
    chords.extend(image.chords);
    Ok(ChordDiagram::from_chords_unchecked(chords))
}

pub fn rotate_basepoint(d: &ChordDiagram, steps: i64) -> ChordDiagram {
    d.rotate(steps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveLimits {
    /// Additive moves are only listed if the result stays within this many chords.
    pub max_chords: usize,
    pub rotations: bool,
}

impl MoveLimits {
    pub fn new(max_chords: usize) -> Self {
        MoveLimits { max_chords, rotations: true }
    }

    pub fn long(max_chords: usize) -> Self {
        MoveLimits { max_chords, rotations: false }
    }
}

/// All applicable moves, sorted.
pub fn enumerate_moves(d: &ChordDiagram, limits: MoveLimits) -> Vec<Move> {
    let n = d.n();
    let len = d.len();
    let mut out: Vec<Move> = Vec::new();
    out.extend(r1_sites(d).into_iter().map(|chord| Move::R1Remove { chord }));
    out.extend(r2_sites(d).into_iter().map(|(first, second)| Move::R2Remove { first, second }));
    out.extend(r3_sites(d).into_iter().map(|triple| Move::R3 { triple }));
    if n < limits.max_chords {
        out.extend((0..=len).map(|gap| Move::R1Add { gap }));
    }
    if n + 2 <= limits.max_chords {
        for gap1 in 0..=len {
            for gap2 in gap1..=len {
                for pattern in [Pattern::Crossed, Pattern::Nested] {
                    out.push(Move::R2Add { gap1, gap2, pattern });
                }
            }
        }
    }
    if limits.rotations && n > 0 {
        out.push(Move::Rotate { steps: 1 });
        out.push(Move::Rotate { steps: -1 });
    }
    out.sort();
    out
}

/// A completely adjoint triple whose count of odd chords, relative to some
/// chord set containing it, is odd.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PaschViolation {
    pub triple: AdjointTriple,
    /// `None` for the whole diagram, `Some(k)` for extraction stage `k`.
    pub stage: Option<usize>,
    /// Counted within the level `a_k` rather than the stage-`k` survivors.
    pub within_level: bool,
    pub odd: usize,
}

/// Counts odd chords of every adjoint triple relative to the whole diagram,
/// to the survivors at each extraction stage below `m`, and to each level
/// `a_k` that contains the whole triple.
pub fn pasch_violations(d: &ChordDiagram, m: usize) -> Vec<PaschViolation> {
    let triples = r3_sites(d);
    if triples.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let odd_in = |t: &AdjointTriple, set: &[Chord]| t.chords.iter().filter(|&&c| link_count(c, set) % 2 == 1).count();
    let mut alive: Vec<Chord> = d.chords().to_vec();
    for t in &triples {
        let odd = odd_in(t, &alive);
        if odd % 2 == 1 {
            out.push(PaschViolation { triple: *t, stage: None, within_level: false, odd });
        }
    }
    for k in 0..m {
        let (level, rest): (Vec<Chord>, Vec<Chord>) =
            alive.iter().partition(|&&c| link_count(c, &alive) % 2 == 1);
        for t in &triples {
            if t.chords.iter().all(|c| alive.contains(c)) {
                let odd = odd_in(t, &alive);
                if odd % 2 == 1 {
                    out.push(PaschViolation { triple: *t, stage: Some(k), within_level: false, odd });
                }
            }
            if t.chords.iter().all(|c| level.contains(c)) {
                let odd = odd_in(t, &level);
                if odd % 2 == 1 {
                    out.push(PaschViolation { triple: *t, stage: Some(k), within_level: true, odd });
                }
            }
        }
        alive = rest;
    }
    out
}
