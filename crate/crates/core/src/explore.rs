//! Searches over the move graph: scrambling, reduction, invariant
//! comparison and the randomized invariance trials.
//!
//! All randomness is drawn from per-trial ChaCha streams derived from a base
//! seed, so parallel and sequential runs produce identical results.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{Chord, ChordDiagram};
use crate::error::{Error, Result};
use crate::group::{conjugate_equal, evaluate, Conjugacy, NormalForm};
use crate::moves::{enumerate_moves, open_gaps, Move, MoveLimits};
use crate::parity::{word_of, Letter};

/// Long knots keep the base point; free knots may also rotate it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Long,
    Free,
}

/// Independent random stream for trial `index` of a run seeded by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform random perfect matching of `1..=2n`.
pub fn random_diagram<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ChordDiagram {
    let mut pos: Vec<usize> = (1..=2 * n).collect();
    pos.shuffle(rng);
    ChordDiagram::from_chords_unchecked(pos.chunks(2).map(|c| Chord::new(c[0], c[1])).collect())
}

/// A random diagram with `n >= 3` chords, three of which form a completely
/// adjoint triple inserted into a uniform random diagram of `n - 3` chords.
pub fn random_diagram_with_triple<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ChordDiagram {
    assert!(n >= 3, "a triple needs three chords");
    let base = random_diagram(n - 3, rng);
    let mut gaps = [0; 3].map(|_| rng.gen_range(0..=base.len()));
    gaps.sort_unstable();
    let mut chords = open_gaps(&base, &gaps);
    let blocks: Vec<(usize, usize)> = gaps
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let (a, b) = (g + 2 * i + 1, g + 2 * i + 2);
            if rng.gen() {
                (a, b)
            } else {
                (b, a)
            }
        })
        .collect();
    // block i contributes its first end to one chord and its second to another
    chords.push(Chord::new(blocks[0].0, blocks[1].0));
    chords.push(Chord::new(blocks[1].1, blocks[2].0));
    chords.push(Chord::new(blocks[2].1, blocks[0].1));
    ChordDiagram::from_chords_unchecked(chords)
}

/// Normal form of the word of `d` at depth `m`.
pub fn invariant(d: &ChordDiagram, m: usize) -> Result<NormalForm> {
    Ok(evaluate(&word_of(d, m)?))
}

/// Applies `path` to `d` in order.
pub fn replay(d: &ChordDiagram, path: &[Move]) -> Result<ChordDiagram> {
    path.iter().try_fold(d.clone(), |cur, mv| mv.apply(&cur))
}

/// `move_count` uniformly chosen moves (rotations included) keeping at most
/// `size_cap` chords, with the moves taken.
pub fn scramble_path(
    d: &ChordDiagram,
    move_count: usize,
    seed: u64,
    size_cap: usize,
) -> Result<(ChordDiagram, Vec<Move>)> {
    if size_cap < d.n() {
        return Err(Error::SizeCap { cap: size_cap, n: d.n() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cur = d.clone();
    let mut path = Vec::with_capacity(move_count);
    for _ in 0..move_count {
        let moves = enumerate_moves(&cur, MoveLimits::new(size_cap));
        let Some(mv) = moves.choose(&mut rng) else { break };
        cur = mv.apply(&cur)?;
        path.push(mv.clone());
    }
    Ok((cur, path))
}

pub fn scramble(d: &ChordDiagram, move_count: usize, seed: u64, size_cap: usize) -> Result<ChordDiagram> {
    scramble_path(d, move_count, seed, size_cap).map(|(d, _)| d)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum Outcome {
    ReducedToEmpty { path: Vec<Move> },
    /// The reachable space was exhausted; `diagram` has the fewest chords seen.
    MinimalFound { diagram: ChordDiagram, path: Vec<Move> },
    /// The state cap was hit; `best` has the fewest chords seen so far.
    Exhausted { best: ChordDiagram, path: Vec<Move> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub start: ChordDiagram,
    pub visited: usize,
    pub max_states: usize,
    pub max_chords: usize,
    pub mode: Mode,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl SearchReport {
    /// The diagram the reported path leads to.
    pub fn endpoint(&self) -> ChordDiagram {
        match &self.outcome {
            Outcome::ReducedToEmpty { .. } => ChordDiagram::empty(),
            Outcome::MinimalFound { diagram, .. } => diagram.clone(),
            Outcome::Exhausted { best, .. } => best.clone(),
        }
    }

    pub fn path(&self) -> &[Move] {
        match &self.outcome {
            Outcome::ReducedToEmpty { path }
            | Outcome::MinimalFound { path, .. }
            | Outcome::Exhausted { path, .. } => path,
        }
    }
}

fn state_key(d: &ChordDiagram, mode: Mode) -> Vec<usize> {
    match mode {
        Mode::Long => d.canonical_labels(),
        Mode::Free => d.rotation_key(),
    }
}

fn successors(d: &ChordDiagram, max_chords: usize, mode: Mode) -> Vec<(Vec<Move>, ChordDiagram)> {
    let rotations = match mode {
        Mode::Long => 1,
        Mode::Free => d.len().max(1) as i64,
    };
    let mut out = Vec::new();
    for k in 0..rotations {
        let base = d.rotate(k);
        for mv in enumerate_moves(&base, MoveLimits::long(max_chords)) {
            let next = mv.apply(&base).expect("enumerated moves apply");
            let seg = if k == 0 { vec![mv] } else { vec![Move::Rotate { steps: k }, mv] };
            out.push((seg, next));
        }
    }
    out
}

/// Breadth-first search from `d` towards the empty diagram over diagrams with
/// at most `max_chords` chords, visiting at most `max_states` states.
pub fn reduce(d: &ChordDiagram, max_states: usize, max_chords: usize, mode: Mode) -> SearchReport {
    struct Node {
        diagram: ChordDiagram,
        parent: Option<(usize, Vec<Move>)>,
    }
    let path_to = |nodes: &[Node], mut i: usize| {
        let mut segs = Vec::new();
        while let Some((p, seg)) = &nodes[i].parent {
            segs.push(seg.clone());
            i = *p;
        }
        segs.into_iter().rev().flatten().collect::<Vec<Move>>()
    };
    let report = |visited, outcome| SearchReport {
        start: d.clone(),
        visited,
        max_states,
        max_chords,
        mode,
        outcome,
    };

    if d.is_empty() {
        return report(1, Outcome::ReducedToEmpty { path: Vec::new() });
    }
    let mut nodes = vec![Node { diagram: d.clone(), parent: None }];
    let mut seen = HashMap::from([(state_key(d, mode), 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    let mut best = 0usize;
    while let Some(i) = queue.pop_front() {
        let cur = nodes[i].diagram.clone();
        for (seg, next) in successors(&cur, max_chords, mode) {
            let key = state_key(&next, mode);
            if seen.contains_key(&key) {
                continue;
            }
            if nodes.len() >= max_states {
                let path = path_to(&nodes, best);
                return report(nodes.len(), Outcome::Exhausted { best: nodes[best].diagram.clone(), path });
            }
            let empty = next.is_empty();
            let n = next.n();
            seen.insert(key, nodes.len());
            nodes.push(Node { diagram: next, parent: Some((i, seg)) });
            let j = nodes.len() - 1;
            if empty {
                return report(nodes.len(), Outcome::ReducedToEmpty { path: path_to(&nodes, j) });
            }
            if n < nodes[best].diagram.n() {
                best = j;
            }
            queue.push_back(j);
        }
    }
    let path = path_to(&nodes, best);
    report(nodes.len(), Outcome::MinimalFound { diagram: nodes[best].diagram.clone(), path })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// The invariants differ at depth `m`, so the knots differ.
    CertifiedDistinct { m: usize },
    /// The invariants agree for every depth tried. Not a proof of equivalence.
    SameInvariant,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthComparison {
    pub m: usize,
    pub first: NormalForm,
    pub second: NormalForm,
    /// `Some(word)` conjugating first into second, when found.
    pub conjugator: Option<String>,
    pub distinct: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Distinction {
    pub mode: Mode,
    #[serde(flatten)]
    pub verdict: Verdict,
    pub depths: Vec<DepthComparison>,
}

/// Compares the invariants of two diagrams for every depth in `m_list`:
/// long mode compares normal forms, free mode compares conjugacy classes.
pub fn distinguish(
    d1: &ChordDiagram,
    d2: &ChordDiagram,
    m_list: &[usize],
    state_cap: usize,
    mode: Mode,
) -> Result<Distinction> {
    let mut depths = Vec::new();
    for &m in m_list {
        let first = invariant(d1, m)?;
        let second = invariant(d2, m)?;
        let (conjugator, distinct) = match mode {
            Mode::Long => (None, Some(first != second)),
            Mode::Free => match conjugate_equal(&first, &second, state_cap)? {
                Conjugacy::Yes(w) => (Some(w.to_string()), Some(false)),
                Conjugacy::No => (None, Some(true)),
                Conjugacy::Undetermined => (None, None),
            },
        };
        depths.push(DepthComparison { m, first, second, conjugator, distinct });
    }
    let verdict = if let Some(c) = depths.iter().find(|c| c.distinct == Some(true)) {
        Verdict::CertifiedDistinct { m: c.m }
    } else if depths.iter().any(|c| c.distinct.is_none()) {
        Verdict::Undetermined
    } else {
        Verdict::SameInvariant
    };
    Ok(Distinction { mode, verdict, depths })
}

/// Every perfect matching of `1..=2n`, as first-occurrence label sequences
/// in lexicographic order.
pub fn all_diagrams(n: usize) -> Vec<ChordDiagram> {
    fn rec(labels: &mut Vec<usize>, next: usize, out: &mut Vec<ChordDiagram>) {
        let Some(first) = labels.iter().position(|&l| l == 0) else {
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            let mut open = vec![0usize; next];
            for (i, &l) in labels.iter().enumerate() {
                if open[l - 1] == 0 {
                    open[l - 1] = i + 1;
                } else {
                    pairs.push((open[l - 1], i + 1));
                }
            }
            out.push(ChordDiagram::from_chords_unchecked(
                pairs.into_iter().map(|(a, b)| Chord::new(a, b)).collect(),
            ));
            return;
        };
        labels[first] = next;
        for j in first + 1..labels.len() {
            if labels[j] == 0 {
                labels[j] = next;
                rec(labels, next + 1, out);
                labels[j] = 0;
            }
        }
        labels[first] = 0;
    }
    let mut out = Vec::new();
    rec(&mut vec![0; 2 * n], 1, &mut out);
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub diagram: ChordDiagram,
    pub invariant: NormalForm,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NontrivialSearch {
    pub m: usize,
    pub max_chords: usize,
    /// Diagrams examined, one per base point orbit.
    pub examined: usize,
    /// False when `state_cap` stopped the enumeration early.
    pub complete: bool,
    pub witnesses: Vec<Witness>,
}

/// Diagrams with at most `max_chords` chords, one per rotation class, whose
/// invariant at depth `m` is not the identity. The identity's conjugacy
/// class is a singleton, so each witness is a nontrivial free knot.
pub fn search_nontrivial(max_chords: usize, m: usize, state_cap: usize) -> Result<NontrivialSearch> {
    if m == 0 {
        return Err(Error::InvalidM(m));
    }
    let mut examined = 0;
    let mut witnesses = Vec::new();
    for n in 0..=max_chords {
        let reps: Vec<ChordDiagram> = all_diagrams(n)
            .into_par_iter()
            .filter(|d| d.canonical_labels() == d.rotation_key())
            .collect();
        let remaining = state_cap.saturating_sub(examined);
        let take = reps.len().min(remaining);
        examined += take;
        let found: Vec<Witness> = reps[..take]
            .par_iter()
            .filter_map(|d| {
                let nf = invariant(d, m).expect("m checked above");
                (!nf.is_identity()).then(|| Witness { diagram: d.clone(), invariant: nf })
            })
            .collect();
        witnesses.extend(found);
        if take < reps.len() {
            return Ok(NontrivialSearch { m, max_chords, examined, complete: false, witnesses });
        }
    }
    Ok(NontrivialSearch { m, max_chords, examined, complete: true, witnesses })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    /// Diagrams have `0..=max_n` chords, uniformly.
    pub max_n: usize,
    pub m_list: Vec<usize>,
    pub seed: u64,
    /// Plant a completely adjoint triple in every diagram with `n >= 3`.
    pub plant_triple: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub m: usize,
    pub before: ChordDiagram,
    pub mv: Move,
    pub after: ChordDiagram,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TrialReport {
    pub trials: usize,
    /// Trials in which a move was applied and every depth was checked.
    pub checked: usize,
    pub failures: Vec<TrialFailure>,
    pub by_kind: BTreeMap<String, usize>,
}

impl TrialReport {
    pub fn passed(&self) -> usize {
        self.checked - self.failures.iter().map(|f| f.trial).collect::<std::collections::BTreeSet<_>>().len()
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.checked == self.trials
    }

    fn merge(mut self, other: TrialReport) -> TrialReport {
        self.trials += other.trials;
        self.checked += other.checked;
        self.failures.extend(other.failures);
        for (k, v) in other.by_kind {
            *self.by_kind.entry(k).or_default() += v;
        }
        self
    }
}

fn trial_diagram(cfg: &TrialConfig, rng: &mut ChaCha8Rng) -> ChordDiagram {
    let n = rng.gen_range(0..=cfg.max_n);
    if cfg.plant_triple && n >= 3 {
        random_diagram_with_triple(n, rng)
    } else {
        random_diagram(n, rng)
    }
}

/// Picks a move kind uniformly among the kinds with a site, then a site
/// uniformly within it, so rare sites such as triples are not swamped by the
/// many additive moves.
fn pick_move(d: &ChordDiagram, rng: &mut ChaCha8Rng) -> Option<Move> {
    let mut by_kind: BTreeMap<&'static str, Vec<Move>> = BTreeMap::new();
    for mv in enumerate_moves(d, MoveLimits::long(d.n() + 2)) {
        by_kind.entry(mv.kind()).or_default().push(mv);
    }
    let kinds: Vec<&Vec<Move>> = by_kind.values().collect();
    kinds.choose(rng).and_then(|ms| ms.choose(rng)).cloned()
}

/// Random diagram plus one random R1/R2/R3 move per trial; the normal form
/// must be unchanged at every depth in `m_list`.
pub fn invariance_trials(cfg: &TrialConfig) -> TrialReport {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let before = trial_diagram(cfg, &mut rng);
            let mut rep = TrialReport { trials: 1, ..Default::default() };
            let Some(mv) = pick_move(&before, &mut rng) else { return rep };
            let after = mv.apply(&before).expect("enumerated moves apply");
            *rep.by_kind.entry(mv.kind().to_string()).or_default() += 1;
            for &m in &cfg.m_list {
                if invariant(&before, m).ok() != invariant(&after, m).ok() {
                    rep.failures.push(TrialFailure { trial: t, m, before: before.clone(), mv: mv.clone(), after: after.clone() });
                }
            }
            rep.checked = 1;
            rep
        })
        .reduce(TrialReport::default, TrialReport::merge)
}

/// One-step base point rotation per trial: the new invariant must equal the
/// old one conjugated by the first letter of the old word, and the bounded
/// conjugacy search must confirm it.
pub fn rotation_trials(cfg: &TrialConfig, state_cap: usize) -> TrialReport {
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t as u64);
            let mut rep = TrialReport { trials: 1, ..Default::default() };
            let mut before = trial_diagram(cfg, &mut rng);
            if before.is_empty() {
                before = random_diagram(1, &mut rng);
            }
            let mv = Move::Rotate { steps: 1 };
            let after = before.rotate(1);
            *rep.by_kind.entry(mv.kind().to_string()).or_default() += 1;
            for &m in &cfg.m_list {
                if !rotation_consistent(&before, &after, m, state_cap) {
                    rep.failures.push(TrialFailure { trial: t, m, before: before.clone(), mv: mv.clone(), after: after.clone() });
                }
            }
            rep.checked = 1;
            rep
        })
        .reduce(TrialReport::default, TrialReport::merge)
}

fn rotation_consistent(before: &ChordDiagram, after: &ChordDiagram, m: usize, state_cap: usize) -> bool {
    let (Ok(w), Ok(a), Ok(b)) = (word_of(before, m), invariant(before, m), invariant(after, m)) else {
        return false;
    };
    let first: Letter = w.letters()[0];
    let by = crate::parity::Word::new(m, vec![first]).expect("letter from a depth-m word");
    if a.conjugate(&by).ok().as_ref() != Some(&b) {
        return false;
    }
    match conjugate_equal(&a, &b, state_cap) {
        Ok(Conjugacy::Yes(wit)) => a.conjugate(&wit).ok().as_ref() == Some(&b),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> ChordDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn matching_counts() {
        // (2n - 1)!!
        let counts: Vec<usize> = (0..=5).map(|n| all_diagrams(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 15, 105, 945]);
        assert_eq!(all_diagrams(2).iter().map(|d| d.serialize()).collect::<Vec<_>>(), vec![
            "1 1 2 2", "1 2 1 2", "1 2 2 1"
        ]);
    }

    #[test]
    fn random_generators() {
        let mut rng = trial_rng(7, 0);
        for n in 0..8 {
            assert_eq!(random_diagram(n, &mut rng).n(), n);
        }
        for n in 3..9 {
            let x = random_diagram_with_triple(n, &mut rng);
            assert_eq!(x.n(), n);
            assert!(!crate::moves::r3_sites(&x).is_empty(), "{x}");
        }
    }

    #[test]
    fn scramble_basics() {
        assert_eq!(scramble(&ChordDiagram::empty(), 0, 3, 10).unwrap(), ChordDiagram::empty());
        let x = d("1 2 1 3 2 3");
        assert_eq!(scramble(&x, 30, 11, 6).unwrap(), scramble(&x, 30, 11, 6).unwrap());
        let (y, path) = scramble_path(&x, 30, 12, 6).unwrap();
        assert!(y.n() <= 6);
        assert_eq!(replay(&x, &path).unwrap(), y);
        assert_eq!(scramble(&x, 1, 0, 2), Err(Error::SizeCap { cap: 2, n: 3 }));
    }

    #[test]
    fn reduce_examples() {
        let r = reduce(&d("1 2 3 1 2 3"), 10_000, 6, Mode::Long);
        assert!(matches!(r.outcome, Outcome::ReducedToEmpty { .. }));
        assert!(replay(&r.start, r.path()).unwrap().is_empty());
        let r = reduce(&d("1 2 1 2"), 100, 4, Mode::Long);
        assert_eq!(r.path().len(), 1);
        let r = reduce(&ChordDiagram::empty(), 1, 0, Mode::Long);
        assert_eq!(r.outcome, Outcome::ReducedToEmpty { path: vec![] });
    }

    #[test]
    fn reduce_caps() {
        // a diagram without any removal or triple site is stuck when no
        // additions are allowed
        let x = (3..=5)
            .flat_map(all_diagrams)
            .find(|x| enumerate_moves(x, MoveLimits::long(x.n())).is_empty())
            .unwrap();
        let r = reduce(&x, 100, x.n(), Mode::Long);
        match &r.outcome {
            Outcome::MinimalFound { diagram, path } => {
                assert_eq!(replay(&x, path).unwrap(), *diagram);
            }
            o => panic!("{o:?}"),
        }
        let r = reduce(&x, 3, x.n() + 2, Mode::Long);
        assert!(matches!(r.outcome, Outcome::Exhausted { .. }));
        assert!(r.visited <= 3);
        assert_eq!(replay(&x, r.path()).unwrap(), r.endpoint());
    }

    #[test]
    fn reduce_free_mode_replays() {
        let x = d("1 2 3 1 2 3");
        let r = reduce(&x, 10_000, 4, Mode::Free);
        assert!(matches!(r.outcome, Outcome::ReducedToEmpty { .. }));
        assert!(replay(&x, r.path()).unwrap().is_empty());
    }

    #[test]
    fn distinguish_examples() {
        let x = d("1 2 1 3 2 3");
        let same = distinguish(&x, &x, &[1, 2], 100, Mode::Free).unwrap();
        assert_eq!(same.verdict, Verdict::SameInvariant);
        let v = distinguish(&d("1 2 1 2"), &d("1 2 3 1 2 3"), &[1, 2], 100, Mode::Long).unwrap();
        assert_eq!(v.verdict, Verdict::SameInvariant);
    }

    #[test]
    fn small_search_is_empty() {
        let s = search_nontrivial(2, 1, 1_000).unwrap();
        assert!(s.complete);
        assert!(s.witnesses.is_empty());
        let s = search_nontrivial(4, 1, 3).unwrap();
        assert!(!s.complete);
        assert_eq!(s.examined, 3);
    }

    #[test]
    fn trials_are_deterministic() {
        let cfg = TrialConfig { trials: 200, max_n: 6, m_list: vec![1, 2], seed: 5, plant_triple: true };
        let a = invariance_trials(&cfg);
        let b = invariance_trials(&cfg);
        assert_eq!(a, b);
        assert!(a.ok(), "{:?}", a.failures.first());
        assert!(a.by_kind.get("R3").copied().unwrap_or(0) > 0);
    }
}
