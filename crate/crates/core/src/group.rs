//! The group generated by the letters of depth `m`, realised through its
//! action on the Cayley graph `Z^m x {0,1}`.
//!
//! A point `(x_1..x_m; eps)` is moved by right multiplication with a letter:
//! with `pi_k = (x_{k+1} + ... + x_m + eps) mod 2`, `P_k` steps `x_{k+1}` up
//! when `pi_k` is even and down otherwise, `D_k` does the opposite, and `F`
//! toggles `eps`. Group elements are identified with the point reached from
//! the origin.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::parity::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "NormalFormJson")]
pub struct NormalForm {
    m: usize,
    x: Vec<i64>,
    eps: u8,
}

#[derive(Deserialize)]
struct NormalFormJson {
    m: usize,
    x: Vec<i64>,
    eps: u8,
}

impl TryFrom<NormalFormJson> for NormalForm {
    type Error = Error;

    fn try_from(v: NormalFormJson) -> Result<Self> {
        NormalForm::new(v.m, v.x, v.eps)
    }
}

/// Which coordinates enter the parity that steers a level step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ParityRule {
    /// `pi_k` sums `x_{k+1}..x_m` and `eps`. Relations hold under this rule.
    #[default]
    WithEps,
    /// `pi_k` sums `x_{k+1}..x_m` only. Breaks `P_i F = F D_i`; kept as a
    /// negative control for the relation checker.
    WithoutEps,
}

impl NormalForm {
    pub fn new(m: usize, x: Vec<i64>, eps: u8) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidM(m));
        }
        if x.len() != m {
            return Err(Error::InvalidNormalForm(format!("expected {m} coordinates, got {}", x.len())));
        }
        if eps > 1 {
            return Err(Error::InvalidNormalForm(format!("eps must be 0 or 1, got {eps}")));
        }
        Ok(NormalForm { m, x, eps })
    }

    pub fn identity(m: usize) -> Result<Self> {
        Self::new(m, vec![0; m], 0)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn x(&self) -> &[i64] {
        &self.x
    }

    pub fn eps(&self) -> u8 {
        self.eps
    }

    pub fn is_identity(&self) -> bool {
        self.eps == 0 && self.x.iter().all(|&v| v == 0)
    }

    /// `(sum x + eps) mod 2`, which equals the length parity of every word
    /// evaluating to this element.
    pub fn parity(&self) -> u8 {
        ((self.x.iter().sum::<i64>() + self.eps as i64).rem_euclid(2)) as u8
    }

    fn step(&mut self, z: Letter, rule: ParityRule) {
        let (k, up_when_even) = match z {
            Letter::Final => {
                self.eps ^= 1;
                return;
            }
            Letter::Prime(k) => (k, true),
            Letter::DoublePrime(k) => (k, false),
        };
        let mut pi: i64 = self.x[k..].iter().sum();
        if rule == ParityRule::WithEps {
            pi += self.eps as i64;
        }
        let even = pi.rem_euclid(2) == 0;
        self.x[k] += if even == up_when_even { 1 } else { -1 };
    }

    /// Right multiplication by one letter.
    pub fn apply_letter(&self, z: Letter) -> Result<NormalForm> {
        z.check(self.m)?;
        let mut out = self.clone();
        out.step(z, ParityRule::WithEps);
        Ok(out)
    }

    fn apply_word_with(&self, letters: &[Letter], rule: ParityRule) -> NormalForm {
        let mut out = self.clone();
        for &z in letters {
            out.step(z, rule);
        }
        out
    }

    /// Right multiplication by a word.
    pub fn apply_word(&self, w: &Word) -> Result<NormalForm> {
        if w.m() != self.m {
            return Err(Error::MixedM(self.m, w.m()));
        }
        Ok(self.apply_word_with(w.letters(), ParityRule::WithEps))
    }

    /// Canonical word for this element: `F` first if `eps = 1`, then unit
    /// steps on the levels from `m - 1` down to 0.
    pub fn to_word(&self) -> Word {
        let mut cur = NormalForm { m: self.m, x: vec![0; self.m], eps: 0 };
        let mut letters = Vec::new();
        if self.eps == 1 {
            letters.push(Letter::Final);
            cur.eps = 1;
        }
        for k in (0..self.m).rev() {
            while cur.x[k] != self.x[k] {
                let up = self.x[k] > cur.x[k];
                let pi = (cur.x[k..].iter().sum::<i64>() + cur.eps as i64).rem_euclid(2);
                let z = if up == (pi == 0) { Letter::Prime(k) } else { Letter::DoublePrime(k) };
                cur.step(z, ParityRule::WithEps);
                letters.push(z);
            }
        }
        Word::from_letters_unchecked(self.m, letters)
    }

    pub fn multiply(&self, other: &NormalForm) -> Result<NormalForm> {
        if self.m != other.m {
            return Err(Error::MixedM(self.m, other.m));
        }
        Ok(self.apply_word_with(other.to_word().letters(), ParityRule::WithEps))
    }

    pub fn inverse(&self) -> NormalForm {
        evaluate(&self.to_word().reversed())
    }

    /// `by^-1 * self * by`.
    pub fn conjugate(&self, by: &Word) -> Result<NormalForm> {
        if by.m() != self.m {
            return Err(Error::MixedM(self.m, by.m()));
        }
        let start = NormalForm { m: self.m, x: vec![0; self.m], eps: 0 };
        let w = by.reversed().concat(&self.to_word())?.concat(by)?;
        Ok(start.apply_word_with(w.letters(), ParityRule::WithEps))
    }

    fn conjugate_letter(&self, z: Letter) -> NormalForm {
        let start = NormalForm { m: self.m, x: vec![0; self.m], eps: 0 };
        let mut w = Vec::with_capacity(2 + self.x.iter().map(|v| v.unsigned_abs() as usize).sum::<usize>());
        w.push(z);
        w.extend_from_slice(self.to_word().letters());
        w.push(z);
        start.apply_word_with(&w, ParityRule::WithEps)
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let xs: Vec<String> = self.x.iter().map(i64::to_string).collect();
        write!(f, "({}; {})", xs.join(","), self.eps)
    }
}

/// Left-to-right action of `w` on the origin.
pub fn evaluate(w: &Word) -> NormalForm {
    let start = NormalForm { m: w.m(), x: vec![0; w.m()], eps: 0 };
    start.apply_word_with(w.letters(), ParityRule::WithEps)
}

/// Relation instance `lhs = rhs` on two-letter words.
pub type Relation = ([Letter; 2], [Letter; 2]);

/// The defining swap relations for depth `m`, followed by their companions
/// obtained by conjugating with involutions.
pub fn relations(m: usize) -> Vec<Relation> {
    use Letter::*;
    let mut out = Vec::new();
    for j in 0..m {
        for i in 0..j {
            out.push(([DoublePrime(i), Prime(j)], [Prime(j), Prime(i)]));
            out.push(([DoublePrime(i), DoublePrime(j)], [DoublePrime(j), Prime(i)]));
        }
    }
    for i in 0..m {
        out.push(([Prime(i), Final], [Final, DoublePrime(i)]));
    }
    for j in 0..m {
        for i in 0..j {
            out.push(([Prime(i), Prime(j)], [Prime(j), DoublePrime(i)]));
            out.push(([Prime(i), DoublePrime(j)], [DoublePrime(j), DoublePrime(i)]));
        }
    }
    for i in 0..m {
        out.push(([DoublePrime(i), Final], [Final, Prime(i)]));
    }
    out
}

/// True iff every letter squares to the identity and every relation holds
/// as an equality of actions at each sample point.
pub fn relation_check(m: usize, points: &[NormalForm]) -> bool {
    relation_check_with(m, points, ParityRule::WithEps)
}

pub fn relation_check_with(m: usize, points: &[NormalForm], rule: ParityRule) -> bool {
    let alphabet = Letter::alphabet(m);
    let rels = relations(m);
    points.iter().filter(|p| p.m == m).all(|p| {
        alphabet.iter().all(|&z| p.apply_word_with(&[z, z], rule) == *p)
            && rels
                .iter()
                .all(|(l, r)| p.apply_word_with(l, rule) == p.apply_word_with(r, rule))
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum OracleVerdict {
    /// The words are connected by this many rewrites.
    Equal(usize),
    Undetermined,
}

/// Bidirectional breadth-first search over words using free insertion or
/// deletion of `zz` and every relation in either direction. `depth` bounds
/// the total number of rewrites; intermediate words are at most four letters
/// longer than the longer input.
///
/// Independent of the Cayley action, so it can cross-check [`evaluate`].
pub fn rewrite_oracle(w1: &Word, w2: &Word, depth: usize) -> Result<OracleVerdict> {
    if w1.m() != w2.m() {
        return Err(Error::MixedM(w1.m(), w2.m()));
    }
    let m = w1.m();
    let max_len = w1.len().max(w2.len()) + 4;
    let alphabet = Letter::alphabet(m);
    let mut rules: HashMap<[Letter; 2], Vec<[Letter; 2]>> = HashMap::new();
    for (l, r) in relations(m) {
        rules.entry(l).or_default().push(r);
        rules.entry(r).or_default().push(l);
    }
    let neighbours = |w: &[Letter]| -> Vec<Vec<Letter>> {
        let mut out = Vec::new();
        for i in 0..w.len().saturating_sub(1) {
            if w[i] == w[i + 1] {
                let mut v = w[..i].to_vec();
                v.extend_from_slice(&w[i + 2..]);
                out.push(v);
            }
            if let Some(rhs) = rules.get(&[w[i], w[i + 1]]) {
                for r in rhs {
                    let mut v = w.to_vec();
                    v[i] = r[0];
                    v[i + 1] = r[1];
                    out.push(v);
                }
            }
        }
        if w.len() + 2 <= max_len {
            for i in 0..=w.len() {
                for &z in &alphabet {
                    let mut v = w[..i].to_vec();
                    v.push(z);
                    v.push(z);
                    v.extend_from_slice(&w[i..]);
                    out.push(v);
                }
            }
        }
        out
    };

    let a: Vec<Letter> = w1.letters().to_vec();
    let b: Vec<Letter> = w2.letters().to_vec();
    if a == b {
        return Ok(OracleVerdict::Equal(0));
    }
    let mut dist = [HashMap::from([(a.clone(), 0usize)]), HashMap::from([(b.clone(), 0usize)])];
    let mut frontier = [vec![a], vec![b]];
    let mut radius = [0usize, 0usize];
    while radius[0] + radius[1] < depth {
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        if frontier[side].is_empty() {
            break;
        }
        let other = 1 - side;
        let mut next = Vec::new();
        let r = radius[side] + 1;
        for w in std::mem::take(&mut frontier[side]) {
            for v in neighbours(&w) {
                if let Some(&d) = dist[other].get(&v) {
                    return Ok(OracleVerdict::Equal(r + d));
                }
                if !dist[side].contains_key(&v) {
                    dist[side].insert(v.clone(), r);
                    next.push(v);
                }
            }
        }
        frontier[side] = next;
        radius[side] = r;
    }
    Ok(OracleVerdict::Undetermined)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum ClassClosure {
    Closed(BTreeSet<NormalForm>),
    Truncated(BTreeSet<NormalForm>),
}

impl ClassClosure {
    pub fn elements(&self) -> &BTreeSet<NormalForm> {
        match self {
            ClassClosure::Closed(s) | ClassClosure::Truncated(s) => s,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, ClassClosure::Closed(_))
    }
}

/// Breadth-first orbit of `a` under conjugation by single letters, with the
/// letter that first reached each element.
struct Orbit {
    parent: HashMap<NormalForm, Option<(NormalForm, Letter)>>,
    closed: bool,
}

impl Orbit {
    fn explore(a: &NormalForm, cap: usize, stop_at: Option<&NormalForm>) -> Orbit {
        let alphabet = Letter::alphabet(a.m);
        let mut parent = HashMap::from([(a.clone(), None)]);
        let mut queue = VecDeque::from([a.clone()]);
        if stop_at == Some(a) {
            return Orbit { parent, closed: false };
        }
        while let Some(cur) = queue.pop_front() {
            for &z in &alphabet {
                let next = cur.conjugate_letter(z);
                if parent.contains_key(&next) {
                    continue;
                }
                if parent.len() >= cap {
                    return Orbit { parent, closed: false };
                }
                parent.insert(next.clone(), Some((cur.clone(), z)));
                if stop_at == Some(&next) {
                    return Orbit { parent, closed: false };
                }
                queue.push_back(next);
            }
        }
        Orbit { parent, closed: true }
    }

    /// Letters `z_1..z_k` with `target = conjugate(start, z_1..z_k)`.
    fn path_to(&self, target: &NormalForm) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut cur = target;
        while let Some(Some((prev, z))) = self.parent.get(cur) {
            out.push(*z);
            cur = prev;
        }
        out.reverse();
        out
    }

    fn elements(&self) -> BTreeSet<NormalForm> {
        self.parent.keys().cloned().collect()
    }
}

/// Conjugacy class of `a`, explored up to `state_cap` elements.
pub fn class_closure(a: &NormalForm, state_cap: usize) -> ClassClosure {
    let orbit = Orbit::explore(a, state_cap.max(1), None);
    if orbit.closed {
        ClassClosure::Closed(orbit.elements())
    } else {
        ClassClosure::Truncated(orbit.elements())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Conjugacy {
    /// `conjugate(a, witness) == b`.
    Yes(Word),
    No,
    Undetermined,
}

/// Bounded conjugacy test. `No` is only reported when one of the two
/// classes was explored completely.
pub fn conjugate_equal(a: &NormalForm, b: &NormalForm, state_cap: usize) -> Result<Conjugacy> {
    if a.m != b.m {
        return Err(Error::MixedM(a.m, b.m));
    }
    let m = a.m;
    let cap = state_cap.max(1);
    let from_a = Orbit::explore(a, cap, Some(b));
    if from_a.parent.contains_key(b) {
        return Ok(Conjugacy::Yes(Word::from_letters_unchecked(m, from_a.path_to(b))));
    }
    if from_a.closed {
        return Ok(Conjugacy::No);
    }
    let from_b = Orbit::explore(b, cap, Some(a));
    if from_b.parent.contains_key(a) {
        let mut w = from_b.path_to(a);
        w.reverse();
        return Ok(Conjugacy::Yes(Word::from_letters_unchecked(m, w)));
    }
    if from_b.closed {
        return Ok(Conjugacy::No);
    }
    let seen_a: HashSet<&NormalForm> = from_a.parent.keys().collect();
    let meet = from_b.parent.keys().filter(|c| seen_a.contains(c)).min();
    Ok(match meet {
        Some(c) => {
            let mut w = from_a.path_to(c);
            let mut back = from_b.path_to(c);
            back.reverse();
            w.extend(back);
            Conjugacy::Yes(Word::from_letters_unchecked(m, w))
        }
        None => Conjugacy::Undetermined,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Letter::*;

    fn nf(x: &[i64], eps: u8) -> NormalForm {
        NormalForm::new(x.len(), x.to_vec(), eps).unwrap()
    }

    fn w(m: usize, s: &str) -> Word {
        Word::parse(m, s).unwrap()
    }

    #[test]
    fn apply_letter_examples() {
        assert_eq!(nf(&[0], 0).apply_letter(Prime(0)).unwrap(), nf(&[1], 0));
        assert_eq!(nf(&[0], 1).apply_letter(Prime(0)).unwrap(), nf(&[-1], 1));
        assert_eq!(nf(&[-1, 1], 0).apply_letter(DoublePrime(0)).unwrap(), nf(&[-2, 1], 0));
        let p = nf(&[3, -2], 1);
        assert_eq!(p.apply_letter(Final).unwrap().apply_letter(Final).unwrap(), p);
        assert_eq!(
            nf(&[0], 0).apply_letter(Prime(1)),
            Err(Error::LevelOutOfRange { level: 1, m: 1 })
        );
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&w(1, "P0 F")), nf(&[1], 1));
        assert!(evaluate(&w(1, "D0 F D0 D0 F D0")).is_identity());
        assert!(evaluate(&w(2, "D0 P1 D0 P1 P1 D0 P1 D0")).is_identity());
        assert!(evaluate(&Word::empty(3).unwrap()).is_identity());
    }

    #[test]
    fn to_word_examples() {
        assert!(nf(&[0], 0).to_word().is_empty());
        assert_eq!(nf(&[1], 0).to_word(), w(1, "P0"));
        assert_eq!(nf(&[-1], 1).to_word(), w(1, "F P0"));
    }

    #[test]
    fn multiply_and_inverse() {
        let a = nf(&[1], 0);
        assert_eq!(a.multiply(&NormalForm::identity(1).unwrap()).unwrap(), a);
        assert!(a.multiply(&a).unwrap().is_identity());
        assert_eq!(nf(&[0], 1).multiply(&a).unwrap(), nf(&[-1], 1));
        assert_eq!(a.multiply(&nf(&[0, 0], 0)), Err(Error::MixedM(1, 2)));
        assert!(NormalForm::identity(2).unwrap().inverse().is_identity());
        assert_eq!(a.inverse(), a);
        assert_eq!(nf(&[1], 1).inverse(), nf(&[-1], 1));
    }

    #[test]
    fn conjugate_examples() {
        let e = NormalForm::identity(1).unwrap();
        assert!(e.conjugate(&w(1, "F P0 D0")).unwrap().is_identity());
        assert_eq!(nf(&[1], 0).conjugate(&w(1, "F")).unwrap(), nf(&[-1], 0));
        assert_eq!(nf(&[1], 0).conjugate(&w(1, "F")).unwrap(), evaluate(&w(1, "D0")));
        assert_eq!(nf(&[5], 0).conjugate(&Word::empty(1).unwrap()).unwrap(), nf(&[5], 0));
        assert_eq!(nf(&[1], 0).conjugate(&w(2, "F")), Err(Error::MixedM(1, 2)));
    }

    #[test]
    fn relation_check_examples() {
        let pts: Vec<NormalForm> = (-3..=3)
            .flat_map(|a| (0..=1).map(move |e| nf(&[a], e)))
            .collect();
        assert!(relation_check(1, &pts));
        assert!(!relation_check_with(1, &[nf(&[0], 0)], ParityRule::WithoutEps));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(rewrite_oracle(&w(1, "P0 P0"), &w(1, ""), 4).unwrap(), OracleVerdict::Equal(1));
        assert_eq!(rewrite_oracle(&w(1, "P0 F"), &w(1, "F D0"), 4).unwrap(), OracleVerdict::Equal(1));
        assert_eq!(rewrite_oracle(&w(1, "P0"), &w(1, "D0"), 4).unwrap(), OracleVerdict::Undetermined);
        assert!(rewrite_oracle(&w(1, "P0"), &w(2, "P0"), 4).is_err());
    }

    #[test]
    fn closure_examples() {
        let e = NormalForm::identity(1).unwrap();
        assert_eq!(class_closure(&e, 10), ClassClosure::Closed(BTreeSet::from([e.clone()])));
        // P0 is a reflection of the infinite dihedral subgroup: its class is
        // every odd x with eps = 0
        let c = class_closure(&nf(&[1], 0), 50);
        assert!(!c.is_closed());
        assert!(c.elements().contains(&nf(&[-1], 0)));
        assert!(c.elements().iter().all(|p| p.eps() == 0 && p.x()[0] % 2 != 0));
        assert!(!class_closure(&nf(&[7, 3, -2], 1), 3).is_closed());
        // even x with eps = 0 is a translation; its class is {x, -x}
        assert_eq!(
            class_closure(&nf(&[4], 0), 100),
            ClassClosure::Closed(BTreeSet::from([nf(&[-4], 0), nf(&[4], 0)]))
        );
    }

    #[test]
    fn conjugate_equal_examples() {
        let e = NormalForm::identity(1).unwrap();
        assert_eq!(conjugate_equal(&e, &e, 10).unwrap(), Conjugacy::Yes(Word::empty(1).unwrap()));
        assert_eq!(conjugate_equal(&e, &nf(&[1], 0), 10).unwrap(), Conjugacy::No);
        assert_eq!(conjugate_equal(&nf(&[1], 0), &nf(&[-1], 0), 10).unwrap(), Conjugacy::Yes(w(1, "F")));
        assert_eq!(conjugate_equal(&nf(&[1], 0), &nf(&[2], 0), 50).unwrap(), Conjugacy::No);
        assert_eq!(conjugate_equal(&nf(&[1], 0), &nf(&[0], 1), 20).unwrap(), Conjugacy::Undetermined);
    }

    #[test]
    fn conjugate_equal_witness_through_meeting_point() {
        let a = nf(&[1], 0);
        let b = a.conjugate(&w(1, "P0 D0 P0 D0 F")).unwrap();
        match conjugate_equal(&a, &b, 10_000).unwrap() {
            Conjugacy::Yes(wit) => assert_eq!(a.conjugate(&wit).unwrap(), b),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn json_form() {
        let p = nf(&[2, -1], 1);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"m":2,"x":[2,-1],"eps":1}"#);
        assert_eq!(serde_json::from_str::<NormalForm>(&s).unwrap(), p);
        assert!(serde_json::from_str::<NormalForm>(r#"{"m":2,"x":[2],"eps":0}"#).is_err());
        assert!(serde_json::from_str::<NormalForm>(r#"{"m":1,"x":[2],"eps":2}"#).is_err());
    }
}
