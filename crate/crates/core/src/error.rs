use thiserror::Error;

use crate::diagram::{Chord, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("label {label:?} occurs {count} times, expected exactly 2")]
    LabelCount { label: String, count: usize },
    #[error("empty label at token {index}")]
    EmptyToken { index: usize },
    #[error("invalid chord diagram: {}", fmt_violations(.0))]
    InvalidDiagram(Vec<Violation>),
    #[error("chords {0} and {1} share an endpoint")]
    SharedEndpoint(Chord, Chord),
    #[error("filtration depth must be at least 1, got {0}")]
    InvalidM(usize),
    #[error("letter level {level} out of range for m = {m}")]
    LevelOutOfRange { level: usize, m: usize },
    #[error("mixed filtration depths: {0} vs {1}")]
    MixedM(usize, usize),
    #[error("invalid normal form: {0}")]
    InvalidNormalForm(String),
    #[error("unknown letter token {0:?}")]
    BadLetter(String),
    #[error("{0} is not a first-move site")]
    NotAnR1Site(Chord),
    #[error("{0} and {1} are not an adjacent pair")]
    NotAnR2Site(Chord, Chord),
    #[error("not a completely adjoint triple of this diagram")]
    NotAnR3Site,
    #[error("gap {gap} out of range 0..={max}")]
    GapOutOfRange { gap: usize, max: usize },
    #[error("size cap {cap} is below the current chord count {n}")]
    SizeCap { cap: usize, n: usize },
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
