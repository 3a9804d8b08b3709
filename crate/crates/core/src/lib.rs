//! Parity-filtration invariant of free knots.
//!
//! Chord diagrams ([`diagram`]) are filtered by iterated odd-chord extraction
//! ([`parity`]), giving a word whose value in a group with an explicit
//! Cayley graph ([`group`]) is unchanged by Reidemeister moves ([`moves`]).
//! [`explore`] holds the searches built on top.

pub mod diagram;
pub mod error;
pub mod explore;
pub mod group;
pub mod moves;
pub mod parity;

pub use diagram::{link_count, linked, validate, Chord, ChordDiagram, Violation};
pub use error::{Error, Result};
pub use explore::{distinguish, invariant, reduce, scramble, search_nontrivial, Mode, SearchReport, Verdict};
pub use group::{class_closure, conjugate_equal, evaluate, rewrite_oracle, ClassClosure, Conjugacy, NormalForm};
pub use moves::{AdjointTriple, Move, MoveLimits, Pattern};
pub use parity::{delete_odd, filtration, word_of, Filtration, Letter, Word};
