//! Blind-counter Büchi automata on ultimately periodic words.
//!
//! * [`automaton`]: the automaton model, validation, ε-elimination and the
//!   text format.
//! * [`words`]: lasso words, block decompositions and the block coding of
//!   integer sequences.
//! * [`semantics`]: the step relation, runs, and a bounded brute-force
//!   acceptance oracle.
//! * [`decision`]: exact acceptance for one-counter automata.
//! * [`liminf`]: the automaton accepting codes of sequences with a finite
//!   liminf, its greedy runs and their characterization.
//! * [`petri`]: labelled Petri nets and their translation to automata.
//! * [`cli`]: the command-line front end.
//!
//! ```
//! use blindcounter::liminf::liminf_automaton_epsilon_free;
//! use blindcounter::{decide_accept, DecideOptions, LassoWord};
//!
//! let a = liminf_automaton_epsilon_free();
//! let w = LassoWord::parse("|aabb").unwrap();
//! let verdict = decide_accept(a, &w, DecideOptions::default()).unwrap();
//! assert!(verdict.accepted);
//! verdict.witness.unwrap().run.replay(a, &w).unwrap();
//! ```

pub mod automaton;
pub mod cli;
pub mod decision;
mod format;
pub mod liminf;
pub mod petri;
pub mod search;
pub mod semantics;
pub mod words;

use thiserror::Error;

pub use automaton::{
    AutomatonBuilder, BlindCounterAutomaton, Label, StateId, Transition, Violation,
};
pub use decision::{decide_accept, AcceptanceVerdict, DecideOptions};
pub use semantics::{oracle_accept, ExplorationCaps, OracleVerdict, Run};
pub use words::{Block, BlockLasso, IntegerLasso, LassoWord};

/// Any error raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] automaton::ParseError),
    #[error(transparent)]
    Elimination(#[from] automaton::EliminationError),
    #[error(transparent)]
    Word(#[from] words::WordError),
    #[error(transparent)]
    Semantics(#[from] semantics::SemanticsError),
    #[error(transparent)]
    Decision(#[from] decision::DecisionError),
    #[error(transparent)]
    Net(#[from] petri::NetError),
    #[error("{0}")]
    Io(String),
}
