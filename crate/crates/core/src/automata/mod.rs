//! Two-way multi-head nondeterministic automata and their relatives.
//!
//! A [`MultiHeadNfa`] reads `^ x $` with k heads that all start on the left
//! marker. Moving past either marker leaves the head where it is. A
//! configuration whose state is accept or reject has no successors, and one
//! with no applicable transition is stuck (halts without accepting).
//!
//! Acceptance is reachability of an accept configuration in the
//! configuration graph, which has at most `|Q| * (n+2)^k` nodes; every query
//! carries a node budget and reports [`AutomataError::BudgetExceeded`] rather
//! than guessing.

mod afa;
mod alphabet;
mod machine;
mod oneway;
mod parse;
mod run;

pub use afa::{afa_accepts, AfaTransition, TwoWayAfa};
pub use alphabet::{HeadMove, Symbol, Tape, TapeAlphabet, Words, LEFT_MARKER, RIGHT_MARKER};
pub use machine::{symbol_tuples, MachineBuilder, MultiHeadNfa, StateId, Transition, TransitionId};
pub use oneway::{OneWayDfa, OneWayNfa};
pub use parse::{parse_machine, ParseError};
pub use run::{
    accepts, always_halts_on, is_valid_lasso, max_run_steps, replay, successors, ConfigGraph, Configuration, Lasso,
    PathStep, RunLength, RunResult, Verdict, DEFAULT_NODE_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MachineError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("expected {expected} components, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("`{0}` is a reserved end marker")]
    ReservedSymbol(String),
    #[error("invalid token `{0}`")]
    BadToken(String),
    #[error("head {head} out of range 1..={heads}")]
    HeadIndex { head: usize, heads: usize },
    #[error("a machine needs at least one head")]
    NoHeads,
    #[error("accept and reject state must differ")]
    AcceptIsReject,
    #[error("transition out of halting state `{0}`")]
    TransitionFromHalting(String),
    #[error("construction exceeds the cap of {limit} states")]
    TooLarge { limit: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomataError {
    #[error("node budget of {limit} configurations exceeded")]
    BudgetExceeded { limit: usize },
}

#[cfg(test)]
mod tests;
