//! Constant-coin verifiers that check a streamed certificate with one head
//! at a time.
//!
//! A certificate is a stream of records (claimed symbols, next state,
//! moves). Each round the verifier picks one head with private coins,
//! replays the records from the left end tracking only that head, and
//! rejects on a false claim about that head or on a step the machine does
//! not allow. A round passes at a record entering accept; C passed rounds
//! accept.
//!
//! Probabilities are exact. [`outcome_distribution`] works from a
//! per-round, per-head outcome table, while [`hardwire_coins`] runs the
//! coin-driven verifier directly, so averaging it over every coin string is
//! an independent check of the table route.

mod adversary;
mod cert;
mod dyadic;
mod exec;
mod table;
mod verifier;

pub use adversary::{
    best_adversarial_certificate, choose_parameters, strong_error, Adversary, ErrorRow, Parameters,
    StrongErrorReport,
};
pub use cert::{honest_certificate, honest_certificate_with_budget, parse_certificate, Certificate, Record};
pub use dyadic::Dyadic;
pub use exec::{hardwire_coins, run_verifier, HardwiredVerifier, Outcome, TrackedConfig, VerifierRun};
pub use table::{outcome_distribution, round_outcome_table, HeadRound, OutcomeDistribution, RoundOutcomeTable, RoundRow};
pub use verifier::{build_verifier, gb_distribution, parse_verifier_block, HeadClassification, Mode, SysReject, VerifierSpec};

use crate::automata::{AutomataError, MachineError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IpsError {
    #[error("`{0}` is not a dyadic rational in [0, 1)")]
    NotDyadic(String),
    #[error("GB mode needs at least one safe head")]
    NoSafeHeads,
    #[error("risky weight must be 0 exactly when there are no risky heads")]
    WeightMismatch,
    #[error("invalid head classification: {0}")]
    Classification(String),
    #[error("a verifier needs at least one round")]
    NoRounds,
    #[error("SYS up-front rejection (k-1)/2k is not dyadic for k = {k}")]
    SysNotDyadic { k: usize },
    #[error("target error must lie strictly between 0 and 1/2")]
    TargetOutOfRange,
    #[error("ran out of coins after {available}")]
    CoinUnderflow { available: usize },
    #[error("expected {expected} coins, got {found}")]
    CoinLength { expected: usize, found: usize },
    #[error("product graph exceeds {limit} nodes")]
    Budget { limit: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}
