use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Certificate, VerifierSpec};
use crate::automata::{MultiHeadNfa, StateId, Symbol, Tape};

/// How one round ends for one tracked head.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeadRound {
    /// Passed at the accept record with this stream index.
    Pass { end: usize },
    Reject { record: usize },
    Loop,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundRow {
    pub start: usize,
    /// Indexed by head - 1.
    pub heads: Vec<HeadRound>,
}

impl RoundRow {
    /// The accept record closing this round, if any head gets there.
    pub fn end(&self) -> Option<usize> {
        self.heads.iter().find_map(|h| match h {
            HeadRound::Pass { end } => Some(*end),
            _ => None,
        })
    }
}

/// Rows for the rounds the certificate can reach, at most C. The table
/// stops after the first round that no head passes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundOutcomeTable {
    pub rows: Vec<RoundRow>,
}

/// Replays one round tracking only `head`, starting at stream index `start`.
fn replay_round(m: &MultiHeadNfa, tape: &Tape<'_>, cert: &Certificate, start: usize, head: usize) -> HeadRound {
    let mut q = m.initial();
    let mut pos = 0u32;
    let mut s = start;
    let mut seen: HashSet<(StateId, u32, usize)> = HashSet::new();
    loop {
        if q == m.accept() {
            return HeadRound::Pass { end: s.wrapping_sub(1) };
        }
        let Some((rec, offset)) = cert.record_at(s) else {
            return HeadRound::Reject { record: s };
        };
        if offset.is_some_and(|c| !seen.insert((q, pos, c))) {
            return HeadRound::Loop;
        }
        let valid = rec.to != m.reject() && m.offers(q, &rec.read, rec.to, &rec.moves);
        if !valid || rec.read[head] != tape.at(pos) {
            return HeadRound::Reject { record: s };
        }
        pos = rec.moves[head].apply(pos, tape.last());
        q = rec.to;
        s += 1;
    }
}

pub fn round_outcome_table(v: &VerifierSpec, x: &[Symbol], cert: &Certificate) -> RoundOutcomeTable {
    let tape = Tape::new(x);
    let mut rows = Vec::new();
    let mut start = 0;
    for _ in 0..v.rounds {
        let heads: Vec<HeadRound> = (0..v.k()).map(|h| replay_round(&v.machine, &tape, cert, start, h)).collect();
        let row = RoundRow { start, heads };
        let end = row.end();
        rows.push(row);
        match end {
            Some(e) => start = e.wrapping_add(1),
            None => break,
        }
    }
    RoundOutcomeTable { rows }
}

/// Exact accept / reject / loop probabilities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutcomeDistribution {
    pub accept: BigRational,
    pub reject: BigRational,
    pub looping: BigRational,
}

impl OutcomeDistribution {
    /// Probability of not rejecting: the certificate's contribution to
    /// strong error on a nonmember.
    pub fn strong(&self) -> BigRational {
        &self.accept + &self.looping
    }

    pub fn weak(&self) -> BigRational {
        self.accept.clone()
    }
}

/// Combines the round table with the head distribution. Rounds restart at
/// the left end with a fresh head choice, so they are independent:
/// P(accept) is the product of the C pass masses and P(loop) sums, over
/// rounds j, the pass masses before j times the loop mass of j.
pub fn outcome_distribution(v: &VerifierSpec, x: &[Symbol], cert: &Certificate) -> OutcomeDistribution {
    let table = round_outcome_table(v, x, cert);
    let dist = v.head_distribution();
    let mut alive = BigRational::one() - v.upfront_reject();
    let mut looping = BigRational::zero();
    for row in &table.rows {
        let mass = |want: fn(&HeadRound) -> bool| -> BigRational {
            row.heads.iter().zip(&dist).filter(|(h, _)| want(h)).map(|(_, p)| p.clone()).sum()
        };
        looping += &alive * mass(|h| matches!(h, HeadRound::Loop));
        alive *= mass(|h| matches!(h, HeadRound::Pass { .. }));
    }
    let accept = if table.rows.len() == v.rounds { alive } else { BigRational::zero() };
    let reject = BigRational::one() - &accept - &looping;
    OutcomeDistribution { accept, reject, looping }
}
