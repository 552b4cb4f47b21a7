use std::collections::HashMap;

use super::{Certificate, IpsError, Mode, VerifierSpec};
use crate::automata::{Lasso, StateId, Symbol, Tape};

/// What the verifier tracks while reading stream index `record`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TrackedConfig {
    pub state: StateId,
    pub position: u32,
    pub record: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Accept,
    /// Rejected at stream index `record`; `None` for the SYS up-front toss.
    Reject { record: Option<usize> },
    /// Round `round` (0-based) never ends; `lasso` repeats forever.
    Loop { round: usize, lasso: Lasso<TrackedConfig> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierRun {
    pub outcome: Outcome,
    pub coins_used: usize,
    /// Head chosen in each started round.
    pub heads: Vec<usize>,
}

/// Runs the verifier on one coin string. Coins are consumed as needed:
/// the SYS up-front toss first, then at the start of every round `B` bits
/// of the risky test (GB only), then ⌈log2 k⌉ bits of the head selector,
/// each most significant bit first.
pub fn run_verifier(v: &VerifierSpec, x: &[Symbol], cert: &Certificate, coins: &[bool]) -> Result<VerifierRun, IpsError> {
    let m = &v.machine;
    let tape = Tape::new(x);
    let mut used = 0usize;
    let toss = |used: &mut usize, n: u32| -> Result<u64, IpsError> {
        let mut value = 0u64;
        for _ in 0..n {
            let bit = *coins.get(*used).ok_or(IpsError::CoinUnderflow { available: coins.len() })?;
            value = value << 1 | bit as u64;
            *used += 1;
        }
        Ok(value)
    };
    let mut heads = Vec::new();
    let reject = |record, used, heads| Ok(VerifierRun { outcome: Outcome::Reject { record }, coins_used: used, heads });

    if let Some(sys) = v.sys {
        if toss(&mut used, sys.bits)? < sys.threshold {
            return reject(None, used, heads);
        }
    }
    let mut s = 0usize;
    for round in 0..v.rounds {
        let t = if v.mode == Mode::Gb { toss(&mut used, v.w.bits())? } else { 0 };
        let u = toss(&mut used, v.selection_bits())?;
        let head = v.select(t, u) - 1;
        heads.push(head + 1);

        let mut q = m.initial();
        let mut pos = 0u32;
        let mut seen: HashMap<(StateId, u32, usize), usize> = HashMap::new();
        let mut trail: Vec<TrackedConfig> = Vec::new();
        while q != m.accept() {
            let Some((rec, offset)) = cert.record_at(s) else {
                return reject(Some(s), used, heads);
            };
            if let Some(c) = offset {
                if let Some(&first) = seen.get(&(q, pos, c)) {
                    let cycle = trail.split_off(first);
                    return Ok(VerifierRun {
                        outcome: Outcome::Loop { round, lasso: Lasso { prefix: trail, cycle } },
                        coins_used: used,
                        heads,
                    });
                }
                seen.insert((q, pos, c), trail.len());
            }
            trail.push(TrackedConfig { state: q, position: pos, record: s });
            if rec.read[head] != tape.at(pos) || rec.to == m.reject() || !m.offers(q, &rec.read, rec.to, &rec.moves) {
                return reject(Some(s), used, heads);
            }
            pos = rec.moves[head].apply(pos, tape.last());
            q = rec.to;
            s += 1;
        }
    }
    Ok(VerifierRun {
        outcome: Outcome::Accept,
        coins_used: used,
        heads,
    })
}

/// A verifier with its whole coin string fixed in advance.
#[derive(Clone, Debug)]
pub struct HardwiredVerifier<'a> {
    spec: &'a VerifierSpec,
    coins: Vec<bool>,
}

impl HardwiredVerifier<'_> {
    pub fn coins(&self) -> &[bool] {
        &self.coins
    }

    pub fn run(&self, x: &[Symbol], cert: &Certificate) -> Outcome {
        run_verifier(self.spec, x, cert, &self.coins)
            .expect("a full-budget coin string never runs out")
            .outcome
    }
}

/// Fixes the coins of `v`; `z` must have exactly the worst-case budget.
pub fn hardwire_coins<'a>(v: &'a VerifierSpec, z: &[bool]) -> Result<HardwiredVerifier<'a>, IpsError> {
    if z.len() != v.coin_budget() {
        return Err(IpsError::CoinLength {
            expected: v.coin_budget(),
            found: z.len(),
        });
    }
    Ok(HardwiredVerifier { spec: v, coins: z.to_vec() })
}
