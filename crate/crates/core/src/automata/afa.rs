use std::collections::{HashMap, VecDeque};

use super::alphabet::{HeadMove, Symbol, Tape, TapeAlphabet};
use super::machine::StateId;
use super::MachineError;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AfaTransition {
    pub from: StateId,
    pub read: Symbol,
    pub to: StateId,
    pub mv: HeadMove,
}

/// Single-head two-way alternating automaton. Accepting states are terminal.
#[derive(Clone, Debug)]
pub struct TwoWayAfa {
    alphabet: TapeAlphabet,
    states: Vec<String>,
    universal: Vec<bool>,
    accepting: Vec<bool>,
    initial: StateId,
    transitions: Vec<AfaTransition>,
    index: HashMap<(StateId, Symbol), Vec<usize>>,
}

impl TwoWayAfa {
    pub fn new(
        alphabet: TapeAlphabet,
        states: Vec<String>,
        universal: Vec<bool>,
        accepting: Vec<bool>,
        initial: StateId,
        transitions: Vec<AfaTransition>,
    ) -> Result<Self, MachineError> {
        let n = states.len();
        if universal.len() != n || accepting.len() != n {
            return Err(MachineError::Arity {
                expected: n,
                found: universal.len().min(accepting.len()),
            });
        }
        if initial.index() >= n {
            return Err(MachineError::UndeclaredState(format!("#{}", initial.0)));
        }
        let mut index: HashMap<(StateId, Symbol), Vec<usize>> = HashMap::new();
        let mut kept: Vec<AfaTransition> = Vec::new();
        for t in transitions {
            if t.from.index() >= n || t.to.index() >= n {
                return Err(MachineError::UndeclaredState(format!("#{}", t.from.0.max(t.to.0))));
            }
            if t.read.0 as usize >= alphabet.tape_len() {
                return Err(MachineError::UnknownSymbol(format!("#{}", t.read.0)));
            }
            if kept.contains(&t) {
                continue;
            }
            index.entry((t.from, t.read)).or_default().push(kept.len());
            kept.push(t);
        }
        Ok(TwoWayAfa {
            alphabet,
            states,
            universal,
            accepting,
            initial,
            transitions: kept,
            index,
        })
    }

    pub fn alphabet(&self) -> &TapeAlphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_universal(&self, q: StateId) -> bool {
        self.universal[q.index()]
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q.index()]
    }

    pub fn transitions(&self) -> &[AfaTransition] {
        &self.transitions
    }

    /// (target, move) pairs offered in `q` scanning `s`.
    pub fn moves(&self, q: StateId, s: Symbol) -> impl Iterator<Item = (StateId, HeadMove)> + '_ {
        self.index
            .get(&(q, s))
            .into_iter()
            .flatten()
            .map(|&i| (self.transitions[i].to, self.transitions[i].mv))
    }
}

/// Least-fixed-point acceptance over the reachable AND-OR configuration graph.
///
/// Accepting-state configurations accept; an existential configuration
/// accepts if some successor does; a universal one if all successors do
/// (vacuously when stuck). Infinite plays do not accept.
pub fn afa_accepts(a: &TwoWayAfa, word: &[Symbol]) -> bool {
    let tape = Tape::new(word);
    let last = tape.last();
    let width = last as usize + 1;
    let key = |q: StateId, p: u32| q.index() * width + p as usize;
    let total = a.state_count() * width;

    // reachable configurations and their distinct successors
    let mut succ: Vec<Option<Vec<usize>>> = vec![None; total];
    let mut queue = VecDeque::from([(a.initial(), 0u32)]);
    succ[key(a.initial(), 0)] = Some(Vec::new());
    let mut order = Vec::new();
    while let Some((q, p)) = queue.pop_front() {
        let k = key(q, p);
        order.push(k);
        if a.is_accepting(q) {
            continue;
        }
        let mut out: Vec<usize> = Vec::new();
        for (r, mv) in a.moves(q, tape.at(p)) {
            let np = mv.apply(p, last);
            let nk = key(r, np);
            if !out.contains(&nk) {
                out.push(nk);
            }
            if succ[nk].is_none() {
                succ[nk] = Some(Vec::new());
                queue.push_back((r, np));
            }
        }
        succ[k] = Some(out);
    }

    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); total];
    let mut pending = vec![0usize; total];
    let mut won = vec![false; total];
    let mut work = Vec::new();
    for &k in &order {
        let q = StateId((k / width) as u32);
        let out = succ[k].as_ref().unwrap();
        for &s in out {
            preds[s].push(k);
        }
        if a.is_accepting(q) {
            won[k] = true;
            work.push(k);
        } else if a.is_universal(q) {
            pending[k] = out.len();
            if out.is_empty() {
                won[k] = true;
                work.push(k);
            }
        } else {
            pending[k] = 1;
        }
    }
    while let Some(k) = work.pop() {
        for &p in &preds[k] {
            if won[p] {
                continue;
            }
            pending[p] -= 1;
            if pending[p] == 0 {
                won[p] = true;
                work.push(p);
            }
        }
    }
    won[key(a.initial(), 0)]
}
