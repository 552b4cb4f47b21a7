//! Deciding whether a one-head machine halts on every path of every input.
//!
//! The route is: wrap the machine as an all-universal AFA that accepts
//! exactly where every path halts, convert that AFA to a one-way automaton,
//! and check the one-way automaton for universality. A bounded search for a
//! configuration cycle serves as an independent oracle.
//!
//! The AFA-to-one-way step summarizes a prefix `^ x1..xj` by a table. For
//! each set X of non-accepting states assumed to win one cell to the right,
//! the table stores the set of states that win at cell j, and whether the
//! initial configuration wins. Each column's winning set is a least fixed
//! point that takes the previous column's table as a monotone parameter, so
//! the table for `^ x a` depends only on the table for `^ x` and `a`.

use std::collections::{HashMap, VecDeque};

use crate::automata::{
    always_halts_on, AutomataError, Configuration, HeadMove, Lasso, MachineError, MultiHeadNfa, OneWayNfa, StateId,
    Symbol, TwoWayAfa, DEFAULT_NODE_BUDGET,
};
use crate::transforms::{halting_wrapper, project_head};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HaltingError {
    #[error("AFA has {found} non-accepting states, cap is {limit}")]
    TooManyAfaStates { found: usize, limit: usize },
    #[error("one-way automaton exceeds {limit} states")]
    OnfaBudget { limit: usize },
    #[error("subset exploration exceeds {limit} subsets")]
    SubsetBudget { limit: usize },
    #[error("counterexample {word:?} has no loop witness")]
    Inconsistent { word: String },
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

/// Size caps for the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Non-accepting AFA states; tables have 2^this entries.
    pub afa_states: usize,
    pub onfa_states: usize,
    pub subsets: usize,
    pub nodes: usize,
}

/// Beyond 16 states a single table would have more than 65536 entries.
pub const MAX_AFA_STATES: usize = 16;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            afa_states: 6,
            onfa_states: 1 << 20,
            subsets: 1 << 20,
            nodes: DEFAULT_NODE_BUDGET,
        }
    }
}

const INIT: u32 = 1 << 31;

/// Where a transition leads: a non-accepting state (by compact index) or an
/// accepting one.
#[derive(Clone, Copy)]
enum Target {
    Active(u32),
    Win,
}

struct Columns {
    width: usize,
    universal: Vec<bool>,
    initial: Target,
    /// `moves[symbol][active index]`
    moves: Vec<Vec<Vec<(Target, HeadMove)>>>,
}

impl Columns {
    fn new(a: &TwoWayAfa, limit: usize) -> Result<Self, HaltingError> {
        let active: Vec<StateId> = (0..a.state_count() as u32)
            .map(StateId)
            .filter(|&q| !a.is_accepting(q))
            .collect();
        if active.len() > limit.min(MAX_AFA_STATES) {
            return Err(HaltingError::TooManyAfaStates {
                found: active.len(),
                limit: limit.min(MAX_AFA_STATES),
            });
        }
        let mut compact = vec![None; a.state_count()];
        for (i, q) in active.iter().enumerate() {
            compact[q.index()] = Some(i as u32);
        }
        let target = |q: StateId| compact[q.index()].map_or(Target::Win, Target::Active);
        let moves = a
            .alphabet()
            .tape_symbols()
            .map(|s| {
                active
                    .iter()
                    .map(|&q| a.moves(q, s).map(|(r, mv)| (target(r), mv)).collect())
                    .collect()
            })
            .collect();
        Ok(Columns {
            width: active.len(),
            universal: active.iter().map(|&q| a.is_universal(q)).collect(),
            initial: target(a.initial()),
            moves,
        })
    }

    fn mask(&self) -> u32 {
        (1u32 << self.width) - 1
    }

    /// States winning at a cell holding `s`, given winning sets `here` at
    /// the same cell, `right` one cell right and `left` one cell left.
    fn local(&self, s: Symbol, here: u32, right: u32, left: u32) -> u32 {
        let mut out = 0;
        for (q, options) in self.moves[s.0 as usize].iter().enumerate() {
            let wins = |&(t, mv): &(Target, HeadMove)| match t {
                Target::Win => true,
                Target::Active(r) => {
                    let set = match mv {
                        HeadMove::Stay => here,
                        HeadMove::Right if s == Symbol::RIGHT => here,
                        HeadMove::Right => right,
                        HeadMove::Left if s == Symbol::LEFT => here,
                        HeadMove::Left => left,
                    };
                    set >> r & 1 == 1
                }
            };
            let ok = if self.universal[q] { options.iter().all(wins) } else { options.iter().any(wins) };
            if ok {
                out |= 1 << q;
            }
        }
        out
    }

    /// Least Z with Z = local(s, Z, right, left_of(Z)).
    fn fixpoint(&self, s: Symbol, right: u32, left_of: impl Fn(u32) -> u32) -> u32 {
        let mut z = 0;
        loop {
            let next = self.local(s, z, right, left_of(z));
            if next == z {
                return z;
            }
            z = next;
        }
    }

    fn starts(&self, column0: u32) -> bool {
        match self.initial {
            Target::Win => true,
            Target::Active(r) => column0 >> r & 1 == 1,
        }
    }

    fn first_table(&self) -> Vec<u32> {
        (0..=self.mask())
            .map(|x| {
                let g = self.fixpoint(Symbol::LEFT, x, |_| 0);
                g | if self.starts(g) { INIT } else { 0 }
            })
            .collect()
    }

    fn extend(&self, table: &[u32], s: Symbol) -> Vec<u32> {
        let mask = self.mask();
        (0..=mask)
            .map(|x| {
                let z = self.fixpoint(s, x, |z| table[z as usize] & mask);
                z | (table[z as usize] & INIT)
            })
            .collect()
    }

    fn final_accepts(&self, table: &[u32]) -> bool {
        let mask = self.mask();
        let z = self.fixpoint(Symbol::RIGHT, 0, |z| table[z as usize] & mask);
        table[z as usize] & INIT != 0
    }
}

/// A one-way deterministic automaton (as a [`OneWayNfa`] with singleton
/// transitions) recognizing exactly the language of `a`.
pub fn afa_to_onfa(a: &TwoWayAfa, limits: &Limits) -> Result<OneWayNfa, HaltingError> {
    let cols = Columns::new(a, limits.afa_states)?;
    let symbols: Vec<Symbol> = a.alphabet().input_symbols().collect();
    let start = cols.first_table();
    let mut ids: HashMap<Vec<u32>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut tables = vec![start];
    let mut delta: Vec<Vec<Vec<usize>>> = Vec::new();
    let mut next = 0;
    while next < tables.len() {
        let mut row = Vec::with_capacity(symbols.len());
        for &s in &symbols {
            let t = cols.extend(&tables[next], s);
            let id = match ids.get(&t) {
                Some(&id) => id,
                None => {
                    if tables.len() >= limits.onfa_states {
                        return Err(HaltingError::OnfaBudget { limit: limits.onfa_states });
                    }
                    ids.insert(t.clone(), tables.len());
                    tables.push(t);
                    tables.len() - 1
                }
            };
            row.push(vec![id]);
        }
        delta.push(row);
        next += 1;
    }
    let accepting = tables.iter().map(|t| cols.final_accepts(t)).collect();
    Ok(OneWayNfa::new(a.alphabet().clone(), vec![0], accepting, delta)?)
}

/// Whether `n` accepts every word, by breadth-first subset exploration.
/// When it does not, returns the shortest (then least) rejected word.
pub fn onfa_universal(n: &OneWayNfa, subset_budget: usize) -> Result<(bool, Option<Vec<Symbol>>), HaltingError> {
    let symbols: Vec<Symbol> = n.alphabet().input_symbols().collect();
    let start: Vec<usize> = n.initial().to_vec();
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut sets = vec![start];
    let mut parent: Vec<Option<(usize, Symbol)>> = vec![None];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        if !sets[i].iter().any(|&q| n.is_accepting(q)) {
            let mut word = Vec::new();
            let mut cur = i;
            while let Some((p, s)) = parent[cur] {
                word.push(s);
                cur = p;
            }
            word.reverse();
            return Ok((false, Some(word)));
        }
        for &s in &symbols {
            let mut next: Vec<usize> = sets[i].iter().flat_map(|&q| n.targets(q, s).iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            if !ids.contains_key(&next) {
                if sets.len() >= subset_budget {
                    return Err(HaltingError::SubsetBudget { limit: subset_budget });
                }
                ids.insert(next.clone(), sets.len());
                parent.push(Some((i, s)));
                queue.push_back(sets.len());
                sets.push(next);
            }
        }
    }
    Ok((true, None))
}

/// Outcome of analysing one head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadAnalysis {
    pub head: usize,
    pub safe: bool,
    /// Shortest input on which the projection can run forever.
    pub counterexample: Option<Vec<Symbol>>,
    /// A reachable cycle of the projection on `counterexample`.
    pub witness: Option<Lasso<Configuration>>,
    /// States of the one-way automaton; absent for the bounded method.
    pub onfa_states: Option<usize>,
}

/// Whether a one-head machine halts on every path of every input, with a
/// loop witness when it does not.
pub fn analyze_one_head(m: &MultiHeadNfa, limits: &Limits) -> Result<HeadAnalysis, HaltingError> {
    let afa = halting_wrapper(m)?;
    let onfa = afa_to_onfa(&afa, limits)?;
    let (universal, missing) = onfa_universal(&onfa, limits.subsets)?;
    let witness = match &missing {
        None => None,
        Some(x) => match always_halts_on(m, x, limits.nodes)? {
            (false, Some(lasso)) => Some(lasso),
            _ => return Err(HaltingError::Inconsistent { word: m.alphabet().render_word(x) }),
        },
    };
    Ok(HeadAnalysis {
        head: 1,
        safe: universal,
        counterexample: missing,
        witness,
        onfa_states: Some(onfa.state_count()),
    })
}

pub fn analyze_head(m: &MultiHeadNfa, i: usize, limits: &Limits) -> Result<HeadAnalysis, HaltingError> {
    let projected = project_head(m, i)?;
    Ok(HeadAnalysis {
        head: i,
        ..analyze_one_head(&projected, limits)?
    })
}

pub fn head_is_safe(m: &MultiHeadNfa, i: usize, limits: &Limits) -> Result<bool, HaltingError> {
    Ok(analyze_head(m, i, limits)?.safe)
}

/// Heads of `m` classified by the pipeline, in head order.
pub fn analyze_machine(m: &MultiHeadNfa, limits: &Limits) -> Result<Vec<HeadAnalysis>, HaltingError> {
    (1..=m.heads()).map(|i| analyze_head(m, i, limits)).collect()
}

/// An input together with a reachable configuration cycle on it.
pub type LoopWitness = (Vec<Symbol>, Lasso<Configuration>);

/// First input of length at most `max_len`, in length-lexicographic order,
/// on which `m` has a reachable configuration cycle.
pub fn find_loop_witness(
    m: &MultiHeadNfa,
    max_len: usize,
    node_budget: usize,
) -> Result<Option<LoopWitness>, HaltingError> {
    for x in m.alphabet().words_up_to(max_len) {
        if let (false, Some(lasso)) = always_halts_on(m, &x, node_budget)? {
            return Ok(Some((x, lasso)));
        }
    }
    Ok(None)
}

/// Bounded classification: a head is reported safe when no loop witness
/// exists up to `max_len`. A risky verdict is certain, a safe one is not.
pub fn analyze_head_bounded(
    m: &MultiHeadNfa,
    i: usize,
    max_len: usize,
    node_budget: usize,
) -> Result<HeadAnalysis, HaltingError> {
    let projected = project_head(m, i)?;
    let found = find_loop_witness(&projected, max_len, node_budget)?;
    Ok(HeadAnalysis {
        head: i,
        safe: found.is_none(),
        counterexample: found.as_ref().map(|f| f.0.clone()),
        witness: found.map(|f| f.1),
        onfa_states: None,
    })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::automata::{afa_accepts, is_valid_lasso, AfaTransition, TapeAlphabet};
    use crate::testing::{arb_machine, machine, word, ANBN, ANBN_HEAD1, ANBN_HEAD2, INSTANT, SPIN};
    use crate::transforms::add_timer_head;

    fn lim() -> Limits {
        Limits::default()
    }

    fn binary() -> TapeAlphabet {
        TapeAlphabet::new(["0", "1"]).unwrap()
    }

    #[test]
    fn accept_everything_afa() {
        let a = TwoWayAfa::new(binary(), vec!["q".into()], vec![false], vec![true], StateId(0), vec![]).unwrap();
        let n = afa_to_onfa(&a, &lim()).unwrap();
        assert_eq!(onfa_universal(&n, 1 << 20).unwrap(), (true, None));
    }

    #[test]
    fn wrapped_head1_rejects_leading_zero() {
        let m1 = machine(ANBN_HEAD1);
        let n = afa_to_onfa(&halting_wrapper(&m1).unwrap(), &lim()).unwrap();
        for x in m1.alphabet().words_up_to(6) {
            assert_eq!(n.accepts(&x), x.first() != Some(&Symbol::from_input_index(0)));
        }
        assert_eq!(onfa_universal(&n, 1 << 20).unwrap(), (false, Some(word(&m1, "0"))));
    }

    #[test]
    fn universality_examples() {
        let a = binary();
        let everything = OneWayNfa::new(a.clone(), vec![0], vec![true], vec![vec![vec![0], vec![0]]]).unwrap();
        assert_eq!(onfa_universal(&everything, 10).unwrap(), (true, None));
        // not starting with 0
        let n = OneWayNfa::new(a, vec![0], vec![true, false, true], vec![vec![vec![1], vec![2]], vec![vec![1], vec![1]], vec![vec![2], vec![2]]]).unwrap();
        assert_eq!(onfa_universal(&n, 10).unwrap(), (false, Some(vec![Symbol::from_input_index(0)])));
        assert_eq!(onfa_universal(&n, 1).unwrap_err(), HaltingError::SubsetBudget { limit: 1 });
    }

    #[test]
    fn anbn_heads() {
        let m = machine(ANBN);
        let h1 = analyze_head(&m, 1, &lim()).unwrap();
        assert!(!h1.safe);
        assert_eq!(h1.counterexample, Some(word(&m, "0")));
        let m1 = machine(ANBN_HEAD1);
        assert!(is_valid_lasso(&m1, &word(&m, "0"), h1.witness.as_ref().unwrap()));
        assert!(head_is_safe(&m, 2, &lim()).unwrap());
        let n2 = afa_to_onfa(&halting_wrapper(&machine(ANBN_HEAD2)).unwrap(), &lim()).unwrap();
        assert_eq!(onfa_universal(&n2, 1 << 20).unwrap(), (true, None));
    }

    #[test]
    fn timer_head_is_safe() {
        let t = add_timer_head(&machine(ANBN), 2).unwrap();
        assert!(head_is_safe(&t, 3, &lim()).unwrap());
        assert!(!head_is_safe(&t, 1, &lim()).unwrap());
    }

    #[test]
    fn loop_witness_examples() {
        let m1 = machine(ANBN_HEAD1);
        let (x, lasso) = find_loop_witness(&m1, 3, DEFAULT_NODE_BUDGET).unwrap().unwrap();
        assert_eq!(x, word(&m1, "0"));
        assert_eq!(lasso.cycle[0].state, m1.state_id("q1").unwrap());
        assert_eq!(find_loop_witness(&machine(ANBN_HEAD2), 6, DEFAULT_NODE_BUDGET).unwrap(), None);
        let (x, lasso) = find_loop_witness(&machine(SPIN), 0, DEFAULT_NODE_BUDGET).unwrap().unwrap();
        assert!(x.is_empty());
        assert!(lasso.prefix.is_empty());
        assert_eq!(find_loop_witness(&machine(INSTANT), 5, DEFAULT_NODE_BUDGET).unwrap(), None);
    }

    #[test]
    fn bounded_method_agrees_on_anbn() {
        let m = machine(ANBN);
        assert!(!analyze_head_bounded(&m, 1, 4, DEFAULT_NODE_BUDGET).unwrap().safe);
        assert!(analyze_head_bounded(&m, 2, 4, DEFAULT_NODE_BUDGET).unwrap().safe);
    }

    #[test]
    fn state_cap_is_enforced() {
        let m = machine(ANBN_HEAD1);
        let tight = Limits { afa_states: 2, ..lim() };
        assert_eq!(
            afa_to_onfa(&halting_wrapper(&m).unwrap(), &tight).unwrap_err(),
            HaltingError::TooManyAfaStates { found: 3, limit: 2 }
        );
        let tiny = Limits { onfa_states: 1, ..lim() };
        assert_eq!(analyze_one_head(&m, &tiny).unwrap_err(), HaltingError::OnfaBudget { limit: 1 });
    }

    fn arb_afa() -> impl Strategy<Value = TwoWayAfa> {
        let trans = (0usize..3, 0u16..4, 0usize..4, 0usize..3);
        (
            proptest::collection::vec(any::<bool>(), 3),
            0usize..3,
            proptest::collection::vec(trans, 0..10),
        )
            .prop_map(|(universal, initial, ts)| {
                let mut universal = universal;
                universal.push(false);
                let transitions = ts
                    .into_iter()
                    .map(|(from, read, to, mv)| AfaTransition {
                        from: StateId(from as u32),
                        read: Symbol(read),
                        to: StateId(to as u32),
                        mv: HeadMove::ALL[mv],
                    })
                    .collect();
                TwoWayAfa::new(
                    binary(),
                    vec!["a".into(), "b".into(), "c".into(), "win".into()],
                    universal,
                    vec![false, false, false, true],
                    StateId(initial as u32),
                    transitions,
                )
                .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn onfa_matches_afa(a in arb_afa()) {
            let n = afa_to_onfa(&a, &lim()).unwrap();
            for x in a.alphabet().words_up_to(6) {
                prop_assert_eq!(n.accepts(&x), afa_accepts(&a, &x));
            }
        }

        #[test]
        fn universality_matches_materialized_dfa(a in arb_afa()) {
            let n = afa_to_onfa(&a, &lim()).unwrap();
            let (universal, missing) = onfa_universal(&n, 1 << 20).unwrap();
            let dfa = n.determinize(1 << 20).unwrap();
            prop_assert_eq!(&missing, &dfa.missing_word());
            prop_assert_eq!(universal, missing.is_none());
            if let Some(x) = missing {
                prop_assert!(!n.accepts(&x));
            }
        }

        #[test]
        fn pipeline_never_contradicts_loop_search(m in arb_machine(1, 3, 10)) {
            let h = analyze_one_head(&m, &lim()).unwrap();
            let found = find_loop_witness(&m, 5, DEFAULT_NODE_BUDGET).unwrap();
            if found.is_some() {
                prop_assert!(!h.safe);
            }
            if !h.safe {
                let x = h.counterexample.as_ref().unwrap();
                prop_assert!(is_valid_lasso(&m, x, h.witness.as_ref().unwrap()));
                if x.len() <= 5 {
                    let first = found.map(|f| f.0);
                    prop_assert_eq!(first.as_ref(), Some(x));
                }
            }
        }
    }
}
