use std::collections::{BTreeSet, HashMap, VecDeque};

use super::alphabet::{Symbol, TapeAlphabet};
use super::MachineError;

/// One-way NFA over the input symbols (no end markers), states numbered 0..n.
#[derive(Clone, Debug)]
pub struct OneWayNfa {
    alphabet: TapeAlphabet,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    /// `delta[state][input index]` = sorted target list.
    delta: Vec<Vec<Vec<usize>>>,
}

impl OneWayNfa {
    pub fn new(
        alphabet: TapeAlphabet,
        initial: Vec<usize>,
        accepting: Vec<bool>,
        delta: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self, MachineError> {
        let n = accepting.len();
        if delta.len() != n {
            return Err(MachineError::Arity { expected: n, found: delta.len() });
        }
        for row in &delta {
            if row.len() != alphabet.input_len() {
                return Err(MachineError::Arity {
                    expected: alphabet.input_len(),
                    found: row.len(),
                });
            }
            if let Some(&bad) = row.iter().flatten().find(|&&t| t >= n) {
                return Err(MachineError::UndeclaredState(format!("#{bad}")));
            }
        }
        if let Some(&bad) = initial.iter().find(|&&q| q >= n) {
            return Err(MachineError::UndeclaredState(format!("#{bad}")));
        }
        let mut initial = initial;
        initial.sort_unstable();
        initial.dedup();
        let delta = delta
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|mut ts| {
                        ts.sort_unstable();
                        ts.dedup();
                        ts
                    })
                    .collect()
            })
            .collect();
        Ok(OneWayNfa { alphabet, initial, accepting, delta })
    }

    pub fn alphabet(&self) -> &TapeAlphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn targets(&self, q: usize, s: Symbol) -> &[usize] {
        &self.delta[q][s.input_index().expect("input symbol")]
    }

    /// Image of a state set under one symbol.
    pub fn step_set(&self, set: &BTreeSet<usize>, s: Symbol) -> BTreeSet<usize> {
        set.iter().flat_map(|&q| self.targets(q, s).iter().copied()).collect()
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let mut cur: BTreeSet<usize> = self.initial.iter().copied().collect();
        for &s in word {
            cur = self.step_set(&cur, s);
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    /// Materialized subset construction, restricted to reachable subsets.
    pub fn determinize(&self, budget: usize) -> Result<OneWayDfa, MachineError> {
        let start: BTreeSet<usize> = self.initial.iter().copied().collect();
        let mut ids = HashMap::from([(start.clone(), 0usize)]);
        let mut sets = vec![start];
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let mut row = Vec::with_capacity(self.alphabet.input_len());
            for s in self.alphabet.input_symbols() {
                let next = self.step_set(&sets[i], s);
                let id = match ids.get(&next) {
                    Some(&id) => id,
                    None => {
                        if sets.len() >= budget {
                            return Err(MachineError::TooLarge { limit: budget });
                        }
                        let id = sets.len();
                        ids.insert(next.clone(), id);
                        sets.push(next);
                        queue.push_back(id);
                        id
                    }
                };
                row.push(id);
            }
            if delta.len() <= i {
                delta.resize(i + 1, Vec::new());
            }
            delta[i] = row;
        }
        let accepting = sets.iter().map(|set| set.iter().any(|&q| self.accepting[q])).collect();
        Ok(OneWayDfa {
            alphabet: self.alphabet.clone(),
            initial: 0,
            accepting,
            delta,
        })
    }
}

/// Total one-way DFA.
#[derive(Clone, Debug)]
pub struct OneWayDfa {
    alphabet: TapeAlphabet,
    initial: usize,
    accepting: Vec<bool>,
    delta: Vec<Vec<usize>>,
}

impl OneWayDfa {
    pub fn state_count(&self) -> usize {
        self.accepting.len()
    }

    pub fn accepts(&self, word: &[Symbol]) -> bool {
        let q = word
            .iter()
            .fold(self.initial, |q, s| self.delta[q][s.input_index().expect("input symbol")]);
        self.accepting[q]
    }

    /// Shortest, then least, rejected word; `None` when the language is Σ*.
    pub fn missing_word(&self) -> Option<Vec<Symbol>> {
        let mut parent: Vec<Option<(usize, Symbol)>> = vec![None; self.state_count()];
        let mut seen = vec![false; self.state_count()];
        seen[self.initial] = true;
        let mut queue = VecDeque::from([self.initial]);
        while let Some(q) = queue.pop_front() {
            if !self.accepting[q] {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, s)) = parent[cur] {
                    word.push(s);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for s in self.alphabet.input_symbols() {
                let r = self.delta[q][s.input_index().unwrap()];
                if !seen[r] {
                    seen[r] = true;
                    parent[r] = Some((q, s));
                    queue.push_back(r);
                }
            }
        }
        None
    }
}
