use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};

use super::alphabet::{HeadMove, Symbol, Tape, TapeAlphabet};
use super::MachineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of a transition in source order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: StateId,
    pub read: Vec<Symbol>,
    pub to: StateId,
    pub moves: Vec<HeadMove>,
}

/// A k-head two-way nondeterministic finite automaton.
///
/// Transitions keep their source order; [`MultiHeadNfa::canonical`] sorts
/// them. Transitions out of the accept or reject state are refused.
#[derive(Clone, Debug)]
pub struct MultiHeadNfa {
    name: String,
    heads: usize,
    alphabet: TapeAlphabet,
    states: Vec<String>,
    initial: StateId,
    accept: StateId,
    reject: StateId,
    transitions: Vec<Transition>,
    index: HashMap<(StateId, u128), Vec<TransitionId>>,
    by_state: Vec<Vec<TransitionId>>,
}

impl PartialEq for MultiHeadNfa {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.same_automaton(other) && self.transitions == other.transitions
    }
}

impl Eq for MultiHeadNfa {}

impl MultiHeadNfa {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        heads: usize,
        alphabet: TapeAlphabet,
        states: Vec<String>,
        initial: StateId,
        accept: StateId,
        reject: StateId,
        transitions: Vec<Transition>,
    ) -> Result<Self, MachineError> {
        if heads == 0 {
            return Err(MachineError::NoHeads);
        }
        let mut seen = HashSet::new();
        for s in &states {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(MachineError::BadToken(s.clone()));
            }
            if !seen.insert(s.as_str()) {
                return Err(MachineError::DuplicateState(s.clone()));
            }
        }
        let n_states = states.len() as u32;
        for id in [initial, accept, reject] {
            if id.0 >= n_states {
                return Err(MachineError::UndeclaredState(format!("#{}", id.0)));
            }
        }
        if accept == reject {
            return Err(MachineError::AcceptIsReject);
        }
        let mut kept = Vec::with_capacity(transitions.len());
        let mut dedup = HashSet::new();
        for t in transitions {
            if t.read.len() != heads || t.moves.len() != heads {
                return Err(MachineError::Arity {
                    expected: heads,
                    found: t.read.len().max(t.moves.len()),
                });
            }
            if t.from.0 >= n_states || t.to.0 >= n_states {
                return Err(MachineError::UndeclaredState(format!("#{}", t.from.0.max(t.to.0))));
            }
            if let Some(bad) = t.read.iter().find(|s| s.0 as usize >= alphabet.tape_len()) {
                return Err(MachineError::UnknownSymbol(format!("#{}", bad.0)));
            }
            if t.from == accept || t.from == reject {
                return Err(MachineError::TransitionFromHalting(states[t.from.index()].clone()));
            }
            if dedup.insert(t.clone()) {
                kept.push(t);
            }
        }
        let mut m = MultiHeadNfa {
            name: name.into(),
            heads,
            alphabet,
            states,
            initial,
            accept,
            reject,
            transitions: kept,
            index: HashMap::new(),
            by_state: Vec::new(),
        };
        m.reindex();
        Ok(m)
    }

    fn read_key(&self, read: &[Symbol]) -> u128 {
        let base = self.alphabet.tape_len() as u128;
        read.iter().fold(0u128, |acc, s| acc.wrapping_mul(base).wrapping_add(s.0 as u128))
    }

    fn reindex(&mut self) {
        self.index.clear();
        self.by_state = vec![Vec::new(); self.states.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            let key = self.read_key(&t.read);
            self.index
                .entry((t.from, key))
                .or_default()
                .push(TransitionId(i));
            self.by_state[t.from.index()].push(TransitionId(i));
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn heads(&self) -> usize {
        self.heads
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

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u32))
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn accept(&self) -> StateId {
        self.accept
    }

    pub fn reject(&self) -> StateId {
        self.reject
    }

    pub fn is_halting_state(&self, q: StateId) -> bool {
        q == self.accept || q == self.reject
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.0]
    }

    /// Transitions applicable in state `q` scanning `read`, in source order.
    pub fn applicable(&self, q: StateId, read: &[Symbol]) -> &[TransitionId] {
        match self.index.get(&(q, self.read_key(read))) {
            Some(v) => v,
            None => &[],
        }
    }

    /// All transitions leaving `q`, in source order.
    pub fn from_state(&self, q: StateId) -> &[TransitionId] {
        &self.by_state[q.index()]
    }

    /// True when `(to, moves)` is offered by δ in state `q` scanning `read`.
    pub fn offers(&self, q: StateId, read: &[Symbol], to: StateId, moves: &[HeadMove]) -> bool {
        self.applicable(q, read).iter().any(|&id| {
            let t = self.transition(id);
            t.to == to && t.moves == moves
        })
    }

    /// Reads the k scanned symbols at `positions`.
    pub fn scan(&self, tape: &Tape<'_>, positions: &[u32]) -> Vec<Symbol> {
        positions.iter().map(|&p| tape.at(p)).collect()
    }

    /// Copy with transitions sorted by (source, read, target, moves).
    pub fn canonical(&self) -> MultiHeadNfa {
        let mut m = self.clone();
        m.transitions.sort();
        m.reindex();
        m
    }

    /// Equality of everything except the name and transition order.
    pub fn same_automaton(&self, other: &MultiHeadNfa) -> bool {
        let mine: HashSet<&Transition> = self.transitions.iter().collect();
        let theirs: HashSet<&Transition> = other.transitions.iter().collect();
        self.heads == other.heads
            && self.alphabet == other.alphabet
            && self.states == other.states
            && self.initial == other.initial
            && self.accept == other.accept
            && self.reject == other.reject
            && mine == theirs
    }

    /// Serializes to the `.mhfa` text format, transitions in stored order.
    pub fn to_mhfa(&self) -> String {
        let mut out = String::new();
        writeln!(out, "automaton {}", self.name).unwrap();
        writeln!(out, "heads {}", self.heads).unwrap();
        let mut alpha = String::from("alphabet");
        for s in self.alphabet.input_tokens() {
            alpha.push(' ');
            alpha.push_str(s);
        }
        writeln!(out, "{alpha}").unwrap();
        writeln!(out, "states {}", self.states.join(" ")).unwrap();
        writeln!(out, "initial {}", self.state_name(self.initial)).unwrap();
        writeln!(out, "accept {}", self.state_name(self.accept)).unwrap();
        writeln!(out, "reject {}", self.state_name(self.reject)).unwrap();
        for t in &self.transitions {
            writeln!(out, "{}", self.render_transition(t)).unwrap();
        }
        out
    }

    pub fn render_transition(&self, t: &Transition) -> String {
        let read: Vec<&str> = t.read.iter().map(|&s| self.alphabet.token(s)).collect();
        let moves: Vec<&str> = t.moves.iter().map(|m| m.token()).collect();
        format!(
            "trans {} {} -> {} {}",
            self.state_name(t.from),
            read.join(" "),
            self.state_name(t.to),
            moves.join(" ")
        )
    }
}

impl fmt::Display for MultiHeadNfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_mhfa())
    }
}

/// Incremental construction by state name, used by the transformations.
#[derive(Debug)]
pub struct MachineBuilder {
    name: String,
    heads: usize,
    alphabet: TapeAlphabet,
    states: Vec<String>,
    ids: HashMap<String, StateId>,
    transitions: Vec<Transition>,
}

impl MachineBuilder {
    pub fn new(name: impl Into<String>, heads: usize, alphabet: TapeAlphabet) -> Self {
        MachineBuilder {
            name: name.into(),
            heads,
            alphabet,
            states: Vec::new(),
            ids: HashMap::new(),
            transitions: Vec::new(),
        }
    }

    /// Returns the id for `name`, declaring it on first use.
    pub fn state(&mut self, name: &str) -> StateId {
        if let Some(&id) = self.ids.get(name) {
            return id;
        }
        let id = StateId(self.states.len() as u32);
        self.states.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        id
    }

    /// Declares a state whose name is `base`, or `base'`, `base''`... when taken.
    pub fn fresh_state(&mut self, base: &str) -> StateId {
        let mut name = base.to_string();
        while self.ids.contains_key(&name) {
            name.push('\'');
        }
        self.state(&name)
    }

    pub fn transition(&mut self, from: StateId, read: Vec<Symbol>, to: StateId, moves: Vec<HeadMove>) {
        self.transitions.push(Transition { from, read, to, moves });
    }

    pub fn build(self, initial: StateId, accept: StateId, reject: StateId) -> Result<MultiHeadNfa, MachineError> {
        MultiHeadNfa::new(
            self.name,
            self.heads,
            self.alphabet,
            self.states,
            initial,
            accept,
            reject,
            self.transitions,
        )
    }
}

/// Every k-tuple over `symbols`, in lexicographic order.
pub fn symbol_tuples(symbols: &[Symbol], k: usize) -> Vec<Vec<Symbol>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                symbols.iter().map(move |&s| {
                    let mut v = prefix.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out
}
