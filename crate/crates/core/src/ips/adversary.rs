//! Optimal cheating certificates.
//!
//! Every round starts from the same configuration, so one round's options
//! can be read off a product graph whose nodes are (state, head positions,
//! set of heads not yet caught). A path to accept passes with the mass of
//! the heads still alive there; a cycle loops with the mass alive on it
//! (the alive set cannot shrink along a cycle). The best strategy either
//! repeats the best passing round C times, or loops in the first round.

use std::collections::{HashMap, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::cert::repeat_rounds;
use super::verifier::selection_bits;
use super::{
    gb_distribution, outcome_distribution, Certificate, Dyadic, HeadClassification, IpsError, Mode, OutcomeDistribution,
    Record, VerifierSpec,
};
use crate::automata::{accepts, StateId, Symbol, Tape, TransitionId, Verdict};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Node {
    state: StateId,
    positions: Vec<u32>,
    alive: u64,
}

struct ProductGraph {
    nodes: Vec<Node>,
    edges: Vec<Vec<(usize, TransitionId)>>,
    parent: Vec<Option<(usize, TransitionId)>>,
}

impl ProductGraph {
    fn explore(v: &VerifierSpec, x: &[Symbol], budget: usize) -> Result<Self, IpsError> {
        let m = &v.machine;
        let tape = Tape::new(x);
        let k = v.k();
        let start = Node {
            state: m.initial(),
            positions: vec![0; k],
            alive: if k == 64 { u64::MAX } else { (1u64 << k) - 1 },
        };
        let mut ids = HashMap::from([(start.clone(), 0usize)]);
        let mut g = ProductGraph {
            nodes: vec![start],
            edges: Vec::new(),
            parent: vec![None],
        };
        let mut next = 0;
        while next < g.nodes.len() {
            let node = g.nodes[next].clone();
            let mut out = Vec::new();
            if node.state != m.accept() {
                for &id in m.from_state(node.state) {
                    let t = m.transition(id);
                    if t.to == m.reject() {
                        continue;
                    }
                    let mut alive = node.alive;
                    // dead heads keep position 0
                    let mut positions = vec![0; k];
                    for (h, pos) in positions.iter_mut().enumerate() {
                        if alive >> h & 1 == 0 {
                            continue;
                        }
                        if t.read[h] != tape.at(node.positions[h]) {
                            alive &= !(1 << h);
                        } else {
                            *pos = t.moves[h].apply(node.positions[h], tape.last());
                        }
                    }
                    if alive == 0 {
                        continue;
                    }
                    let succ = Node { state: t.to, positions, alive };
                    let target = match ids.get(&succ) {
                        Some(&i) => i,
                        None => {
                            if g.nodes.len() >= budget {
                                return Err(IpsError::Budget { limit: budget });
                            }
                            ids.insert(succ.clone(), g.nodes.len());
                            g.nodes.push(succ);
                            g.parent.push(Some((next, id)));
                            g.nodes.len() - 1
                        }
                    };
                    out.push((target, id));
                }
            }
            g.edges.push(out);
            next += 1;
        }
        Ok(g)
    }

    /// Component id of each node (Kosaraju, iterative) and whether that
    /// component contains a cycle.
    fn cyclic_components(&self) -> (Vec<usize>, Vec<bool>) {
        let n = self.nodes.len();
        let mut order = Vec::with_capacity(n);
        let mut visited = vec![false; n];
        for root in 0..n {
            if visited[root] {
                continue;
            }
            visited[root] = true;
            let mut stack = vec![(root, 0usize)];
            while let Some(&mut (v, ref mut i)) = stack.last_mut() {
                if let Some(&(w, _)) = self.edges[v].get(*i) {
                    *i += 1;
                    if !visited[w] {
                        visited[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut reverse = vec![Vec::new(); n];
        for (v, out) in self.edges.iter().enumerate() {
            for &(w, _) in out {
                reverse[w].push(v);
            }
        }
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        for &root in order.iter().rev() {
            if comp[root] != usize::MAX {
                continue;
            }
            comp[root] = count;
            let mut stack = vec![root];
            while let Some(v) = stack.pop() {
                for &w in &reverse[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        let mut size = vec![0usize; count];
        for &c in &comp {
            size[c] += 1;
        }
        let mut cyclic: Vec<bool> = size.iter().map(|&s| s > 1).collect();
        for (v, out) in self.edges.iter().enumerate() {
            if out.iter().any(|&(w, _)| w == v) {
                cyclic[comp[v]] = true;
            }
        }
        (comp, cyclic)
    }

    fn record(&self, v: &VerifierSpec, id: TransitionId) -> Record {
        let t = v.machine.transition(id);
        Record {
            read: t.read.clone(),
            to: t.to,
            moves: t.moves.clone(),
        }
    }

    fn tree_records(&self, v: &VerifierSpec, node: usize) -> Vec<Record> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some((p, id)) = self.parent[cur] {
            out.push(self.record(v, id));
            cur = p;
        }
        out.reverse();
        out
    }

    /// Shortest cycle through `node` inside its component.
    fn cycle_records(&self, v: &VerifierSpec, node: usize, comp: &[usize]) -> Vec<Record> {
        let mut back: HashMap<usize, (usize, TransitionId)> = HashMap::new();
        let mut queue = VecDeque::from([node]);
        'search: while let Some(a) = queue.pop_front() {
            for &(b, id) in &self.edges[a] {
                if comp[b] != comp[node] || back.contains_key(&b) {
                    continue;
                }
                back.insert(b, (a, id));
                if b == node {
                    break 'search;
                }
                queue.push_back(b);
            }
        }
        let mut out = Vec::new();
        let mut cur = node;
        loop {
            let (p, id) = back[&cur];
            out.push(self.record(v, id));
            cur = p;
            if cur == node {
                break;
            }
        }
        out.reverse();
        out
    }
}

/// The best certificate against `v` on `x` and what it achieves.
#[derive(Clone, Debug)]
pub struct Adversary {
    pub certificate: Certificate,
    pub distribution: OutcomeDistribution,
    /// Best pass mass of a single round.
    pub pass_mass: BigRational,
    /// Best loop mass of a single round.
    pub loop_mass: BigRational,
    /// Whether the optimum loops rather than passing every round.
    pub looping: bool,
    pub product_nodes: usize,
}

impl Adversary {
    /// Largest acceptance probability any certificate reaches.
    pub fn weak(&self, v: &VerifierSpec) -> BigRational {
        (BigRational::one() - v.upfront_reject()) * pow(&self.pass_mass, v.rounds)
    }

    pub fn strong(&self) -> BigRational {
        self.distribution.strong()
    }
}

fn pow(r: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * r)
}

/// Maximizes P(accept) + P(loop) over all certificates. On a tie between
/// passing every round and looping, the looping certificate is returned.
pub fn best_adversarial_certificate(v: &VerifierSpec, x: &[Symbol], budget: usize) -> Result<Adversary, IpsError> {
    let g = ProductGraph::explore(v, x, budget)?;
    let dist = v.head_distribution();
    let mass = |alive: u64| -> BigRational { (0..v.k()).filter(|h| alive >> h & 1 == 1).map(|h| dist[h].clone()).sum() };

    let mut best_pass: Option<(BigRational, usize)> = None;
    for (i, node) in g.nodes.iter().enumerate() {
        if node.state == v.machine.accept() {
            let m = mass(node.alive);
            if best_pass.as_ref().is_none_or(|(b, _)| m > *b) {
                best_pass = Some((m, i));
            }
        }
    }
    let (comp, cyclic) = g.cyclic_components();
    let mut best_loop: Option<(BigRational, usize)> = None;
    for (i, node) in g.nodes.iter().enumerate() {
        if cyclic[comp[i]] {
            let m = mass(node.alive);
            if best_loop.as_ref().is_none_or(|(b, _)| m > *b) {
                best_loop = Some((m, i));
            }
        }
    }

    let pass_mass = best_pass.as_ref().map_or_else(BigRational::zero, |b| b.0.clone());
    let loop_mass = best_loop.as_ref().map_or_else(BigRational::zero, |b| b.0.clone());
    let looping = !loop_mass.is_zero() && loop_mass >= pow(&pass_mass, v.rounds);
    let certificate = if looping {
        let node = best_loop.unwrap().1;
        Certificate {
            prefix: g.tree_records(v, node),
            cycle: g.cycle_records(v, node, &comp),
        }
        .normalized()
    } else if let Some((_, node)) = best_pass.filter(|b| !b.0.is_zero()) {
        Certificate {
            prefix: repeat_rounds(&g.tree_records(v, node), v.rounds),
            cycle: Vec::new(),
        }
    } else {
        Certificate::default()
    };
    let distribution = outcome_distribution(v, x, &certificate);
    Ok(Adversary {
        certificate,
        distribution,
        pass_mass,
        loop_mass,
        looping,
        product_nodes: g.nodes.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErrorRow {
    pub input: Vec<Symbol>,
    pub weak: BigRational,
    pub strong: BigRational,
    pub looping: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongErrorReport {
    /// One row per nonmember, in length-lexicographic order.
    pub rows: Vec<ErrorRow>,
    pub weak: BigRational,
    pub strong: BigRational,
    /// First nonmember attaining `strong`.
    pub worst: Option<Vec<Symbol>>,
    /// (1-p)^C, scaled by the SYS survival probability.
    pub weak_bound: BigRational,
    /// max((1-p)^C, w) for GB; (1-p) scaled by SYS survival otherwise.
    pub strong_bound: BigRational,
}

impl StrongErrorReport {
    pub fn within_bounds(&self) -> bool {
        self.weak <= self.weak_bound && self.strong <= self.strong_bound
    }
}

/// Worst weak and strong error of `v` over nonmembers of length ≤ `max_len`.
pub fn strong_error(v: &VerifierSpec, max_len: usize, budget: usize) -> Result<StrongErrorReport, IpsError> {
    let mut rows = Vec::new();
    for x in v.machine.alphabet().words_up_to(max_len) {
        if accepts(&v.machine, &x, budget)?.verdict == Verdict::Member {
            continue;
        }
        let a = best_adversarial_certificate(v, &x, budget)?;
        rows.push(ErrorRow {
            weak: a.weak(v),
            strong: a.strong(),
            looping: a.looping,
            input: x,
        });
    }
    let zero = BigRational::zero();
    let weak = rows.iter().map(|r| &r.weak).max().unwrap_or(&zero).clone();
    let strong = rows.iter().map(|r| &r.strong).max().unwrap_or(&zero).clone();
    let worst = rows.iter().find(|r| r.strong == strong).map(|r| r.input.clone());
    let survive = BigRational::one() - v.upfront_reject();
    let miss = BigRational::one() - v.detection_floor();
    let weak_bound = &survive * pow(&miss, v.rounds);
    let strong_bound = match v.mode {
        Mode::Gb => weak_bound.clone().max(v.w.to_ratio()),
        Mode::Syw | Mode::Sys => &survive * &miss,
    };
    Ok(StrongErrorReport {
        rows,
        weak,
        strong,
        worst,
        weak_bound,
        strong_bound,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Parameters {
    pub rounds: usize,
    pub w: Dyadic,
}

/// GB parameters reaching strong error at most `target`: w = target (or 0
/// with no risky heads) and the least C with (1-p)^C ≤ target.
pub fn choose_parameters(class: &HeadClassification, target: Dyadic) -> Result<Parameters, IpsError> {
    let eps = target.to_ratio();
    if target.is_zero() || eps >= BigRational::new(BigInt::one(), BigInt::from(2)) {
        return Err(IpsError::TargetOutOfRange);
    }
    if class.safe().is_empty() {
        return Err(IpsError::NoSafeHeads);
    }
    let w = if class.risky().is_empty() { Dyadic::ZERO } else { target };
    debug_assert!(selection_bits(class.heads()) < 63);
    let p = gb_distribution(class, w).into_iter().min().unwrap();
    let miss = BigRational::one() - p;
    let mut rounds = 1;
    let mut err = miss.clone();
    while err > eps {
        err *= &miss;
        rounds += 1;
    }
    Ok(Parameters { rounds, w })
}
