use std::collections::HashMap;
use std::fmt;

use super::alphabet::{Symbol, Tape};
use super::machine::{MultiHeadNfa, StateId, TransitionId};
use super::AutomataError;

/// Default cap on explored configurations.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

/// A state plus k head positions, 0 being the left marker and n+1 the right.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: StateId,
    pub positions: Vec<u32>,
}

impl Configuration {
    pub fn initial(m: &MultiHeadNfa) -> Self {
        Configuration {
            state: m.initial(),
            positions: vec![0; m.heads()],
        }
    }

    pub fn render(&self, m: &MultiHeadNfa) -> String {
        let pos: Vec<String> = self.positions.iter().map(u32::to_string).collect();
        format!("({}, ({}))", m.state_name(self.state), pos.join(","))
    }
}

/// A reachable cycle: `prefix` leads from the initial configuration to the
/// first configuration of `cycle`, and the last element of `cycle` steps back
/// to its first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lasso<T> {
    pub prefix: Vec<T>,
    pub cycle: Vec<T>,
}

/// One step of a computational path: the configuration before the step and
/// the transition taken from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub from: Configuration,
    pub transition: TransitionId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member,
    Nonmember,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Member => "member",
            Verdict::Nonmember => "nonmember",
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub verdict: Verdict,
    /// Shortest accepting path, present iff the verdict is `Member`.
    pub accepting_path: Option<Vec<PathStep>>,
    /// Configuration reached by the accepting path.
    pub accepting_config: Option<Configuration>,
    pub always_halts: bool,
    /// Present iff `always_halts` is false.
    pub loop_witness: Option<Lasso<Configuration>>,
    pub explored: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunLength {
    Finite(u64),
    Infinite,
}

impl fmt::Display for RunLength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunLength::Finite(n) => write!(f, "{n}"),
            RunLength::Infinite => f.write_str("infinite"),
        }
    }
}

/// Successors of `c` on `word`, one per element of δ(state, scanned), in
/// transition order. Accept and reject configurations have none.
pub fn successors(m: &MultiHeadNfa, word: &[Symbol], c: &Configuration) -> Vec<(Configuration, TransitionId)> {
    let tape = Tape::new(word);
    let mut out = Vec::new();
    successors_into(m, &tape, c, &mut out);
    out
}

fn successors_into(m: &MultiHeadNfa, tape: &Tape<'_>, c: &Configuration, out: &mut Vec<(Configuration, TransitionId)>) {
    out.clear();
    if m.is_halting_state(c.state) {
        return;
    }
    let read = m.scan(tape, &c.positions);
    let last = tape.last();
    for &id in m.applicable(c.state, &read) {
        let t = m.transition(id);
        let positions = c
            .positions
            .iter()
            .zip(&t.moves)
            .map(|(&p, mv)| mv.apply(p, last))
            .collect();
        out.push((Configuration { state: t.to, positions }, id));
    }
}

/// The configuration graph reachable from the initial configuration,
/// numbered in breadth-first discovery order.
#[derive(Debug)]
pub struct ConfigGraph {
    pub nodes: Vec<Configuration>,
    /// Outgoing edges (target node, transition) in transition order.
    pub edges: Vec<Vec<(usize, TransitionId)>>,
    /// BFS tree: the first edge that discovered each node.
    pub parent: Vec<Option<(usize, TransitionId)>>,
}

impl ConfigGraph {
    pub fn explore(m: &MultiHeadNfa, word: &[Symbol], budget: usize) -> Result<Self, AutomataError> {
        let tape = Tape::new(word);
        let start = Configuration::initial(m);
        let mut ids: HashMap<Configuration, usize> = HashMap::new();
        let mut nodes = vec![start.clone()];
        let mut parent = vec![None];
        let mut edges = Vec::new();
        ids.insert(start, 0);
        let mut buf = Vec::new();
        let mut next = 0;
        while next < nodes.len() {
            successors_into(m, &tape, &nodes[next], &mut buf);
            let mut out = Vec::with_capacity(buf.len());
            for (c, t) in buf.drain(..) {
                let id = match ids.get(&c) {
                    Some(&id) => id,
                    None => {
                        if nodes.len() >= budget {
                            return Err(AutomataError::BudgetExceeded { limit: budget });
                        }
                        let id = nodes.len();
                        ids.insert(c.clone(), id);
                        nodes.push(c);
                        parent.push(Some((next, t)));
                        id
                    }
                };
                out.push((id, t));
            }
            edges.push(out);
            next += 1;
        }
        Ok(ConfigGraph { nodes, edges, parent })
    }

    /// Path of (configuration, transition) steps from the root to `node`
    /// along the BFS tree.
    pub fn tree_path(&self, node: usize) -> Vec<PathStep> {
        let mut steps = Vec::new();
        let mut cur = node;
        while let Some((p, t)) = self.parent[cur] {
            steps.push(PathStep {
                from: self.nodes[p].clone(),
                transition: t,
            });
            cur = p;
        }
        steps.reverse();
        steps
    }

    /// Some reachable cycle, found by depth-first search in edge order.
    pub fn find_cycle(&self) -> Option<Lasso<usize>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            White,
            Grey,
            Black,
        }
        let mut mark = vec![Mark::White; self.nodes.len()];
        // (node, next edge index)
        let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
        mark[0] = Mark::Grey;
        while let Some(&mut (v, ref mut ei)) = stack.last_mut() {
            if let Some(&(w, _)) = self.edges[v].get(*ei) {
                *ei += 1;
                match mark[w] {
                    Mark::White => {
                        mark[w] = Mark::Grey;
                        stack.push((w, 0));
                    }
                    Mark::Grey => {
                        let path: Vec<usize> = stack.iter().map(|&(n, _)| n).collect();
                        let at = path.iter().position(|&n| n == w).unwrap();
                        return Some(Lasso {
                            prefix: path[..at].to_vec(),
                            cycle: path[at..].to_vec(),
                        });
                    }
                    Mark::Black => {}
                }
            } else {
                mark[v] = Mark::Black;
                stack.pop();
            }
        }
        None
    }

    /// Length of the longest path from the root, or `Infinite` when a cycle
    /// is reachable.
    pub fn longest_path(&self) -> RunLength {
        if self.find_cycle().is_some() {
            return RunLength::Infinite;
        }
        // nodes in reverse topological order via iterative DFS postorder
        let n = self.nodes.len();
        let mut longest = vec![0u64; n];
        let mut done = vec![false; n];
        let mut stack = vec![(0usize, 0usize)];
        while let Some(&mut (v, ref mut ei)) = stack.last_mut() {
            if let Some(&(w, _)) = self.edges[v].get(*ei) {
                *ei += 1;
                if !done[w] {
                    stack.push((w, 0));
                }
            } else {
                longest[v] = self.edges[v].iter().map(|&(w, _)| longest[w] + 1).max().unwrap_or(0);
                done[v] = true;
                stack.pop();
            }
        }
        RunLength::Finite(longest[0])
    }
}

/// Decides membership by reachability of an accept configuration, and
/// reports whether every computational path halts.
pub fn accepts(m: &MultiHeadNfa, word: &[Symbol], budget: usize) -> Result<RunResult, AutomataError> {
    let g = ConfigGraph::explore(m, word, budget)?;
    let hit = g.nodes.iter().position(|c| c.state == m.accept());
    let cycle = g.find_cycle();
    Ok(RunResult {
        verdict: if hit.is_some() { Verdict::Member } else { Verdict::Nonmember },
        accepting_path: hit.map(|h| g.tree_path(h)),
        accepting_config: hit.map(|h| g.nodes[h].clone()),
        always_halts: cycle.is_none(),
        loop_witness: cycle.map(|l| lasso_configs(&g, l)),
        explored: g.nodes.len(),
    })
}

fn lasso_configs(g: &ConfigGraph, l: Lasso<usize>) -> Lasso<Configuration> {
    Lasso {
        prefix: l.prefix.into_iter().map(|i| g.nodes[i].clone()).collect(),
        cycle: l.cycle.into_iter().map(|i| g.nodes[i].clone()).collect(),
    }
}

pub fn always_halts_on(
    m: &MultiHeadNfa,
    word: &[Symbol],
    budget: usize,
) -> Result<(bool, Option<Lasso<Configuration>>), AutomataError> {
    let g = ConfigGraph::explore(m, word, budget)?;
    let witness = g.find_cycle().map(|l| lasso_configs(&g, l));
    Ok((witness.is_none(), witness))
}

pub fn max_run_steps(m: &MultiHeadNfa, word: &[Symbol], budget: usize) -> Result<RunLength, AutomataError> {
    Ok(ConfigGraph::explore(m, word, budget)?.longest_path())
}

/// Checks that `lasso` is a genuine reachable cycle of `m` on `word`.
pub fn is_valid_lasso(m: &MultiHeadNfa, word: &[Symbol], lasso: &Lasso<Configuration>) -> bool {
    if lasso.cycle.is_empty() {
        return false;
    }
    let seq: Vec<&Configuration> = lasso.prefix.iter().chain(&lasso.cycle).chain([&lasso.cycle[0]]).collect();
    if *seq[0] != Configuration::initial(m) {
        return false;
    }
    seq.windows(2)
        .all(|w| successors(m, word, w[0]).iter().any(|(c, _)| c == w[1]))
}

/// Replays a sequence of transition choices from the initial configuration.
/// Returns the configurations visited, or `None` if some choice is not
/// applicable where it is taken.
pub fn replay(m: &MultiHeadNfa, word: &[Symbol], choices: &[TransitionId]) -> Option<Vec<Configuration>> {
    let mut cur = Configuration::initial(m);
    let mut out = vec![cur.clone()];
    for &id in choices {
        let next = successors(m, word, &cur).into_iter().find(|(_, t)| *t == id)?.0;
        out.push(next.clone());
        cur = next;
    }
    Some(out)
}
