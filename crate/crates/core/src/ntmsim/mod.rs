//! Simulation of a linear-time multi-head automaton by a single work tape
//! with 2k+1 tracks, counting every move the simulator makes.
//!
//! Each simulated head has a binary counter holding its position and a
//! cache holding a window of W+2 input cells around it, with the head's
//! cell marked. Reading is a sweep over the caches. When a mark walks onto
//! a cache delimiter the window is refilled from the input, centred on the
//! head; finding the head on the input costs a countdown of its counter and
//! a count back up. Since a refill puts the mark in the middle, the next
//! refill of the same cache is at least W/2 simulated steps away.
//!
//! Nondeterminism is resolved by an explicit list of transition choices.

mod tape;

use std::fmt;

pub use tape::{CacheCell, TrackedTape};

use crate::automata::{
    accepts, always_halts_on, replay, successors, AutomataError, Configuration, HeadMove, MultiHeadNfa, Symbol, Tape,
    TransitionId, Verdict, DEFAULT_NODE_BUDGET,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("step {step}: transition {transition} does not apply")]
    InvalidPath { step: u64, transition: usize },
    #[error("step {step}: path exhausted with {options} applicable transitions")]
    PathExhausted { step: u64, options: usize },
    #[error("path has {extra} choices left after the run halted")]
    TrailingPath { extra: usize },
    #[error("simulation exceeds {limit} simulated steps")]
    StepBudget { limit: u64 },
    #[error("exhaustive mode needs |x| <= {limit}")]
    InputTooLong { limit: usize },
    #[error("exhaustive mode exceeds {limit} paths")]
    PathBudget { limit: usize },
    #[error("the machine does not halt on every path of this input")]
    NonHalting,
    #[error(transparent)]
    Automata(#[from] AutomataError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SimOutcome {
    Accept,
    Reject,
}

impl fmt::Display for SimOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimOutcome::Accept => "accept",
            SimOutcome::Reject => "reject",
        })
    }
}

/// Simulator moves by phase. One move is one step of the simulator, in
/// which the work head and the input head may each move one cell.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimStats {
    pub steps: u64,
    pub init: u64,
    pub read: u64,
    pub moves: u64,
    pub recache: u64,
    pub simulated_steps: u64,
    /// Simulated step index of each refill, per head.
    pub recache_at: Vec<Vec<u64>>,
    pub window: usize,
    pub counter_width: usize,
    pub cells_used: usize,
}

impl SimStats {
    pub fn recaches(&self) -> Vec<usize> {
        self.recache_at.iter().map(Vec::len).collect()
    }

    pub fn phase_total(&self) -> u64 {
        self.init + self.read + self.moves + self.recache
    }

    /// Fewest simulated steps between two refills of one cache.
    pub fn min_recache_spacing(&self) -> Option<u64> {
        self.recache_at.iter().flat_map(|r| r.windows(2).map(|w| w[1] - w[0])).min()
    }
}

#[derive(Clone, Copy)]
enum Phase {
    Init,
    Read,
    Move,
    Recache,
}

impl SimStats {
    fn charge(&mut self, phase: Phase, n: u64) {
        self.steps += n;
        match phase {
            Phase::Init => self.init += n,
            Phase::Read => self.read += n,
            Phase::Move => self.moves += n,
            Phase::Recache => self.recache += n,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SimOptions {
    pub trace: bool,
    pub max_steps: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            trace: false,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub outcome: SimOutcome,
    /// Transition taken at each simulated step.
    pub choices: Vec<TransitionId>,
    pub stats: SimStats,
    pub trace: Option<Vec<String>>,
    /// Failed runtime audits; empty on a faithful run.
    pub violations: Vec<String>,
    pub tape: TrackedTape,
}

/// W = max(4, ⌈log2(n+2)⌉), rounded up to even.
pub fn window_width(n: usize) -> usize {
    let log = (n + 2).next_power_of_two().trailing_zeros() as usize;
    let w = log.max(4);
    w + w % 2
}

/// Digits needed for values up to n+1.
fn counter_width(n: usize) -> usize {
    (usize::BITS - (n + 1).leading_zeros()) as usize
}

/// Space bound audited on every run: cells ≤ SPACE_FACTOR·max(W, ⌈log2(n+2)⌉) + SPACE_SLACK.
pub const SPACE_FACTOR: usize = 1;
pub const SPACE_SLACK: usize = 4;

struct Sim<'a> {
    m: &'a MultiHeadNfa,
    tape: Tape<'a>,
    n: usize,
    t: TrackedTape,
    stats: SimStats,
    /// Shadow state for audits: true head positions and window bases.
    positions: Vec<u32>,
    base: Vec<i64>,
    violations: Vec<String>,
}

impl Sim<'_> {
    fn symbol_at(&self, p: i64) -> CacheCell {
        if p < 0 || p > self.n as i64 + 1 {
            CacheCell::Blank
        } else {
            CacheCell::Input(self.tape.at(p as u32))
        }
    }

    fn init(&mut self) {
        let k = self.m.heads();
        let right = self.t.right_end();
        // measure n with counter 1, then clear it
        let mut cost = 0;
        for _ in 0..self.n {
            self.t.input += 1;
            cost += 1 + self.t.increment(0);
        }
        cost += self.t.input as u64;
        self.t.input = 0;
        let width = self.t.counters[0].len();
        cost += self.t.goto(width.saturating_sub(1)) + self.t.goto(0);
        self.t.counters[0].iter_mut().for_each(|b| *b = false);
        // all caches in one sweep: # then positions 0..=W+1 then #
        for i in 0..k {
            self.t.caches[i][0] = CacheCell::Delimiter;
            self.t.caches[i][right] = CacheCell::Delimiter;
        }
        for cell in 1..right {
            let sym = self.symbol_at(cell as i64 - 1);
            for i in 0..k {
                self.t.caches[i][cell] = sym;
            }
        }
        for i in 0..k {
            self.t.marked[i][1] = true;
        }
        cost += self.t.goto(right) + self.t.goto(0);
        // the middle mark: two markers converge from both delimiters
        let (mut a, mut b) = (0usize, right);
        while b - a > 1 {
            cost += self.t.goto(a) + 1;
            a += 1;
            self.t.work = a;
            cost += self.t.goto(b) + 1;
            b -= 1;
            self.t.work = b;
        }
        cost += self.t.goto(a);
        self.t.middle[a] = true;
        cost += self.t.goto(0);
        self.stats.charge(Phase::Init, cost);
    }

    fn read(&mut self) -> Vec<Symbol> {
        let cost = self.t.goto(0) + self.t.goto(self.t.right_end());
        self.stats.charge(Phase::Read, cost);
        (0..self.m.heads())
            .map(|i| {
                let cell = self.t.marked[i].iter().position(|&b| b).expect("a marked cell");
                match self.t.caches[i][cell] {
                    CacheCell::Input(s) => s,
                    other => panic!("mark on {other:?}"),
                }
            })
            .collect()
    }

    /// Moves head `i` one cell; returns whether its mark reached a delimiter.
    fn move_head(&mut self, i: usize, mv: HeadMove) -> bool {
        let mut cost = match mv {
            HeadMove::Right => self.t.increment(i),
            HeadMove::Left => self.t.decrement(i),
            HeadMove::Stay => return false,
        };
        let cell = self.t.marked[i].iter().position(|&b| b).unwrap();
        let next = if mv == HeadMove::Right { cell + 1 } else { cell - 1 };
        cost += self.t.goto(cell) + 1;
        self.t.marked[i][cell] = false;
        self.t.marked[i][next] = true;
        self.t.work = next;
        self.positions[i] = if mv == HeadMove::Right { self.positions[i] + 1 } else { self.positions[i] - 1 };
        self.stats.charge(Phase::Move, cost);
        next == 0 || next == self.t.right_end()
    }

    fn recache(&mut self, i: usize) {
        let t = &mut self.t;
        let mid = t.middle_cell();
        let right = t.right_end();
        let width = t.counters[i].len() as u64;
        let mut cost = 0;
        let cell = t.marked[i].iter().position(|&b| b).unwrap();
        cost += t.goto(cell);
        t.marked[i][cell] = false;
        // walk the input head out to the counter's value
        debug_assert_eq!(t.input, 0);
        while t.counter_value(i) > 0 {
            cost += t.decrement(i) + 1;
            t.input += 1;
        }
        cost += 2 * width;
        let p = t.input as i64;
        // both heads left to the cache's first cell, then copy rightwards
        cost += t.goto(mid);
        cost += t.goto(1);
        let base = p - (mid as i64 - 1);
        t.input = base.max(0) as u32;
        cost += t.goto(right - 1);
        for cell in 1..right {
            let sym = if base + (cell as i64 - 1) < 0 || base + (cell as i64 - 1) > self.n as i64 + 1 {
                CacheCell::Blank
            } else {
                CacheCell::Input(self.tape.at((base + cell as i64 - 1) as u32))
            };
            t.caches[i][cell] = sym;
        }
        // back to the middle, mark it, and count back up to the position
        t.input = (base + right as i64 - 2).clamp(0, self.n as i64 + 1) as u32;
        cost += t.goto(mid);
        t.input = p as u32;
        t.marked[i][mid] = true;
        while t.input > 0 {
            t.input -= 1;
            cost += 1 + t.increment(i);
        }
        self.base[i] = base;
        self.stats.charge(Phase::Recache, cost);
        self.stats.recache_at[i].push(self.stats.simulated_steps);
    }

    fn audit(&mut self) {
        let w = self.t.window();
        let mid = self.t.middle_cell();
        if self.t.middle_marks() != [mid] {
            self.violations.push(format!("step {}: middle marks {:?}", self.stats.simulated_steps, self.t.middle_marks()));
        }
        for i in 0..self.m.heads() {
            let p = self.positions[i];
            let marks = self.t.marks(i);
            let expected = (p as i64 - self.base[i] + 1) as usize;
            let step = self.stats.simulated_steps;
            if marks != [expected] || !(1..=w + 2).contains(&expected) {
                self.violations.push(format!("step {step}: head {} marks {marks:?}, expected [{expected}]", i + 1));
            } else if self.t.caches[i][expected] != CacheCell::Input(self.tape.at(p)) {
                self.violations.push(format!("step {step}: head {} cache disagrees with the input", i + 1));
            }
            if self.t.counter_value(i) != p as u64 || p as usize > self.n + 1 {
                self.violations.push(format!("step {step}: counter {} holds {}", i + 1, self.t.counter_value(i)));
            }
        }
    }

    fn final_audit(&mut self) {
        let w = self.t.window() as u64;
        if let Some(s) = self.stats.min_recache_spacing() {
            if s < w / 2 {
                self.violations.push(format!("re-caches only {s} steps apart"));
            }
        }
        for (i, r) in self.stats.recache_at.iter().enumerate() {
            if r.len() as u64 > 2 * self.stats.simulated_steps / (w / 2) + 1 {
                self.violations.push(format!("head {} re-cached {} times", i + 1, r.len()));
            }
        }
        let log = (self.n + 2).next_power_of_two().trailing_zeros() as usize;
        if self.t.cells_used() > SPACE_FACTOR * self.t.window().max(log) + SPACE_SLACK {
            self.violations.push(format!("{} cells used", self.t.cells_used()));
        }
        if self.stats.steps != self.stats.phase_total() {
            self.violations.push("phase totals do not add up".into());
        }
    }
}

/// Runs the tape simulation of `m` on `x` following `path`. Once `path` is
/// used up, a lone applicable transition is taken automatically.
pub fn simulate(m: &MultiHeadNfa, x: &[Symbol], path: &[TransitionId], opts: &SimOptions) -> Result<SimResult, SimError> {
    let n = x.len();
    let k = m.heads();
    let window = window_width(n);
    let width = counter_width(n);
    let mut sim = Sim {
        m,
        tape: Tape::new(x),
        n,
        t: TrackedTape::new(k, window, width),
        stats: SimStats {
            recache_at: vec![Vec::new(); k],
            window,
            counter_width: width,
            ..SimStats::default()
        },
        positions: vec![0; k],
        base: vec![0; k],
        violations: Vec::new(),
    };
    sim.init();
    sim.audit();
    let mut trace = opts.trace.then(Vec::new);
    let mut choices = Vec::new();
    let mut q = m.initial();
    let outcome = loop {
        if q == m.accept() {
            break SimOutcome::Accept;
        }
        if q == m.reject() {
            break SimOutcome::Reject;
        }
        let step = sim.stats.simulated_steps;
        if step >= opts.max_steps {
            return Err(SimError::StepBudget { limit: opts.max_steps });
        }
        let y = sim.read();
        let options = m.applicable(q, &y);
        let id = match path.get(step as usize) {
            Some(&id) if options.contains(&id) => id,
            Some(&id) => return Err(SimError::InvalidPath { step, transition: id.0 }),
            None if options.len() == 1 => options[0],
            None if options.is_empty() => break SimOutcome::Reject,
            None => return Err(SimError::PathExhausted { step, options: options.len() }),
        };
        choices.push(id);
        let tr = m.transition(id);
        if tr.to == m.reject() {
            sim.stats.simulated_steps += 1;
            break SimOutcome::Reject;
        }
        let mut pending = Vec::new();
        for (i, (&mv, &s)) in tr.moves.iter().zip(&y).enumerate() {
            let blocked = (s == Symbol::LEFT && mv == HeadMove::Left) || (s == Symbol::RIGHT && mv == HeadMove::Right);
            if !blocked && sim.move_head(i, mv) {
                pending.push(i);
            }
        }
        sim.stats.simulated_steps += 1;
        for &i in &pending {
            sim.recache(i);
        }
        q = tr.to;
        sim.audit();
        if let Some(lines) = trace.as_mut() {
            let heads: Vec<String> = sim.positions.iter().map(u32::to_string).collect();
            let re = if pending.is_empty() {
                "-".to_string()
            } else {
                pending.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")
            };
            lines.push(format!("step {} state {} heads {} recache {re}", step + 1, m.state_name(q), heads.join(" ")));
        }
    };
    if path.len() > choices.len() {
        return Err(SimError::TrailingPath { extra: path.len() - choices.len() });
    }
    sim.stats.cells_used = sim.t.cells_used();
    sim.final_audit();
    Ok(SimResult {
        outcome,
        choices,
        stats: sim.stats,
        trace,
        violations: sim.violations,
        tape: sim.t,
    })
}

/// Verdict of following `choices` directly on `m`.
pub fn replay_outcome(m: &MultiHeadNfa, x: &[Symbol], choices: &[TransitionId]) -> Option<SimOutcome> {
    let visited = replay(m, x, choices)?;
    Some(if visited.last()?.state == m.accept() { SimOutcome::Accept } else { SimOutcome::Reject })
}

/// The shortest accepting path for a member; for a nonmember, the path
/// taking the first applicable transition at every step.
pub fn default_path(m: &MultiHeadNfa, x: &[Symbol], node_budget: usize, max_steps: u64) -> Result<Vec<TransitionId>, SimError> {
    let r = accepts(m, x, node_budget)?;
    if let (Verdict::Member, Some(path)) = (r.verdict, r.accepting_path) {
        return Ok(path.iter().map(|s| s.transition).collect());
    }
    let mut c = Configuration::initial(m);
    let mut path = Vec::new();
    while let Some((next, id)) = successors(m, x, &c).into_iter().next() {
        if path.len() as u64 >= max_steps {
            return Err(SimError::StepBudget { limit: max_steps });
        }
        path.push(id);
        c = next;
    }
    Ok(path)
}

pub const EXHAUSTIVE_MAX_LEN: usize = 12;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExhaustiveReport {
    pub paths: usize,
    pub accepting: usize,
    pub max_steps: u64,
    /// Paths whose simulated outcome differs from direct replay.
    pub mismatches: usize,
    pub violations: Vec<String>,
}

/// Simulates every maximal computational path of `m` on a short input.
pub fn simulate_all(m: &MultiHeadNfa, x: &[Symbol], opts: &SimOptions, path_limit: usize) -> Result<ExhaustiveReport, SimError> {
    if x.len() > EXHAUSTIVE_MAX_LEN {
        return Err(SimError::InputTooLong { limit: EXHAUSTIVE_MAX_LEN });
    }
    if !always_halts_on(m, x, DEFAULT_NODE_BUDGET)?.0 {
        return Err(SimError::NonHalting);
    }
    let mut report = ExhaustiveReport::default();
    let mut stack = vec![(Configuration::initial(m), Vec::<TransitionId>::new())];
    while let Some((c, path)) = stack.pop() {
        let succ = successors(m, x, &c);
        if succ.is_empty() {
            report.paths += 1;
            if report.paths > path_limit {
                return Err(SimError::PathBudget { limit: path_limit });
            }
            let r = simulate(m, x, &path, opts)?;
            if Some(r.outcome) != replay_outcome(m, x, &path) {
                report.mismatches += 1;
            }
            report.accepting += (r.outcome == SimOutcome::Accept) as usize;
            report.max_steps = report.max_steps.max(r.stats.steps);
            report.violations.extend(r.violations);
            continue;
        }
        for (d, id) in succ.into_iter().rev() {
            let mut p = path.clone();
            p.push(id);
            stack.push((d, p));
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingRow {
    pub n: usize,
    pub window: usize,
    pub simulated_steps: u64,
    pub steps: u64,
    pub recaches: usize,
    /// steps · log2 n / n²
    pub ratio: f64,
}

/// Simulator cost on `generate(n)` for each length, following the
/// shortest accepting path.
pub fn scaling_report(
    m: &MultiHeadNfa,
    lengths: &[usize],
    generate: impl Fn(usize) -> Vec<Symbol>,
    opts: &SimOptions,
) -> Result<Vec<ScalingRow>, SimError> {
    lengths
        .iter()
        .map(|&n| {
            let x = generate(n);
            let path = default_path(m, &x, DEFAULT_NODE_BUDGET, opts.max_steps)?;
            let r = simulate(m, &x, &path, opts)?;
            let nf = n as f64;
            Ok(ScalingRow {
                n,
                window: r.stats.window,
                simulated_steps: r.stats.simulated_steps,
                steps: r.stats.steps,
                recaches: r.stats.recaches().iter().sum(),
                ratio: if n > 1 { r.stats.steps as f64 * nf.log2() / (nf * nf) } else { 0.0 },
            })
        })
        .collect()
}

/// Largest ratio over smallest, across a scaling table.
pub fn ratio_spread(rows: &[ScalingRow]) -> Option<f64> {
    let max = rows.iter().map(|r| r.ratio).fold(f64::NAN, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::NAN, f64::min);
    (min > 0.0).then(|| max / min)
}
