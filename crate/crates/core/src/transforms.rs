//! Machine-to-machine constructions: projecting onto one head, adding a timer
//! head, adding counter heads that force halting, and wrapping a one-head
//! machine as an alternating automaton that accepts exactly the inputs on
//! which it always halts.

use crate::automata::{
    symbol_tuples, AfaTransition, HeadMove, MachineBuilder, MachineError, MultiHeadNfa, StateId, Symbol, Transition,
    TwoWayAfa,
};

fn check_head(m: &MultiHeadNfa, i: usize) -> Result<(), MachineError> {
    if i == 0 || i > m.heads() {
        return Err(MachineError::HeadIndex { head: i, heads: m.heads() });
    }
    Ok(())
}

/// The one-head machine M_i that keeps head `i` (1-based) and forgets what
/// every other head reads.
pub fn project_head(m: &MultiHeadNfa, i: usize) -> Result<MultiHeadNfa, MachineError> {
    check_head(m, i)?;
    let transitions = m
        .transitions()
        .iter()
        .map(|t| Transition {
            from: t.from,
            read: vec![t.read[i - 1]],
            to: t.to,
            moves: vec![t.moves[i - 1]],
        })
        .collect();
    MultiHeadNfa::new(
        format!("{}_head{i}", m.name()),
        1,
        m.alphabet().clone(),
        m.states().to_vec(),
        m.initial(),
        m.accept(),
        m.reject(),
        transitions,
    )
}

/// Maps each state of `m` to builder states: halting states keep their name,
/// the others get one copy per `tag(j)`.
fn copies(b: &mut MachineBuilder, m: &MultiHeadNfa, count: usize, tag: impl Fn(usize) -> String) -> Vec<Vec<StateId>> {
    (0..m.state_count())
        .map(|q| {
            let q = StateId(q as u32);
            let name = m.state_name(q);
            if m.is_halting_state(q) {
                vec![b.fresh_state(name)]
            } else {
                (0..count).map(|j| b.fresh_state(&format!("{name}@{}", tag(j)))).collect()
            }
        })
        .collect()
}

/// Adds head k+1 as a timer that moves right on simulated steps 0, c, 2c, ...
/// A move demanded while the timer scans `$` sends the machine to reject,
/// so a run is cut off after c·(n+1) simulated steps. Steps into accept or
/// reject are never cut off.
pub fn add_timer_head(m: &MultiHeadNfa, c: usize) -> Result<MultiHeadNfa, MachineError> {
    if c == 0 {
        return Err(MachineError::Syntax("timer slope must be positive".into()));
    }
    let k = m.heads();
    let mut b = MachineBuilder::new(format!("{}_timer{c}", m.name()), k + 1, m.alphabet().clone());
    let ids = copies(&mut b, m, c, |t| format!("t{t}"));
    let at = |q: StateId, t: usize| if m.is_halting_state(q) { ids[q.index()][0] } else { ids[q.index()][t] };
    let reject = at(m.reject(), 0);
    let tape: Vec<Symbol> = m.alphabet().tape_symbols().collect();
    for tr in m.transitions() {
        for t in 0..c {
            let timer_move = if t == 0 { HeadMove::Right } else { HeadMove::Stay };
            for &z in &tape {
                let mut read = tr.read.clone();
                read.push(z);
                let from = at(tr.from, t);
                if !m.is_halting_state(tr.to) && t == 0 && z == Symbol::RIGHT {
                    b.transition(from, read, reject, vec![HeadMove::Stay; k + 1]);
                } else {
                    let mut moves = tr.moves.clone();
                    moves.push(timer_move);
                    b.transition(from, read, at(tr.to, (t + 1) % c), moves);
                }
            }
        }
    }
    b.build(at(m.initial(), 0), at(m.accept(), 0), reject)
}

/// Adds k counter heads c_1..c_k forming an odometer in base n+2. Every
/// |Q| simulated steps c_1 advances; a counter scanning `$` rewinds to `^`
/// while the simulation is frozen and carries into the next one, and a carry
/// out of c_k rejects. The result halts on every path.
pub fn add_counter_heads(m: &MultiHeadNfa) -> Result<MultiHeadNfa, MachineError> {
    let k = m.heads();
    let period = m.state_count();
    let mut b = MachineBuilder::new(format!("{}_counted", m.name()), 2 * k, m.alphabet().clone());
    let sim = copies(&mut b, m, period, |t| format!("t{t}"));
    let inc = copies(&mut b, m, k, |i| format!("inc{}", i + 1));
    let rewind = copies(&mut b, m, k.saturating_sub(1), |i| format!("rew{}", i + 1));
    let halting = |q: StateId| m.is_halting_state(q);
    let at = |q: StateId, t: usize| if halting(q) { sim[q.index()][0] } else { sim[q.index()][t] };
    let reject = at(m.reject(), 0);
    let tape: Vec<Symbol> = m.alphabet().tape_symbols().collect();
    let counter_reads = symbol_tuples(&tape, k);
    let still = vec![HeadMove::Stay; 2 * k];

    for tr in m.transitions() {
        for t in 0..period {
            let target = if halting(tr.to) {
                at(tr.to, 0)
            } else if t + 1 < period {
                at(tr.to, t + 1)
            } else {
                inc[tr.to.index()][0]
            };
            let mut moves = tr.moves.clone();
            moves.extend(std::iter::repeat_n(HeadMove::Stay, k));
            for z in &counter_reads {
                let mut read = tr.read.clone();
                read.extend_from_slice(z);
                b.transition(at(tr.from, t), read, target, moves.clone());
            }
        }
    }

    // increment and rewind phases: only counter head `k + i` matters
    let others = symbol_tuples(&tape, 2 * k - 1);
    for q in 0..m.state_count() {
        let q = StateId(q as u32);
        if halting(q) {
            continue;
        }
        for i in 0..k {
            let head = k + i;
            for rest in &others {
                for &z in &tape {
                    let mut read = rest.clone();
                    read.insert(head, z);
                    let mut moves = still.clone();
                    // Inc(q, i)
                    if z != Symbol::RIGHT {
                        moves[head] = HeadMove::Right;
                        b.transition(inc[q.index()][i], read.clone(), at(q, 0), moves.clone());
                    } else if i + 1 == k {
                        b.transition(inc[q.index()][i], read.clone(), reject, still.clone());
                    } else {
                        moves[head] = HeadMove::Left;
                        b.transition(inc[q.index()][i], read.clone(), rewind[q.index()][i], moves.clone());
                    }
                    // Rewind(q, i)
                    if i + 1 < k {
                        let mut moves = still.clone();
                        if z == Symbol::LEFT {
                            b.transition(rewind[q.index()][i], read, inc[q.index()][i + 1], moves);
                        } else {
                            moves[head] = HeadMove::Left;
                            b.transition(rewind[q.index()][i], read, rewind[q.index()][i], moves);
                        }
                    }
                }
            }
        }
    }
    b.build(at(m.initial(), 0), at(m.accept(), 0), reject)
}

/// Views a one-head machine as a two-way AFA in which every state is
/// universal and both halting states accept. A stuck universal
/// configuration accepts vacuously, so the AFA accepts x exactly when every
/// computational path of `m` on x is finite.
pub fn halting_wrapper(m: &MultiHeadNfa) -> Result<TwoWayAfa, MachineError> {
    if m.heads() != 1 {
        return Err(MachineError::Arity { expected: 1, found: m.heads() });
    }
    let n = m.state_count();
    let accepting = (0..n).map(|q| m.is_halting_state(StateId(q as u32))).collect();
    let transitions = m
        .transitions()
        .iter()
        .map(|t| AfaTransition {
            from: t.from,
            read: t.read[0],
            to: t.to,
            mv: t.moves[0],
        })
        .collect();
    TwoWayAfa::new(m.alphabet().clone(), m.states().to_vec(), vec![true; n], accepting, m.initial(), transitions)
}
