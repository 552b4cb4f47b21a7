use std::collections::HashSet;

use proptest::prelude::*;

use super::*;
use crate::testing::{arb_machine, machine, word, ANBN, ANBN_HEAD1, ANBN_HEAD2, INSTANT};

const BUDGET: usize = DEFAULT_NODE_BUDGET;

fn cfg(m: &MultiHeadNfa, q: &str, pos: &[u32]) -> Configuration {
    Configuration {
        state: m.state_id(q).unwrap(),
        positions: pos.to_vec(),
    }
}

/// Reachability by naive saturation: independent of the BFS in `accepts`.
fn reachable_set(m: &MultiHeadNfa, x: &[Symbol]) -> HashSet<Configuration> {
    let mut seen = HashSet::from([Configuration::initial(m)]);
    loop {
        let new: Vec<Configuration> = seen
            .iter()
            .flat_map(|c| successors(m, x, c).into_iter().map(|(d, _)| d))
            .filter(|d| !seen.contains(d))
            .collect();
        if new.is_empty() {
            return seen;
        }
        seen.extend(new);
    }
}

/// Longest path by exhaustive path enumeration; `None` if some path exceeds
/// `cap` steps.
fn longest_by_enumeration(m: &MultiHeadNfa, x: &[Symbol], c: &Configuration, cap: u64) -> Option<u64> {
    if cap == 0 {
        return successors(m, x, c).is_empty().then_some(0);
    }
    let mut best = 0;
    for (d, _) in successors(m, x, c) {
        best = best.max(1 + longest_by_enumeration(m, x, &d, cap - 1)?);
    }
    Some(best)
}

#[test]
fn successor_examples() {
    let m = machine(ANBN);
    let x = word(&m, "0011");
    let s = successors(&m, &x, &cfg(&m, "q1", &[1, 3]));
    assert_eq!(s.len(), 1);
    assert_eq!(s[0].0, cfg(&m, "q2", &[2, 4]));
    assert_eq!(m.render_transition(m.transition(s[0].1)), "trans q1 0 1 -> q2 R R");

    let s = successors(&m, &x, &cfg(&m, "q1", &[1, 1]));
    assert_eq!(s.iter().map(|p| p.0.clone()).collect::<Vec<_>>(), vec![cfg(&m, "q1", &[1, 2])]);

    assert!(successors(&m, &x, &cfg(&m, "qacc", &[5, 5])).is_empty());
}

#[test]
fn acceptance_examples() {
    let m = machine(ANBN);
    let r = accepts(&m, &word(&m, "0011"), BUDGET).unwrap();
    assert_eq!(r.verdict, Verdict::Member);
    assert_eq!(r.accepting_path.as_ref().unwrap().len(), 6);
    assert!(r.always_halts && r.loop_witness.is_none());
    let path: Vec<TransitionId> = r.accepting_path.unwrap().iter().map(|s| s.transition).collect();
    let visited = replay(&m, &word(&m, "0011"), &path).unwrap();
    assert_eq!(visited.last().unwrap().state, m.accept());

    let r = accepts(&m, &[], BUDGET).unwrap();
    assert_eq!(r.verdict, Verdict::Member);
    assert_eq!(r.accepting_path.unwrap().len(), 2);

    let r = accepts(&m, &word(&m, "001"), BUDGET).unwrap();
    assert_eq!(r.verdict, Verdict::Nonmember);
    assert!(r.accepting_path.is_none());
}

#[test]
fn acceptance_matches_language_and_saturation() {
    let m = machine(ANBN);
    for x in m.alphabet().words_up_to(8) {
        let s = m.alphabet().render_word(&x);
        let half = s.len() / 2;
        let expected = s.len().is_multiple_of(2) && s[..half].chars().all(|c| c == '0') && s[half..].chars().all(|c| c == '1');
        let r = accepts(&m, &x, BUDGET).unwrap();
        assert_eq!(r.verdict == Verdict::Member, expected, "{s}");
        let sat = reachable_set(&m, &x).iter().any(|c| c.state == m.accept());
        assert_eq!(sat, expected);
    }
}

#[test]
fn halting_examples() {
    let m1 = machine(ANBN_HEAD1);
    let (halts, w) = always_halts_on(&m1, &word(&m1, "0"), BUDGET).unwrap();
    assert!(!halts);
    let w = w.unwrap();
    assert_eq!(w.cycle, vec![cfg(&m1, "q1", &[1])]);
    assert_eq!(w.prefix, vec![cfg(&m1, "q0", &[0])]);
    assert!(is_valid_lasso(&m1, &word(&m1, "0"), &w));

    let m2 = machine(ANBN_HEAD2);
    assert_eq!(always_halts_on(&m2, &word(&m2, "0011"), BUDGET).unwrap(), (true, None));

    let m = machine(ANBN);
    for x in m.alphabet().words_up_to(8) {
        assert!(always_halts_on(&m, &x, BUDGET).unwrap().0);
    }
}

#[test]
fn run_length_examples() {
    let m = machine(ANBN);
    let x = word(&m, "0011");
    assert_eq!(max_run_steps(&m, &x, BUDGET).unwrap(), RunLength::Finite(6));
    assert_eq!(longest_by_enumeration(&m, &x, &Configuration::initial(&m), 50), Some(6));

    let m1 = machine(ANBN_HEAD1);
    assert_eq!(max_run_steps(&m1, &word(&m1, "0"), BUDGET).unwrap(), RunLength::Infinite);

    let inst = machine(INSTANT);
    assert_eq!(max_run_steps(&inst, &[], BUDGET).unwrap(), RunLength::Finite(1));
}

#[test]
fn budget_is_reported() {
    let m = machine(ANBN);
    let e = accepts(&m, &word(&m, "000111"), 3).unwrap_err();
    assert_eq!(e, AutomataError::BudgetExceeded { limit: 3 });
}

#[test]
fn empty_relation_gets_stuck() {
    let text: String = ANBN.lines().filter(|l| !l.starts_with("trans")).map(|l| format!("{l}\n")).collect();
    let m = parse_machine(&text).unwrap();
    for x in m.alphabet().words_up_to(3) {
        let r = accepts(&m, &x, BUDGET).unwrap();
        assert_eq!(r.verdict, Verdict::Nonmember);
        assert!(r.always_halts);
        assert_eq!(r.explored, 1);
    }
}

#[test]
fn canonical_form_round_trips() {
    let m = machine(ANBN);
    let c = m.canonical();
    assert!(c.same_automaton(&m));
    assert_eq!(parse_machine(&c.to_mhfa()).unwrap(), c);
    let mut sorted = c.transitions().to_vec();
    sorted.sort();
    assert_eq!(c.transitions(), &sorted[..]);
}

#[test]
fn existential_afa_matches_nfa() {
    for text in [ANBN_HEAD1, ANBN_HEAD2, INSTANT] {
        let m = machine(text);
        let afa = existential_afa(&m);
        for x in m.alphabet().words_up_to(7) {
            let nfa = accepts(&m, &x, BUDGET).unwrap().verdict == Verdict::Member;
            assert_eq!(afa_accepts(&afa, &x), nfa);
        }
    }
}

fn existential_afa(m: &MultiHeadNfa) -> TwoWayAfa {
    let n = m.state_count();
    let mut accepting = vec![false; n];
    accepting[m.accept().index()] = true;
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
    TwoWayAfa::new(m.alphabet().clone(), m.states().to_vec(), vec![false; n], accepting, m.initial(), transitions).unwrap()
}

#[test]
fn dfa_universality_by_materialized_subsets() {
    let a = TapeAlphabet::new(["0", "1"]).unwrap();
    // state 0 accepts; reading 0 first leads to a dead state
    let nfa = OneWayNfa::new(a, vec![0], vec![true, false, true], vec![vec![vec![1], vec![2]], vec![vec![1], vec![1]], vec![vec![2], vec![2]]]).unwrap();
    let dfa = nfa.determinize(1 << 20).unwrap();
    assert_eq!(dfa.missing_word().unwrap(), vec![Symbol::from_input_index(0)]);
    assert!(!nfa.accepts(&[Symbol::from_input_index(0), Symbol::from_input_index(1)]));
    assert!(nfa.accepts(&[Symbol::from_input_index(1), Symbol::from_input_index(0)]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdict_ignores_transition_order(m in arb_machine(2, 2, 8), seed in any::<u64>()) {
        let mut ts = m.transitions().to_vec();
        // deterministic shuffle
        let n = ts.len();
        for i in (1..n).rev() {
            let j = (seed.wrapping_mul(6364136223846793005).wrapping_add(i as u64) % (i as u64 + 1)) as usize;
            ts.swap(i, j);
        }
        let shuffled = MultiHeadNfa::new("s", 2, m.alphabet().clone(), m.states().to_vec(), m.initial(), m.accept(), m.reject(), ts).unwrap();
        for x in m.alphabet().words_up_to(3) {
            let a = accepts(&m, &x, BUDGET).unwrap();
            let b = accepts(&shuffled, &x, BUDGET).unwrap();
            prop_assert_eq!(a.verdict, b.verdict);
            prop_assert_eq!(a.always_halts, b.always_halts);
        }
    }

    #[test]
    fn halting_iff_finite_run_length(m in arb_machine(2, 2, 8)) {
        for x in m.alphabet().words_up_to(3) {
            let (halts, witness) = always_halts_on(&m, &x, BUDGET).unwrap();
            let len = max_run_steps(&m, &x, BUDGET).unwrap();
            prop_assert_eq!(halts, len != RunLength::Infinite);
            prop_assert_eq!(halts, witness.is_none());
            if let Some(w) = witness {
                prop_assert!(is_valid_lasso(&m, &x, &w));
            }
            if let RunLength::Finite(n) = len {
                prop_assert_eq!(Some(n), longest_by_enumeration(&m, &x, &Configuration::initial(&m), 200));
            }
        }
    }

    #[test]
    fn positions_stay_on_tape(m in arb_machine(2, 2, 10)) {
        for x in m.alphabet().words_up_to(3) {
            for c in reachable_set(&m, &x) {
                prop_assert!(c.positions.iter().all(|&p| p <= x.len() as u32 + 1));
            }
        }
    }

    #[test]
    fn serialization_round_trips(m in arb_machine(2, 3, 10)) {
        prop_assert_eq!(parse_machine(&m.to_mhfa()).unwrap(), m.clone());
        prop_assert_eq!(parse_machine(&m.canonical().to_mhfa()).unwrap(), m.canonical());
    }
}
