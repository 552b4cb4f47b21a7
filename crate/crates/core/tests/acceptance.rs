//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use mhfa_core::automata::{
    accepts, always_halts_on, is_valid_lasso, max_run_steps, parse_machine, HeadMove, MultiHeadNfa, RunLength, StateId,
    Symbol, TapeAlphabet, Transition, Verdict, DEFAULT_NODE_BUDGET,
};
use mhfa_core::halting::{analyze_head, analyze_machine, analyze_one_head, find_loop_witness, head_is_safe, Limits};
use mhfa_core::ips::{
    best_adversarial_certificate, build_verifier, choose_parameters, hardwire_coins, honest_certificate,
    outcome_distribution, parse_certificate, strong_error, Certificate, Dyadic, HeadClassification, Mode, Outcome,
    OutcomeDistribution, VerifierSpec,
};
use mhfa_core::ntmsim::{default_path, ratio_spread, replay_outcome, scaling_report, simulate, SimOptions, SimOutcome};
use mhfa_core::transforms::{add_counter_heads, add_timer_head, project_head};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn fixture_text(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "fixtures", name].iter().collect();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn fixture(name: &str) -> MultiHeadNfa {
    parse_machine(&fixture_text(name)).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn pow(r: &BigRational, e: usize) -> BigRational {
    (0..e).fold(BigRational::one(), |acc, _| acc * r)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn anbn_class() -> HeadClassification {
    HeadClassification::new(2, vec![2], vec![1]).unwrap()
}

fn gb(rounds: usize, w: &str) -> VerifierSpec {
    build_verifier(&fixture("anbn.mhfa"), anbn_class(), Mode::Gb, rounds, Dyadic::parse(w).unwrap(), false).unwrap()
}

fn member(m: &MultiHeadNfa, x: &[Symbol]) -> bool {
    accepts(m, x, DEFAULT_NODE_BUDGET).unwrap().verdict == Verdict::Member
}

fn words(m: &MultiHeadNfa, max_len: usize) -> Vec<Vec<Symbol>> {
    m.alphabet().words_up_to(max_len).collect()
}

fn projection_fidelity() -> Check {
    let m = fixture("anbn.mhfa");
    for (i, name) in [(1, "anbn_head1.mhfa"), (2, "anbn_head2.mhfa")] {
        let p = project_head(&m, i).map_err(|e| e.to_string())?;
        let want = fixture(name);
        ensure(p.same_automaton(&want), || format!("projection of head {i} differs from {name}"))?;
        ensure(p.canonical().to_mhfa() == want.canonical().with_name(p.name()).to_mhfa(), || {
            format!("canonical text of head {i} differs")
        })?;
    }
    let analyses = analyze_machine(&m, &Limits::default()).map_err(|e| e.to_string())?;
    let verdicts: Vec<bool> = analyses.iter().map(|a| a.safe).collect();
    ensure(verdicts == [false, true], || format!("safety {verdicts:?}, expected head 1 risky and head 2 safe"))?;
    Ok("projections match both single-head fixtures; head 1 risky, head 2 safe".into())
}

fn completeness() -> Check {
    let v = gb(5, "1/4");
    let mut count = 0;
    for i in 0..=6 {
        let x = v.machine.alphabet().parse_word(&format!("{}{}", "0".repeat(i), "1".repeat(i))).unwrap();
        let cert = honest_certificate(&v.machine, &x, 5).map_err(|e| e.to_string())?.ok_or("member without certificate")?;
        let d = outcome_distribution(&v, &x, &cert);
        ensure(d.accept.is_one(), || format!("P_accept = {} on 0^{i}1^{i}", d.accept))?;
        count += 1;
    }
    Ok(format!("P_accept = 1 on all {count} members"))
}

fn soundness() -> Check {
    let mut detail = Vec::new();
    for (c, expected) in [(2, q(9, 16)), (5, q(1, 4))] {
        let v = gb(c, "1/4");
        let report = strong_error(&v, 8, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        let accept_bound = pow(&q(3, 4), c);
        for row in &report.rows {
            let a = best_adversarial_certificate(&v, &row.input, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
            ensure(row.weak <= accept_bound && a.distribution.accept <= accept_bound, || {
                format!("C={c}: P_accept {} above (3/4)^C", row.weak)
            })?;
            ensure(a.distribution.looping <= q(1, 4), || format!("C={c}: P_loop {} above 1/4", a.distribution.looping))?;
        }
        ensure(report.strong == expected, || format!("C={c}: strong error {} != {expected}", report.strong))?;
        detail.push(format!("C={c}: {} nonmembers, strong error {}", report.rows.len(), report.strong));
    }
    Ok(detail.join("; "))
}

fn arbitrary_error() -> Check {
    let m = fixture("anbn.mhfa");
    let mut detail = Vec::new();
    for eps in ["1/4", "1/8"] {
        let target = Dyadic::parse(eps).unwrap();
        let p = choose_parameters(&anbn_class(), target).map_err(|e| e.to_string())?;
        let v = build_verifier(&m, anbn_class(), Mode::Gb, p.rounds, p.w, false).map_err(|e| e.to_string())?;
        let r = strong_error(&v, 8, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        ensure(r.strong <= target.to_ratio(), || format!("ε={eps}: strong error {}", r.strong))?;
        let attained = r.rows.iter().any(|row| row.looping && row.strong == target.to_ratio());
        ensure(attained, || format!("ε={eps}: no looping adversary attains ε"))?;
        detail.push(format!("ε={eps}: C={} w={} strong {}", p.rounds, p.w, r.strong));
    }
    Ok(detail.join("; "))
}

fn syw_contrast() -> Check {
    let m = fixture("anbn.mhfa");
    let mut detail = Vec::new();
    for c in 1..=4 {
        let v = build_verifier(&m, anbn_class(), Mode::Syw, c, Dyadic::ZERO, false).map_err(|e| e.to_string())?;
        let r = strong_error(&v, 8, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        ensure(r.strong >= q(1, 2), || format!("C={c}: strong error {} below 1/2", r.strong))?;
        ensure(r.rows.iter().any(|row| row.looping && row.strong >= q(1, 2)), || format!("C={c}: no looping certificate"))?;
        ensure(r.weak <= pow(&q(1, 2), c), || format!("C={c}: weak error {}", r.weak))?;
        detail.push(format!("C={c}: weak {} strong {}", r.weak, r.strong));
    }
    Ok(detail.join("; "))
}

fn averaged(v: &VerifierSpec, x: &[Symbol], cert: &Certificate) -> Result<OutcomeDistribution, String> {
    let n = v.coin_budget();
    let weight = BigRational::new(BigInt::one(), BigInt::one() << n);
    let mut d = OutcomeDistribution {
        accept: BigRational::zero(),
        reject: BigRational::zero(),
        looping: BigRational::zero(),
    };
    for bits in 0u64..1 << n {
        let z: Vec<bool> = (0..n).map(|i| bits >> (n - 1 - i) & 1 == 1).collect();
        let h = hardwire_coins(v, &z).map_err(|e| e.to_string())?;
        match h.run(x, cert) {
            Outcome::Accept => d.accept += &weight,
            Outcome::Reject { .. } => d.reject += &weight,
            Outcome::Loop { .. } => d.looping += &weight,
        }
    }
    Ok(d)
}

fn oracle_equivalence() -> Check {
    let m = fixture("anbn.mhfa");
    let lying = parse_certificate(&fixture_text("lying.cert"), &m).unwrap();
    let looping = parse_certificate(&fixture_text("looping.cert"), &m).unwrap();
    let verifiers = [
        gb(2, "1/4"),
        gb(1, "1/2"),
        build_verifier(&m, anbn_class(), Mode::Syw, 2, Dyadic::ZERO, false).unwrap(),
        build_verifier(&m, anbn_class(), Mode::Sys, 2, Dyadic::ZERO, false).unwrap(),
    ];
    let mut pairs = 0;
    for v in &verifiers {
        for x in words(&m, 4) {
            let mut certs = vec![lying.clone(), looping.clone(), Certificate::default()];
            if let Some(h) = honest_certificate(&m, &x, v.rounds).map_err(|e| e.to_string())? {
                let one_round = Certificate {
                    prefix: h.prefix[..h.prefix.len() / v.rounds].to_vec(),
                    cycle: Vec::new(),
                };
                certs.push(h);
                certs.push(one_round);
            }
            certs.push(best_adversarial_certificate(v, &x, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?.certificate);
            for cert in &certs {
                let table = outcome_distribution(v, &x, cert);
                let coins = averaged(v, &x, cert)?;
                ensure(table == coins, || {
                    format!("{} on {:?}: table {table:?} vs coins {coins:?}", v.block(), m.alphabet().render_word(&x))
                })?;
                pairs += 1;
            }
        }
    }
    ensure(pairs >= 50, || format!("only {pairs} pairs"))?;
    Ok(format!("{pairs} (input, certificate) pairs agree across {} verifiers", verifiers.len()))
}

fn one_head_machine(alphabet: &TapeAlphabet, active: usize, transitions: Vec<Transition>) -> MultiHeadNfa {
    let mut states: Vec<String> = (0..active).map(|i| format!("q{i}")).collect();
    states.push("qacc".into());
    states.push("qrej".into());
    let acc = StateId(active as u32);
    MultiHeadNfa::new("m", 1, alphabet.clone(), states, StateId(0), acc, StateId(acc.0 + 1), transitions).unwrap()
}

/// Unary one-head machines with one or two non-terminal states and at most
/// `max_transitions` transitions, all of them.
fn unary_corpus(max_transitions: usize) -> Vec<MultiHeadNfa> {
    let alphabet = TapeAlphabet::new(["0"]).unwrap();
    let mut out = Vec::new();
    for active in 1..=2u32 {
        let mut universe = Vec::new();
        for from in 0..active {
            for read in 0..3u16 {
                for to in 0..active + 2 {
                    for mv in HeadMove::ALL {
                        universe.push(Transition {
                            from: StateId(from),
                            read: vec![Symbol(read)],
                            to: StateId(to),
                            moves: vec![mv],
                        });
                    }
                }
            }
        }
        let mut subset = Vec::new();
        subsets(&universe, 0, max_transitions, &mut subset, &mut |ts| {
            out.push(one_head_machine(&alphabet, active as usize, ts.to_vec()))
        });
    }
    out
}

fn subsets<T: Clone>(all: &[T], start: usize, left: usize, cur: &mut Vec<T>, f: &mut impl FnMut(&[T])) {
    f(cur);
    if left == 0 {
        return;
    }
    for i in start..all.len() {
        cur.push(all[i].clone());
        subsets(all, i + 1, left - 1, cur, f);
        cur.pop();
    }
}

fn random_one_head(rng: &mut StdRng, active: usize, max_transitions: usize) -> MultiHeadNfa {
    let alphabet = TapeAlphabet::new(["0", "1"]).unwrap();
    let count = rng.random_range(0..=max_transitions);
    let transitions = (0..count)
        .map(|_| Transition {
            from: StateId(rng.random_range(0..active as u32)),
            read: vec![Symbol(rng.random_range(0..4))],
            to: StateId(rng.random_range(0..active as u32 + 2)),
            moves: vec![HeadMove::ALL[rng.random_range(0..3)]],
        })
        .collect();
    one_head_machine(&alphabet, active, transitions)
}

fn halting_pipeline() -> Check {
    let limits = Limits::default();
    let mut rng = StdRng::seed_from_u64(7);
    let unary = unary_corpus(4);
    let unary_count = unary.len();
    let sampled = (0..100).map(|i| random_one_head(&mut rng, 1 + i % 3, 10));
    let (mut safe, mut risky) = (0, 0);
    for m in unary.into_iter().chain(sampled) {
        let a = analyze_one_head(&m, &limits).map_err(|e| format!("{}: {e}", m.to_mhfa()))?;
        ensure(head_is_safe(&m, 1, &limits).map_err(|e| e.to_string())? == a.safe, || "head_is_safe disagrees".into())?;
        let bounded = find_loop_witness(&m, 6, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        if a.safe {
            ensure(bounded.is_none(), || format!("pipeline says safe but a loop exists:\n{}", m.to_mhfa()))?;
            safe += 1;
        } else {
            let (x, w) = (a.counterexample.as_ref(), a.witness.as_ref());
            let replayable = matches!((x, w), (Some(x), Some(w)) if is_valid_lasso(&m, x, w));
            ensure(replayable, || format!("risky verdict without a valid lasso:\n{}", m.to_mhfa()))?;
            risky += 1;
        }
    }
    Ok(format!("{unary_count} unary + 100 sampled machines: {safe} safe, {risky} risky, no contradictions"))
}

fn transform_correctness() -> Check {
    let limits = Limits::default();
    let mut rng = StdRng::seed_from_u64(11);
    let mut corpus: Vec<MultiHeadNfa> = ["anbn.mhfa", "anbn_head1.mhfa", "anbn_head2.mhfa", "spin.mhfa", "instant.mhfa"]
        .into_iter()
        .map(fixture)
        .collect();
    corpus.extend((0..12).map(|i| random_one_head(&mut rng, 1 + i % 2, 8)));
    let mut inputs = 0;
    for m in &corpus {
        let active = m.state_count() - 2;
        // accepting runs of a one-head machine are no longer than active·(n+2)
        let c = if m.heads() == 1 { 2 * active.max(1) } else { 2 };
        if m.heads() > 1 {
            for x in words(m, 10) {
                let RunLength::Finite(steps) = max_run_steps(m, &x, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())? else {
                    return Err(format!("{} is not linear time", m.name()));
                };
                ensure(steps <= (c * (x.len() + 1) + 1) as u64, || format!("{} runs too long", m.name()))?;
            }
        }
        let timed = add_timer_head(m, c).map_err(|e| e.to_string())?;
        let counted = add_counter_heads(m).map_err(|e| e.to_string())?;
        for x in words(m, 10) {
            let want = member(m, &x);
            ensure(member(&timed, &x) == want, || format!("timer changes {} on {:?}", m.name(), x))?;
            ensure(member(&counted, &x) == want, || format!("counters change {} on {:?}", m.name(), x))?;
            if x.len() <= 8 {
                let halts = always_halts_on(&counted, &x, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?.0;
                ensure(halts, || format!("counted {} loops on {:?}", m.name(), x))?;
            }
            inputs += 1;
        }
        for small in [1, 2] {
            let t = add_timer_head(m, small).map_err(|e| e.to_string())?;
            let a = analyze_head(&t, m.heads() + 1, &limits).map_err(|e| e.to_string())?;
            ensure(a.safe, || format!("timer head of {} (c={small}) not certified safe", m.name()))?;
        }
    }
    Ok(format!("{} machines, {inputs} inputs; timer heads certified safe", corpus.len()))
}

fn simulation() -> Check {
    let opts = SimOptions::default();
    let anbn = fixture("anbn.mhfa");
    let machines = vec![
        anbn.clone(),
        fixture("anbn_head2.mhfa"),
        fixture("instant.mhfa"),
        add_timer_head(&fixture("spin.mhfa"), 1).unwrap(),
        add_timer_head(&fixture("anbn_head1.mhfa"), 2).unwrap(),
    ];
    let mut rng = StdRng::seed_from_u64(3);
    let mut runs = 0;
    let mut min_spacing_slack = i64::MAX;
    for m in &machines {
        let syms: Vec<Symbol> = m.alphabet().input_symbols().collect();
        let mut inputs = words(m, 6);
        for n in [8, 15, 16, 31, 32, 63, 64, 100, 127, 128] {
            let half = n / 2;
            inputs.push((0..n).map(|i| syms[(i >= half) as usize]).collect());
            inputs.push((0..n).map(|i| syms[(i > half) as usize]).collect());
            inputs.push((0..n).map(|_| syms[rng.random_range(0..syms.len())]).collect());
        }
        for x in &inputs {
            let path = default_path(m, x, DEFAULT_NODE_BUDGET, opts.max_steps).map_err(|e| e.to_string())?;
            let r = simulate(m, x, &path, &opts).map_err(|e| format!("{} on length {}: {e}", m.name(), x.len()))?;
            let expected = if member(m, x) { SimOutcome::Accept } else { SimOutcome::Reject };
            ensure(r.outcome == expected && replay_outcome(m, x, &r.choices) == Some(r.outcome), || {
                format!("{} on length {}: simulated {}", m.name(), x.len(), r.outcome)
            })?;
            ensure(r.violations.is_empty(), || format!("{} audit: {:?}", m.name(), r.violations))?;
            if let Some(s) = r.stats.min_recache_spacing() {
                min_spacing_slack = min_spacing_slack.min(s as i64 - (r.stats.window / 2) as i64);
            }
            runs += 1;
        }
    }
    let gen = |n: usize| anbn.alphabet().parse_word(&format!("{}{}", "0".repeat(n / 2), "1".repeat(n / 2))).unwrap();
    let rows = scaling_report(&anbn, &[16, 32, 64, 128], gen, &opts).map_err(|e| e.to_string())?;
    let spread = ratio_spread(&rows).ok_or("no ratios")?;
    ensure(spread <= 4.0, || format!("ratio spread {spread:.3}"))?;
    let ratios: Vec<String> = rows.iter().map(|r| format!("{:.3}", r.ratio)).collect();
    Ok(format!(
        "{runs} runs agree with replay, audits clean (spacing slack ≥ {min_spacing_slack}); ratios {} spread {spread:.3}",
        ratios.join(",")
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("fixture fidelity", projection_fidelity, Duration::from_secs(1)),
        ("completeness", completeness, Duration::from_secs(10)),
        ("soundness", soundness, Duration::from_secs(120)),
        ("arbitrary error", arbitrary_error, Duration::from_secs(300)),
        ("SYW contrast", syw_contrast, Duration::from_secs(60)),
        ("oracle equivalence", oracle_equivalence, Duration::from_secs(120)),
        ("halting pipeline vs brute force", halting_pipeline, Duration::from_secs(300)),
        ("transform correctness", transform_correctness, Duration::from_secs(300)),
        ("tape simulation", simulation, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        let result = result.and_then(|d| {
            if took <= limit {
                Ok(d)
            } else {
                Err(format!("{d}; took {took:.1?}, limit {limit:?}"))
            }
        });
        match result {
            Ok(d) => println!("criterion {}: PASS {name} ({took:.2?}): {d}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({took:.2?}): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
