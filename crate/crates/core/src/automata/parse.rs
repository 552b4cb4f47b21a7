//! Reader for the line-oriented `.mhfa` machine format.
//!
//! ```text
//! automaton <name>
//! heads <k>
//! alphabet <sym> <sym> ...
//! states <q> <q> ...
//! initial <q>
//! accept <q>
//! reject <q>
//! trans <q> <s1> ... <sk> -> <q'> <m1> ... <mk>
//! ```
//!
//! `#` starts a comment. `^` and `$` are the end markers, `L` `S` `R` the moves.

use super::alphabet::{HeadMove, TapeAlphabet};
use super::machine::{MultiHeadNfa, StateId, Transition};
use super::MachineError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {error}")]
pub struct ParseError {
    pub line: usize,
    pub error: MachineError,
}

fn at(line: usize) -> impl Fn(MachineError) -> ParseError {
    move |error| ParseError { line, error }
}

pub fn parse_machine(text: &str) -> Result<MultiHeadNfa, ParseError> {
    let mut name = None;
    let mut heads: Option<usize> = None;
    let mut alphabet: Option<TapeAlphabet> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut accept = None;
    let mut reject = None;
    // (line, tokens) of trans lines, resolved once the header is complete
    let mut pending = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&key, rest)) = tokens.split_first() else { continue };
        let syntax = |msg: &str| ParseError { line, error: MachineError::Syntax(msg.to_string()) };
        match key {
            "automaton" => {
                if rest.len() != 1 {
                    return Err(syntax("expected `automaton <name>`"));
                }
                name = Some(rest[0].to_string());
            }
            "heads" => {
                let k = rest
                    .first()
                    .filter(|_| rest.len() == 1)
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| syntax("expected `heads <positive integer>`"))?;
                if k == 0 {
                    return Err(at(line)(MachineError::NoHeads));
                }
                heads = Some(k);
            }
            "alphabet" => {
                alphabet = Some(TapeAlphabet::new(rest.iter().copied()).map_err(at(line))?);
            }
            "states" => {
                if rest.is_empty() {
                    return Err(syntax("expected at least one state"));
                }
                states = Some(rest.iter().map(|s| s.to_string()).collect());
            }
            "initial" | "accept" | "reject" => {
                if rest.len() != 1 {
                    return Err(syntax("expected a single state name"));
                }
                let slot = match key {
                    "initial" => &mut initial,
                    "accept" => &mut accept,
                    _ => &mut reject,
                };
                *slot = Some((line, rest[0].to_string()));
            }
            "trans" => pending.push((line, rest.iter().map(|s| s.to_string()).collect::<Vec<_>>())),
            other => return Err(syntax(&format!("unknown directive `{other}`"))),
        }
    }

    let missing = |what: &str| ParseError {
        line: last_line,
        error: MachineError::Syntax(format!("missing `{what}` line")),
    };
    let name = name.ok_or_else(|| missing("automaton"))?;
    let heads = heads.ok_or_else(|| missing("heads"))?;
    let alphabet = alphabet.ok_or_else(|| missing("alphabet"))?;
    let states = states.ok_or_else(|| missing("states"))?;
    let resolve = |slot: Option<(usize, String)>, what: &str| -> Result<StateId, ParseError> {
        let (line, q) = slot.ok_or_else(|| missing(what))?;
        lookup_state(&states, &q).ok_or(ParseError { line, error: MachineError::UndeclaredState(q) })
    };
    let initial = resolve(initial, "initial")?;
    let accept = resolve(accept, "accept")?;
    let reject = resolve(reject, "reject")?;

    let mut transitions = Vec::with_capacity(pending.len());
    for (line, toks) in pending {
        transitions.push(parse_transition(line, &toks, heads, &alphabet, &states)?);
    }
    MultiHeadNfa::new(name, heads, alphabet, states, initial, accept, reject, transitions).map_err(at(last_line))
}

fn lookup_state(states: &[String], name: &str) -> Option<StateId> {
    states.iter().position(|s| s == name).map(|i| StateId(i as u32))
}

fn parse_transition(
    line: usize,
    toks: &[String],
    heads: usize,
    alphabet: &TapeAlphabet,
    states: &[String],
) -> Result<Transition, ParseError> {
    let err = at(line);
    let arrow = toks
        .iter()
        .position(|t| t == "->")
        .ok_or_else(|| err(MachineError::Syntax("transition without `->`".into())))?;
    let (lhs, rhs) = (&toks[..arrow], &toks[arrow + 1..]);
    if lhs.is_empty() || rhs.is_empty() {
        return Err(err(MachineError::Syntax("transition needs a source and a target state".into())));
    }
    if lhs.len() - 1 != heads || rhs.len() - 1 != heads {
        return Err(err(MachineError::Arity {
            expected: heads,
            found: if lhs.len() - 1 != heads { lhs.len() - 1 } else { rhs.len() - 1 },
        }));
    }
    let from = lookup_state(states, &lhs[0]).ok_or_else(|| err(MachineError::UndeclaredState(lhs[0].clone())))?;
    let to = lookup_state(states, &rhs[0]).ok_or_else(|| err(MachineError::UndeclaredState(rhs[0].clone())))?;
    let read = lhs[1..]
        .iter()
        .map(|t| alphabet.lookup(t).ok_or_else(|| err(MachineError::UnknownSymbol(t.clone()))))
        .collect::<Result<Vec<_>, _>>()?;
    let moves = rhs[1..]
        .iter()
        .map(|t| HeadMove::parse(t).ok_or_else(|| err(MachineError::Syntax(format!("bad move `{t}`")))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Transition { from, read, to, moves })
}
