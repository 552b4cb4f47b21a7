//! Certificates and the `.cert` format:
//!
//! ```text
//! certificate
//! prefix
//! rec <s1> .. <sk> <q'> <m1> .. <mk>
//! cycle
//! rec ...
//! ```

use super::IpsError;
use crate::automata::{accepts, HeadMove, MultiHeadNfa, StateId, Symbol, Verdict, DEFAULT_NODE_BUDGET};

/// One claimed step: what each head reads, the next state, each head's move.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Record {
    pub read: Vec<Symbol>,
    pub to: StateId,
    pub moves: Vec<HeadMove>,
}

/// The stream `prefix · cycle^ω`, or just `prefix` when the cycle is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Certificate {
    pub prefix: Vec<Record>,
    pub cycle: Vec<Record>,
}

impl Certificate {
    /// Record at stream index `s`, with its cycle offset when it lies in the
    /// repeated part; `None` past the end of a finite certificate.
    pub fn record_at(&self, s: usize) -> Option<(&Record, Option<usize>)> {
        if s < self.prefix.len() {
            return Some((&self.prefix[s], None));
        }
        if self.cycle.is_empty() {
            return None;
        }
        let c = (s - self.prefix.len()) % self.cycle.len();
        Some((&self.cycle[c], Some(c)))
    }

    /// The same stream with the shortest prefix and a primitive cycle.
    pub fn normalized(mut self) -> Certificate {
        let n = self.cycle.len();
        if let Some(period) = (1..=n).find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.cycle[i] == self.cycle[i - p])) {
            self.cycle.truncate(period);
        }
        while !self.cycle.is_empty() && self.prefix.last() == self.cycle.last() {
            self.prefix.pop();
            self.cycle.rotate_right(1);
        }
        self
    }

    pub fn render(&self, m: &MultiHeadNfa) -> String {
        let mut out = String::from("certificate\nprefix\n");
        let rec = |r: &Record| {
            let mut parts = vec!["rec".to_string()];
            parts.extend(r.read.iter().map(|&s| m.alphabet().token(s).to_string()));
            parts.push(m.state_name(r.to).to_string());
            parts.extend(r.moves.iter().map(|mv| mv.token().to_string()));
            parts.join(" ") + "\n"
        };
        for r in &self.prefix {
            out.push_str(&rec(r));
        }
        if !self.cycle.is_empty() {
            out.push_str("cycle\n");
            for r in &self.cycle {
                out.push_str(&rec(r));
            }
        }
        out
    }
}

pub fn parse_certificate(text: &str, m: &MultiHeadNfa) -> Result<Certificate, IpsError> {
    let k = m.heads();
    let mut cert = Certificate::default();
    let mut header = false;
    let mut in_cycle = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| IpsError::Parse { line, message };
        let tokens: Vec<&str> = raw.split('#').next().unwrap_or("").split_whitespace().collect();
        let Some((&key, rest)) = tokens.split_first() else { continue };
        match key {
            "certificate" if !header && rest.is_empty() => header = true,
            _ if !header => return Err(err("expected `certificate`".into())),
            "prefix" if rest.is_empty() && in_cycle.is_none() => in_cycle = Some(false),
            "cycle" if rest.is_empty() && in_cycle != Some(true) => in_cycle = Some(true),
            "rec" => {
                let Some(cycle) = in_cycle else { return Err(err("record before `prefix` or `cycle`".into())) };
                if rest.len() != 2 * k + 1 {
                    return Err(err(format!("expected {} fields after `rec`, found {}", 2 * k + 1, rest.len())));
                }
                let read = rest[..k]
                    .iter()
                    .map(|t| m.alphabet().lookup(t).ok_or_else(|| err(format!("unknown symbol `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let to = m.state_id(rest[k]).ok_or_else(|| err(format!("undeclared state `{}`", rest[k])))?;
                let moves = rest[k + 1..]
                    .iter()
                    .map(|t| HeadMove::parse(t).ok_or_else(|| err(format!("bad move `{t}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                let r = Record { read, to, moves };
                if cycle { cert.cycle.push(r) } else { cert.prefix.push(r) }
            }
            other => return Err(err(format!("unexpected `{other}`"))),
        }
    }
    if !header {
        return Err(IpsError::Parse { line: 1, message: "expected `certificate`".into() });
    }
    Ok(cert)
}

/// The shortest accepting path of `m` on `x` as records, once per round.
pub fn honest_certificate(m: &MultiHeadNfa, x: &[Symbol], rounds: usize) -> Result<Option<Certificate>, IpsError> {
    honest_certificate_with_budget(m, x, rounds, DEFAULT_NODE_BUDGET)
}

pub fn honest_certificate_with_budget(
    m: &MultiHeadNfa,
    x: &[Symbol],
    rounds: usize,
    budget: usize,
) -> Result<Option<Certificate>, IpsError> {
    let r = accepts(m, x, budget)?;
    if r.verdict != Verdict::Member {
        return Ok(None);
    }
    let round: Vec<Record> = r
        .accepting_path
        .unwrap_or_default()
        .iter()
        .map(|step| {
            let t = m.transition(step.transition);
            Record {
                read: t.read.clone(),
                to: t.to,
                moves: t.moves.clone(),
            }
        })
        .collect();
    Ok(Some(Certificate {
        prefix: repeat_rounds(&round, rounds),
        cycle: Vec::new(),
    }))
}

pub(crate) fn repeat_rounds(round: &[Record], rounds: usize) -> Vec<Record> {
    std::iter::repeat_n(round, rounds).flatten().cloned().collect()
}
