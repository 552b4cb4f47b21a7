use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{Dyadic, IpsError};
use crate::automata::MultiHeadNfa;
use crate::halting::HeadAnalysis;

/// Heads split into safe and risky lists, each ascending and 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadClassification {
    safe: Vec<usize>,
    risky: Vec<usize>,
}

impl HeadClassification {
    pub fn new(k: usize, mut safe: Vec<usize>, mut risky: Vec<usize>) -> Result<Self, IpsError> {
        safe.sort_unstable();
        risky.sort_unstable();
        let mut all: Vec<usize> = safe.iter().chain(&risky).copied().collect();
        all.sort_unstable();
        if all != (1..=k).collect::<Vec<_>>() {
            return Err(IpsError::Classification(format!(
                "safe {safe:?} and risky {risky:?} must partition 1..={k}"
            )));
        }
        Ok(HeadClassification { safe, risky })
    }

    pub fn from_analyses(analyses: &[HeadAnalysis]) -> Self {
        let (safe, risky): (Vec<&HeadAnalysis>, Vec<&HeadAnalysis>) = analyses.iter().partition(|a| a.safe);
        HeadClassification {
            safe: safe.iter().map(|a| a.head).collect(),
            risky: risky.iter().map(|a| a.head).collect(),
        }
    }

    pub fn safe(&self) -> &[usize] {
        &self.safe
    }

    pub fn risky(&self) -> &[usize] {
        &self.risky
    }

    pub fn heads(&self) -> usize {
        self.safe.len() + self.risky.len()
    }

    fn parse(s: &str) -> Result<Self, String> {
        let mut safe = None;
        let mut risky = None;
        for part in s.split(';') {
            let (key, list) = part.split_once(':').ok_or_else(|| format!("bad head list `{part}`"))?;
            let heads = list
                .split(',')
                .filter(|h| !h.is_empty())
                .map(|h| h.parse::<usize>().map_err(|_| format!("bad head `{h}`")))
                .collect::<Result<Vec<_>, _>>()?;
            match key {
                "safe" => safe = Some(heads),
                "risky" => risky = Some(heads),
                _ => return Err(format!("unknown head class `{key}`")),
            }
        }
        let safe = safe.unwrap_or_default();
        let risky = risky.unwrap_or_default();
        let k = safe.len() + risky.len();
        HeadClassification::new(k, safe, risky).map_err(|e| e.to_string())
    }
}

impl fmt::Display for HeadClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        write!(f, "safe:{};risky:{}", list(&self.safe), list(&self.risky))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Biased choice: risky heads get total weight w.
    Gb,
    /// Uniform choice over all heads.
    Syw,
    /// Uniform choice after an up-front rejection coin toss.
    Sys,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        match s.to_ascii_uppercase().as_str() {
            "GB" => Some(Mode::Gb),
            "SYW" => Some(Mode::Syw),
            "SYS" => Some(Mode::Sys),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Gb => "GB",
            Mode::Syw => "SYW",
            Mode::Sys => "SYS",
        })
    }
}

/// SYS up-front test: toss `bits` coins and reject when their value is
/// below `threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SysReject {
    pub threshold: u64,
    pub bits: u32,
    /// False when `threshold / 2^bits` only approximates (k-1)/2k.
    pub exact: bool,
}

impl SysReject {
    pub fn probability(&self) -> BigRational {
        BigRational::new(BigInt::from(self.threshold), BigInt::one() << self.bits)
    }
}

#[derive(Clone, Debug)]
pub struct VerifierSpec {
    pub machine: MultiHeadNfa,
    pub heads: HeadClassification,
    pub mode: Mode,
    pub rounds: usize,
    /// Risky weight; zero outside GB mode.
    pub w: Dyadic,
    pub sys: Option<SysReject>,
}

/// ⌈log2 k⌉, the coins needed to pick one of k heads.
pub(crate) fn selection_bits(k: usize) -> u32 {
    k.next_power_of_two().trailing_zeros()
}

/// How many of the values 0..2^bits are congruent to j modulo m.
fn residue_count(bits: u32, m: usize, j: usize) -> u64 {
    let total = 1u64 << bits;
    (total - 1 - j as u64) / m as u64 + 1
}

/// Selection probability of each head (index h-1) for a GB verifier.
pub fn gb_distribution(class: &HeadClassification, w: Dyadic) -> Vec<BigRational> {
    let k = class.heads();
    let sb = selection_bits(k);
    let scale = BigInt::one() << sb;
    let mut out = vec![BigRational::zero(); k];
    let w = w.to_ratio();
    let rest = BigRational::one() - &w;
    for (list, mass) in [(&class.risky, &w), (&class.safe, &rest)] {
        if list.is_empty() {
            continue;
        }
        for (j, &h) in list.iter().enumerate() {
            let share = BigRational::new(BigInt::from(residue_count(sb, list.len(), j)), scale.clone());
            out[h - 1] = mass * share;
        }
    }
    out
}

impl VerifierSpec {
    pub fn k(&self) -> usize {
        self.machine.heads()
    }

    pub fn selection_bits(&self) -> u32 {
        selection_bits(self.k())
    }

    pub fn coins_per_round(&self) -> usize {
        let sb = self.selection_bits() as usize;
        match self.mode {
            Mode::Gb => self.w.bits() as usize + sb,
            Mode::Syw | Mode::Sys => sb,
        }
    }

    pub fn upfront_coins(&self) -> usize {
        self.sys.map_or(0, |s| s.bits as usize)
    }

    /// Worst-case coins over a whole run.
    pub fn coin_budget(&self) -> usize {
        self.upfront_coins() + self.rounds * self.coins_per_round()
    }

    /// Head (1-based) chosen by risky-test value `t` and selector `u`.
    pub fn select(&self, t: u64, u: u64) -> usize {
        let pick = |list: &[usize]| list[(u % list.len() as u64) as usize];
        match self.mode {
            Mode::Gb if t < self.w.num() => pick(&self.heads.risky),
            Mode::Gb => pick(&self.heads.safe),
            Mode::Syw | Mode::Sys => (u % self.k() as u64) as usize + 1,
        }
    }

    /// Per-round selection probability of each head (index h-1).
    pub fn head_distribution(&self) -> Vec<BigRational> {
        match self.mode {
            Mode::Gb => gb_distribution(&self.heads, self.w),
            Mode::Syw | Mode::Sys => {
                let all = HeadClassification {
                    safe: (1..=self.k()).collect(),
                    risky: Vec::new(),
                };
                gb_distribution(&all, Dyadic::ZERO)
            }
        }
    }

    /// p: the least selection probability of any head.
    pub fn detection_floor(&self) -> BigRational {
        self.head_distribution().into_iter().min().unwrap_or_else(BigRational::zero)
    }

    pub fn upfront_reject(&self) -> BigRational {
        self.sys.map_or_else(BigRational::zero, |s| s.probability())
    }

    /// `verifier mode=.. rounds=.. w=.. heads=..` line.
    pub fn block(&self) -> String {
        let mut s = format!("verifier mode={} rounds={}", self.mode, self.rounds);
        if self.mode == Mode::Gb {
            s.push_str(&format!(" w={}", self.w));
        }
        s.push_str(&format!(" heads={}", self.heads));
        if matches!(self.sys, Some(SysReject { exact: false, .. })) {
            s.push_str(" sys=approx");
        }
        s
    }
}

/// Builds a verifier for `m`. The classification is taken as given; use
/// [`HeadClassification::from_analyses`] on the halting analysis to derive it.
/// `allow_sys_approx` lets SYS mode round a non-dyadic up-front rejection
/// probability to the nearest multiple of 2^-(⌈log2 k⌉+1).
pub fn build_verifier(
    m: &MultiHeadNfa,
    heads: HeadClassification,
    mode: Mode,
    rounds: usize,
    w: Dyadic,
    allow_sys_approx: bool,
) -> Result<VerifierSpec, IpsError> {
    let k = m.heads();
    if heads.heads() != k {
        return Err(IpsError::Classification(format!("{} heads classified, machine has {k}", heads.heads())));
    }
    if rounds == 0 {
        return Err(IpsError::NoRounds);
    }
    let mut w = w;
    let mut sys = None;
    match mode {
        Mode::Gb => {
            if heads.safe.is_empty() {
                return Err(IpsError::NoSafeHeads);
            }
            if w.is_zero() != heads.risky.is_empty() {
                return Err(IpsError::WeightMismatch);
            }
        }
        Mode::Syw => w = Dyadic::ZERO,
        Mode::Sys => {
            w = Dyadic::ZERO;
            let bits = selection_bits(k) + 1;
            // (k-1)/2k scaled by 2^bits, rounded to nearest
            let (num, den) = (((k - 1) as u64) << bits, 2 * k as u64);
            let exact = num % den == 0;
            if !exact && !allow_sys_approx {
                return Err(IpsError::SysNotDyadic { k });
            }
            sys = Some(SysReject {
                threshold: (2 * num + den) / (2 * den),
                bits,
                exact,
            });
        }
    }
    Ok(VerifierSpec {
        machine: m.clone(),
        heads,
        mode,
        rounds,
        w,
        sys,
    })
}

/// Reads a `verifier ...` line for machine `m`.
pub fn parse_verifier_block(text: &str, m: &MultiHeadNfa) -> Result<VerifierSpec, IpsError> {
    let (line_no, line) = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .find(|(_, l)| !l.is_empty())
        .ok_or(IpsError::Parse { line: 1, message: "empty verifier block".into() })?;
    let err = |message: String| IpsError::Parse { line: line_no, message };
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("verifier") {
        return Err(err("expected `verifier`".into()));
    }
    let (mut mode, mut rounds, mut w, mut heads, mut approx) = (None, None, Dyadic::ZERO, None, false);
    for tok in tokens {
        let (key, value) = tok.split_once('=').ok_or_else(|| err(format!("expected key=value, found `{tok}`")))?;
        match key {
            "mode" => mode = Some(Mode::parse(value).ok_or_else(|| err(format!("unknown mode `{value}`")))?),
            "rounds" => rounds = Some(value.parse::<usize>().map_err(|_| err(format!("bad round count `{value}`")))?),
            "w" => w = Dyadic::parse(value).map_err(|e| err(e.to_string()))?,
            "heads" => heads = Some(HeadClassification::parse(value).map_err(err)?),
            "sys" if value == "approx" => approx = true,
            _ => return Err(err(format!("unknown field `{tok}`"))),
        }
    }
    let mode = mode.ok_or_else(|| err("missing mode".into()))?;
    let rounds = rounds.ok_or_else(|| err("missing rounds".into()))?;
    let heads = heads.ok_or_else(|| err("missing heads".into()))?;
    build_verifier(m, heads, mode, rounds, w, approx)
}
