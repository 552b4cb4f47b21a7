use std::collections::HashMap;
use std::fmt;

use super::MachineError;

/// Reserved token for the left end marker.
pub const LEFT_MARKER: &str = "^";
/// Reserved token for the right end marker.
pub const RIGHT_MARKER: &str = "$";

/// A tape symbol, indexed into a [`TapeAlphabet`].
///
/// Index 0 is the left end marker, index 1 the right end marker, and input
/// symbols follow in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub u16);

impl Symbol {
    pub const LEFT: Symbol = Symbol(0);
    pub const RIGHT: Symbol = Symbol(1);

    pub fn is_marker(self) -> bool {
        self.0 < 2
    }

    /// Position of an input symbol within the input alphabet.
    pub fn input_index(self) -> Option<usize> {
        (self.0 >= 2).then(|| self.0 as usize - 2)
    }

    pub fn from_input_index(i: usize) -> Symbol {
        Symbol(i as u16 + 2)
    }
}

/// Input symbols plus the two end markers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeAlphabet {
    symbols: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl TapeAlphabet {
    pub fn new<I, S>(symbols: I) -> Result<Self, MachineError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut lookup = HashMap::new();
        lookup.insert(LEFT_MARKER.to_string(), Symbol::LEFT);
        lookup.insert(RIGHT_MARKER.to_string(), Symbol::RIGHT);
        let mut out = Vec::new();
        for s in symbols {
            let s: String = s.into();
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                return Err(MachineError::BadToken(s));
            }
            if s == LEFT_MARKER || s == RIGHT_MARKER {
                return Err(MachineError::ReservedSymbol(s));
            }
            if lookup.contains_key(&s) {
                return Err(MachineError::DuplicateSymbol(s));
            }
            lookup.insert(s.clone(), Symbol::from_input_index(out.len()));
            out.push(s);
        }
        Ok(TapeAlphabet { symbols: out, lookup })
    }

    pub fn input_len(&self) -> usize {
        self.symbols.len()
    }

    pub fn input_tokens(&self) -> &[String] {
        &self.symbols
    }

    pub fn input_symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.symbols.len()).map(Symbol::from_input_index)
    }

    /// Every tape symbol: left marker, right marker, then input symbols.
    pub fn tape_symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        [Symbol::LEFT, Symbol::RIGHT].into_iter().chain(self.input_symbols())
    }

    pub fn tape_len(&self) -> usize {
        self.symbols.len() + 2
    }

    pub fn lookup(&self, token: &str) -> Option<Symbol> {
        self.lookup.get(token).copied()
    }

    pub fn token(&self, s: Symbol) -> &str {
        match s {
            Symbol::LEFT => LEFT_MARKER,
            Symbol::RIGHT => RIGHT_MARKER,
            other => &self.symbols[other.input_index().unwrap()],
        }
    }

    fn single_char(&self) -> bool {
        self.symbols.iter().all(|s| s.chars().count() == 1)
    }

    /// Parses an input word. Whitespace-separated tokens are always accepted;
    /// when every input symbol is a single character an unseparated string is
    /// split per character.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Symbol>, MachineError> {
        let text = text.trim();
        let tokens: Vec<String> = if text.chars().any(char::is_whitespace) || !self.single_char() {
            text.split_whitespace().map(str::to_string).collect()
        } else {
            text.chars().map(String::from).collect()
        };
        tokens
            .into_iter()
            .map(|t| match self.lookup(&t) {
                Some(s) if !s.is_marker() => Ok(s),
                _ => Err(MachineError::UnknownSymbol(t)),
            })
            .collect()
    }

    pub fn render_word(&self, word: &[Symbol]) -> String {
        let sep = if self.single_char() { "" } else { " " };
        word.iter().map(|&s| self.token(s)).collect::<Vec<_>>().join(sep)
    }

    /// All input words of length at most `max_len`, shortest first, then
    /// lexicographically in declaration order.
    pub fn words_up_to(&self, max_len: usize) -> Words {
        Words {
            base: self.symbols.len(),
            max_len,
            current: Some(Vec::new()),
        }
    }
}

/// Iterator returned by [`TapeAlphabet::words_up_to`].
pub struct Words {
    base: usize,
    max_len: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Words {
    type Item = Vec<Symbol>;

    fn next(&mut self) -> Option<Vec<Symbol>> {
        let cur = self.current.take()?;
        let out = cur.iter().map(|&i| Symbol::from_input_index(i)).collect();
        // odometer increment, growing the length when it wraps
        let mut next = cur;
        let mut i = next.len();
        loop {
            if i == 0 {
                if next.len() < self.max_len && self.base > 0 {
                    next = vec![0; next.len() + 1];
                    self.current = Some(next);
                }
                break;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < self.base {
                self.current = Some(next);
                break;
            }
            next[i] = 0;
        }
        Some(out)
    }
}

/// One of the three head movements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HeadMove {
    Left,
    Stay,
    Right,
}

impl HeadMove {
    pub const ALL: [HeadMove; 3] = [HeadMove::Left, HeadMove::Stay, HeadMove::Right];

    pub fn token(self) -> &'static str {
        match self {
            HeadMove::Left => "L",
            HeadMove::Stay => "S",
            HeadMove::Right => "R",
        }
    }

    pub fn parse(token: &str) -> Option<HeadMove> {
        match token {
            "L" => Some(HeadMove::Left),
            "S" => Some(HeadMove::Stay),
            "R" => Some(HeadMove::Right),
            _ => None,
        }
    }

    /// Applies the move to `pos` on a tape whose last cell is `last`
    /// (the right marker). Overruns past either marker leave the head put.
    pub fn apply(self, pos: u32, last: u32) -> u32 {
        match self {
            HeadMove::Left => pos.saturating_sub(1),
            HeadMove::Stay => pos,
            HeadMove::Right => {
                if pos >= last {
                    last
                } else {
                    pos + 1
                }
            }
        }
    }
}

impl fmt::Display for HeadMove {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// The read-only tape `^ x $` for an input word.
#[derive(Clone, Copy, Debug)]
pub struct Tape<'a> {
    word: &'a [Symbol],
}

impl<'a> Tape<'a> {
    pub fn new(word: &'a [Symbol]) -> Self {
        Tape { word }
    }

    pub fn input_len(&self) -> usize {
        self.word.len()
    }

    /// Position of the right end marker.
    pub fn last(&self) -> u32 {
        self.word.len() as u32 + 1
    }

    pub fn at(&self, pos: u32) -> Symbol {
        if pos == 0 {
            Symbol::LEFT
        } else if pos as usize > self.word.len() {
            Symbol::RIGHT
        } else {
            self.word[pos as usize - 1]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reserved_and_blank_tokens() {
        assert!(matches!(TapeAlphabet::new(["^"]), Err(MachineError::ReservedSymbol(_))));
        assert!(matches!(TapeAlphabet::new(["a b"]), Err(MachineError::BadToken(_))));
        assert!(matches!(TapeAlphabet::new([""]), Err(MachineError::BadToken(_))));
        assert!(matches!(TapeAlphabet::new(["a", "a"]), Err(MachineError::DuplicateSymbol(_))));
    }

    #[test]
    fn word_enumeration_is_length_lex() {
        let a = TapeAlphabet::new(["0", "1"]).unwrap();
        let words: Vec<String> = a.words_up_to(2).map(|w| a.render_word(&w)).collect();
        assert_eq!(words, ["", "0", "1", "00", "01", "10", "11"]);
        assert_eq!(a.words_up_to(8).count(), 511);
    }

    #[test]
    fn parse_word_splits_chars_or_tokens() {
        let a = TapeAlphabet::new(["0", "1"]).unwrap();
        assert_eq!(a.parse_word("0011").unwrap().len(), 4);
        assert_eq!(a.parse_word("0 0 1").unwrap().len(), 3);
        assert!(a.parse_word("012").is_err());
        let b = TapeAlphabet::new(["ab", "c"]).unwrap();
        assert_eq!(b.parse_word("ab c ab").unwrap().len(), 3);
        assert_eq!(b.render_word(&b.parse_word("ab c").unwrap()), "ab c");
    }

    #[test]
    fn clamped_moves() {
        assert_eq!(HeadMove::Left.apply(0, 5), 0);
        assert_eq!(HeadMove::Right.apply(5, 5), 5);
        assert_eq!(HeadMove::Right.apply(2, 5), 3);
        assert!(HeadMove::Left < HeadMove::Stay && HeadMove::Stay < HeadMove::Right);
    }
}
