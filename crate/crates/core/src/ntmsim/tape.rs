use crate::automata::Symbol;

/// Contents of one cache cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheCell {
    Delimiter,
    Blank,
    Input(Symbol),
}

/// The simulator's work tape: per head a binary counter track (least
/// significant digit in cell 0) and a cache track `# c1 .. c_{W+2} #` with
/// one marked cell, plus a track holding the middle mark. All tracks start
/// at cell 0 and share one work head.
#[derive(Clone, Debug)]
pub struct TrackedTape {
    pub(super) window: usize,
    pub(super) counters: Vec<Vec<bool>>,
    pub(super) caches: Vec<Vec<CacheCell>>,
    pub(super) marked: Vec<Vec<bool>>,
    pub(super) middle: Vec<bool>,
    pub(super) work: usize,
    pub(super) input: u32,
}

impl TrackedTape {
    pub(super) fn new(heads: usize, window: usize, counter_width: usize) -> Self {
        let len = window + 4;
        TrackedTape {
            window,
            counters: vec![vec![false; counter_width]; heads],
            caches: vec![vec![CacheCell::Blank; len]; heads],
            marked: vec![vec![false; len]; heads],
            middle: vec![false; len.max(counter_width)],
            work: 0,
            input: 0,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Cell of the middle mark.
    pub fn middle_cell(&self) -> usize {
        self.window / 2 + 1
    }

    /// Last cell of each cache (its right delimiter).
    pub fn right_end(&self) -> usize {
        self.window + 3
    }

    pub fn cells_used(&self) -> usize {
        self.middle.len()
    }

    pub fn counter_value(&self, i: usize) -> u64 {
        self.counters[i].iter().rev().fold(0, |acc, &b| acc << 1 | b as u64)
    }

    pub fn cache(&self, i: usize) -> &[CacheCell] {
        &self.caches[i]
    }

    /// Marked cells of cache `i`.
    pub fn marks(&self, i: usize) -> Vec<usize> {
        self.marked[i].iter().enumerate().filter(|(_, &m)| m).map(|(c, _)| c).collect()
    }

    pub fn middle_marks(&self) -> Vec<usize> {
        self.middle.iter().enumerate().filter(|(_, &m)| m).map(|(c, _)| c).collect()
    }

    /// Moves the work head to `cell`, returning the moves made.
    pub(super) fn goto(&mut self, cell: usize) -> u64 {
        let d = self.work.abs_diff(cell) as u64;
        self.work = cell;
        d
    }

    /// Adds one to counter `i`; the head walks out to the first 0 digit and
    /// back to cell 0.
    pub(super) fn increment(&mut self, i: usize) -> u64 {
        let mut cost = self.goto(0);
        let c = &mut self.counters[i];
        let j = c.iter().position(|&b| !b).expect("counter overflow");
        c[..j].iter_mut().for_each(|b| *b = false);
        c[j] = true;
        cost += 2 * j as u64;
        cost
    }

    /// Subtracts one from a nonzero counter `i`.
    pub(super) fn decrement(&mut self, i: usize) -> u64 {
        let mut cost = self.goto(0);
        let c = &mut self.counters[i];
        let j = c.iter().position(|&b| b).expect("counter underflow");
        c[..j].iter_mut().for_each(|b| *b = true);
        c[j] = false;
        cost += 2 * j as u64;
        cost
    }
}
