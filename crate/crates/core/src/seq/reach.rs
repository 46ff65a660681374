use std::ops::Range;
use std::sync::Arc;

use super::LengthSet;
use crate::group::{Elem, FiniteGroup};
use crate::{Error, Result};

/// Default cap on `states × |G|` for a [`ReachTable`].
pub const DEFAULT_BUDGET: u128 = 1 << 28;

/// Products reachable from every sub-multiset of a sequence.
///
/// States are counts vectors over the distinct terms, packed in mixed radix
/// with the first (smallest) element as the least significant digit. Adding
/// a term that is `>=` every existing term only appends states, so the table
/// can be grown and shrunk as a stack by the enumeration code.
#[derive(Clone)]
pub struct ReachTable {
    group: Arc<FiniteGroup>,
    words: usize,
    elems: Vec<Elem>,
    counts: Vec<usize>,
    strides: Vec<usize>,
    bits: Vec<u64>,
    lens: Vec<u32>,
    max_len: Option<usize>,
    budget: u128,
    scratch: Vec<usize>,
}

impl ReachTable {
    /// Empty table: the single empty state reaches `{1}`. States longer than
    /// `max_len` (when given) are left empty.
    pub fn new(group: Arc<FiniteGroup>, budget: u128, max_len: Option<usize>) -> Self {
        let words = group.order().div_ceil(64);
        let mut bits = vec![0u64; words];
        let id = group.identity();
        bits[id / 64] |= 1 << (id % 64);
        ReachTable {
            group,
            words,
            elems: Vec::new(),
            counts: Vec::new(),
            strides: Vec::new(),
            bits,
            lens: vec![0],
            max_len,
            budget,
            scratch: Vec::new(),
        }
    }

    /// Table for a whole sequence given as terms in any order.
    pub fn from_terms(
        group: Arc<FiniteGroup>,
        terms: &[Elem],
        budget: u128,
        max_len: Option<usize>,
    ) -> Result<Self> {
        let mut sorted = terms.to_vec();
        sorted.sort_unstable();
        let mut table = Self::new(group, budget, max_len);
        for g in sorted {
            table.push(g)?;
        }
        Ok(table)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn num_states(&self) -> usize {
        self.lens.len()
    }

    pub fn len(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Distinct terms with their multiplicities.
    pub fn terms(&self) -> impl Iterator<Item = (Elem, usize)> + '_ {
        self.elems.iter().copied().zip(self.counts.iter().copied())
    }

    pub fn last_elem(&self) -> Option<Elem> {
        self.elems.last().copied()
    }

    /// State indices created by the most recent [`Self::push`].
    pub fn last_block(&self) -> Range<usize> {
        match (self.strides.last(), self.counts.last()) {
            (Some(&stride), Some(&c)) => stride * c..stride * (c + 1),
            _ => 0..1,
        }
    }

    /// Appends one copy of `g`, which must be `>=` every term already present.
    pub fn push(&mut self, g: Elem) -> Result<()> {
        if g >= self.group.order() {
            return Err(Error::InvalidElement {
                elem: g,
                order: self.group.order(),
            });
        }
        match self.elems.last() {
            Some(&last) if last > g => {
                return Err(Error::BadParameter(
                    "terms must be pushed in nondecreasing order".into(),
                ))
            }
            Some(&last) if last == g => *self.counts.last_mut().unwrap() += 1,
            _ => {
                self.elems.push(g);
                self.counts.push(1);
                self.strides.push(self.num_states());
            }
        }
        let block = self.last_block();
        let requested = block.end as u128 * self.group.order() as u128;
        if requested > self.budget {
            self.undo_counts();
            return Err(Error::BudgetExceeded {
                states: requested,
                limit: self.budget,
                lower_bound: None,
            });
        }
        self.bits.resize(block.end * self.words, 0);
        self.lens.resize(block.end, 0);
        self.fill(block);
        Ok(())
    }

    /// Removes the most recently pushed term.
    pub fn pop(&mut self) {
        let block = self.last_block();
        if self.counts.is_empty() {
            return;
        }
        self.undo_counts();
        self.bits.truncate(block.start * self.words);
        self.lens.truncate(block.start);
    }

    fn undo_counts(&mut self) {
        let c = self.counts.last_mut().unwrap();
        *c -= 1;
        if *c == 0 {
            self.counts.pop();
            self.elems.pop();
            self.strides.pop();
        }
    }

    fn fill(&mut self, block: Range<usize>) {
        let r = self.elems.len();
        let words = self.words;
        let mut digits = std::mem::take(&mut self.scratch);
        digits.clear();
        digits.extend((0..r).map(|i| (block.start / self.strides[i]) % (self.counts[i] + 1)));
        for idx in block {
            let len: usize = digits.iter().sum();
            self.lens[idx] = len as u32;
            if self.max_len.is_none_or(|max| len <= max) {
                for i in 0..r {
                    if digits[i] == 0 {
                        continue;
                    }
                    let pred = idx - self.strides[i];
                    let g = self.elems[i];
                    let (head, tail) = self.bits.split_at_mut(idx * words);
                    let src = &head[pred * words..(pred + 1) * words];
                    let dst = &mut tail[..words];
                    for (w, &word) in src.iter().enumerate() {
                        let mut word = word;
                        while word != 0 {
                            let h = w * 64 + word.trailing_zeros() as usize;
                            word &= word - 1;
                            let x = self.group.mul(h, g);
                            dst[x / 64] |= 1 << (x % 64);
                        }
                    }
                }
            }
            // mixed-radix increment
            for i in 0..r {
                digits[i] += 1;
                if digits[i] <= self.counts[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        self.scratch = digits;
    }

    #[inline]
    pub fn state_len(&self, idx: usize) -> usize {
        self.lens[idx] as usize
    }

    #[inline]
    pub fn reaches(&self, idx: usize, g: Elem) -> bool {
        self.bits[idx * self.words + g / 64] >> (g % 64) & 1 == 1
    }

    /// Whether some state in `states` with length in `lengths` reaches `target`.
    pub fn any_reaches(&self, states: Range<usize>, lengths: &LengthSet, target: Elem) -> bool {
        states.into_iter().any(|idx| {
            let len = self.state_len(idx);
            lengths.contains(len) && self.reaches(idx, target)
        })
    }

    pub fn reached(&self, idx: usize) -> Vec<Elem> {
        let words = &self.bits[idx * self.words..(idx + 1) * self.words];
        let mut out = Vec::new();
        for (w, &word) in words.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                out.push(w * 64 + word.trailing_zeros() as usize);
                word &= word - 1;
            }
        }
        out
    }

    /// Index of the state using every term.
    pub fn full_state(&self) -> usize {
        self.num_states() - 1
    }

    pub fn digits(&self, idx: usize) -> Vec<usize> {
        (0..self.elems.len())
            .map(|i| (idx / self.strides[i]) % (self.counts[i] + 1))
            .collect()
    }

    /// Union of the reached sets over states with length in `lengths`.
    pub fn union_over(&self, lengths: &LengthSet) -> Vec<bool> {
        let mut hit = vec![false; self.group.order()];
        for idx in 0..self.num_states() {
            if lengths.contains(self.state_len(idx)) {
                for g in self.reached(idx) {
                    hit[g] = true;
                }
            }
        }
        hit
    }

    /// An ordered sub-multiset with length in `lengths` multiplying to `target`.
    ///
    /// Among admissible states the lexicographically smallest counts vector
    /// (first element first) is chosen; backtracking then peels off the last
    /// factor, always trying the smallest element index first.
    pub fn find(&self, lengths: &LengthSet, target: Elem) -> Option<Vec<Elem>> {
        let mut best: Option<(Vec<usize>, usize)> = None;
        for idx in 0..self.num_states() {
            if !lengths.contains(self.state_len(idx)) || !self.reaches(idx, target) {
                continue;
            }
            let d = self.digits(idx);
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, idx));
            }
        }
        let (_, idx) = best?;
        Some(self.backtrack(idx, target))
    }

    /// Ordered terms of state `idx` whose product is `target` (which must be reached).
    pub fn backtrack(&self, mut idx: usize, mut target: Elem) -> Vec<Elem> {
        let mut rev = Vec::with_capacity(self.state_len(idx));
        let mut digits = self.digits(idx);
        while self.state_len(idx) > 0 {
            let mut stepped = false;
            for i in 0..self.elems.len() {
                if digits[i] == 0 {
                    continue;
                }
                let g = self.elems[i];
                let prev_target = self.group.mul(target, self.group.inv(g));
                let pred = idx - self.strides[i];
                if self.reaches(pred, prev_target) {
                    rev.push(g);
                    digits[i] -= 1;
                    idx = pred;
                    target = prev_target;
                    stepped = true;
                    break;
                }
            }
            assert!(stepped, "reach table is inconsistent");
        }
        rev.reverse();
        rev
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_cyclic, make_semidirect};

    #[test]
    fn push_pop_restores_state() {
        let g = Arc::new(make_semidirect(2, 4, 3).unwrap());
        let mut t = ReachTable::new(g.clone(), DEFAULT_BUDGET, None);
        for x in [1, 1, 2, 5] {
            t.push(x).unwrap();
        }
        let snapshot = (t.bits.clone(), t.lens.clone(), t.num_states());
        t.push(5).unwrap();
        t.push(7).unwrap();
        t.pop();
        t.pop();
        assert_eq!((t.bits.clone(), t.lens.clone(), t.num_states()), snapshot);
        assert!(t.push(3).is_err());
    }

    #[test]
    fn budget_is_enforced() {
        let g = Arc::new(make_cyclic(64).unwrap());
        let mut t = ReachTable::new(g, 64 * 8, None);
        t.push(1).unwrap();
        t.push(2).unwrap();
        t.push(3).unwrap();
        let before = t.num_states();
        assert!(matches!(t.push(4), Err(Error::BudgetExceeded { .. })));
        assert_eq!(t.num_states(), before);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn wide_groups_use_multiple_words() {
        let g = Arc::new(make_cyclic(130).unwrap());
        let t = ReachTable::from_terms(g, &[100, 129, 70], DEFAULT_BUDGET, None).unwrap();
        assert_eq!(t.reached(t.full_state()), vec![(100 + 129 + 70) % 130]);
        assert!(t.find(&LengthSet::Exact(2), (129 + 70) % 130).is_some());
    }
}
