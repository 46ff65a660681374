//! Sequences over a finite group and their product sets.

mod io;
mod reach;

pub use io::{
    parse_sequence, read_sequence, render_sequence, witness_from_json, witness_to_json,
    write_sequence, WitnessJson,
};
pub use reach::{ReachTable, DEFAULT_BUDGET};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::group::{Elem, FiniteGroup, Homomorphism};
use crate::{Error, Result};

/// An unordered sequence (multiset) of group elements.
#[derive(Clone, Debug)]
pub struct Sequence {
    group: Arc<FiniteGroup>,
    counts: BTreeMap<Elem, usize>,
    len: usize,
}

impl PartialEq for Sequence {
    fn eq(&self, other: &Self) -> bool {
        self.counts == other.counts && *self.group == *other.group
    }
}

impl Sequence {
    pub fn new(group: Arc<FiniteGroup>) -> Self {
        Sequence {
            group,
            counts: BTreeMap::new(),
            len: 0,
        }
    }

    pub fn from_terms(
        group: Arc<FiniteGroup>,
        terms: impl IntoIterator<Item = Elem>,
    ) -> Result<Self> {
        let mut s = Self::new(group);
        for g in terms {
            s.push(g, 1)?;
        }
        Ok(s)
    }

    pub fn from_counts(
        group: Arc<FiniteGroup>,
        counts: impl IntoIterator<Item = (Elem, usize)>,
    ) -> Result<Self> {
        let mut s = Self::new(group);
        for (g, k) in counts {
            s.push(g, k)?;
        }
        Ok(s)
    }

    /// Adds `g^[k]`.
    pub fn push(&mut self, g: Elem, k: usize) -> Result<()> {
        if !self.group.contains(g) {
            return Err(Error::InvalidElement {
                elem: g,
                order: self.group.order(),
            });
        }
        if k > 0 {
            *self.counts.entry(g).or_default() += k;
            self.len += k;
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn counts(&self) -> &BTreeMap<Elem, usize> {
        &self.counts
    }

    pub fn multiplicity(&self, g: Elem) -> usize {
        self.counts.get(&g).copied().unwrap_or(0)
    }

    /// Terms in canonical (nondecreasing index) order.
    pub fn terms(&self) -> Vec<Elem> {
        self.counts
            .iter()
            .flat_map(|(&g, &k)| std::iter::repeat_n(g, k))
            .collect()
    }

    /// Whether the multiset of `terms` fits inside this sequence.
    pub fn contains_terms(&self, terms: &[Elem]) -> bool {
        let mut need: BTreeMap<Elem, usize> = BTreeMap::new();
        for &g in terms {
            *need.entry(g).or_default() += 1;
        }
        need.iter().all(|(g, &k)| self.multiplicity(*g) >= k)
    }

    pub fn is_subsequence_of(&self, other: &Sequence) -> bool {
        self.counts
            .iter()
            .all(|(g, &k)| other.multiplicity(*g) >= k)
    }

    /// This sequence with one copy of each of `terms` removed.
    pub fn without(&self, terms: &[Elem]) -> Result<Sequence> {
        let mut out = self.clone();
        for &g in terms {
            match out.counts.get_mut(&g) {
                Some(k) if *k > 1 => *k -= 1,
                Some(_) => {
                    out.counts.remove(&g);
                }
                None => return Err(Error::BadParameter(format!("term {g} not present"))),
            }
            out.len -= 1;
        }
        Ok(out)
    }

    /// `S·T`.
    pub fn concat(&self, other: &Sequence) -> Result<Sequence> {
        let mut out = self.clone();
        for (&g, &k) in &other.counts {
            out.push(g, k)?;
        }
        Ok(out)
    }

    /// The first `n` terms in canonical order.
    pub fn prefix(&self, n: usize) -> Sequence {
        Sequence::from_terms(self.group.clone(), self.terms().into_iter().take(n)).unwrap()
    }

    /// Image of the sequence under a homomorphism out of its group.
    pub fn map(&self, hom: &Homomorphism) -> Sequence {
        let mut out = Sequence::new(hom.codomain().clone());
        for (&g, &k) in &self.counts {
            out.push(hom.apply(g), k).unwrap();
        }
        out
    }

    pub fn reach_table(&self, max_len: Option<usize>) -> Result<ReachTable> {
        ReachTable::from_terms(self.group.clone(), &self.terms(), DEFAULT_BUDGET, max_len)
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.counts.is_empty() {
            return f.write_str("∅");
        }
        let parts: Vec<String> = self
            .counts
            .iter()
            .map(|(g, k)| format!("{g}^[{k}]"))
            .collect();
        f.write_str(&parts.join("·"))
    }
}

/// Admissible lengths for a product-one subsequence. Zero is never admissible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LengthSet {
    Exact(usize),
    /// Closed interval `[lo, hi]`.
    Interval(usize, usize),
    /// Positive multiples of `d`.
    Multiples(usize),
    /// Every positive length.
    Any,
}

impl LengthSet {
    pub fn contains(&self, len: usize) -> bool {
        len >= 1
            && match *self {
                LengthSet::Exact(l) => len == l,
                LengthSet::Interval(lo, hi) => lo <= len && len <= hi,
                LengthSet::Multiples(d) => d > 0 && len.is_multiple_of(d),
                LengthSet::Any => true,
            }
    }

    /// Largest admissible length, if bounded.
    pub fn max_len(&self) -> Option<usize> {
        match *self {
            LengthSet::Exact(l) => Some(l),
            LengthSet::Interval(_, hi) => Some(hi),
            LengthSet::Multiples(_) | LengthSet::Any => None,
        }
    }
}

impl fmt::Display for LengthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthSet::Exact(l) => write!(f, "{{{l}}}"),
            LengthSet::Interval(lo, hi) => write!(f, "[{lo},{hi}]"),
            LengthSet::Multiples(d) => write!(f, "{d}N"),
            LengthSet::Any => f.write_str("N"),
        }
    }
}

impl FromStr for LengthSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str, pos: usize| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(pos, format!("expected an integer, got {t:?}")))
        };
        if s == "N" {
            Ok(LengthSet::Any)
        } else if let Some(inner) = s.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
            Ok(LengthSet::Exact(num(inner, 1)?))
        } else if let Some(inner) = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let (lo, hi) = inner
                .split_once(',')
                .ok_or_else(|| Error::parse(1, "interval needs `lo,hi`"))?;
            Ok(LengthSet::Interval(num(lo, 1)?, num(hi, lo.len() + 2)?))
        } else if let Some(d) = s.strip_suffix('N') {
            let d = num(d, 0)?;
            if d == 0 {
                return Err(Error::parse(0, "modulus must be positive"));
            }
            Ok(LengthSet::Multiples(d))
        } else {
            Err(Error::parse(0, format!("unrecognized length set {s:?}")))
        }
    }
}

/// An ordered list of terms certifying a product with a claimed length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub ordered: Vec<Elem>,
    pub product: Elem,
    pub length: usize,
}

impl Witness {
    pub fn new(group: &FiniteGroup, ordered: Vec<Elem>) -> Self {
        let product = group.product(ordered.iter().copied());
        let length = ordered.len();
        Witness {
            ordered,
            product,
            length,
        }
    }
}

/// `true` iff the witness terms form a sub-multiset of `seq`, have the claimed
/// length, and multiply left to right to the claimed product.
pub fn verify_witness(seq: &Sequence, w: &Witness) -> bool {
    let group = seq.group();
    w.ordered.len() == w.length
        && w.ordered.iter().all(|&g| group.contains(g))
        && group.contains(w.product)
        && seq.contains_terms(&w.ordered)
        && group.product(w.ordered.iter().copied()) == w.product
}

fn to_set(hit: Vec<bool>) -> BTreeSet<Elem> {
    hit.into_iter()
        .enumerate()
        .filter(|&(_, h)| h)
        .map(|(g, _)| g)
        .collect()
}

/// `π(S)`: all products of orderings of `S` (`{1}` for the empty sequence).
pub fn pi(seq: &Sequence) -> Result<BTreeSet<Elem>> {
    let t = seq.reach_table(None)?;
    Ok(t.reached(t.full_state()).into_iter().collect())
}

/// `Π(S)`: products of all non-empty subsequences.
pub fn big_pi(seq: &Sequence) -> Result<BTreeSet<Elem>> {
    let t = seq.reach_table(None)?;
    Ok(to_set(t.union_over(&LengthSet::Any)))
}

/// `Π_k(S)`: products of all subsequences of length `k`.
pub fn big_pi_k(seq: &Sequence, k: usize) -> Result<BTreeSet<Elem>> {
    let t = seq.reach_table(Some(k))?;
    Ok(to_set(t.union_over(&LengthSet::Exact(k))))
}

pub fn is_product_one(seq: &Sequence) -> Result<bool> {
    Ok(pi(seq)?.contains(&seq.group().identity()))
}

pub fn is_product_one_free(seq: &Sequence) -> Result<bool> {
    Ok(find_product_one_subsequence(seq, &LengthSet::Any)?.is_none())
}

/// A product-one subsequence with admissible length, or `None` if none exists.
pub fn find_product_one_subsequence(
    seq: &Sequence,
    lengths: &LengthSet,
) -> Result<Option<Witness>> {
    find_subsequence_with_product(seq, lengths, seq.group().identity())
}

/// Subsequence with admissible length and some ordering multiplying to `target`.
pub fn find_subsequence_with_product(
    seq: &Sequence,
    lengths: &LengthSet,
    target: Elem,
) -> Result<Option<Witness>> {
    let t = seq.reach_table(lengths.max_len())?;
    Ok(t.find(lengths, target).map(|ordered| Witness {
        length: ordered.len(),
        ordered,
        product: target,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{make_cyclic, make_product, make_semidirect};

    fn d8() -> Arc<FiniteGroup> {
        Arc::new(make_semidirect(2, 4, 3).unwrap())
    }

    // a = index of a^1 = 2, b = index of b = 1 in the i·m + j encoding with m = 2.
    const A: Elem = 2;
    const B: Elem = 1;

    #[test]
    fn inverse_pair_has_trivial_pi() {
        let g = d8();
        for x in g.elements() {
            let s = Sequence::from_terms(g.clone(), [x, g.inv(x)]).unwrap();
            assert_eq!(pi(&s).unwrap(), BTreeSet::from([g.identity()]));
        }
    }

    #[test]
    fn pi_of_ab_in_d8() {
        let g = d8();
        let s = Sequence::from_terms(g.clone(), [A, B]).unwrap();
        let expect = BTreeSet::from([g.mul(A, B), g.mul(B, A)]);
        assert_eq!(expect.len(), 2);
        assert_eq!(pi(&s).unwrap(), expect);
    }

    #[test]
    fn pi_k_structure_in_c3() {
        let g = Arc::new(make_cyclic(3).unwrap());
        let s = Sequence::from_counts(g.clone(), [(1, 2), (2, 5)]).unwrap();
        assert_eq!(big_pi_k(&s, 4).unwrap(), BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn product_one_predicates() {
        let g = d8();
        let one = Sequence::from_terms(g.clone(), [g.identity()]).unwrap();
        assert!(is_product_one(&one).unwrap());
        // b^[m-1]·a^[mn-1] with m = n = 2
        let avoider = Sequence::from_counts(g.clone(), [(B, 1), (A, 3)]).unwrap();
        assert!(is_product_one_free(&avoider).unwrap());

        let c3c3 =
            Arc::new(make_product(&make_cyclic(3).unwrap(), &make_cyclic(3).unwrap()).unwrap());
        let s = Sequence::from_terms(c3c3.clone(), [3, 6, 1, 2]).unwrap();
        assert!(!is_product_one_free(&s).unwrap());
    }

    #[test]
    fn fixed_length_witnesses() {
        let g = d8();
        let s = Sequence::from_counts(g.clone(), [(A, 9)]).unwrap();
        let w = find_product_one_subsequence(&s, &LengthSet::Exact(4))
            .unwrap()
            .unwrap();
        assert_eq!(w.ordered, vec![A; 4]);
        assert!(verify_witness(&s, &w));

        let s = Sequence::from_counts(g.clone(), [(B, 1), (A, 3), (g.identity(), 3)]).unwrap();
        assert!(find_product_one_subsequence(&s, &LengthSet::Multiples(4))
            .unwrap()
            .is_none());
    }

    #[test]
    fn witness_verification() {
        let g = d8();
        let s = Sequence::from_counts(g.clone(), [(A, 9)]).unwrap();
        let empty = Witness {
            ordered: vec![],
            product: g.identity(),
            length: 0,
        };
        assert!(verify_witness(&s, &empty));
        assert!(verify_witness(&s, &Witness::new(&g, vec![A; 4])));
        let one_a = Sequence::from_counts(g.clone(), [(A, 1)]).unwrap();
        assert!(!verify_witness(&one_a, &Witness::new(&g, vec![A, B])));
        let mut lying = Witness::new(&g, vec![A; 4]);
        lying.length = 3;
        assert!(!verify_witness(&s, &lying));
        lying = Witness::new(&g, vec![A; 4]);
        lying.product = A;
        assert!(!verify_witness(&s, &lying));
    }

    #[test]
    fn length_set_syntax() {
        for (text, set) in [
            ("{4}", LengthSet::Exact(4)),
            ("[1,4]", LengthSet::Interval(1, 4)),
            ("4N", LengthSet::Multiples(4)),
            ("N", LengthSet::Any),
        ] {
            assert_eq!(text.parse::<LengthSet>().unwrap(), set);
            assert_eq!(set.to_string(), text);
        }
        assert!("0N".parse::<LengthSet>().is_err());
        assert!("[1;4]".parse::<LengthSet>().is_err());
        assert!(!LengthSet::Any.contains(0));
        assert!(!LengthSet::Multiples(3).contains(0));
    }

    #[test]
    fn sequence_edits() {
        let g = d8();
        let s = Sequence::from_terms(g.clone(), [5, 1, 1, 3]).unwrap();
        assert_eq!(s.terms(), vec![1, 1, 3, 5]);
        assert_eq!(s.without(&[1, 5]).unwrap().terms(), vec![1, 3]);
        assert!(s.without(&[2]).is_err());
        assert_eq!(s.prefix(2).terms(), vec![1, 1]);
        assert!(Sequence::from_terms(g, [8]).is_err());
    }
}
