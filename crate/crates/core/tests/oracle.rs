use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use zerosum_core::group::build_spec;
use zerosum_core::seq::{
    big_pi, big_pi_k, find_product_one_subsequence, parse_sequence, pi, render_sequence,
};
use zerosum_core::{Elem, FiniteGroup, LengthSet, Sequence};

const SPECS: [&str; 8] = [
    "cyclic:1",
    "cyclic:7",
    "dihedral:3",
    "dihedral:4",
    "quaternion:3",
    "semidirect:2,4,1",
    "product:cyclic:2*dihedral:2",
    "product:cyclic:2*cyclic:4",
];

fn groups() -> Vec<Arc<FiniteGroup>> {
    SPECS.iter().map(|s| build_spec(s).unwrap()).collect()
}

fn orderings(g: &FiniteGroup, terms: &[Elem]) -> BTreeSet<Elem> {
    fn go(g: &FiniteGroup, rest: &mut Vec<Elem>, acc: Elem, out: &mut BTreeSet<Elem>) {
        if rest.is_empty() {
            out.insert(acc);
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            go(g, rest, g.mul(acc, x), out);
            rest.insert(i, x);
        }
    }
    let mut out = BTreeSet::new();
    go(g, &mut terms.to_vec(), g.identity(), &mut out);
    out
}

/// Products of orderings of every subsequence whose length passes `keep`.
fn subsequence_products(
    g: &FiniteGroup,
    terms: &[Elem],
    keep: impl Fn(usize) -> bool,
) -> BTreeSet<Elem> {
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << terms.len()) {
        let sub: Vec<Elem> = (0..terms.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| terms[i])
            .collect();
        if keep(sub.len()) {
            out.extend(orderings(g, &sub));
        }
    }
    out
}

fn group_and_terms(max_len: usize) -> impl Strategy<Value = (usize, Vec<usize>)> {
    (
        0..SPECS.len(),
        prop::collection::vec(any::<usize>(), 0..=max_len),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn pi_matches_permutations((gi, raw) in group_and_terms(6)) {
        let g = &groups()[gi];
        let terms: Vec<Elem> = raw.iter().map(|x| x % g.order()).collect();
        let seq = Sequence::from_terms(g.clone(), terms.clone()).unwrap();
        prop_assert_eq!(pi(&seq).unwrap(), orderings(g, &terms));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn big_pi_matches_subsets((gi, raw) in group_and_terms(5), k in 1usize..4) {
        let g = &groups()[gi];
        let terms: Vec<Elem> = raw.iter().map(|x| x % g.order()).collect();
        let seq = Sequence::from_terms(g.clone(), terms.clone()).unwrap();
        prop_assert_eq!(big_pi(&seq).unwrap(), subsequence_products(g, &terms, |_| true));
        prop_assert_eq!(big_pi_k(&seq, k).unwrap(), subsequence_products(g, &terms, |l| l == k));
    }

    #[test]
    fn search_agrees_with_subsets((gi, raw) in group_and_terms(6), lo in 1usize..4, width in 0usize..3) {
        let g = &groups()[gi];
        let terms: Vec<Elem> = raw.iter().map(|x| x % g.order()).collect();
        let seq = Sequence::from_terms(g.clone(), terms.clone()).unwrap();
        let lengths = LengthSet::Interval(lo, lo + width);
        let expected = subsequence_products(g, &terms, |l| lengths.contains(l)).contains(&g.identity());
        let found = find_product_one_subsequence(&seq, &lengths).unwrap();
        prop_assert_eq!(found.is_some(), expected);
        if let Some(w) = found {
            prop_assert!(lengths.contains(w.length));
            prop_assert_eq!(g.product(w.ordered.iter().copied()), g.identity());
            prop_assert!(seq.contains_terms(&w.ordered));
        }
    }

    #[test]
    fn sequence_files_round_trip((gi, raw) in group_and_terms(12)) {
        let g = &groups()[gi];
        let seq = Sequence::from_terms(g.clone(), raw.iter().map(|x| x % g.order())).unwrap();
        let back = parse_sequence(&render_sequence(&seq)).unwrap();
        prop_assert_eq!(back.counts(), seq.counts());
        prop_assert_eq!(back.group().spec(), seq.group().spec());
    }
}
