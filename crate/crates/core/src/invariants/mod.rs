//! Exact zero-sum invariants by exhaustive avoider search.
//!
//! Every constant here has the form "least `l` such that every sequence of
//! length `>= l` contains some forbidden pattern". The search enumerates
//! multisets in nondecreasing index order and extends the reach table one
//! term at a time. A multiset containing the pattern is dropped together with
//! all of its extensions, so the longest surviving multiset decides the value.

mod table;

pub use table::{formula_table, Cell, CellMethod, SChoice, TableOptions, TableRow};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::group::{Elem, FiniteGroup, Structure};
use crate::seq::{LengthSet, ReachTable, Sequence, DEFAULT_BUDGET};
use crate::{Error, Result};

/// Largest `k` accepted by [`generalized_davenport`].
pub const MAX_DK: usize = 4;

/// A named invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Invariant {
    /// Small Davenport constant `d(G)`.
    SmallDavenport,
    /// `E(G) = s_{{|G|}}(G)`.
    Egz,
    /// `s(G) = s_{{e(G)}}(G)`.
    S,
    /// `η(G) = s_{[1, e(G)]}(G)`.
    Eta,
    /// `D(G) = s_ℕ(G)`, abelian groups only.
    Davenport,
    SL(LengthSet),
    /// `D_k(G)`, abelian groups only.
    Dk(usize),
}

impl Invariant {
    /// Parameters as they appear in records.
    pub fn params(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        match self {
            Invariant::SL(l) => {
                out.insert("L".to_string(), l.to_string());
            }
            Invariant::Dk(k) => {
                out.insert("k".to_string(), k.to_string());
            }
            _ => {}
        }
        out
    }

    /// The length set this invariant avoids over `group`, if it is an `s_L`.
    pub fn length_set(&self, group: &FiniteGroup) -> Option<LengthSet> {
        match self {
            Invariant::SmallDavenport | Invariant::Davenport => Some(LengthSet::Any),
            Invariant::Egz => Some(LengthSet::Exact(group.order())),
            Invariant::S => Some(LengthSet::Exact(group.exponent_e())),
            Invariant::Eta => Some(LengthSet::Interval(1, group.exponent_e())),
            Invariant::SL(l) => Some(*l),
            Invariant::Dk(_) => None,
        }
    }

    /// Cap used when none is given: past any value the invariant can take on
    /// the groups this crate handles.
    pub fn default_cap(&self, group: &FiniteGroup) -> usize {
        let order = group.order();
        match self {
            Invariant::SmallDavenport | Invariant::Davenport => order,
            Invariant::Dk(k) => (k + 1) * order,
            _ => 2 * order,
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Invariant::SmallDavenport => f.write_str("d"),
            Invariant::Egz => f.write_str("E"),
            Invariant::S => f.write_str("s"),
            Invariant::Eta => f.write_str("eta"),
            Invariant::Davenport => f.write_str("D"),
            Invariant::SL(l) => write!(f, "sL:{l}"),
            Invariant::Dk(k) => write!(f, "Dk:{k}"),
        }
    }
}

impl FromStr for Invariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "d" => Invariant::SmallDavenport,
            "E" => Invariant::Egz,
            "s" => Invariant::S,
            "eta" => Invariant::Eta,
            "D" => Invariant::Davenport,
            _ => {
                if let Some(l) = s.strip_prefix("sL:") {
                    Invariant::SL(l.parse().map_err(|e: Error| match e {
                        Error::Parse { pos, msg } => Error::parse(pos + 3, msg),
                        other => other,
                    })?)
                } else if let Some(k) = s.strip_prefix("Dk:") {
                    let k: usize = k
                        .parse()
                        .map_err(|_| Error::parse(3, format!("bad k {k:?}")))?;
                    Invariant::Dk(k)
                } else {
                    return Err(Error::parse(
                        0,
                        format!(
                            "unknown invariant {s:?}; expected d, E, s, eta, D, sL:<L> or Dk:<k>"
                        ),
                    ));
                }
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Exact(usize),
    /// An avoider of length `cap` exists; the search stopped there.
    Unknown {
        cap: usize,
    },
}

impl Value {
    pub fn exact(self) -> Option<usize> {
        match self {
            Value::Exact(v) => Some(v),
            Value::Unknown { .. } => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v}"),
            Value::Unknown { cap } => write!(f, "unknown (cap {cap})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ExactSearch,
    Formula,
    WitnessOnly,
    Cache,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ExactSearch => "exact-search",
            Method::Formula => "formula",
            Method::WitnessOnly => "witness-only",
            Method::Cache => "cache",
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact-search" => Ok(Method::ExactSearch),
            "formula" => Ok(Method::Formula),
            "witness-only" => Ok(Method::WitnessOnly),
            "cache" => Ok(Method::Cache),
            _ => Err(Error::parse(0, format!("unknown method {s:?}"))),
        }
    }
}

/// Outcome of one invariant computation.
#[derive(Clone, Debug)]
pub struct InvariantRecord {
    pub spec: String,
    pub invariant: Invariant,
    pub cap: usize,
    pub value: Value,
    /// Extremal sequence: the longest avoider found (for `d`, the longest
    /// product-one free sequence).
    pub witness: Option<Sequence>,
    pub method: Method,
    pub elapsed: Duration,
    /// `visited[l]`: multisets of length `l` that were tested.
    pub visited: Vec<u64>,
}

/// Tuning knobs for the exhaustive search.
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub cap: Option<usize>,
    pub budget: u128,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            cap: None,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Longest avoider found by [`avoider_search`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Lexicographically first avoider of maximal length, in canonical order.
    pub witness: Vec<Elem>,
    pub hit_cap: bool,
    pub visited: Vec<u64>,
}

struct Branch {
    best: Vec<Elem>,
    hit_cap: bool,
    visited: Vec<u64>,
}

/// Exhaustive search for the longest multiset (length `<= cap`) for which
/// `contains` stays false. `contains` is called right after each push and
/// must be hereditary: once true for a multiset, true for every extension.
///
/// Top-level branches (the smallest term) run in parallel on the current
/// rayon pool; the result does not depend on the number of workers.
pub fn avoider_search<F>(
    group: &Arc<FiniteGroup>,
    cap: usize,
    max_len: Option<usize>,
    budget: u128,
    contains: F,
) -> Result<SearchOutcome>
where
    F: Fn(&ReachTable) -> bool + Sync,
{
    let branches: Vec<std::result::Result<Branch, (Error, usize)>> = group
        .elements()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|first| {
            let mut branch = Branch {
                best: Vec::new(),
                hit_cap: false,
                visited: vec![0; cap + 1],
            };
            if cap == 0 {
                return Ok(branch);
            }
            let mut table = ReachTable::new(group.clone(), budget, max_len);
            let mut terms = Vec::with_capacity(cap);
            match explore(&mut table, &mut terms, first, cap, &contains, &mut branch) {
                Ok(()) => Ok(branch),
                Err(e) => Err((e, branch.best.len())),
            }
        })
        .collect();

    let mut out = SearchOutcome {
        witness: Vec::new(),
        hit_cap: cap == 0,
        visited: vec![0; cap + 1],
    };
    let mut failure: Option<Error> = None;
    let mut lower = 0;
    for b in branches {
        match b {
            Ok(b) => {
                for (acc, v) in out.visited.iter_mut().zip(&b.visited) {
                    *acc += v;
                }
                lower = lower.max(b.best.len());
                if b.best.len() > out.witness.len() {
                    out.witness = b.best;
                }
                out.hit_cap |= b.hit_cap;
            }
            Err((e, best)) => {
                lower = lower.max(best);
                failure.get_or_insert(e);
            }
        }
    }
    match failure {
        Some(Error::BudgetExceeded { states, limit, .. }) => Err(Error::BudgetExceeded {
            states,
            limit,
            lower_bound: Some(lower + 1),
        }),
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Pushes `g`, tests it and recurses over terms `>= g`.
fn explore<F>(
    table: &mut ReachTable,
    terms: &mut Vec<Elem>,
    g: Elem,
    cap: usize,
    contains: &F,
    branch: &mut Branch,
) -> Result<()>
where
    F: Fn(&ReachTable) -> bool,
{
    table.push(g)?;
    terms.push(g);
    branch.visited[terms.len()] += 1;
    let result = if contains(table) {
        Ok(())
    } else {
        if terms.len() > branch.best.len() {
            branch.best = terms.clone();
        }
        if terms.len() == cap {
            branch.hit_cap = true;
            Ok(())
        } else {
            let order = table.group().order();
            let mut r = Ok(());
            for next in g..order {
                r = explore(table, terms, next, cap, contains, branch);
                if r.is_err() || branch.hit_cap {
                    break;
                }
            }
            r
        }
    };
    terms.pop();
    table.pop();
    result
}

/// Whether the multiset just extended contains a product-one subsequence
/// with length in `lengths` that uses the newest term.
fn new_block_hits(table: &ReachTable, lengths: &LengthSet) -> bool {
    table.any_reaches(table.last_block(), lengths, table.group().identity())
}

fn finish(
    group: &Arc<FiniteGroup>,
    invariant: Invariant,
    cap: usize,
    started: Instant,
    outcome: SearchOutcome,
    value_of: impl Fn(usize) -> usize,
) -> Result<InvariantRecord> {
    let len = outcome.witness.len();
    let value = if outcome.hit_cap {
        Value::Unknown { cap }
    } else {
        Value::Exact(value_of(len))
    };
    Ok(InvariantRecord {
        spec: group.spec(),
        invariant,
        cap,
        value,
        witness: Some(Sequence::from_terms(group.clone(), outcome.witness)?),
        method: Method::ExactSearch,
        elapsed: started.elapsed(),
        visited: outcome.visited,
    })
}

/// `s_L(G)`: one more than the longest sequence with no product-one
/// subsequence of length in `lengths`.
pub fn s_l_constant(
    group: &Arc<FiniteGroup>,
    lengths: &LengthSet,
    opts: SearchOptions,
) -> Result<InvariantRecord> {
    compute_sl(group, Invariant::SL(*lengths), *lengths, opts)
}

fn compute_sl(
    group: &Arc<FiniteGroup>,
    invariant: Invariant,
    lengths: LengthSet,
    opts: SearchOptions,
) -> Result<InvariantRecord> {
    let started = Instant::now();
    let cap = opts.cap.unwrap_or_else(|| invariant.default_cap(group));
    let outcome = avoider_search(group, cap, lengths.max_len(), opts.budget, |t| {
        new_block_hits(t, &lengths)
    })?;
    finish(group, invariant, cap, started, outcome, |len| len + 1)
}

/// `d(G)`: the maximal length of a product-one free sequence.
pub fn small_davenport(group: &Arc<FiniteGroup>, opts: SearchOptions) -> Result<InvariantRecord> {
    let started = Instant::now();
    let cap = opts.cap.unwrap_or(group.order());
    let outcome = avoider_search(group, cap, None, opts.budget, |t| {
        new_block_hits(t, &LengthSet::Any)
    })?;
    finish(
        group,
        Invariant::SmallDavenport,
        cap,
        started,
        outcome,
        |len| len,
    )
}

/// `D_k(G)` for abelian `G` and `k <= 4`: the least `t` such that every
/// sequence of length `>= t` has `k` disjoint non-empty zero-sum subsequences.
pub fn generalized_davenport(
    group: &Arc<FiniteGroup>,
    k: usize,
    opts: SearchOptions,
) -> Result<InvariantRecord> {
    if !group.is_abelian() {
        return Err(Error::NotAbelian);
    }
    if k == 0 || k > MAX_DK {
        return Err(Error::BadParameter(format!(
            "D_k needs 1 <= k <= {MAX_DK}, got {k}"
        )));
    }
    let started = Instant::now();
    let invariant = Invariant::Dk(k);
    let cap = opts.cap.unwrap_or_else(|| invariant.default_cap(group));
    let outcome = avoider_search(group, cap, None, opts.budget, |t| {
        has_disjoint_zero_sums(t, k)
    })?;
    finish(group, invariant, cap, started, outcome, |len| len + 1)
}

/// Whether the table's full multiset splits off `k` disjoint non-empty
/// zero-sum sub-multisets. Any such family can be shrunk to minimal
/// zero-sum members, so only minimal zero-sum states ("atoms") are combined.
pub fn has_disjoint_zero_sums(table: &ReachTable, k: usize) -> bool {
    let id = table.group().identity();
    let states = table.num_states();
    let counts: Vec<usize> = table.terms().map(|(_, c)| c).collect();
    let r = counts.len();
    let mut strides = Vec::with_capacity(r);
    let mut acc = 1;
    for &c in &counts {
        strides.push(acc);
        acc *= c + 1;
    }
    debug_assert_eq!(acc, states);

    // contains[x]: some non-empty zero-sum state lies below or at x.
    let mut contains = vec![false; states];
    let mut atoms = Vec::new();
    for x in 1..states {
        let digits = table.digits(x);
        let below = (0..r).any(|i| digits[i] > 0 && contains[x - strides[i]]);
        let zero = table.reaches(x, id);
        contains[x] = below || zero;
        if zero && !below {
            atoms.push(digits);
        }
    }
    if !contains[states - 1] {
        return false;
    }
    let mut layer = vec![false; states];
    layer[0] = true;
    for _ in 0..k {
        let mut next = vec![false; states];
        let mut any = false;
        for x in (0..states).filter(|&x| layer[x]) {
            let digits = table.digits(x);
            for atom in &atoms {
                if (0..r).all(|i| digits[i] + atom[i] <= counts[i]) {
                    let y = x + (0..r).map(|i| atom[i] * strides[i]).sum::<usize>();
                    next[y] = true;
                    any = true;
                }
            }
        }
        if !any {
            return false;
        }
        layer = next;
    }
    true
}

/// Runs the search for a named invariant.
pub fn compute(
    group: &Arc<FiniteGroup>,
    invariant: &Invariant,
    opts: SearchOptions,
) -> Result<InvariantRecord> {
    match invariant {
        Invariant::SmallDavenport => small_davenport(group, opts),
        Invariant::Dk(k) => generalized_davenport(group, *k, opts),
        Invariant::Davenport if !group.is_abelian() => Err(Error::NotAbelian),
        other => {
            let lengths = other.length_set(group).unwrap();
            compute_sl(group, other.clone(), lengths, opts)
        }
    }
}

/// A sequence of length `d(G) + |G| - 1` without a product-one subsequence of
/// length `|G|`.
///
/// For `C_m ⋉ C_{mn}` the product-one free part is `b^[m-1]·a^[mn-1]`;
/// otherwise it is the extremal sequence found by [`small_davenport`].
/// Either way it is padded with `|G| - 1` identities and the avoidance is
/// confirmed by the reach-table DP.
pub fn egz_lower_witness(group: &Arc<FiniteGroup>, opts: SearchOptions) -> Result<Sequence> {
    let order = group.order();
    let id = group.identity();
    let free = match group.structure().and_then(Structure::split_cm_cmn) {
        Some((m, n, _)) => {
            let mc = group.structure().and_then(Structure::metacyclic).unwrap();
            Sequence::from_counts(group.clone(), [(mc.b(), m - 1), (mc.a(), m * n - 1)])?
        }
        None => small_davenport(group, opts)?
            .witness
            .expect("search returns a witness"),
    };
    let free = if !free.is_empty()
        && crate::seq::find_product_one_subsequence(&free, &LengthSet::Any)?.is_some()
    {
        small_davenport(group, opts)?
            .witness
            .expect("search returns a witness")
    } else {
        free
    };
    let mut padded = free;
    padded.push(id, order - 1)?;
    let lengths = LengthSet::Exact(order);
    if crate::seq::find_product_one_subsequence(&padded, &lengths)?.is_some() {
        return Err(Error::violation(format!(
            "{padded} has a product-one subsequence of length {order}"
        )));
    }
    Ok(padded)
}
