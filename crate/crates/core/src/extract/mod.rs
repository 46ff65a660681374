//! Constructive extraction of product-one subsequences in `C_m ⋉ C_{mn}`.
//!
//! Every extractor cuts the input into blocks whose products fall into the
//! kernel of a projection, then solves a small abelian problem on the block
//! products. Each cut is recorded in an [`ExtractionTrace`]; any broken step
//! surfaces as [`Error::TheoremViolation`] carrying that trace.

mod cyclic;
mod dp;
mod trace;

pub use cyclic::{cyclic_threshold, extract_cyclic, CyclicOutcome, StructureCertificate};
pub use dp::{abelian_select, FALLBACK_DP_STATES};
pub use trace::{ExtractionTrace, TraceStep};

use std::sync::Arc;

use crate::group::{
    cyclic_kernel_projection, lemma_cpcp_subgroup, make_cyclic, make_product, Elem, FiniteGroup,
    Homomorphism, Structure,
};
use crate::numtheory::is_prime;
use crate::seq::{LengthSet, ReachTable, Sequence, Witness, DEFAULT_BUDGET};
use crate::{Error, Result};

use cyclic::{cyclic_select, realize_local, CyclicLocal};
use dp::{claim_positions, fixed_length_select};
use trace::Ctx;

/// Which length condition the extracted subsequence must meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Length in `[1, mn]`.
    Interval,
    /// Length exactly `mn`.
    Exact,
    /// Nonzero length divisible by `mn`.
    Modular,
}

impl Mode {
    /// Input length that guarantees a solution in `C_t ⋉ C_t`.
    fn square_threshold(self, t: usize) -> usize {
        match self {
            Mode::Interval | Mode::Modular => 3 * t - 2,
            Mode::Exact => 4 * t - 3,
        }
    }

    fn leaf_lengths(self, q: usize) -> LengthSet {
        match self {
            Mode::Interval => LengthSet::Interval(1, q),
            Mode::Exact => LengthSet::Exact(q),
            Mode::Modular => LengthSet::Multiples(q),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Interval => "interval",
            Mode::Exact => "exact",
            Mode::Modular => "mod",
        }
    }
}

/// A verified product-one subsequence and how it was found.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub witness: Witness,
    pub trace: ExtractionTrace,
}

/// A projection together with what the leaf solver needs about its kernel.
struct Descent {
    hom: Homomorphism,
    /// Exponent bound used at the leaf: `p` for `C_p × C_p`, `n` for `C_n`.
    q: usize,
    /// `ker × C_q`, for the modular variant.
    aug: Arc<FiniteGroup>,
}

impl Descent {
    fn new(hom: Homomorphism, q: usize) -> Result<Self> {
        let aug = Arc::new(make_product(hom.kernel().embedded(), &make_cyclic(q)?)?);
        Ok(Descent { hom, q, aug })
    }
}

/// `C_m ⋉ C_m` and, for composite `m`, its projection onto `C_(m/p) ⋉ C_(m/p)`.
struct Square {
    group: Arc<FiniteGroup>,
    m: usize,
    descent: Option<Descent>,
}

fn square_params(group: &FiniteGroup) -> Result<usize> {
    match group.structure().and_then(Structure::split_cm_cmn) {
        Some((m, 1, _)) => Ok(m),
        _ => Err(Error::BadShape(format!(
            "{} is not of the form C_m |x C_m",
            group.label()
        ))),
    }
}

/// The chain `C_m ⋉ C_m → C_(m/p) ⋉ C_(m/p) → … → C_1` (or a prime leaf).
fn build_squares(top: Arc<FiniteGroup>) -> Result<Vec<Square>> {
    let mut out = Vec::new();
    let mut group = top;
    loop {
        let m = square_params(&group)?;
        if m == 1 || is_prime(m) {
            out.push(Square {
                group,
                m,
                descent: None,
            });
            return Ok(out);
        }
        let (_, theta) = lemma_cpcp_subgroup(&group)?;
        let next = theta.codomain().clone();
        let p = m / square_params(&next)?;
        out.push(Square {
            group,
            m,
            descent: Some(Descent::new(theta, p)?),
        });
        group = next;
    }
}

/// Checks a block product and logs the block.
fn record_block(
    ctx: &mut Ctx,
    scope: usize,
    level: usize,
    description: &str,
    hom: &Homomorphism,
    items: &[Elem],
    block: &[usize],
) -> Result<Elem> {
    let group = hom.domain();
    let sigma = group.product(block.iter().map(|&i| items[i]));
    let in_kernel = hom.kernel().contains(sigma);
    ctx.record(scope, level, description, block, sigma, in_kernel);
    if !in_kernel {
        return Err(Error::violation(format!(
            "level {level}: {description} product {sigma} is outside the kernel"
        )));
    }
    Ok(sigma)
}

/// Solves `mode` on the sub-list `remaining` of `proj` inside square `idx`,
/// removes the chosen positions from `remaining` and returns them in order.
fn cut(
    ctx: &mut Ctx,
    squares: &[Square],
    idx: usize,
    remaining: &mut Vec<usize>,
    proj: &[Elem],
    mode: Mode,
    level: usize,
) -> Result<Vec<usize>> {
    let sub: Vec<Elem> = remaining.iter().map(|&i| proj[i]).collect();
    ctx.enter(remaining);
    let local = solve_square(ctx, squares, idx, &sub, mode, level);
    ctx.leave();
    let block: Vec<usize> = local?.into_iter().map(|j| remaining[j]).collect();
    remaining.retain(|i| !block.contains(i));
    Ok(block)
}

fn solve_square(
    ctx: &mut Ctx,
    squares: &[Square],
    idx: usize,
    items: &[Elem],
    mode: Mode,
    level: usize,
) -> Result<Vec<usize>> {
    let sq = &squares[idx];
    let need = mode.square_threshold(sq.m);
    if items.len() < need {
        return Err(Error::violation(format!(
            "level {level}: {} terms in C_{m} |x C_{m}, need {need}",
            items.len(),
            m = sq.m
        )));
    }
    if sq.m == 1 {
        return Ok(vec![0]);
    }
    match &sq.descent {
        Some(descent) => descend(ctx, squares, descent, idx + 1, items, mode, level),
        None => {
            let scope = ctx.open_scope();
            let pick = abelian_select(
                &sq.group,
                items,
                &mode.leaf_lengths(sq.m),
                sq.group.identity(),
            )
            .ok_or_else(|| {
                Error::violation(format!(
                    "level {level}: no {} solution among {} terms of C_{p} x C_{p}",
                    mode.name(),
                    items.len(),
                    p = sq.m
                ))
            })?;
            ctx.record(scope, level, "prime leaf", &pick, sq.group.identity(), true);
            Ok(pick)
        }
    }
}

/// One recursion step: blocks over the child square, then a leaf solve in the
/// kernel of `descent.hom`.
fn descend(
    ctx: &mut Ctx,
    squares: &[Square],
    descent: &Descent,
    child: usize,
    items: &[Elem],
    mode: Mode,
    level: usize,
) -> Result<Vec<usize>> {
    let hom = &descent.hom;
    let kernel = hom.kernel();
    let group = hom.domain();
    let t = squares[child].m;
    let q = descent.q;
    let scope = ctx.open_scope();
    let proj: Vec<Elem> = items.iter().map(|&g| hom.apply(g)).collect();
    let mut remaining: Vec<usize> = (0..items.len()).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();

    let block_mode = if mode == Mode::Modular {
        Mode::Exact
    } else {
        mode
    };
    let threshold = block_mode.square_threshold(t);
    let quota = match mode {
        Mode::Modular => (items.len() + 2 - 3 * t) / t,
        _ => usize::MAX,
    };
    while blocks.len() < quota && remaining.len() >= threshold {
        let block = cut(
            ctx,
            squares,
            child,
            &mut remaining,
            &proj,
            block_mode,
            level + 1,
        )?;
        record_block(ctx, scope, level, "block", hom, items, &block)?;
        blocks.push(block);
    }

    let chosen = match mode {
        Mode::Interval | Mode::Exact => {
            let floor = (items.len() + 1).saturating_sub(threshold).div_ceil(t);
            if blocks.len() < floor {
                return Err(Error::violation(format!(
                    "level {level}: {} blocks extracted, expected at least {floor}",
                    blocks.len()
                )));
            }
            let values: Vec<Elem> = blocks
                .iter()
                .map(|b| {
                    kernel
                        .to_embedded(group.product(b.iter().map(|&i| items[i])))
                        .unwrap()
                })
                .collect();
            let inner = kernel.embedded();
            abelian_select(inner, &values, &mode.leaf_lengths(q), inner.identity())
        }
        Mode::Modular => {
            if blocks.len() != quota {
                return Err(Error::violation(format!(
                    "level {level}: {} exact blocks extracted, expected {quota}",
                    blocks.len()
                )));
            }
            let rest = cut(
                ctx,
                squares,
                child,
                &mut remaining,
                &proj,
                Mode::Modular,
                level + 1,
            )?;
            record_block(ctx, scope, level, "modular remainder", hom, items, &rest)?;
            blocks.push(rest);
            let mut values = Vec::with_capacity(blocks.len());
            for b in &blocks {
                if b.len() % t != 0 {
                    return Err(Error::violation(format!(
                        "level {level}: block length {} not divisible by {t}",
                        b.len()
                    )));
                }
                let x = kernel
                    .to_embedded(group.product(b.iter().map(|&i| items[i])))
                    .unwrap();
                values.push(x * q + (b.len() / t) % q);
            }
            let aug = &descent.aug;
            abelian_select(aug, &values, &LengthSet::Any, aug.identity())
        }
    }
    .ok_or_else(|| {
        Error::violation(format!(
            "level {level}: no {} leaf solution among {} block products",
            mode.name(),
            blocks.len()
        ))
    })?;

    let picked: Vec<usize> = chosen
        .into_iter()
        .flat_map(|b| blocks[b].iter().copied())
        .collect();
    let total = group.product(picked.iter().map(|&i| items[i]));
    ctx.record(
        scope,
        level,
        "leaf",
        &picked,
        total,
        total == group.identity(),
    );
    if total != group.identity() {
        return Err(Error::violation(format!(
            "level {level}: combined blocks multiply to {total}"
        )));
    }
    Ok(picked)
}

/// Runs a solver on the canonical prefix of length `need` and validates the result.
fn run(
    group: &Arc<FiniteGroup>,
    seq: &Sequence,
    need: usize,
    accept: impl Fn(usize) -> bool,
    solve: impl FnOnce(&mut Ctx, &[Elem]) -> Result<Vec<usize>>,
) -> Result<Extraction> {
    if **seq.group() != **group {
        return Err(Error::BadParameter(format!(
            "sequence is over {}, extractor over {}",
            seq.group().spec(),
            group.spec()
        )));
    }
    if seq.len() < need {
        return Err(Error::TooShort {
            need,
            got: seq.len(),
        });
    }
    let mut input = seq.terms();
    input.truncate(need);
    let mut ctx = Ctx::new(group.spec(), input.clone());
    let with_trace = |ctx: Ctx, msg: String| Error::TheoremViolation {
        msg,
        trace: Some(Box::new(ctx.trace)),
    };
    let pick = match solve(&mut ctx, &input) {
        Ok(pick) => pick,
        Err(Error::TheoremViolation { msg, trace: None }) => return Err(with_trace(ctx, msg)),
        Err(e) => return Err(e),
    };
    let mut seen = vec![false; input.len()];
    if pick.iter().any(|&i| std::mem::replace(&mut seen[i], true)) {
        return Err(with_trace(ctx, "a position was used twice".into()));
    }
    let witness = Witness::new(group, pick.iter().map(|&i| input[i]).collect());
    ctx.trace.witness = Some(witness.clone());
    if witness.product != group.identity() || !accept(witness.length) {
        let msg = format!(
            "extracted length {} with product {}",
            witness.length, witness.product
        );
        return Err(with_trace(ctx, msg));
    }
    Ok(Extraction {
        witness,
        trace: ctx.trace,
    })
}

/// Interval, exact and modular extractors for one group `C_m ⋉ C_{mn}`.
///
/// Construction precomputes the projection chain; reuse one extractor for
/// many sequences.
pub struct Extractor {
    group: Arc<FiniteGroup>,
    m: usize,
    n: usize,
    top: Descent,
    squares: Vec<Square>,
}

impl Extractor {
    pub fn new(group: Arc<FiniteGroup>) -> Result<Self> {
        let (m, n, _) = group
            .structure()
            .and_then(Structure::split_cm_cmn)
            .ok_or_else(|| {
                Error::BadShape(format!("{} is not of the form C_m |x C_mn", group.label()))
            })?;
        let hom = cyclic_kernel_projection(&group)?;
        let squares = build_squares(hom.codomain().clone())?;
        Ok(Extractor {
            top: Descent::new(hom, n)?,
            group,
            m,
            n,
            squares,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    /// `(m, n)` of `C_m ⋉ C_{mn}`.
    pub fn params(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// Input length at which the extractor is guaranteed to succeed.
    pub fn threshold(&self, mode: Mode) -> usize {
        let (m, n) = (self.m, self.n);
        match mode {
            Mode::Interval => 2 * m + m * n - 2,
            Mode::Exact => 2 * m + 2 * m * n - 3,
            Mode::Modular => m + 2 * m * n - 2,
        }
    }

    pub fn extract(&self, seq: &Sequence, mode: Mode) -> Result<Extraction> {
        let mn = self.m * self.n;
        let accept = move |len: usize| match mode {
            Mode::Interval => (1..=mn).contains(&len),
            Mode::Exact => len == mn,
            Mode::Modular => len > 0 && len.is_multiple_of(mn),
        };
        run(
            &self.group,
            seq,
            self.threshold(mode),
            accept,
            |ctx, items| descend(ctx, &self.squares, &self.top, 0, items, mode, 0),
        )
    }
}

/// Extractor for product-one subsequences of length `|G|` through a
/// projection `θ: G → C_m ⋉ C_m`.
pub struct EgzExtractor {
    group: Arc<FiniteGroup>,
    m: usize,
    theta: Option<Homomorphism>,
    squares: Vec<Square>,
}

impl EgzExtractor {
    /// Uses `a^i b^j ↦ a^(i mod m) b^j` for `C_m ⋉ C_{mn}` with `m >= 2`,
    /// and the trivial quotient otherwise.
    pub fn new(group: Arc<FiniteGroup>) -> Result<Self> {
        match group.structure().and_then(Structure::split_cm_cmn) {
            Some((m, _, _)) if m >= 2 => {
                let theta = cyclic_kernel_projection(&group)?;
                Self::with_projection(group, theta)
            }
            _ => Ok(Self::trivial(group)),
        }
    }

    /// General form: `theta` must map onto a group of the form `C_m ⋉ C_m`.
    pub fn with_projection(group: Arc<FiniteGroup>, theta: Homomorphism) -> Result<Self> {
        if **theta.domain() != *group {
            return Err(Error::BadParameter(
                "projection is not defined on this group".into(),
            ));
        }
        let m = square_params(theta.codomain())?;
        if theta.image_size() != m * m {
            return Err(Error::BadParameter("projection is not surjective".into()));
        }
        if m == 1 {
            return Ok(Self::trivial(group));
        }
        let squares = build_squares(theta.codomain().clone())?;
        Ok(EgzExtractor {
            group,
            m,
            theta: Some(theta),
            squares,
        })
    }

    /// `m = 1`: a fixed-length search over the whole group.
    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        EgzExtractor {
            group,
            m: 1,
            theta: None,
            squares: Vec::new(),
        }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `|G| + |G|/m + m - 2`.
    pub fn threshold(&self) -> usize {
        let g = self.group.order();
        g + g / self.m + self.m - 2
    }

    pub fn extract(&self, seq: &Sequence) -> Result<Extraction> {
        let order = self.group.order();
        run(
            &self.group,
            seq,
            self.threshold(),
            |len| len == order,
            |ctx, items| self.solve(ctx, items),
        )
    }

    fn solve(&self, ctx: &mut Ctx, items: &[Elem]) -> Result<Vec<usize>> {
        let order = self.group.order();
        let Some(theta) = self
            .theta
            .as_ref()
            .filter(|t| t.kernel().embedded().is_cyclic())
        else {
            ctx.note(format!(
                "fixed-length search for length {order} over the whole group"
            ));
            return fixed_length_select(ctx, &self.group, items, order)?.ok_or_else(|| {
                Error::violation(format!(
                    "no product-one subsequence of length {order} among {} terms",
                    items.len()
                ))
            });
        };
        let m = self.m;
        let kernel = theta.kernel();
        let inner = kernel.embedded();
        let n = kernel.len();
        let k = order / (m * n);
        let scope = ctx.open_scope();
        let proj: Vec<Elem> = items.iter().map(|&g| theta.apply(g)).collect();
        let mut remaining: Vec<usize> = (0..items.len()).collect();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        while remaining.len() >= Mode::Exact.square_threshold(m) {
            let block = cut(ctx, &self.squares, 0, &mut remaining, &proj, Mode::Exact, 1)?;
            record_block(ctx, scope, 0, "block", theta, items, &block)?;
            blocks.push(block);
        }
        let wanted = k * n + n - 2;
        if blocks.len() < wanted {
            return Err(Error::violation(format!(
                "{} blocks of length {m}, need {wanted}",
                blocks.len()
            )));
        }
        blocks.truncate(wanted);
        let used: Vec<bool> = {
            let mut u = vec![false; items.len()];
            blocks.iter().flatten().for_each(|&i| u[i] = true);
            u
        };
        let rest: Vec<usize> = (0..items.len()).filter(|&i| !used[i]).collect();
        let sigma = |b: &[usize]| group_product(&self.group, items, b);
        let mut values: Vec<Elem> = blocks
            .iter()
            .map(|b| kernel.to_embedded(sigma(b)).unwrap())
            .collect();

        let quotient = theta.codomain();
        let rest_proj: Vec<Elem> = rest.iter().map(|&i| proj[i]).collect();
        let table = ReachTable::from_terms(quotient.clone(), &rest_proj, DEFAULT_BUDGET, Some(m))?;
        if let Some(ordered) = table.find(&LengthSet::Exact(m), quotient.identity()) {
            let extra: Vec<usize> = claim_positions(&rest_proj, &ordered)
                .into_iter()
                .map(|j| rest[j])
                .collect();
            record_block(ctx, scope, 0, "case 1 block", theta, items, &extra)?;
            values.push(kernel.to_embedded(sigma(&extra)).unwrap());
            blocks.push(extra);
            return match cyclic_select(ctx, inner, &values, k)? {
                CyclicLocal::Found(pick) => {
                    Ok(pick.into_iter().flat_map(|b| blocks[b].clone()).collect())
                }
                CyclicLocal::Structure(_) => Err(Error::violation(
                    "case 1: cyclic block products gave no witness",
                )),
            };
        }

        let mut rest_idx: Vec<usize> = (0..rest.len()).collect();
        ctx.enter(&rest);
        let j_local = cut(
            ctx,
            &self.squares,
            0,
            &mut rest_idx,
            &rest_proj,
            Mode::Modular,
            1,
        );
        ctx.leave();
        let j: Vec<usize> = j_local?.into_iter().map(|i| rest[i]).collect();
        let sigma_j = record_block(ctx, scope, 0, "case 2 remainder", theta, items, &j)?;
        if j.len() != 2 * m {
            return Err(Error::violation(format!(
                "case 2 remainder has length {}, expected {}",
                j.len(),
                2 * m
            )));
        }
        match cyclic_select(ctx, inner, &values, k)? {
            CyclicLocal::Found(pick) => {
                Ok(pick.into_iter().flat_map(|b| blocks[b].clone()).collect())
            }
            CyclicLocal::Structure(cert) => {
                let target = inner.inv(kernel.to_embedded(sigma_j).unwrap());
                let pick = realize_local(ctx, &cert, inner, &values, target)?.ok_or_else(|| {
                    Error::violation("structure certificate could not realize the target")
                })?;
                let mut out: Vec<usize> =
                    pick.into_iter().flat_map(|b| blocks[b].clone()).collect();
                out.extend(j);
                Ok(out)
            }
        }
    }
}

fn group_product(group: &FiniteGroup, items: &[Elem], positions: &[usize]) -> Elem {
    group.product(positions.iter().map(|&i| items[i]))
}

/// Product-one subsequence with length in `[1, mn]` from `2m + mn - 2` terms.
pub fn extract_interval(seq: &Sequence) -> Result<Extraction> {
    Extractor::new(seq.group().clone())?.extract(seq, Mode::Interval)
}

/// Product-one subsequence of length exactly `mn` from `2m + 2mn - 3` terms.
pub fn extract_exact(seq: &Sequence) -> Result<Extraction> {
    Extractor::new(seq.group().clone())?.extract(seq, Mode::Exact)
}

/// Product-one subsequence with length in `mnℕ` from `m + 2mn - 2` terms.
pub fn extract_mod(seq: &Sequence) -> Result<Extraction> {
    Extractor::new(seq.group().clone())?.extract(seq, Mode::Modular)
}

/// Product-one subsequence of length `|G|` from `|G| + |G|/m + m - 2` terms.
pub fn extract_egz(seq: &Sequence) -> Result<Extraction> {
    EgzExtractor::new(seq.group().clone())?.extract(seq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{build_spec, make_semidirect};
    use crate::seq::verify_witness;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_seq(group: &Arc<FiniteGroup>, len: usize, rng: &mut ChaCha8Rng) -> Sequence {
        Sequence::from_terms(
            group.clone(),
            (0..len).map(|_| rng.gen_range(0..group.order())),
        )
        .unwrap()
    }

    #[test]
    fn thresholds() {
        let d8 = build_spec("dihedral:4").unwrap();
        let x = Extractor::new(d8.clone()).unwrap();
        let got: Vec<usize> = [Mode::Interval, Mode::Exact, Mode::Modular]
            .iter()
            .map(|&m| x.threshold(m))
            .collect();
        assert_eq!(got, vec![6, 9, 8]);
        assert_eq!(EgzExtractor::new(d8).unwrap().threshold(), 12);
        let g21 = build_spec("semidirect:3,7,2").unwrap();
        assert!(matches!(
            Extractor::new(g21.clone()),
            Err(Error::BadShape(_))
        ));
        assert_eq!(EgzExtractor::new(g21).unwrap().threshold(), 41);
    }

    #[test]
    fn all_modes_on_small_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in [
            "dihedral:4",
            "semidirect:2,4,3",
            "semidirect:3,3,1",
            "semidirect:2,6,5",
            "semidirect:4,4,3",
            "cyclic:5",
            "semidirect:6,6,5",
            "semidirect:3,9,4",
        ] {
            let g = build_spec(spec).unwrap();
            let x = Extractor::new(g.clone()).unwrap();
            let egz = EgzExtractor::new(g.clone()).unwrap();
            for _ in 0..40 {
                for mode in [Mode::Interval, Mode::Exact, Mode::Modular] {
                    let s = random_seq(&g, x.threshold(mode), &mut rng);
                    let out = x
                        .extract(&s, mode)
                        .unwrap_or_else(|e| panic!("{spec} {mode:?}: {e}"));
                    assert!(verify_witness(&s, &out.witness));
                    assert!(out.trace.steps.iter().all(|st| st.in_kernel));
                }
                let s = random_seq(&g, egz.threshold(), &mut rng);
                let out = egz
                    .extract(&s)
                    .unwrap_or_else(|e| panic!("{spec} egz: {e}"));
                assert_eq!(out.witness.length, g.order());
                assert!(verify_witness(&s, &out.witness));
            }
        }
    }

    #[test]
    fn egz_extremal_shapes_reach_case_two() {
        // b^[m-1]·a^[mn-1] plus identities, the D8 avoider padded up to the threshold.
        let g = Arc::new(make_semidirect(2, 4, 3).unwrap());
        let egz = EgzExtractor::new(g.clone()).unwrap();
        let s = Sequence::from_counts(g.clone(), [(1, 1), (2, 3), (0, 8)]).unwrap();
        let out = egz.extract(&s).unwrap();
        assert_eq!(out.witness.length, 8);
        let s = Sequence::from_counts(g.clone(), [(1, 4), (2, 3), (3, 5)]).unwrap();
        assert!(verify_witness(&s, &egz.extract(&s).unwrap().witness));
    }

    #[test]
    fn order_21_uses_the_fallback() {
        let g = build_spec("semidirect:3,7,2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = random_seq(&g, 41, &mut rng);
        let out = extract_egz(&s).unwrap();
        assert_eq!(out.witness.length, 21);
        assert!(verify_witness(&s, &out.witness));
        assert!(!out.trace.notes.is_empty());
    }

    #[test]
    fn short_and_foreign_inputs() {
        let g = build_spec("dihedral:4").unwrap();
        let s = Sequence::from_terms(g.clone(), [1, 2]).unwrap();
        assert!(matches!(
            extract_interval(&s),
            Err(Error::TooShort { need: 6, got: 2 })
        ));
        let other = build_spec("cyclic:8").unwrap();
        let x = Extractor::new(other).unwrap();
        assert!(matches!(
            x.extract(&s, Mode::Exact),
            Err(Error::BadParameter(_))
        ));
    }

    #[test]
    fn trace_positions_are_global() {
        let g = build_spec("semidirect:4,4,3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = Extractor::new(g.clone()).unwrap();
        let s = random_seq(&g, x.threshold(Mode::Exact), &mut rng);
        let out = x.extract(&s, Mode::Exact).unwrap();
        let input = &out.trace.input;
        for step in out
            .trace
            .steps
            .iter()
            .filter(|s| s.level == 0 && s.description == "block")
        {
            let sigma = g.product(step.positions.iter().map(|&i| input[i]));
            assert_eq!(sigma, step.sigma);
        }
    }
}
