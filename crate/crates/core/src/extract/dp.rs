//! Exact leaf solvers used at the bottom of the extraction recursions.

use std::sync::Arc;

use crate::group::{make_cyclic, Elem, FiniteGroup, Homomorphism};
use crate::seq::{LengthSet, ReachTable, DEFAULT_BUDGET};
use crate::{Error, Result};

use super::trace::Ctx;

/// Largest `∏(c_i + 1)` for which the non-abelian fixed-length fallback
/// runs the full reach-table DP instead of the normal-series route.
pub const FALLBACK_DP_STATES: u128 = 1 << 16;

/// Picks positions of `values` (elements of the abelian `group`) whose product
/// is `target` and whose count lies in `lengths`.
///
/// DP over (prefix, count, partial product). The smallest admissible count is
/// used, and backtracking prefers earlier positions. Returned positions are
/// increasing.
pub fn abelian_select(
    group: &FiniteGroup,
    values: &[Elem],
    lengths: &LengthSet,
    target: Elem,
) -> Option<Vec<usize>> {
    let len = values.len();
    let cmax = lengths.max_len().map_or(len, |m| m.min(len));
    let words = group.order().div_ceil(64);
    let row = (cmax + 1) * words;
    let mut reach = vec![0u64; (len + 1) * row];
    let set = |buf: &mut [u64], i: usize, c: usize, g: Elem| {
        buf[i * row + c * words + g / 64] |= 1 << (g % 64);
    };
    let has = |buf: &[u64], i: usize, c: usize, g: Elem| {
        buf[i * row + c * words + g / 64] >> (g % 64) & 1 == 1
    };
    set(&mut reach, 0, 0, group.identity());
    for (i, &v) in values.iter().enumerate() {
        let (done, rest) = reach.split_at_mut((i + 1) * row);
        let prev = &done[i * row..];
        let next = &mut rest[..row];
        next.copy_from_slice(prev);
        for c in 0..cmax {
            for w in 0..words {
                let mut word = prev[c * words + w];
                while word != 0 {
                    let h = w * 64 + word.trailing_zeros() as usize;
                    word &= word - 1;
                    let x = group.mul(h, v);
                    next[(c + 1) * words + x / 64] |= 1 << (x % 64);
                }
            }
        }
    }
    let mut count = (1..=cmax).find(|&c| lengths.contains(c) && has(&reach, len, c, target))?;
    let mut t = target;
    let mut picked = Vec::with_capacity(count);
    for i in (1..=len).rev() {
        if count == 0 {
            break;
        }
        if has(&reach, i - 1, count, t) {
            continue;
        }
        picked.push(i - 1);
        t = group.mul(t, group.inv(values[i - 1]));
        count -= 1;
    }
    debug_assert_eq!(t, group.identity());
    picked.reverse();
    Some(picked)
}

/// Positions of `values` forming, in the returned order, a product-one
/// subsequence of length exactly `len` in an arbitrary group.
///
/// Abelian groups use [`abelian_select`]. Otherwise the reach-table DP runs
/// when the state count is small; larger metacyclic inputs with
/// `len = |G|` go through the normal series `⟨a⟩ ◁ G` instead.
pub(crate) fn fixed_length_select(
    ctx: &mut Ctx,
    group: &Arc<FiniteGroup>,
    values: &[Elem],
    len: usize,
) -> Result<Option<Vec<usize>>> {
    if group.is_abelian() {
        return Ok(abelian_select(
            group,
            values,
            &LengthSet::Exact(len),
            group.identity(),
        ));
    }
    let mut counts = vec![0u128; group.order()];
    for &v in values {
        counts[v] += 1;
    }
    let states: u128 = counts.iter().map(|c| c + 1).product();
    if states <= FALLBACK_DP_STATES {
        ctx.note(format!(
            "fixed-length reach-table DP over {} terms",
            values.len()
        ));
        let table = ReachTable::from_terms(group.clone(), values, DEFAULT_BUDGET, Some(len))?;
        return Ok(table
            .find(&LengthSet::Exact(len), group.identity())
            .map(|ordered| claim_positions(values, &ordered)));
    }
    let metacyclic = group.structure().and_then(|s| s.metacyclic());
    match metacyclic {
        Some(_) if len == group.order() && values.len() + 1 >= 2 * len => {
            ctx.note("fixed-length search through the normal series <a> of the metacyclic group");
            normal_series_egz(ctx, group, values).map(Some)
        }
        _ => Err(Error::BudgetExceeded {
            states: states * group.order() as u128,
            limit: FALLBACK_DP_STATES * group.order() as u128,
            lower_bound: None,
        }),
    }
}

/// Maps an ordered list of elements back to distinct positions in `values`.
pub(crate) fn claim_positions(values: &[Elem], ordered: &[Elem]) -> Vec<usize> {
    let mut used = vec![false; values.len()];
    ordered
        .iter()
        .map(|&g| {
            let i = (0..values.len())
                .find(|&i| !used[i] && values[i] == g)
                .expect("element comes from values");
            used[i] = true;
            i
        })
        .collect()
}

/// Product-one subsequence of length `|G|` from at least `2|G| - 1` terms of a
/// metacyclic group `⟨a, b⟩`: cut blocks of length `m` whose `b`-exponents sum
/// to zero mod `m` (EGZ in `C_m`), then combine `n` block products inside the
/// cyclic normal subgroup `⟨a⟩ ≅ C_n` (EGZ in `C_n`).
fn normal_series_egz(
    ctx: &mut Ctx,
    group: &Arc<FiniteGroup>,
    values: &[Elem],
) -> Result<Vec<usize>> {
    let mc = group.structure().and_then(|s| s.metacyclic()).unwrap();
    let (m, n) = (mc.m, mc.n);
    let top = Arc::new(make_cyclic(m)?);
    let image = group.elements().map(|g| mc.coords(g).1).collect();
    let proj = Homomorphism::new(group.clone(), top.clone(), image)?;
    let kernel = proj.kernel();
    let scope = ctx.open_scope();

    let mut remaining: Vec<usize> = (0..values.len()).collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    while remaining.len() + 1 >= 2 * m {
        let projected: Vec<Elem> = remaining.iter().map(|&i| proj.apply(values[i])).collect();
        let local = abelian_select(&top, &projected, &LengthSet::Exact(m), top.identity())
            .ok_or_else(|| {
                Error::violation(format!(
                    "no zero-sum block of length {m} among {} terms of C_{m}",
                    projected.len()
                ))
            })?;
        let block: Vec<usize> = local.iter().map(|&j| remaining[j]).collect();
        let sigma = group.product(block.iter().map(|&i| values[i]));
        ctx.record(
            scope,
            1,
            "normal-series block",
            &block,
            sigma,
            kernel.contains(sigma),
        );
        if !kernel.contains(sigma) {
            return Err(Error::violation("normal-series block product left <a>"));
        }
        remaining.retain(|i| !block.contains(i));
        blocks.push(block);
    }
    if blocks.len() + 1 < 2 * n {
        return Err(Error::violation(format!(
            "only {} normal-series blocks, need {}",
            blocks.len(),
            2 * n - 1
        )));
    }
    let sigmas: Vec<Elem> = blocks
        .iter()
        .map(|b| {
            kernel
                .to_embedded(group.product(b.iter().map(|&i| values[i])))
                .unwrap()
        })
        .collect();
    let inner = kernel.embedded();
    let chosen = abelian_select(inner, &sigmas, &LengthSet::Exact(n), inner.identity())
        .ok_or_else(|| Error::violation(format!("no {n} block products multiply to 1 in C_{n}")))?;
    Ok(chosen.into_iter().flat_map(|b| blocks[b].clone()).collect())
}
