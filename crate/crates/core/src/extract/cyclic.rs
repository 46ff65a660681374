//! Long sequences over a cyclic group: either a product-one subsequence of
//! length `kn` exists, or the sequence has a rigid two-value shape.

use serde::Serialize;

use crate::group::{Elem, FiniteGroup};
use crate::seq::{LengthSet, Sequence, Witness};
use crate::{Error, Result};

use super::dp::abelian_select;
use super::trace::Ctx;

/// A sequence `a^[xn-1]·b^[yn-1]` over `C_n` with `x + y = k + 1` and
/// `ord(a·b⁻¹) = n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureCertificate {
    pub a: Elem,
    pub b: Elem,
    pub x: usize,
    pub y: usize,
    pub k: usize,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CyclicOutcome {
    Witness(Witness),
    Structure(StructureCertificate),
}

pub(crate) enum CyclicLocal {
    Found(Vec<usize>),
    Structure(StructureCertificate),
}

/// Input length at which [`extract_cyclic`] applies.
pub fn cyclic_threshold(n: usize, k: usize) -> usize {
    (k * n + n).saturating_sub(2)
}

/// Searches `seq` (over a cyclic group of order `n`, length at least
/// `kn + n - 2`) for a product-one subsequence of length `kn`. At length
/// exactly `kn + n - 2` a miss yields the structure certificate instead.
pub fn extract_cyclic(seq: &Sequence, k: usize) -> Result<CyclicOutcome> {
    let group = seq.group();
    let values = seq.terms();
    let mut ctx = Ctx::new(group.spec(), values.clone());
    Ok(match cyclic_select(&mut ctx, group, &values, k)? {
        CyclicLocal::Found(pick) => CyclicOutcome::Witness(Witness::new(
            group,
            pick.iter().map(|&i| values[i]).collect(),
        )),
        CyclicLocal::Structure(cert) => CyclicOutcome::Structure(cert),
    })
}

pub(crate) fn cyclic_select(
    ctx: &mut Ctx,
    group: &FiniteGroup,
    values: &[Elem],
    k: usize,
) -> Result<CyclicLocal> {
    if !group.is_cyclic() {
        return Err(Error::BadShape(format!("{} is not cyclic", group.label())));
    }
    if k == 0 {
        return Err(Error::BadParameter("k must be at least 1".into()));
    }
    let n = group.order();
    let need = cyclic_threshold(n, k);
    if values.len() < need {
        return Err(Error::TooShort {
            need,
            got: values.len(),
        });
    }
    if let Some(pick) = abelian_select(group, values, &LengthSet::Exact(k * n), group.identity()) {
        return Ok(CyclicLocal::Found(pick));
    }
    if values.len() > need {
        return Err(Error::StructureViolated(format!(
            "{} terms over C_{n} without a product-one subsequence of length {}",
            values.len(),
            k * n
        )));
    }
    let mut distinct: Vec<(Elem, usize)> = Vec::new();
    for &v in values {
        match distinct.iter_mut().find(|(g, _)| *g == v) {
            Some((_, c)) => *c += 1,
            None => distinct.push((v, 1)),
        }
    }
    distinct.sort_unstable();
    if n == 1 {
        ctx.note("trivial group: structure certificate with a = b");
        let id = group.identity();
        return Ok(CyclicLocal::Structure(StructureCertificate {
            a: id,
            b: id,
            x: k,
            y: 1,
            k,
            n,
        }));
    }
    let shape = match distinct[..] {
        [(a, ca), (b, cb)] if (ca + 1) % n == 0 && (cb + 1) % n == 0 => {
            let (x, y) = ((ca + 1) / n, (cb + 1) / n);
            let order = group.element_order(group.mul(a, group.inv(b)));
            (x + y == k + 1 && order == n).then_some(StructureCertificate { a, b, x, y, k, n })
        }
        _ => None,
    };
    shape.map(CyclicLocal::Structure).ok_or_else(|| {
        Error::StructureViolated(format!(
            "{need} terms over C_{n} with no product-one subsequence of length {} and multiplicities {distinct:?}",
            k * n
        ))
    })
}

impl StructureCertificate {
    /// Length of the subsequences [`Self::realize`] produces.
    pub fn realize_len(&self) -> Option<usize> {
        (self.k * self.n).checked_sub(2)
    }

    /// A subsequence of `seq` of length `kn - 2` with product `target`.
    ///
    /// For `k >= 2` every element is reachable this way. For `k = 1` the
    /// answer comes from an exact DP and may be `None`.
    pub fn realize(&self, seq: &Sequence, target: Elem) -> Result<Option<Witness>> {
        let n = self.n;
        let (ca, cb) = (seq.multiplicity(self.a), seq.multiplicity(self.b));
        let matches = if self.a == self.b {
            ca == seq.len()
        } else {
            ca + cb == seq.len() && ca == self.x * n - 1 && cb == self.y * n - 1
        };
        if !matches {
            return Err(Error::BadParameter(
                "sequence does not match the certificate".into(),
            ));
        }
        let group = seq.group();
        let values = seq.terms();
        let mut ctx = Ctx::new(group.spec(), values.clone());
        Ok(realize_local(&mut ctx, self, group, &values, target)?
            .map(|pick| Witness::new(group, pick.iter().map(|&i| values[i]).collect())))
    }
}

pub(crate) fn realize_local(
    ctx: &mut Ctx,
    cert: &StructureCertificate,
    group: &FiniteGroup,
    values: &[Elem],
    target: Elem,
) -> Result<Option<Vec<usize>>> {
    if !group.contains(target) {
        return Err(Error::InvalidElement {
            elem: target,
            order: group.order(),
        });
    }
    let Some(len) = cert.realize_len() else {
        ctx.note("k = 1, n = 1: no subsequence of negative length");
        return Ok(None);
    };
    if cert.k < 2 {
        ctx.note(format!(
            "k = 1: exact DP for a length-{len} subsequence with product {target}"
        ));
    }
    let pick = if len == 0 {
        (target == group.identity()).then(Vec::new)
    } else {
        abelian_select(group, values, &LengthSet::Exact(len), target)
    };
    if pick.is_none() && cert.k >= 2 {
        return Err(Error::StructureViolated(format!(
            "element {target} is not a product of {len} terms of a^[{}]·b^[{}]",
            cert.x * cert.n - 1,
            cert.y * cert.n - 1
        )));
    }
    Ok(pick)
}
