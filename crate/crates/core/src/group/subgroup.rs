use std::sync::Arc;

use super::{make_semidirect, Elem, FiniteGroup, Structure};
use crate::numtheory::{factorize, gcd, pow_mod};
use crate::{Error, Result};

/// A subgroup given by its member set, together with a standalone copy of it
/// as a [`FiniteGroup`] on positions `0..len` (in increasing parent-index order).
#[derive(Clone, Debug)]
pub struct Subgroup {
    parent: Arc<FiniteGroup>,
    members: Vec<Elem>,
    position: Vec<Option<u16>>,
    embedded: Arc<FiniteGroup>,
}

impl Subgroup {
    /// Builds the subgroup from an explicit member set, checking closure.
    pub fn from_members(
        parent: Arc<FiniteGroup>,
        members: impl IntoIterator<Item = Elem>,
    ) -> Result<Self> {
        let mut members: Vec<Elem> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        if members.iter().any(|&g| g >= parent.order()) {
            return Err(Error::BadParameter("subgroup member out of range".into()));
        }
        let mut position = vec![None; parent.order()];
        for (p, &g) in members.iter().enumerate() {
            position[g] = Some(p as u16);
        }
        if position[parent.identity()].is_none() {
            return Err(Error::BadParameter(
                "subgroup must contain the identity".into(),
            ));
        }
        let k = members.len();
        let mut table = vec![0u16; k * k];
        for (i, &a) in members.iter().enumerate() {
            for (j, &b) in members.iter().enumerate() {
                table[i * k + j] = position[parent.mul(a, b)]
                    .ok_or_else(|| Error::BadParameter("member set is not closed".into()))?;
            }
        }
        if !parent.order().is_multiple_of(k) {
            return Err(Error::BadParameter(
                "subgroup order does not divide group order".into(),
            ));
        }
        let identity = position[parent.identity()].unwrap() as usize;
        let label = format!("subgroup of order {k} in {}", parent.label());
        let embedded = Arc::new(FiniteGroup::from_table(k, table, identity, label)?);
        Ok(Subgroup {
            parent,
            members,
            position,
            embedded,
        })
    }

    /// `⟨gens⟩`.
    pub fn generated(parent: Arc<FiniteGroup>, gens: &[Elem]) -> Self {
        let mut seen = vec![false; parent.order()];
        let mut members = vec![parent.identity()];
        seen[parent.identity()] = true;
        let mut cursor = 0;
        while cursor < members.len() {
            let x = members[cursor];
            cursor += 1;
            for &g in gens {
                let y = parent.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    members.push(y);
                }
            }
        }
        Self::from_members(parent, members).expect("generated set is a subgroup")
    }

    pub fn parent(&self) -> &Arc<FiniteGroup> {
        &self.parent
    }

    pub fn members(&self) -> &[Elem] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: Elem) -> bool {
        self.position.get(g).is_some_and(|p| p.is_some())
    }

    pub fn embedded(&self) -> &Arc<FiniteGroup> {
        &self.embedded
    }

    /// Position of a parent element inside [`Self::embedded`].
    pub fn to_embedded(&self, g: Elem) -> Option<Elem> {
        self.position.get(g).copied().flatten().map(usize::from)
    }

    pub fn from_embedded(&self, p: Elem) -> Elem {
        self.members[p]
    }

    /// `gNg⁻¹ = N` for every `g`, by enumeration.
    pub fn is_normal(&self) -> bool {
        let g_ = &self.parent;
        g_.elements().all(|g| {
            let gi = g_.inv(g);
            self.members
                .iter()
                .all(|&h| self.contains(g_.mul(g_.mul(g, h), gi)))
        })
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members && *self.parent == *other.parent
    }
}

/// An element-wise map between two groups, verified to respect multiplication.
#[derive(Clone, Debug)]
pub struct Homomorphism {
    domain: Arc<FiniteGroup>,
    codomain: Arc<FiniteGroup>,
    image: Vec<Elem>,
    kernel: Subgroup,
}

impl Homomorphism {
    pub fn new(
        domain: Arc<FiniteGroup>,
        codomain: Arc<FiniteGroup>,
        image: Vec<Elem>,
    ) -> Result<Self> {
        if image.len() != domain.order() || image.iter().any(|&x| x >= codomain.order()) {
            return Err(Error::BadParameter(
                "image table has the wrong shape".into(),
            ));
        }
        for a in domain.elements() {
            for b in domain.elements() {
                if image[domain.mul(a, b)] != codomain.mul(image[a], image[b]) {
                    return Err(Error::BadParameter(format!(
                        "map is not a homomorphism at ({a}, {b})"
                    )));
                }
            }
        }
        let kernel_members = domain
            .elements()
            .filter(|&g| image[g] == codomain.identity());
        let kernel = Subgroup::from_members(domain.clone(), kernel_members)?;
        Ok(Homomorphism {
            domain,
            codomain,
            image,
            kernel,
        })
    }

    pub fn domain(&self) -> &Arc<FiniteGroup> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<FiniteGroup> {
        &self.codomain
    }

    #[inline]
    pub fn apply(&self, g: Elem) -> Elem {
        self.image[g]
    }

    pub fn kernel(&self) -> &Subgroup {
        &self.kernel
    }

    pub fn image_size(&self) -> usize {
        let mut hit = vec![false; self.codomain.order()];
        for &x in &self.image {
            hit[x] = true;
        }
        hit.into_iter().filter(|&h| h).count()
    }
}

/// `G/N` on cosets, numbered by increasing least member, with the canonical projection.
pub fn quotient(
    group: &Arc<FiniteGroup>,
    normal: &Subgroup,
) -> Result<(Arc<FiniteGroup>, Homomorphism)> {
    if **normal.parent() != **group {
        return Err(Error::BadParameter(
            "subgroup belongs to a different group".into(),
        ));
    }
    if !normal.is_normal() {
        return Err(Error::NotNormal);
    }
    let mut coset = vec![usize::MAX; group.order()];
    let mut reps = Vec::new();
    for g in group.elements() {
        if coset[g] == usize::MAX {
            let id = reps.len();
            reps.push(g);
            for &h in normal.members() {
                coset[group.mul(g, h)] = id;
            }
        }
    }
    let k = reps.len();
    let mut table = vec![0u16; k * k];
    for (i, &a) in reps.iter().enumerate() {
        for (j, &b) in reps.iter().enumerate() {
            table[i * k + j] = coset[group.mul(a, b)] as u16;
        }
    }
    let label = format!("{} / (order {})", group.label(), normal.len());
    let q = Arc::new(FiniteGroup::from_table(
        k,
        table,
        coset[group.identity()],
        label,
    )?);
    let hom = Homomorphism::new(group.clone(), q.clone(), coset)?;
    Ok((q, hom))
}

fn semidirect_square(group: &FiniteGroup) -> Result<(usize, usize)> {
    match group.structure().and_then(Structure::split_cm_cmn) {
        Some((m, 1, s)) => Ok((m, s)),
        _ => Err(Error::BadShape(format!(
            "{} is not of the form C_m |x C_m",
            group.label()
        ))),
    }
}

fn reduced_twist(s: usize, modulus: usize) -> usize {
    if modulus == 1 {
        1
    } else {
        s % modulus
    }
}

/// The projection `C_m ⋉ C_{mn} → C_m ⋉ C_m`, `a^i·b^j ↦ a^(i mod m)·b^j`,
/// whose kernel is the cyclic group `⟨a^m⟩ ≅ C_n`.
pub fn cyclic_kernel_projection(group: &Arc<FiniteGroup>) -> Result<Homomorphism> {
    let (m, n, s) = group
        .structure()
        .and_then(Structure::split_cm_cmn)
        .ok_or_else(|| {
            Error::BadShape(format!("{} is not of the form C_m |x C_mn", group.label()))
        })?;
    let mc = group.structure().and_then(Structure::metacyclic).unwrap();
    let target = Arc::new(make_semidirect(m, m, reduced_twist(s, m))?);
    let tmc = target.structure().and_then(Structure::metacyclic).unwrap();
    let image = group
        .elements()
        .map(|g| {
            let (i, j) = mc.coords(g);
            tmc.index(i % m, j)
        })
        .collect();
    let hom = Homomorphism::new(group.clone(), target, image)?;
    if hom.kernel().len() != n || !hom.kernel().embedded().is_cyclic() {
        return Err(Error::violation(
            "kernel of the projection onto C_m |x C_m is not C_n",
        ));
    }
    Ok(hom)
}

/// For `G ≅ C_m ⋉ C_m` with `p` the largest prime dividing `m`, the normal
/// subgroup `N = ⟨a^(m/p), b^(m/p)⟩ ≅ C_p × C_p` and the projection onto
/// `C_(m/p) ⋉ C_(m/p)`. All claimed properties are checked by enumeration.
pub fn lemma_cpcp_subgroup(group: &Arc<FiniteGroup>) -> Result<(Subgroup, Homomorphism)> {
    let (m, s) = semidirect_square(group)?;
    if m < 2 {
        return Err(Error::BadShape("C_m |x C_m needs m >= 2".into()));
    }
    let factors = factorize(m);
    let &(p, k) = factors.last().unwrap();
    let t = m / p;
    let coprime_part = m / p.pow(k);
    debug_assert_eq!(coprime_part * p.pow(k - 1), t);
    if gcd(coprime_part, p) != 1 {
        return Err(Error::violation(
            "cofactor of the largest prime power is not coprime",
        ));
    }
    if pow_mod(s, t, m) != 1 % m {
        return Err(Error::violation(format!(
            "congruence s^(m/p) = 1 mod m fails for s={s}, m={m}, p={p}"
        )));
    }

    let mc = group.structure().and_then(Structure::metacyclic).unwrap();
    let x = group.pow(mc.a(), t);
    let y = group.pow(mc.b(), t);
    let normal = Subgroup::generated(group.clone(), &[x, y]);
    if normal.len() != p * p {
        return Err(Error::violation(format!(
            "|N| = {} but p^2 = {}",
            normal.len(),
            p * p
        )));
    }
    if normal
        .members()
        .iter()
        .any(|&g| g != group.identity() && group.element_order(g) != p)
    {
        return Err(Error::violation("N has an element whose order is not p"));
    }
    if !normal.is_normal() {
        return Err(Error::violation("N is not normal"));
    }

    let target = Arc::new(make_semidirect(t, t, reduced_twist(s, t))?);
    let tmc = target.structure().and_then(Structure::metacyclic).unwrap();
    let image = group
        .elements()
        .map(|g| {
            let (i, j) = mc.coords(g);
            tmc.index(i % t, j % t)
        })
        .collect();
    let hom = Homomorphism::new(group.clone(), target, image)
        .map_err(|e| Error::violation(format!("projection onto C_t |x C_t failed: {e}")))?;
    if hom.kernel() != &normal {
        return Err(Error::violation("kernel of the projection differs from N"));
    }
    Ok((normal, hom))
}
