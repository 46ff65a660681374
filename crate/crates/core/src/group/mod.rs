//! Finite groups stored as complete multiplication tables.
//!
//! Every group is a table over element indices `0..order`. Groups built from
//! a presentation (cyclic, semidirect, dihedral, ...) carry a [`Structure`]
//! record describing how indices map back to normal forms.

mod spec;
mod subgroup;

pub use spec::parse_spec;
pub use subgroup::{
    cyclic_kernel_projection, lemma_cpcp_subgroup, quotient, Homomorphism, Subgroup,
};

use std::fmt;
use std::sync::Arc;

use crate::numtheory::{factorize, gcd, pow_mod};
use crate::{Error, Result};

/// Construction-time guard on the group order; tables are `O(order²)`.
pub const MAX_ORDER: usize = 4096;

pub type Elem = usize;

/// How a group was presented. Doubles as the AST of the group spec grammar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    Cyclic {
        n: usize,
    },
    /// `C_m ⋉ C_n`: `a` of order `n` is normal, `b` has order `m`, `b·a·b⁻¹ = a^s`.
    Semidirect {
        m: usize,
        n: usize,
        s: usize,
    },
    Product(Box<Structure>, Box<Structure>),
    /// `D_{2k}`.
    Dihedral {
        k: usize,
    },
    /// `Dic_{4k}`.
    Dicyclic {
        k: usize,
    },
    /// `Q_{2^{k+1}}`.
    Quaternion {
        k: usize,
    },
    /// `SD_{2^{k+1}}`.
    Semidihedral {
        k: usize,
    },
}

/// Parameters of a metacyclic presentation
/// `⟨a, b | a^n = 1, b^m = a^z, b·a·b⁻¹ = a^s⟩`.
///
/// Element `a^i·b^j` (with `i < n`, `j < m`) has index `i·m + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Metacyclic {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub z: usize,
}

impl Metacyclic {
    pub fn index(&self, i: usize, j: usize) -> Elem {
        (i % self.n) * self.m + (j % self.m)
    }

    /// Exponent pair `(i, j)` of `a^i·b^j`.
    pub fn coords(&self, g: Elem) -> (usize, usize) {
        (g / self.m, g % self.m)
    }

    /// Index of the normal generator `a`.
    pub fn a(&self) -> Elem {
        self.index(1 % self.n, 0)
    }

    /// Index of the complement generator `b`.
    pub fn b(&self) -> Elem {
        self.index(0, 1 % self.m)
    }
}

impl Structure {
    pub fn kind(&self) -> &'static str {
        match self {
            Structure::Cyclic { .. } => "cyclic",
            Structure::Semidirect { .. } => "semidirect",
            Structure::Product(..) => "product",
            Structure::Dihedral { .. } => "dihedral",
            Structure::Dicyclic { .. } => "dicyclic",
            Structure::Quaternion { .. } => "quaternion",
            Structure::Semidihedral { .. } => "semidihedral",
        }
    }

    /// The metacyclic presentation behind this structure, if there is one.
    pub fn metacyclic(&self) -> Option<Metacyclic> {
        let mc = |m, n, s, z| Some(Metacyclic { m, n, s, z });
        match *self {
            Structure::Cyclic { n } => mc(1, n, 1, 0),
            Structure::Semidirect { m, n, s } => mc(m, n, s % n.max(1), 0),
            Structure::Dihedral { k } => mc(2, k, (k + k - 1) % k, 0),
            Structure::Semidihedral { k } => {
                let n = 1 << k;
                mc(2, n, (1 << (k - 1)) - 1, 0)
            }
            Structure::Dicyclic { k } => mc(2, 2 * k, 2 * k - 1, k),
            Structure::Quaternion { k } => {
                let n = 1 << k;
                mc(2, n, n - 1, n / 2)
            }
            Structure::Product(..) => None,
        }
    }

    /// `(m, n)` when the group is a split extension `C_m ⋉ C_{mn}` in the
    /// metacyclic encoding, i.e. the shape the extractors work on.
    pub fn split_cm_cmn(&self) -> Option<(usize, usize, usize)> {
        let mc = self.metacyclic()?;
        if mc.z != 0 || mc.n % mc.m != 0 {
            return None;
        }
        Some((mc.m, mc.n / mc.m, mc.s))
    }

    pub fn build(&self) -> Result<FiniteGroup> {
        match *self {
            Structure::Cyclic { n } => make_cyclic(n),
            Structure::Semidirect { m, n, s } => make_semidirect(m, n, s),
            Structure::Product(ref l, ref r) => make_product(&l.build()?, &r.build()?),
            Structure::Dihedral { k } => make_named(NamedKind::Dihedral, k),
            Structure::Dicyclic { k } => make_named(NamedKind::Dicyclic, k),
            Structure::Quaternion { k } => make_named(NamedKind::Quaternion, k),
            Structure::Semidihedral { k } => make_named(NamedKind::Semidihedral, k),
        }
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Cyclic { n } => write!(f, "cyclic:{n}"),
            Structure::Semidirect { m, n, s } => write!(f, "semidirect:{m},{n},{s}"),
            Structure::Product(l, r) => write!(f, "product:{l}*{r}"),
            Structure::Dihedral { k } => write!(f, "dihedral:{k}"),
            Structure::Dicyclic { k } => write!(f, "dicyclic:{k}"),
            Structure::Quaternion { k } => write!(f, "quaternion:{k}"),
            Structure::Semidihedral { k } => write!(f, "semidihedral:{k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedKind {
    Dihedral,
    Dicyclic,
    Quaternion,
    Semidihedral,
}

/// A finite group given by its full multiplication table.
#[derive(Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u16>,
    identity: Elem,
    inv: Vec<u16>,
    label: String,
    structure: Option<Structure>,
}

impl fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteGroup")
            .field("order", &self.order)
            .field("label", &self.label)
            .field("structure", &self.structure)
            .finish()
    }
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.identity == other.identity && self.table == other.table
    }
}

impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Builds a group from a raw table, deriving the inverse table. The table
    /// must describe a group; only identity and inverses are checked here.
    pub fn from_table(
        order: usize,
        table: Vec<u16>,
        identity: Elem,
        label: String,
    ) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::OrderTooLarge(order));
        }
        if table.len() != order * order || identity >= order {
            return Err(Error::BadParameter("table shape mismatch".into()));
        }
        let mut inv = vec![u16::MAX; order];
        for g in 0..order {
            if table[identity * order + g] as usize != g
                || table[g * order + identity] as usize != g
            {
                return Err(Error::BadParameter(format!(
                    "{identity} is not a two-sided identity"
                )));
            }
            for h in 0..order {
                if table[g * order + h] as usize == identity {
                    inv[g] = h as u16;
                    break;
                }
            }
            if inv[g] == u16::MAX {
                return Err(Error::BadParameter(format!("element {g} has no inverse")));
            }
        }
        Ok(FiniteGroup {
            order,
            table,
            identity,
            inv,
            label,
            structure: None,
        })
    }

    fn with_structure(mut self, structure: Structure) -> Self {
        self.structure = Some(structure);
        self
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> Elem {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn structure(&self) -> Option<&Structure> {
        self.structure.as_ref()
    }

    /// The spec string when the group came from a presentation, else the label.
    pub fn spec(&self) -> String {
        match &self.structure {
            Some(s) => s.to_string(),
            None => self.label.clone(),
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.table[a * self.order + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: Elem) -> Elem {
        self.inv[a] as usize
    }

    pub fn contains(&self, g: Elem) -> bool {
        g < self.order
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.order
    }

    /// Left-to-right product of `terms`.
    pub fn product<I: IntoIterator<Item = Elem>>(&self, terms: I) -> Elem {
        terms
            .into_iter()
            .fold(self.identity, |acc, g| self.mul(acc, g))
    }

    pub fn pow(&self, g: Elem, k: usize) -> Elem {
        let mut acc = self.identity;
        let mut base = g;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn element_order(&self, g: Elem) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        k
    }

    /// `e(G)`: the largest element order.
    pub fn exponent_e(&self) -> usize {
        self.elements()
            .map(|g| self.element_order(g))
            .max()
            .unwrap_or(1)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (a + 1..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.exponent_e() == self.order
    }

    /// Whether every Sylow subgroup is normal, decided by counting `p`-elements:
    /// the Sylow `p`-subgroup is unique exactly when the set of elements of
    /// `p`-power order has the full Sylow size.
    pub fn is_nilpotent(&self) -> bool {
        let orders: Vec<usize> = self.elements().map(|g| self.element_order(g)).collect();
        factorize(self.order).into_iter().all(|(p, k)| {
            let sylow = p.pow(k);
            let p_elements = orders.iter().filter(|&&o| is_power_of(o, p)).count();
            p_elements == sylow
        })
    }

    /// Exhaustive check of the group axioms. `O(order³)`.
    pub fn check_axioms(&self) -> bool {
        let n = self.order;
        for a in 0..n {
            if self.mul(self.identity, a) != a || self.mul(a, self.identity) != a {
                return false;
            }
            let ia = self.inv(a);
            if self.mul(a, ia) != self.identity || self.mul(ia, a) != self.identity {
                return false;
            }
            for b in 0..n {
                let ab = self.mul(a, b);
                for c in 0..n {
                    if self.mul(ab, c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn is_power_of(mut x: usize, p: usize) -> bool {
    while x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

fn guard(order: usize) -> Result<()> {
    if order == 0 || order > MAX_ORDER {
        Err(Error::OrderTooLarge(order))
    } else {
        Ok(())
    }
}

/// Table of `⟨a, b | a^n = 1, b^m = a^z, b·a·b⁻¹ = a^s⟩` in the `i·m + j` encoding.
fn metacyclic_table(p: Metacyclic) -> Result<Vec<u16>> {
    let Metacyclic { m, n, s, z } = p;
    let order = m * n;
    guard(order)?;
    let spow: Vec<usize> = (0..m).map(|j| pow_mod(s, j, n)).collect();
    let mut table = vec![0u16; order * order];
    for i in 0..n {
        for j in 0..m {
            for k in 0..n {
                for l in 0..m {
                    let mut ei = i + spow[j] * k;
                    let mut ej = j + l;
                    if ej >= m {
                        ej -= m;
                        ei += z;
                    }
                    let lhs = i * m + j;
                    let rhs = k * m + l;
                    table[lhs * order + rhs] = ((ei % n) * m + ej) as u16;
                }
            }
        }
    }
    Ok(table)
}

fn metacyclic_group(p: Metacyclic, label: String, structure: Structure) -> Result<FiniteGroup> {
    let table = metacyclic_table(p)?;
    Ok(FiniteGroup::from_table(p.m * p.n, table, 0, label)?.with_structure(structure))
}

/// Cyclic group `C_n`; element `i` is `generator^i`.
pub fn make_cyclic(n: usize) -> Result<FiniteGroup> {
    if n == 0 {
        return Err(Error::BadParameter("cyclic order must be positive".into()));
    }
    metacyclic_group(
        Metacyclic {
            m: 1,
            n,
            s: 1,
            z: 0,
        },
        format!("C{n}"),
        Structure::Cyclic { n },
    )
}

/// `C_m ⋉ C_n` with `b·a·b⁻¹ = a^s`. Index of `a^i·b^j` is `i·m + j`.
pub fn make_semidirect(m: usize, n: usize, s: usize) -> Result<FiniteGroup> {
    if m == 0 || n == 0 {
        return Err(Error::BadParameter(
            "semidirect factors must be positive".into(),
        ));
    }
    let s_ok = (1..n).contains(&s) || (n == 1 && s == 1);
    if !s_ok || gcd(s, n) != 1 || pow_mod(s, m, n) != 1 % n {
        return Err(Error::InvalidTwist { m, n, s });
    }
    let label = if s == 1 {
        format!("C{m} x C{n}")
    } else {
        format!("C{m} |x C{n} (s={s})")
    };
    metacyclic_group(
        Metacyclic { m, n, s, z: 0 },
        label,
        Structure::Semidirect { m, n, s },
    )
}

/// Dihedral, dicyclic, generalized quaternion and semidihedral groups.
pub fn make_named(kind: NamedKind, k: usize) -> Result<FiniteGroup> {
    let (structure, label, min_k) = match kind {
        NamedKind::Dihedral => (Structure::Dihedral { k }, format!("D{}", 2 * k), 1),
        NamedKind::Dicyclic => (Structure::Dicyclic { k }, format!("Dic{}", 4 * k), 2),
        NamedKind::Quaternion => (
            Structure::Quaternion { k },
            format!("Q{}", 1usize.checked_shl(k as u32 + 1).unwrap_or(0)),
            2,
        ),
        NamedKind::Semidihedral => (
            Structure::Semidihedral { k },
            format!("SD{}", 1usize.checked_shl(k as u32 + 1).unwrap_or(0)),
            3,
        ),
    };
    if k < min_k || (matches!(kind, NamedKind::Quaternion | NamedKind::Semidihedral) && k > 11) {
        return Err(Error::BadParameter(format!(
            "{} requires k >= {min_k}, got {k}",
            structure.kind()
        )));
    }
    let p = structure.metacyclic().expect("named groups are metacyclic");
    metacyclic_group(p, label, structure)
}

/// Direct product; `(g, h)` has index `g·|H| + h`.
pub fn make_product(left: &FiniteGroup, right: &FiniteGroup) -> Result<FiniteGroup> {
    let (nl, nr) = (left.order(), right.order());
    let order = nl * nr;
    guard(order)?;
    let mut table = vec![0u16; order * order];
    for a in 0..order {
        let (a1, a2) = (a / nr, a % nr);
        for b in 0..order {
            let (b1, b2) = (b / nr, b % nr);
            table[a * order + b] = (left.mul(a1, b1) * nr + right.mul(a2, b2)) as u16;
        }
    }
    let identity = left.identity() * nr + right.identity();
    let label = format!("{} x {}", left.label(), right.label());
    let group = FiniteGroup::from_table(order, table, identity, label)?;
    Ok(match (left.structure(), right.structure()) {
        (Some(l), Some(r)) => {
            group.with_structure(Structure::Product(Box::new(l.clone()), Box::new(r.clone())))
        }
        _ => group,
    })
}

/// Convenience for building a shareable group from a spec string.
pub fn build_spec(spec: &str) -> Result<Arc<FiniteGroup>> {
    Ok(Arc::new(parse_spec(spec)?.build()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d8() -> FiniteGroup {
        make_semidirect(2, 4, 3).unwrap()
    }

    #[test]
    fn cyclic_basics() {
        let c1 = make_cyclic(1).unwrap();
        assert_eq!(c1.order(), 1);
        assert_eq!(c1.identity(), 0);
        let c4 = make_cyclic(4).unwrap();
        assert_eq!(c4.element_order(1), 4);
        let c6 = make_cyclic(6).unwrap();
        assert_eq!(c6.exponent_e(), 6);
        assert!(c6.is_nilpotent());
        assert!(make_cyclic(0).is_err());
    }

    #[test]
    fn dihedral_eight_relation() {
        let g = d8();
        assert_eq!(g.order(), 8);
        assert!(!g.is_abelian());
        let p = g.structure().unwrap().metacyclic().unwrap();
        let (a, b) = (p.a(), p.b());
        let conj = g.mul(g.mul(b, a), g.inv(b));
        assert_eq!(conj, g.pow(a, 3));
        assert_eq!(g.exponent_e(), 4);
        assert!(g.is_nilpotent());
    }

    #[test]
    fn invalid_twists() {
        assert!(matches!(
            make_semidirect(2, 4, 2),
            Err(Error::InvalidTwist { .. })
        ));
        assert!(matches!(
            make_semidirect(2, 7, 2),
            Err(Error::InvalidTwist { .. })
        ));
        assert!(matches!(
            make_semidirect(2, 4, 4),
            Err(Error::InvalidTwist { .. })
        ));
        assert!(make_semidirect(1, 1, 1).is_ok());
    }

    #[test]
    fn order_21_is_not_nilpotent() {
        let g = make_semidirect(3, 7, 2).unwrap();
        assert_eq!(g.order(), 21);
        assert!(g.check_axioms());
        assert!(!g.is_abelian());
        assert!(!g.is_nilpotent());
    }

    #[test]
    fn named_groups() {
        let q8 = make_named(NamedKind::Quaternion, 2).unwrap();
        assert_eq!(q8.order(), 8);
        let involutions = q8.elements().filter(|&g| q8.element_order(g) == 2).count();
        assert_eq!(involutions, 1);
        let klein = make_named(NamedKind::Dihedral, 2).unwrap();
        assert_eq!(klein.order(), 4);
        assert!(klein.is_abelian());
        assert_eq!(klein.exponent_e(), 2);
        let c2c4 = make_product(&make_cyclic(2).unwrap(), &make_cyclic(4).unwrap()).unwrap();
        assert_eq!(c2c4.order(), 8);
        assert!(c2c4.is_abelian());
        assert_eq!(c2c4.exponent_e(), 4);
        assert!(make_named(NamedKind::Quaternion, 1).is_err());
        assert!(make_named(NamedKind::Semidihedral, 2).is_err());
        assert!(make_named(NamedKind::Dicyclic, 1).is_err());
        let sd16 = make_named(NamedKind::Semidihedral, 3).unwrap();
        assert_eq!(sd16.order(), 16);
        let dic12 = make_named(NamedKind::Dicyclic, 3).unwrap();
        assert_eq!(dic12.order(), 12);
        assert_eq!(
            dic12
                .elements()
                .filter(|&g| dic12.element_order(g) == 2)
                .count(),
            1
        );
    }

    #[test]
    fn axioms_hold_for_small_constructions() {
        let mut groups = vec![
            make_cyclic(7).unwrap(),
            d8(),
            make_semidirect(2, 6, 5).unwrap(),
            make_semidirect(4, 4, 3).unwrap(),
            make_semidirect(3, 3, 1).unwrap(),
            make_semidirect(6, 6, 5).unwrap(),
        ];
        for kind in [NamedKind::Dihedral, NamedKind::Dicyclic] {
            for k in 2..6 {
                groups.push(make_named(kind, k).unwrap());
            }
        }
        groups.push(make_named(NamedKind::Quaternion, 3).unwrap());
        groups.push(make_named(NamedKind::Semidihedral, 4).unwrap());
        for g in &groups {
            assert!(g.check_axioms(), "{}", g.label());
        }
    }

    #[test]
    fn semidirect_subgroups_intersect_trivially() {
        for (m, n, s) in [
            (2, 4, 3),
            (3, 7, 2),
            (2, 6, 5),
            (4, 4, 3),
            (6, 6, 5),
            (2, 9, 8),
        ] {
            let g = make_semidirect(m, n, s).unwrap();
            let p = g.structure().unwrap().metacyclic().unwrap();
            let a_sub = Subgroup::generated(Arc::new(g.clone()), &[p.a()]);
            let b_sub = Subgroup::generated(Arc::new(g.clone()), &[p.b()]);
            assert_eq!(a_sub.len(), n);
            assert_eq!(b_sub.len(), m);
            assert!(a_sub.is_normal());
            let common = a_sub
                .members()
                .iter()
                .filter(|x| b_sub.contains(**x))
                .count();
            assert_eq!(common, 1);
        }
    }

    #[test]
    fn trivial_twist_matches_direct_product() {
        for (m, n) in [(2, 4), (3, 3), (2, 6), (4, 8)] {
            let sd = make_semidirect(m, n, 1).unwrap();
            let prod = make_product(&make_cyclic(m).unwrap(), &make_cyclic(n).unwrap()).unwrap();
            assert!(sd.is_abelian());
            // (i, j) ↦ a^i b^j on one side, (b^j, a^i) on the other.
            let to_prod = |x: Elem| {
                let (i, j) = (x / m, x % m);
                j * n + i
            };
            for x in sd.elements() {
                for y in sd.elements() {
                    assert_eq!(to_prod(sd.mul(x, y)), prod.mul(to_prod(x), to_prod(y)));
                }
            }
        }
    }

    #[test]
    fn order_cap() {
        assert!(matches!(
            make_cyclic(MAX_ORDER + 1),
            Err(Error::OrderTooLarge(_))
        ));
    }
}
