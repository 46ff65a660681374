use std::fmt::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::group::{cyclic_kernel_projection, lemma_cpcp_subgroup, Elem, FiniteGroup, Structure};
use crate::invariants::{TableRow, Value};
use crate::numtheory::{gcd, largest_prime_divisor};
use crate::Result;

/// The normal `C_p × C_p` subgroup of a `C_m ⋉ C_m` (possibly reached as the
/// quotient of `C_m ⋉ C_{mn}` by its cyclic kernel).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CpCpInfo {
    /// Group the subgroup lives in.
    pub on: String,
    pub p: usize,
    pub t: usize,
    pub members: Vec<Elem>,
    pub quotient: String,
    pub gcd_s_m: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfoReport {
    pub spec: String,
    pub label: String,
    pub order: usize,
    pub exponent: usize,
    pub abelian: bool,
    pub cyclic: bool,
    pub nilpotent: bool,
    pub structure: Option<String>,
    /// `(m, n, s)` when the group is `C_m ⋉ C_{mn}`.
    pub split: Option<(usize, usize, usize)>,
    pub cpcp: Option<CpCpInfo>,
}

pub fn info_report(group: &Arc<FiniteGroup>) -> Result<InfoReport> {
    let split = group.structure().and_then(Structure::split_cm_cmn);
    let cpcp = match split {
        Some((m, n, s)) if m >= 2 => {
            let square = if n == 1 {
                group.clone()
            } else {
                cyclic_kernel_projection(group)?.codomain().clone()
            };
            let (normal, theta) = lemma_cpcp_subgroup(&square)?;
            let p = largest_prime_divisor(m).expect("m >= 2");
            Some(CpCpInfo {
                on: square.spec(),
                p,
                t: m / p,
                members: normal.members().to_vec(),
                quotient: theta.codomain().spec(),
                gcd_s_m: gcd(s, m),
            })
        }
        _ => None,
    };
    Ok(InfoReport {
        spec: group.spec(),
        label: group.label().to_string(),
        order: group.order(),
        exponent: group.exponent_e(),
        abelian: group.is_abelian(),
        cyclic: group.is_cyclic(),
        nilpotent: group.is_nilpotent(),
        structure: group.structure().map(|s| s.kind().to_string()),
        split,
        cpcp,
    })
}

impl InfoReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let yes = |b: bool| if b { "yes" } else { "no" };
        writeln!(out, "group      {}", self.spec).unwrap();
        writeln!(out, "label      {}", self.label).unwrap();
        writeln!(out, "order      {}", self.order).unwrap();
        writeln!(out, "exponent   {}", self.exponent).unwrap();
        writeln!(out, "abelian    {}", yes(self.abelian)).unwrap();
        writeln!(out, "cyclic     {}", yes(self.cyclic)).unwrap();
        writeln!(out, "nilpotent  {}", yes(self.nilpotent)).unwrap();
        if let Some(s) = &self.structure {
            writeln!(out, "structure  {s}").unwrap();
        }
        if let Some((m, n, s)) = self.split {
            writeln!(out, "form       C_{m} |x C_{} with s = {s}", m * n).unwrap();
        }
        if let Some(l) = &self.cpcp {
            writeln!(
                out,
                "C_p x C_p  p = {}, t = {}, in {}: {:?}; quotient {}; gcd(s, m) = {}",
                l.p, l.t, l.on, l.members, l.quotient, l.gcd_s_m
            )
            .unwrap();
        }
        out
    }
}

/// One CSV record per table cell.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "m",
        "n",
        "s",
        "spec",
        "order",
        "exponent",
        "invariant",
        "computed",
        "relation",
        "formula",
        "method",
        "ok",
        "note",
    ])
    .expect("in-memory write");
    for r in rows {
        for c in &r.cells {
            let computed = match c.computed {
                Some(Value::Exact(v)) => v.to_string(),
                Some(Value::Unknown { cap }) => format!("unknown_cap_{cap}"),
                None => String::new(),
            };
            let ok = c.ok.map(|b| b.to_string()).unwrap_or_default();
            w.write_record([
                r.m.to_string(),
                r.n.to_string(),
                r.s.to_string(),
                r.spec.clone(),
                r.order.to_string(),
                r.exponent.to_string(),
                c.name.to_string(),
                computed,
                c.relation.to_string(),
                c.formula.to_string(),
                c.method.as_str().to_string(),
                ok,
                c.note.clone(),
            ])
            .expect("in-memory write");
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_spec;
    use crate::invariants::{formula_table, SChoice};

    #[test]
    fn d8_info() {
        let r = info_report(&build_spec("semidirect:2,4,3").unwrap()).unwrap();
        assert_eq!(
            (r.order, r.exponent, r.abelian, r.nilpotent),
            (8, 4, false, true)
        );
        let l = r.cpcp.unwrap();
        assert_eq!((l.p, l.t, l.members.len(), l.gcd_s_m), (2, 1, 4, 1));
        assert!(info_report(&build_spec("cyclic:1").unwrap())
            .unwrap()
            .cpcp
            .is_none());
    }

    #[test]
    fn csv_shape() {
        let rows = formula_table(2..=2, 1..=1, SChoice::Specific(1), &Default::default()).unwrap();
        let csv = table_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap().split(',').count(), 13);
        assert!(csv.contains("2,1,1,\"semidirect:2,2,1\",4,2,E,6,=,6,exact-search,true,"));
    }
}
