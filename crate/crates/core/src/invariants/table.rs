//! Computed invariants of `C_m ⋉ C_{mn}` next to their closed forms.

use std::ops::RangeInclusive;
use std::sync::Arc;

use super::{compute, egz_lower_witness, Invariant, SearchOptions, Value};
use crate::group::{make_semidirect, FiniteGroup, Structure};
use crate::seq::{find_product_one_subsequence, LengthSet, Sequence};
use crate::{Error, Result};

/// Which twists to tabulate for each `(m, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SChoice {
    All,
    Specific(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellMethod {
    Exact,
    /// Only an explicit avoider was checked, which proves a lower bound.
    WitnessOnly,
    Skipped,
}

impl CellMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CellMethod::Exact => "exact-search",
            CellMethod::WitnessOnly => "witness-only",
            CellMethod::Skipped => "skipped",
        }
    }
}

/// One invariant of one group against its formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub name: &'static str,
    /// Exact value, or the lower bound proved by a witness.
    pub computed: Option<Value>,
    pub formula: usize,
    /// How `computed` should compare to `formula`: `=`, `<=` or `>=`.
    pub relation: &'static str,
    pub method: CellMethod,
    pub ok: Option<bool>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableRow {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub spec: String,
    pub order: usize,
    pub exponent: usize,
    pub cells: Vec<Cell>,
}

/// Order limits for exact cells; larger groups get witness-only cells.
#[derive(Clone, Copy, Debug)]
pub struct TableOptions {
    pub exact_d_order: usize,
    pub exact_order: usize,
    pub search: SearchOptions,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions {
            exact_d_order: 16,
            exact_order: 8,
            search: SearchOptions::default(),
        }
    }
}

fn compare(value: usize, formula: usize, relation: &str) -> bool {
    match relation {
        "=" => value == formula,
        "<=" => value <= formula,
        _ => value >= formula,
    }
}

fn exact_cell(
    group: &Arc<FiniteGroup>,
    name: &'static str,
    invariant: Invariant,
    formula: usize,
    relation: &'static str,
    opts: SearchOptions,
) -> Cell {
    match compute(group, &invariant, opts) {
        Ok(r) => Cell {
            name,
            computed: Some(r.value),
            formula,
            relation,
            method: CellMethod::Exact,
            ok: r.value.exact().map(|v| compare(v, formula, relation)),
            note: String::new(),
        },
        Err(e) => skipped(name, formula, relation, e.to_string()),
    }
}

fn skipped(name: &'static str, formula: usize, relation: &'static str, note: String) -> Cell {
    Cell {
        name,
        computed: None,
        formula,
        relation,
        method: CellMethod::Skipped,
        ok: None,
        note,
    }
}

/// Lower bound `|w| + offset` from a witness the DP confirms avoids `lengths`.
fn witness_cell(
    name: &'static str,
    w: Result<Sequence>,
    lengths: LengthSet,
    offset: usize,
    formula: usize,
) -> Cell {
    let checked = w.and_then(|w| {
        if find_product_one_subsequence(&w, &lengths)?.is_some() {
            return Err(Error::violation(format!("{w} does not avoid {lengths}")));
        }
        Ok(w.len() + offset)
    });
    match checked {
        Ok(lower) => Cell {
            name,
            computed: Some(Value::Exact(lower)),
            formula,
            relation: ">=",
            method: CellMethod::WitnessOnly,
            ok: Some(lower >= formula),
            note: format!("lower bound from an avoider of length {}", lower - offset),
        },
        Err(e) => skipped(name, formula, ">=", e.to_string()),
    }
}

/// `b^[m-1]·a^[mn-1]·1^[pad]`.
fn split_avoider(group: &Arc<FiniteGroup>, pad: usize) -> Result<Sequence> {
    let (m, n, _) = group.structure().and_then(Structure::split_cm_cmn).unwrap();
    let mc = group.structure().and_then(Structure::metacyclic).unwrap();
    let mut s = Sequence::from_counts(group.clone(), [(mc.b(), m - 1), (mc.a(), m * n - 1)])?;
    s.push(group.identity(), pad)?;
    Ok(s)
}

fn row(m: usize, n: usize, s: usize, opts: &TableOptions) -> Result<TableRow> {
    let group = Arc::new(make_semidirect(m, m * n, s)?);
    let order = group.order();
    let exponent = group.exponent_e();
    let mn = m * n;
    let exact_d = order <= opts.exact_d_order;
    let exact = order <= opts.exact_order;
    let search = opts.search;
    let mut cells = Vec::new();

    let d_formula = mn + m - 2;
    let d = if exact_d {
        exact_cell(
            &group,
            "d",
            Invariant::SmallDavenport,
            d_formula,
            "=",
            search,
        )
    } else {
        witness_cell("d", split_avoider(&group, 0), LengthSet::Any, 0, d_formula)
    };
    let beta_formula = mn + m - 1;
    let beta = match (d.method, d.computed.and_then(Value::exact)) {
        (CellMethod::Exact, Some(dv)) => Cell {
            name: "beta",
            computed: Some(Value::Exact(dv + 1)),
            formula: beta_formula,
            relation: "=",
            method: CellMethod::Exact,
            ok: Some(dv + 1 == beta_formula),
            note: "compared with d(G) + 1".into(),
        },
        _ => skipped(
            "beta",
            beta_formula,
            "=",
            "d(G) not computed exactly".into(),
        ),
    };
    cells.push(d);

    let e_formula = m * m * n + mn + m - 2;
    cells.push(if exact {
        exact_cell(&group, "E", Invariant::Egz, e_formula, "=", search)
    } else {
        witness_cell(
            "E",
            egz_lower_witness(&group, search),
            LengthSet::Exact(order),
            1,
            e_formula,
        )
    });

    let mod_formula = m + 2 * mn - 2;
    cells.push(if exact {
        exact_cell(
            &group,
            "s_mnN",
            Invariant::SL(LengthSet::Multiples(mn)),
            mod_formula,
            "=",
            search,
        )
    } else {
        witness_cell(
            "s_mnN",
            split_avoider(&group, mn - 1),
            LengthSet::Multiples(mn),
            1,
            mod_formula,
        )
    });
    cells.push(beta);

    let eta_bound = 2 * m + mn - 2;
    let s_bound = 2 * m + 2 * mn - 3;
    if exponent == mn {
        for (name, inv, bound) in [
            ("eta", Invariant::Eta, eta_bound),
            ("s", Invariant::S, s_bound),
        ] {
            cells.push(if exact {
                exact_cell(&group, name, inv, bound, "<=", search)
            } else {
                skipped(
                    name,
                    bound,
                    "<=",
                    format!("order {order} above the exact limit"),
                )
            });
        }
    } else {
        for (name, bound) in [("eta", eta_bound), ("s", s_bound)] {
            cells.push(skipped(
                name,
                bound,
                "<=",
                format!("e(G) = {exponent} differs from mn = {mn}"),
            ));
        }
    }

    Ok(TableRow {
        m,
        n,
        s,
        spec: group.spec(),
        order,
        exponent,
        cells,
    })
}

/// Rows for every `(m, n)` in range and every chosen twist `s` of
/// `C_m ⋉ C_{mn}`, in `(m, n, s)` order.
pub fn formula_table(
    m_range: RangeInclusive<usize>,
    n_range: RangeInclusive<usize>,
    choice: SChoice,
    opts: &TableOptions,
) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for m in m_range {
        if m == 0 {
            return Err(Error::BadParameter("m must be positive".into()));
        }
        for n in n_range.clone() {
            if n == 0 {
                return Err(Error::BadParameter("n must be positive".into()));
            }
            let mn = m * n;
            let twists: Vec<usize> = match choice {
                SChoice::Specific(s) => vec![s],
                SChoice::All => (1..mn.max(2))
                    .filter(|&s| make_semidirect(m, mn, s).is_ok())
                    .collect(),
            };
            for s in twists {
                rows.push(row(m, n, s, opts)?);
            }
        }
    }
    Ok(rows)
}
