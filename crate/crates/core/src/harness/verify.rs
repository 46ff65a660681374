use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::Arc;

use super::campaign::{run_campaign, ExtractorKind};
use crate::extract::Mode;
use crate::group::{build_spec, make_semidirect, FiniteGroup, Structure};
use crate::invariants::{compute, Invariant, SChoice, SearchOptions, Value};
use crate::numtheory::is_prime;
use crate::seq::{find_product_one_subsequence, LengthSet, Sequence};
use crate::{Error, Result};

/// A checkable family of statements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyId {
    /// `d = mn + m - 2` and `E = m²n + mn + m - 2` for `C_m ⋉ C_{mn}`.
    Thm12,
    /// `s_{mnℕ} = m + 2mn - 2`, plus the `η`/`s` bounds when `e(G) = mn`.
    Thm13,
    /// Closed forms for `C_{n1} ⊕ C_{n2}` with `n1 = m`, `n2 = mn`.
    Lemma23,
    /// `η ≤ s - e + 1`.
    Lemma21,
    /// `D_k(C_p ⊕ C_p) = kp + p - 1` with `p = m`, `k = n`.
    Dk,
}

impl FromStr for VerifyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "thm1.2" => VerifyId::Thm12,
            "thm1.3" => VerifyId::Thm13,
            "lemma2.3" => VerifyId::Lemma23,
            "lemma2.1" => VerifyId::Lemma21,
            "dk" => VerifyId::Dk,
            _ => {
                return Err(Error::parse(
                    0,
                    format!(
                        "unknown check {s:?}; expected thm1.2, thm1.3, lemma2.3, lemma2.1 or dk"
                    ),
                ))
            }
        })
    }
}

impl fmt::Display for VerifyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyId::Thm12 => "thm1.2",
            VerifyId::Thm13 => "thm1.3",
            VerifyId::Lemma23 => "lemma2.3",
            VerifyId::Lemma21 => "lemma2.1",
            VerifyId::Dk => "dk",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyMode {
    Exact,
    Sampled(u64),
}

impl FromStr for VerifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(VerifyMode::Exact);
        }
        match s.strip_prefix("sampled:").map(str::parse::<u64>) {
            Some(Ok(n)) if n > 0 => Ok(VerifyMode::Sampled(n)),
            _ => Err(Error::parse(
                0,
                format!("bad mode {s:?}; expected exact or sampled:<trials>"),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseStatus {
    Pass,
    Fail,
    /// Budget or cap prevented a decision.
    Unknown,
    /// The statement does not apply (e.g. `e(G) != mn`).
    Skipped,
    Error,
}

#[derive(Clone, Debug)]
pub struct VerifyCase {
    pub group: String,
    pub check: String,
    pub expected: String,
    pub got: String,
    pub status: CaseStatus,
    /// Input that broke the statement, when there is one.
    pub offending: Option<Sequence>,
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub id: VerifyId,
    pub cases: Vec<VerifyCase>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.cases
            .iter()
            .all(|c| matches!(c.status, CaseStatus::Pass | CaseStatus::Skipped))
    }

    /// 0 all passed, 3 some statement failed, 4 undecided, 2 other errors.
    pub fn exit_code(&self) -> i32 {
        let any = |s: CaseStatus| self.cases.iter().any(|c| c.status == s);
        if any(CaseStatus::Fail) {
            3
        } else if any(CaseStatus::Error) {
            2
        } else if any(CaseStatus::Unknown) {
            4
        } else {
            0
        }
    }
}

/// Parameters of a verification run.
#[derive(Clone, Debug)]
pub struct VerifyParams {
    pub m: RangeInclusive<usize>,
    pub n: RangeInclusive<usize>,
    pub s: SChoice,
    pub mode: VerifyMode,
    pub seed: u64,
    pub search: SearchOptions,
}

fn case(group: &FiniteGroup, check: impl Into<String>, expected: impl Into<String>) -> VerifyCase {
    VerifyCase {
        group: group.spec(),
        check: check.into(),
        expected: expected.into(),
        got: String::new(),
        status: CaseStatus::Skipped,
        offending: None,
    }
}

/// Evaluates an invariant; undecided or failed searches become case statuses.
fn value_of(
    group: &Arc<FiniteGroup>,
    inv: &Invariant,
    opts: SearchOptions,
) -> std::result::Result<usize, (CaseStatus, String)> {
    match compute(group, inv, opts) {
        Ok(r) => match r.value {
            Value::Exact(v) => Ok(v),
            Value::Unknown { cap } => Err((CaseStatus::Unknown, format!("unknown (cap {cap})"))),
        },
        Err(e @ Error::BudgetExceeded { .. }) => Err((CaseStatus::Unknown, e.to_string())),
        Err(e) => Err((CaseStatus::Error, e.to_string())),
    }
}

/// Compares `inv` against `expected` using `rel` ("=" or "<=").
fn check_value(
    group: &Arc<FiniteGroup>,
    inv: Invariant,
    rel: &str,
    expected: usize,
    opts: SearchOptions,
) -> VerifyCase {
    let mut c = case(
        group,
        format!("{inv} {rel} {expected}"),
        expected.to_string(),
    );
    match value_of(group, &inv, opts) {
        Ok(v) => {
            c.got = v.to_string();
            let ok = if rel == "=" {
                v == expected
            } else {
                v <= expected
            };
            c.status = if ok {
                CaseStatus::Pass
            } else {
                CaseStatus::Fail
            };
        }
        Err((status, msg)) => {
            c.got = msg;
            c.status = status;
        }
    }
    c
}

/// Confirms by DP that `seq` has no product-one subsequence with length in `lengths`.
fn check_avoider(
    group: &Arc<FiniteGroup>,
    label: &str,
    seq: Sequence,
    lengths: LengthSet,
) -> VerifyCase {
    let mut c = case(
        group,
        format!("{label} = {seq} avoids {lengths}"),
        "no product-one subsequence",
    );
    match find_product_one_subsequence(&seq, &lengths) {
        Ok(None) => {
            c.got = "none found".into();
            c.status = CaseStatus::Pass;
        }
        Ok(Some(w)) => {
            c.got = format!("found {:?}", w.ordered);
            c.status = CaseStatus::Fail;
            c.offending = Some(seq);
        }
        Err(e) => {
            c.got = e.to_string();
            c.status = CaseStatus::Unknown;
        }
    }
    c
}

fn campaign_case(
    group: &Arc<FiniteGroup>,
    kind: ExtractorKind,
    trials: u64,
    seed: u64,
) -> VerifyCase {
    let mut c = case(
        group,
        format!("{kind} on {trials} random threshold-length sequences"),
        format!("{trials} verified witnesses"),
    );
    match run_campaign(group, kind, trials, seed) {
        Ok(r) => {
            c.got = format!(
                "{} verified, {} failed, {} violations",
                r.successes,
                r.failures.len(),
                r.violations()
            );
            c.status = if r.passed() {
                CaseStatus::Pass
            } else {
                CaseStatus::Fail
            };
            c.offending = r.failures.first().map(|f| f.sequence.clone());
        }
        Err(e) => {
            c.got = e.to_string();
            c.status = CaseStatus::Error;
        }
    }
    c
}

/// `b^[m-1]·a^[mn-1]·1^[pad]` in `C_m ⋉ C_{mn}`.
fn split_avoider(group: &Arc<FiniteGroup>, pad: usize) -> Result<Sequence> {
    let (m, n, _) = group
        .structure()
        .and_then(Structure::split_cm_cmn)
        .ok_or_else(|| Error::BadShape(group.label().to_string()))?;
    let mc = group.structure().and_then(Structure::metacyclic).unwrap();
    let mut s = Sequence::from_counts(group.clone(), [(mc.b(), m - 1), (mc.a(), m * n - 1)])?;
    s.push(group.identity(), pad)?;
    Ok(s)
}

fn twists(m: usize, n: usize, choice: SChoice) -> Vec<usize> {
    let mn = m * n;
    match choice {
        SChoice::Specific(s) => vec![s],
        SChoice::All => (1..mn.max(2))
            .filter(|&s| make_semidirect(m, mn, s).is_ok())
            .collect(),
    }
}

/// Checks `id` on every group in the parameter ranges, in `(m, n, s)` order.
pub fn verify(id: VerifyId, params: &VerifyParams) -> Result<VerifyReport> {
    if let VerifyMode::Sampled(_) = params.mode {
        if !matches!(id, VerifyId::Thm12 | VerifyId::Thm13) {
            return Err(Error::BadParameter(format!(
                "sampled mode applies to thm1.2 and thm1.3, not {id}"
            )));
        }
    }
    let opts = params.search;
    let mut cases = Vec::new();
    for m in params.m.clone() {
        for n in params.n.clone() {
            if m == 0 || n == 0 {
                return Err(Error::BadParameter("m and n must be positive".into()));
            }
            let mn = m * n;
            match id {
                VerifyId::Lemma23 => {
                    let g = build_spec(&format!("product:cyclic:{m}*cyclic:{mn}"))?;
                    let (n1, n2) = (m, mn);
                    cases.push(check_value(
                        &g,
                        Invariant::SmallDavenport,
                        "=",
                        n1 + n2 - 2,
                        opts,
                    ));
                    cases.push(check_value(
                        &g,
                        Invariant::Davenport,
                        "=",
                        n1 + n2 - 1,
                        opts,
                    ));
                    cases.push(check_value(&g, Invariant::Eta, "=", 2 * n1 + n2 - 2, opts));
                    cases.push(check_value(
                        &g,
                        Invariant::S,
                        "=",
                        2 * n1 + 2 * n2 - 3,
                        opts,
                    ));
                    cases.push(check_value(
                        &g,
                        Invariant::SL(LengthSet::Multiples(n2)),
                        "=",
                        n1 + 2 * n2 - 2,
                        opts,
                    ));
                }
                VerifyId::Dk => {
                    let (p, k) = (m, n);
                    if !is_prime(p) {
                        return Err(Error::BadParameter(format!("dk needs m prime, got {p}")));
                    }
                    let g = build_spec(&format!("product:cyclic:{p}*cyclic:{p}"))?;
                    cases.push(check_value(&g, Invariant::Dk(k), "=", k * p + p - 1, opts));
                }
                _ => {
                    for s in twists(m, n, params.s) {
                        let g = Arc::new(make_semidirect(m, mn, s)?);
                        verify_semidirect(id, &g, m, n, params, &mut cases)?;
                    }
                }
            }
        }
    }
    Ok(VerifyReport { id, cases })
}

fn verify_semidirect(
    id: VerifyId,
    g: &Arc<FiniteGroup>,
    m: usize,
    n: usize,
    params: &VerifyParams,
    cases: &mut Vec<VerifyCase>,
) -> Result<()> {
    let opts = params.search;
    let mn = m * n;
    let order = g.order();
    match (id, params.mode) {
        (VerifyId::Thm12, VerifyMode::Exact) => {
            cases.push(check_value(
                g,
                Invariant::SmallDavenport,
                "=",
                mn + m - 2,
                opts,
            ));
            cases.push(check_value(
                g,
                Invariant::Egz,
                "=",
                m * m * n + mn + m - 2,
                opts,
            ));
        }
        (VerifyId::Thm12, VerifyMode::Sampled(trials)) => {
            cases.push(campaign_case(g, ExtractorKind::Egz, trials, params.seed));
            cases.push(check_avoider(
                g,
                "product-one free part",
                split_avoider(g, 0)?,
                LengthSet::Any,
            ));
            cases.push(check_avoider(
                g,
                "padded avoider",
                split_avoider(g, order - 1)?,
                LengthSet::Exact(order),
            ));
        }
        (VerifyId::Thm13, VerifyMode::Exact) => {
            cases.push(check_value(
                g,
                Invariant::SL(LengthSet::Multiples(mn)),
                "=",
                m + 2 * mn - 2,
                opts,
            ));
            if g.exponent_e() == mn {
                cases.push(check_value(g, Invariant::Eta, "<=", 2 * m + mn - 2, opts));
                cases.push(check_value(g, Invariant::S, "<=", 2 * m + 2 * mn - 3, opts));
            } else {
                let mut c = case(g, "eta and s bounds", "applies when e(G) = mn");
                c.got = format!("e(G) = {}", g.exponent_e());
                cases.push(c);
            }
        }
        (VerifyId::Thm13, VerifyMode::Sampled(trials)) => {
            for mode in [Mode::Interval, Mode::Exact, Mode::Modular] {
                cases.push(campaign_case(
                    g,
                    ExtractorKind::Lemma31(mode),
                    trials,
                    params.seed,
                ));
            }
            cases.push(check_avoider(
                g,
                "mod avoider",
                split_avoider(g, mn - 1)?,
                LengthSet::Multiples(mn),
            ));
        }
        (VerifyId::Lemma21, _) => {
            let e = g.exponent_e();
            let mut c = case(g, "eta <= s - e + 1", "");
            match (
                value_of(g, &Invariant::Eta, opts),
                value_of(g, &Invariant::S, opts),
            ) {
                (Ok(eta), Ok(s)) => {
                    c.expected = format!("<= {}", s + 1 - e);
                    c.got = eta.to_string();
                    c.status = if eta + e <= s + 1 {
                        CaseStatus::Pass
                    } else {
                        CaseStatus::Fail
                    };
                }
                (Err((status, msg)), _) | (_, Err((status, msg))) => {
                    c.got = msg;
                    c.status = status;
                }
            }
            cases.push(c);
        }
        _ => unreachable!("handled by the caller"),
    }
    Ok(())
}
