use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use super::random_sequence;
use crate::extract::{
    cyclic_threshold, extract_cyclic, CyclicOutcome, EgzExtractor, ExtractionTrace, Extractor,
    Mode, StructureCertificate,
};
use crate::group::FiniteGroup;
use crate::seq::{verify_witness, Sequence, Witness};
use crate::{Error, Result};

/// An extractor selectable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtractorKind {
    /// Cyclic-group service with parameter `k`.
    Cyclic {
        k: usize,
    },
    Lemma31(Mode),
    Egz,
}

impl fmt::Display for ExtractorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtractorKind::Cyclic { k } => write!(f, "lemma2.4:{k}"),
            ExtractorKind::Lemma31(Mode::Interval) => f.write_str("l31-1"),
            ExtractorKind::Lemma31(Mode::Exact) => f.write_str("l31-2"),
            ExtractorKind::Lemma31(Mode::Modular) => f.write_str("l31-3"),
            ExtractorKind::Egz => f.write_str("egz"),
        }
    }
}

impl FromStr for ExtractorKind {
    type Err = Error;

    /// `lemma2.4` (with `k = 2`), `lemma2.4:<k>`, `l31-1`, `l31-2`, `l31-3` or `egz`.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lemma2.4" => ExtractorKind::Cyclic { k: 2 },
            "l31-1" => ExtractorKind::Lemma31(Mode::Interval),
            "l31-2" => ExtractorKind::Lemma31(Mode::Exact),
            "l31-3" => ExtractorKind::Lemma31(Mode::Modular),
            "egz" => ExtractorKind::Egz,
            _ => match s.strip_prefix("lemma2.4:").map(str::parse::<usize>) {
                Some(Ok(k)) if k >= 1 => ExtractorKind::Cyclic { k },
                _ => {
                    return Err(Error::parse(0, format!("unknown extractor {s:?}; expected lemma2.4[:k], l31-1, l31-2, l31-3 or egz")))
                }
            },
        })
    }
}

/// What one extraction produced.
#[derive(Clone, Debug)]
pub struct ExtractOutcome {
    pub witness: Option<Witness>,
    pub certificate: Option<StructureCertificate>,
    pub trace: Option<ExtractionTrace>,
}

/// An extractor with its per-group precomputation done.
pub enum Prepared {
    Cyclic(usize),
    Lemma31(Extractor, Mode),
    Egz(EgzExtractor),
}

impl Prepared {
    pub fn new(kind: ExtractorKind, group: &Arc<FiniteGroup>) -> Result<Self> {
        Ok(match kind {
            ExtractorKind::Cyclic { k } => {
                if !group.is_cyclic() {
                    return Err(Error::BadShape(format!("{} is not cyclic", group.label())));
                }
                Prepared::Cyclic(k)
            }
            ExtractorKind::Lemma31(mode) => Prepared::Lemma31(Extractor::new(group.clone())?, mode),
            ExtractorKind::Egz => Prepared::Egz(EgzExtractor::new(group.clone())?),
        })
    }

    /// Input length at which a witness is guaranteed.
    pub fn threshold(&self, group: &FiniteGroup) -> usize {
        match self {
            Prepared::Cyclic(k) => cyclic_threshold(group.order(), *k) + 1,
            Prepared::Lemma31(x, mode) => x.threshold(*mode),
            Prepared::Egz(x) => x.threshold(),
        }
    }

    pub fn extract(&self, seq: &Sequence) -> Result<ExtractOutcome> {
        Ok(match self {
            Prepared::Cyclic(k) => match extract_cyclic(seq, *k)? {
                CyclicOutcome::Witness(w) => ExtractOutcome {
                    witness: Some(w),
                    certificate: None,
                    trace: None,
                },
                CyclicOutcome::Structure(c) => ExtractOutcome {
                    witness: None,
                    certificate: Some(c),
                    trace: None,
                },
            },
            Prepared::Lemma31(x, mode) => {
                let out = x.extract(seq, *mode)?;
                ExtractOutcome {
                    witness: Some(out.witness),
                    certificate: None,
                    trace: Some(out.trace),
                }
            }
            Prepared::Egz(x) => {
                let out = x.extract(seq)?;
                ExtractOutcome {
                    witness: Some(out.witness),
                    certificate: None,
                    trace: Some(out.trace),
                }
            }
        })
    }
}

#[derive(Clone, Debug)]
pub struct CampaignFailure {
    pub trial: u64,
    pub sequence: Sequence,
    pub error: String,
    /// The failure contradicts a claimed theorem (exit code 3).
    pub violation: bool,
}

/// Result of running one extractor on many seeded random sequences.
#[derive(Clone, Debug)]
pub struct CampaignReport {
    pub spec: String,
    pub extractor: String,
    pub seed: u64,
    pub trials: u64,
    pub length: usize,
    pub successes: u64,
    pub failures: Vec<CampaignFailure>,
    /// Hash of every witness in trial order, for reproducibility checks.
    pub digest: u64,
}

impl CampaignReport {
    pub fn violations(&self) -> usize {
        self.failures.iter().filter(|f| f.violation).count()
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.successes == self.trials
    }
}

/// Runs `kind` on `trials` random sequences of threshold length; trial `t`
/// uses [`random_sequence`]`(group, len, seed, t)`.
pub fn run_campaign(
    group: &Arc<FiniteGroup>,
    kind: ExtractorKind,
    trials: u64,
    seed: u64,
) -> Result<CampaignReport> {
    let prepared = Prepared::new(kind, group)?;
    let length = prepared.threshold(group);
    let results: Vec<std::result::Result<Witness, CampaignFailure>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let seq = random_sequence(group, length, seed, trial);
            let fail = |error: String, violation: bool| CampaignFailure {
                trial,
                sequence: seq.clone(),
                error,
                violation,
            };
            match prepared.extract(&seq) {
                Ok(ExtractOutcome {
                    witness: Some(w), ..
                }) if verify_witness(&seq, &w) && w.product == group.identity() => Ok(w),
                Ok(_) => Err(fail("no verified witness".into(), true)),
                Err(e) => {
                    let violation = matches!(
                        e,
                        Error::TheoremViolation { .. } | Error::StructureViolated(_)
                    );
                    Err(fail(e.to_string(), violation))
                }
            }
        })
        .collect();
    let mut hasher = DefaultHasher::new();
    let mut successes = 0;
    let mut failures = Vec::new();
    for r in results {
        match r {
            Ok(w) => {
                successes += 1;
                w.ordered.hash(&mut hasher);
            }
            Err(f) => failures.push(f),
        }
    }
    Ok(CampaignReport {
        spec: group.spec(),
        extractor: kind.to_string(),
        seed,
        trials,
        length,
        successes,
        failures,
        digest: hasher.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_spec;

    #[test]
    fn names_round_trip() {
        for name in ["lemma2.4:3", "l31-1", "l31-2", "l31-3", "egz"] {
            assert_eq!(name.parse::<ExtractorKind>().unwrap().to_string(), name);
        }
        assert_eq!(
            "lemma2.4".parse::<ExtractorKind>().unwrap(),
            ExtractorKind::Cyclic { k: 2 }
        );
        assert!("l31-4".parse::<ExtractorKind>().is_err());
    }

    #[test]
    fn small_campaigns_pass_and_repeat() {
        let g = build_spec("semidirect:2,6,5").unwrap();
        for kind in [
            ExtractorKind::Lemma31(Mode::Interval),
            ExtractorKind::Lemma31(Mode::Modular),
            ExtractorKind::Egz,
        ] {
            let a = run_campaign(&g, kind, 200, 9).unwrap();
            assert!(a.passed(), "{kind}: {:?}", a.failures.first());
            let b = run_campaign(&g, kind, 200, 9).unwrap();
            assert_eq!(a.digest, b.digest);
        }
        let c5 = build_spec("cyclic:5").unwrap();
        assert!(run_campaign(&c5, ExtractorKind::Cyclic { k: 3 }, 100, 1)
            .unwrap()
            .passed());
    }
}
