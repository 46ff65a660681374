use thiserror::Error;

use crate::extract::ExtractionTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid twist: s={s} does not define an automorphism action of C_{m} on C_{n} (need gcd(s,n)=1 and s^m = 1 mod n)")]
    InvalidTwist { m: usize, n: usize, s: usize },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("group order {0} exceeds the construction cap of {cap}", cap = crate::group::MAX_ORDER)]
    OrderTooLarge(usize),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("unsupported group shape: {0}")]
    BadShape(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("element {elem} is not in a group of order {order}")]
    InvalidElement { elem: usize, order: usize },
    #[error("search budget exceeded: {states} state-bits requested, limit {limit}")]
    BudgetExceeded {
        states: u128,
        limit: u128,
        /// Best lower bound established before giving up, when a search was running.
        lower_bound: Option<usize>,
    },
    #[error("group is not abelian")]
    NotAbelian,
    #[error("sequence too short: need at least {need} terms, got {got}")]
    TooShort { need: usize, got: usize },
    #[error("structure violated: {0}")]
    StructureViolated(String),
    #[error("theorem violation: {msg}")]
    TheoremViolation {
        msg: String,
        trace: Option<Box<ExtractionTrace>>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn violation(msg: impl Into<String>) -> Self {
        Error::TheoremViolation {
            msg: msg.into(),
            trace: None,
        }
    }
}
