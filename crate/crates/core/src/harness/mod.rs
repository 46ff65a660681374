//! Batch plumbing: seeded random sequences, result records and their cache,
//! sampled extractor campaigns, verification runs and reports.

mod campaign;
mod record;
mod report;
mod verify;

pub use campaign::{
    run_campaign, CampaignFailure, CampaignReport, ExtractOutcome, ExtractorKind, Prepared,
};
pub use record::{run_invariant, witness_file_name, Cache, RecordValue, ResultRecord};
pub use report::{info_report, table_csv, CpCpInfo, InfoReport};
pub use verify::{
    verify, CaseStatus, VerifyCase, VerifyId, VerifyMode, VerifyParams, VerifyReport,
};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::group::FiniteGroup;
use crate::seq::Sequence;
use crate::Error;

/// The generator behind every random sequence: ChaCha8 keyed by
/// `seed_from_u64(seed)` on stream `stream`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `len` terms drawn independently and uniformly from `group` with
/// [`rng_for`]`(seed, stream)`.
pub fn random_sequence(group: &Arc<FiniteGroup>, len: usize, seed: u64, stream: u64) -> Sequence {
    let mut rng = rng_for(seed, stream);
    let order = group.order();
    Sequence::from_terms(group.clone(), (0..len).map(|_| rng.gen_range(0..order)))
        .expect("terms are in range")
}

/// Process exit code for an error: 1 internal, 2 invalid input or failed
/// precondition, 3 a claimed theorem was contradicted, 4 undecided.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::TheoremViolation { .. } | Error::StructureViolated(_) => 3,
        Error::BudgetExceeded { .. } => 4,
        Error::Io(e) if e.kind() == std::io::ErrorKind::NotFound => 2,
        Error::Io(_) | Error::Json(_) => 1,
        _ => 2,
    }
}
