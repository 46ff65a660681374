use serde::Serialize;

use crate::group::Elem;
use crate::seq::Witness;

/// One block or leaf selection made during an extraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    /// Call that produced the step; nested calls get larger ids.
    pub scope: usize,
    /// Recursion depth, 0 for the outermost call.
    pub level: usize,
    pub description: String,
    /// Positions in the truncated input, in product order.
    pub positions: Vec<usize>,
    /// Block product inside the group of that level.
    pub sigma: Elem,
    /// Whether `sigma` lies in the kernel of that level's projection.
    pub in_kernel: bool,
}

/// Record of an extraction, attached to results and to theorem violations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExtractionTrace {
    pub group: String,
    /// Input terms after truncation to the threshold length.
    pub input: Vec<Elem>,
    pub steps: Vec<TraceStep>,
    /// Fallbacks taken, in order.
    pub notes: Vec<String>,
    pub witness: Option<Witness>,
}

/// Mutable extraction state threaded through the recursion.
///
/// Positions passed to [`Ctx::record`] are local to the caller; the stack of
/// position maps translates them back to input positions.
#[derive(Default)]
pub(crate) struct Ctx {
    pub trace: ExtractionTrace,
    next_scope: usize,
    frames: Vec<Vec<usize>>,
}

impl Ctx {
    pub fn new(group: String, input: Vec<Elem>) -> Self {
        let frame = (0..input.len()).collect();
        Ctx {
            trace: ExtractionTrace {
                group,
                input,
                ..Default::default()
            },
            next_scope: 0,
            frames: vec![frame],
        }
    }

    pub fn open_scope(&mut self) -> usize {
        self.next_scope += 1;
        self.next_scope - 1
    }

    /// Enters a sub-call whose local position `i` is the caller's `local[i]`.
    pub fn enter(&mut self, local: &[usize]) {
        let mapped = match self.frames.last() {
            Some(top) => local.iter().map(|&i| top[i]).collect(),
            None => local.to_vec(),
        };
        self.frames.push(mapped);
    }

    pub fn leave(&mut self) {
        self.frames.pop();
    }

    pub fn global(&self, local: &[usize]) -> Vec<usize> {
        match self.frames.last() {
            Some(top) => local.iter().map(|&i| top[i]).collect(),
            None => local.to_vec(),
        }
    }

    pub fn record(
        &mut self,
        scope: usize,
        level: usize,
        description: &str,
        local: &[usize],
        sigma: Elem,
        in_kernel: bool,
    ) {
        let positions = self.global(local);
        self.trace.steps.push(TraceStep {
            scope,
            level,
            description: description.to_string(),
            positions,
            sigma,
            in_kernel,
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.trace.notes.push(note.into());
    }
}
