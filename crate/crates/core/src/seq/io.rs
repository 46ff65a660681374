//! Text format for sequences and JSON for witnesses.
//!
//! A sequence file is UTF-8: the group spec on the first line, then one
//! `index:multiplicity` term per line. Writers emit terms in increasing index
//! order; readers accept any order and merge repeated indices.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{Sequence, Witness};
use crate::group::{build_spec, FiniteGroup};
use crate::{Error, Result};

pub fn render_sequence(seq: &Sequence) -> String {
    let mut out = seq.group().spec();
    out.push('\n');
    for (g, k) in seq.counts() {
        out.push_str(&format!("{g}:{k}\n"));
    }
    out
}

pub fn parse_sequence(text: &str) -> Result<Sequence> {
    let mut lines = text.lines();
    let spec = lines
        .next()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .ok_or_else(|| Error::parse(0, "missing group spec line"))?;
    let group = build_spec(spec)?;
    parse_terms(group, lines, spec.len() + 1)
}

fn parse_terms<'a>(
    group: Arc<FiniteGroup>,
    lines: impl Iterator<Item = &'a str>,
    mut offset: usize,
) -> Result<Sequence> {
    let mut seq = Sequence::new(group);
    for line in lines {
        let trimmed = line.trim();
        if !trimmed.is_empty() {
            let (g, k) = trimmed.split_once(':').ok_or_else(|| {
                Error::parse(
                    offset,
                    format!("expected `index:multiplicity`, got {trimmed:?}"),
                )
            })?;
            let k_pos = offset + g.len() + 1;
            let g: usize = g
                .parse()
                .map_err(|_| Error::parse(offset, format!("bad element index {g:?}")))?;
            let k: usize = k
                .parse()
                .map_err(|_| Error::parse(k_pos, format!("bad multiplicity {k:?}")))?;
            seq.push(g, k)?;
        }
        offset += line.len() + 1;
    }
    Ok(seq)
}

pub fn read_sequence(path: &Path) -> Result<Sequence> {
    parse_sequence(&std::fs::read_to_string(path)?)
}

pub fn write_sequence(path: &Path, seq: &Sequence) -> Result<()> {
    std::fs::write(path, render_sequence(seq))?;
    Ok(())
}

/// Wire form of a [`Witness`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub group: String,
    pub ordered: Vec<usize>,
    pub product: usize,
    pub length: usize,
}

pub fn witness_to_json(group: &FiniteGroup, w: &Witness) -> WitnessJson {
    WitnessJson {
        group: group.spec(),
        ordered: w.ordered.clone(),
        product: w.product,
        length: w.length,
    }
}

pub fn witness_from_json(json: &WitnessJson) -> Result<(Arc<FiniteGroup>, Witness)> {
    let group = build_spec(&json.group)?;
    Ok((
        group,
        Witness {
            ordered: json.ordered.clone(),
            product: json.product,
            length: json.length,
        },
    ))
}

impl std::str::FromStr for Sequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_sequence(s)
    }
}
