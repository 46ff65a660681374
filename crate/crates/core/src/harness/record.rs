use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::group::FiniteGroup;
use crate::invariants::{compute, Invariant, InvariantRecord, Method, SearchOptions, Value};
use crate::seq::write_sequence;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RecordValue {
    Exact(usize),
    Unknown { unknown_cap: usize },
}

impl From<Value> for RecordValue {
    fn from(v: Value) -> Self {
        match v {
            Value::Exact(x) => RecordValue::Exact(x),
            Value::Unknown { cap } => RecordValue::Unknown { unknown_cap: cap },
        }
    }
}

/// One JSON-lines result.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub spec: String,
    pub invariant: String,
    pub params: BTreeMap<String, String>,
    pub value: RecordValue,
    pub witness_file: Option<String>,
    pub method: String,
    /// `None` when timing is disabled, which keeps output byte-reproducible.
    pub elapsed_ms: Option<u64>,
}

impl ResultRecord {
    pub fn from_invariant(
        rec: &InvariantRecord,
        witness_file: Option<String>,
        timing: bool,
    ) -> Self {
        let mut params = rec.invariant.params();
        params.insert("cap".into(), rec.cap.to_string());
        ResultRecord {
            spec: rec.spec.clone(),
            invariant: rec.invariant.to_string(),
            params,
            value: rec.value.into(),
            witness_file,
            method: rec.method.as_str().to_string(),
            elapsed_ms: timing.then_some(rec.elapsed.as_millis() as u64),
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn exact(&self) -> Option<usize> {
        match self.value {
            RecordValue::Exact(v) => Some(v),
            RecordValue::Unknown { .. } => None,
        }
    }

    fn key(&self) -> (String, String, BTreeMap<String, String>) {
        (
            self.spec.clone(),
            self.invariant.clone(),
            self.params.clone(),
        )
    }
}

/// File name for an extremal witness, derived from the record key.
pub fn witness_file_name(spec: &str, invariant: &Invariant, cap: usize) -> String {
    let clean = |s: &str| -> String {
        s.chars()
            .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
            .collect()
    };
    format!(
        "{}__{}__cap{cap}.seq",
        clean(spec),
        clean(&invariant.to_string())
    )
}

/// Append-only JSON-lines cache keyed by `(spec, invariant, params)`, where
/// `params` includes the cap.
pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<(String, String, BTreeMap<String, String>), ResultRecord>,
}

impl Cache {
    /// Loads `path`; a missing file is an empty cache.
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        match std::fs::read_to_string(path) {
            Ok(text) => {
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    let rec: ResultRecord = serde_json::from_str(line)?;
                    entries.insert(rec.key(), rec);
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
            Err(e) => return Err(e.into()),
        }
        Ok(Cache {
            path: path.to_path_buf(),
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, spec: &str, invariant: &Invariant, cap: usize) -> Option<ResultRecord> {
        let mut params = invariant.params();
        params.insert("cap".into(), cap.to_string());
        self.entries
            .get(&(spec.to_string(), invariant.to_string(), params))
            .map(|r| ResultRecord {
                method: Method::Cache.as_str().to_string(),
                ..r.clone()
            })
    }

    pub fn insert(&mut self, rec: &ResultRecord) -> Result<()> {
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        writeln!(file, "{}", rec.to_json_line())?;
        self.entries.insert(rec.key(), rec.clone());
        Ok(())
    }
}

/// Computes (or fetches from `cache`) one invariant. The extremal witness is
/// written to `witness_dir` when given.
pub fn run_invariant(
    group: &Arc<FiniteGroup>,
    invariant: &Invariant,
    opts: SearchOptions,
    cache: Option<&mut Cache>,
    witness_dir: Option<&Path>,
    timing: bool,
) -> Result<ResultRecord> {
    let cap = opts.cap.unwrap_or_else(|| invariant.default_cap(group));
    let spec = group.spec();
    if let Some(hit) = cache.as_ref().and_then(|c| c.get(&spec, invariant, cap)) {
        return Ok(hit);
    }
    let rec = compute(
        group,
        invariant,
        SearchOptions {
            cap: Some(cap),
            ..opts
        },
    )?;
    let witness_file = match (witness_dir, &rec.witness) {
        (Some(dir), Some(w)) => {
            let name = witness_file_name(&spec, invariant, cap);
            write_sequence(&dir.join(&name), w)?;
            Some(name)
        }
        _ => None,
    };
    let out = ResultRecord::from_invariant(&rec, witness_file, timing);
    if let Some(cache) = cache {
        cache.insert(&out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::build_spec;
    use crate::seq::read_sequence;

    #[test]
    fn record_json_shape() {
        let rec = ResultRecord {
            spec: "dihedral:4".into(),
            invariant: "E".into(),
            params: [("cap".to_string(), "16".to_string())].into(),
            value: RecordValue::Unknown { unknown_cap: 16 },
            witness_file: None,
            method: "exact-search".into(),
            elapsed_ms: None,
        };
        assert_eq!(
            rec.to_json_line(),
            r#"{"spec":"dihedral:4","invariant":"E","params":{"cap":"16"},"value":{"unknown_cap":16},"witness_file":null,"method":"exact-search","elapsed_ms":null}"#
        );
        let back: ResultRecord = serde_json::from_str(&rec.to_json_line()).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn cache_hits_match_recomputation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.jsonl");
        let g = build_spec("product:cyclic:2*cyclic:2").unwrap();
        let inv = Invariant::Egz;
        let mut cache = Cache::open(&path).unwrap();
        let fresh = run_invariant(
            &g,
            &inv,
            SearchOptions::default(),
            Some(&mut cache),
            Some(dir.path()),
            false,
        )
        .unwrap();
        assert_eq!(fresh.exact(), Some(6));
        let w = read_sequence(&dir.path().join(fresh.witness_file.as_ref().unwrap())).unwrap();
        assert_eq!(w.len(), 5);

        let mut reopened = Cache::open(&path).unwrap();
        assert_eq!(reopened.len(), 1);
        let hit = run_invariant(
            &g,
            &inv,
            SearchOptions::default(),
            Some(&mut reopened),
            None,
            false,
        )
        .unwrap();
        assert_eq!(hit.method, "cache");
        assert_eq!(
            ResultRecord {
                method: fresh.method.clone(),
                ..hit
            },
            fresh
        );

        let other_cap = run_invariant(
            &g,
            &inv,
            SearchOptions {
                cap: Some(5),
                ..Default::default()
            },
            Some(&mut reopened),
            None,
            false,
        )
        .unwrap();
        assert_eq!(other_cap.value, RecordValue::Unknown { unknown_cap: 5 });
        assert_eq!(reopened.len(), 2);
    }

    #[test]
    fn witness_names() {
        assert_eq!(
            witness_file_name(
                "semidirect:2,4,3",
                &Invariant::SL(crate::seq::LengthSet::Multiples(4)),
                16
            ),
            "semidirect_2_4_3__sL_4N__cap16.seq"
        );
    }
}
