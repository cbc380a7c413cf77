use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Composite, SynthStatus, SynthesisResult};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// One synthesized combiner, keyed by the exact command text.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub command: String,
    /// `None` when no combiner exists.
    pub combiner: Option<Composite>,
    pub status: SynthStatus,
    /// Whether every nonempty output was newline-terminated.
    pub stream_outputs: bool,
    pub max_size: usize,
    pub observations: usize,
    pub tool_version: String,
}

impl CacheRecord {
    pub fn from_result(command: &str, max_size: usize, r: &SynthesisResult) -> Self {
        CacheRecord {
            command: command.to_string(),
            combiner: r.composite.clone(),
            status: r.status,
            stream_outputs: r.stream_outputs,
            max_size,
            observations: r.observations_used,
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

/// Combiner cache stored as a JSON object mapping command text to record.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CombinerCache {
    records: BTreeMap<String, CacheRecord>,
}

impl CombinerCache {
    /// Loads a cache file; a missing file is an empty cache.
    pub fn load(path: &Path) -> io::Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(text) => serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(e),
        }
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        std::fs::write(path, text + "\n")
    }

    pub fn get(&self, command: &str) -> Option<&CacheRecord> {
        self.records.get(command)
    }

    pub fn insert(&mut self, record: CacheRecord) {
        self.records.insert(record.command.clone(), record);
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{Combiner, Delim};

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cache.json");
        let mut cache = CombinerCache::load(&path).unwrap();
        assert!(cache.is_empty());
        cache.insert(CacheRecord {
            command: "wc -l".into(),
            combiner: Some(Composite::single(Combiner::back(Delim::Newline, Combiner::Add))),
            status: SynthStatus::Ok,
            stream_outputs: true,
            max_size: 7,
            observations: 12,
            tool_version: TOOL_VERSION.into(),
        });
        cache.insert(CacheRecord {
            command: "sed 1d".into(),
            combiner: None,
            status: SynthStatus::Empty,
            stream_outputs: true,
            max_size: 7,
            observations: 3,
            tool_version: TOOL_VERSION.into(),
        });
        cache.save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"(back nl add)\""));
        assert_eq!(CombinerCache::load(&path).unwrap(), cache);
    }
}
