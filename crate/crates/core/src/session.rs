//! Versioned session snapshots: the dataset, every stage artifact, and
//! hashes that let a reader spot tampering or drift.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::pipeline::{Artifacts, PipelineError, Stage};

pub const SESSION_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("session file is not valid: {0}")]
    Parse(String),
    #[error("unsupported session version {found} (this build reads {SESSION_VERSION})")]
    UnsupportedVersion { found: u64 },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
}

/// Rewrites every non-integer number as a 12-significant-digit string so the
/// hash does not depend on the last bits of a float.
fn canonical(v: &Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            Value::String(if x == 0.0 { "0".into() } else { format!("{x:.11e}") })
        }
        Value::Array(items) => Value::Array(items.iter().map(canonical).collect()),
        Value::Object(map) => Value::Object(map.iter().map(|(k, v)| (k.clone(), canonical(v))).collect()),
        other => other.clone(),
    }
}

/// Hex SHA-256 of the canonical JSON form of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_value(value).expect("serializable");
    let text = serde_json::to_string(&canonical(&json)).expect("canonical json");
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StageHashes {
    pub evidence: String,
    pub qualitative: String,
    pub ranking: String,
    pub allocation: String,
}

impl StageHashes {
    pub fn of(a: &Artifacts) -> Self {
        StageHashes {
            evidence: content_hash(&a.evidence),
            qualitative: content_hash(&a.qualitative),
            ranking: content_hash(&a.ranking),
            allocation: content_hash(&a.allocation),
        }
    }

    pub fn get(&self, stage: Stage) -> &str {
        match stage {
            Stage::Evidence => &self.evidence,
            Stage::Qualitative => &self.qualitative,
            Stage::Ranking => &self.ranking,
            Stage::Allocation => &self.allocation,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Provenance {
    pub dataset_hash: String,
    pub config_hash: String,
    pub artifact_hash: String,
    pub stages: StageHashes,
    pub library_version: String,
    pub created_unix: u64,
}

// Creation time is not part of a session's identity.
impl PartialEq for Provenance {
    fn eq(&self, other: &Self) -> bool {
        self.dataset_hash == other.dataset_hash
            && self.config_hash == other.config_hash
            && self.artifact_hash == other.artifact_hash
            && self.library_version == other.library_version
    }
}

impl Provenance {
    fn of(ds: &Dataset, a: &Artifacts) -> Self {
        Provenance {
            dataset_hash: content_hash(ds),
            config_hash: content_hash(ds.config()),
            artifact_hash: content_hash(a),
            stages: StageHashes::of(a),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub version: u32,
    pub dataset: Dataset,
    pub artifacts: Artifacts,
    pub provenance: Provenance,
}

/// Runs every stage on a dataset. Pure apart from the creation timestamp.
pub fn run_pipeline(ds: &Dataset) -> Result<Session, PipelineError> {
    let artifacts = Artifacts::compute(ds)?;
    Ok(Session::assemble(ds.clone(), artifacts))
}

impl Session {
    fn assemble(dataset: Dataset, artifacts: Artifacts) -> Session {
        let provenance = Provenance::of(&dataset, &artifacts);
        Session {
            version: SESSION_VERSION,
            dataset,
            artifacts,
            provenance,
        }
    }

    /// New session for an edited dataset, recomputing from `from` onwards.
    pub fn revise(&self, dataset: Dataset, from: Stage) -> Result<Session, PipelineError> {
        let artifacts = self.artifacts.recompute(&dataset, from)?;
        Ok(Session::assemble(dataset, artifacts))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("session serializes")
    }

    /// Writes through a temporary file in the target directory, then renames.
    pub fn save(&self, path: &Path) -> Result<(), SessionError> {
        write_atomic(path, self.to_json().as_bytes())
    }

    /// Parses a session document; hash drift comes back as warnings.
    pub fn from_json(text: &str) -> Result<(Session, Vec<String>), SessionError> {
        let value: Value = serde_json::from_str(text).map_err(|e| SessionError::Parse(e.to_string()))?;
        let found = value.get("version").and_then(Value::as_u64).unwrap_or(0);
        if found != u64::from(SESSION_VERSION) {
            return Err(SessionError::UnsupportedVersion { found });
        }
        let session: Session = serde_json::from_value(value).map_err(|e| SessionError::Parse(e.to_string()))?;
        let mut warnings = Vec::new();
        let p = &session.provenance;
        if content_hash(&session.dataset) != p.dataset_hash {
            warnings.push("integrity: dataset does not match its recorded hash".to_string());
        }
        if content_hash(&session.artifacts) != p.artifact_hash {
            warnings.push("integrity: artifacts do not match their recorded hash".to_string());
        }
        let stored = StageHashes::of(&session.artifacts);
        for stage in [Stage::Evidence, Stage::Qualitative, Stage::Ranking, Stage::Allocation] {
            if stored.get(stage) != p.stages.get(stage) {
                warnings.push(format!("integrity: {stage} artifacts do not match their recorded hash"));
            }
        }
        match Artifacts::compute(&session.dataset) {
            Ok(fresh) if content_hash(&fresh) != content_hash(&session.artifacts) => {
                warnings.push("integrity: artifacts are not reproducible from the stored dataset".to_string());
            }
            Ok(_) => {}
            Err(e) => warnings.push(format!("integrity: stored dataset no longer runs: {e}")),
        }
        Ok((session, warnings))
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), SessionError> {
    let io = |source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn load_session(path: &Path) -> Result<(Session, Vec<String>), SessionError> {
    let text = std::fs::read_to_string(path).map_err(|source| SessionError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Session::from_json(&text)
}
