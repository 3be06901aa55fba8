//! Artifact emission: CSV/JSON outputs that embed the producing config
//! hash, plus the staleness check used to validate artifact chains.

use std::io::{BufRead, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dynamics::BinnedRate;
use crate::models::{Direction, SignificanceRow, TruncatedAnnotation};
use crate::num::Real;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot write artifact {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("stale artifact {path}: produced by config {found}, expected {expected}")]
    StaleArtifact {
        path: String,
        expected: String,
        found: String,
    },
    #[error("artifact {path} carries no config hash")]
    MissingHash { path: String },
}

/// SHA-256 of the canonical JSON encoding of a config, as lowercase hex.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let json = serde_json::to_vec(config).expect("config serializes");
    let digest = Sha256::digest(&json);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn io_err(path: &Path, source: std::io::Error) -> ReportError {
    ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write a binned-rate table as CSV. The first line is a comment carrying
/// the config hash; columns are bin, trials, successes, rate, stderr.
pub fn write_rates_csv<R: Real>(
    path: &Path,
    table: &[BinnedRate<R>],
    hash: &str,
) -> Result<(), ReportError> {
    let mut out = String::new();
    out.push_str(&format!("# config_hash={hash}\n"));
    out.push_str("bin,trials,successes,rate,stderr\n");
    for row in table {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.bin_key, row.trials, row.successes, row.rate, row.stderr
        ));
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

fn direction_str(d: Direction) -> &'static str {
    match d {
        Direction::Up => "up",
        Direction::Down => "down",
    }
}

fn annotation_str(a: TruncatedAnnotation) -> &'static str {
    match a {
        TruncatedAnnotation::None => "",
        TruncatedAnnotation::T => "T",
        TruncatedAnnotation::TReversed => "T_reversed",
        TruncatedAnnotation::Unavailable => "unavailable",
    }
}

/// Significance rows as CSV (table2.csv / table3.csv / table4.csv layout).
pub fn write_significance_csv(
    path: &Path,
    rows: &[SignificanceRow],
    hash: &str,
) -> Result<(), ReportError> {
    let mut out = String::new();
    out.push_str(&format!("# config_hash={hash}\n"));
    out.push_str("feature,direction,level,p,p_corrected,n,truncated\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.feature,
            direction_str(r.direction),
            r.level,
            r.p,
            r.p_corrected,
            r.n,
            annotation_str(r.truncated)
        ));
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

/// JSON artifact wrapper: `{"config_hash": ..., "data": ...}`.
pub fn write_json_artifact<T: Serialize>(
    path: &Path,
    data: &T,
    hash: &str,
) -> Result<(), ReportError> {
    let value = serde_json::json!({ "config_hash": hash, "data": data });
    let mut file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    serde_json::to_writer_pretty(&mut file, &value).map_err(|e| io_err(path, e.into()))?;
    file.write_all(b"\n").map_err(|e| io_err(path, e))
}

/// Extract the config hash an artifact was produced with: the leading
/// `# config_hash=` comment for CSV, the `config_hash` field for JSON.
pub fn read_artifact_hash(path: &Path) -> Result<String, ReportError> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut first = String::new();
    std::io::BufReader::new(file)
        .read_line(&mut first)
        .map_err(|e| io_err(path, e))?;
    if let Some(rest) = first.trim().strip_prefix("# config_hash=") {
        return Ok(rest.to_string());
    }
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|_| ReportError::MissingHash {
            path: path.display().to_string(),
        })?;
    value
        .get("config_hash")
        .and_then(|v| v.as_str())
        .map(|s| s.to_string())
        .ok_or(ReportError::MissingHash {
            path: path.display().to_string(),
        })
}

/// Fail with `StaleArtifact` unless the artifact carries `expected`.
pub fn check_artifact(path: &Path, expected: &str) -> Result<(), ReportError> {
    let found = read_artifact_hash(path)?;
    if found == expected {
        Ok(())
    } else {
        Err(ReportError::StaleArtifact {
            path: path.display().to_string(),
            expected: expected.to_string(),
            found,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_input_sensitive() {
        let a = config_hash(&serde_json::json!({"seed": 1}));
        let b = config_hash(&serde_json::json!({"seed": 1}));
        let c = config_hash(&serde_json::json!({"seed": 2}));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn csv_round_trips_its_hash() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig4a.csv");
        let table = vec![BinnedRate::<f64>::from_counts(1, 10, 3)];
        write_rates_csv(&path, &table, "abc123").unwrap();
        assert_eq!(read_artifact_hash(&path).unwrap(), "abc123");
        assert!(check_artifact(&path, "abc123").is_ok());
        assert!(matches!(
            check_artifact(&path, "other"),
            Err(ReportError::StaleArtifact { .. })
        ));
    }

    #[test]
    fn json_round_trips_its_hash() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fig8.json");
        write_json_artifact(&path, &serde_json::json!({"x": 1}), "deadbeef").unwrap();
        assert_eq!(read_artifact_hash(&path).unwrap(), "deadbeef");
    }

    #[test]
    fn unhashed_artifact_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("plain.csv");
        std::fs::write(&path, "bin,rate\n1,0.5\n").unwrap();
        assert!(matches!(
            read_artifact_hash(&path),
            Err(ReportError::MissingHash { .. })
        ));
    }
}
