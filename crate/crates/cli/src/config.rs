//! Run configuration: JSON config file, flag overrides, and the hash that
//! ties an artifact chain together.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};

use persuasion::features::{Family, Variant};
use persuasion::pairing::{HELDOUT_END_UTC, TRAIN_BOUNDARY_UTC};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Directory holding `lexicons/` and `norms/`.
    pub resources: PathBuf,
    pub seed: u64,
    pub variant: Variant,
    pub task: Task,
    pub families: Vec<Family>,
    pub lambda_grid: Vec<f64>,
    pub train_boundary: i64,
    pub heldout_end: i64,
    pub n_resamples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Pair,
    Malleability,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            resources: PathBuf::from("resources"),
            seed: 17,
            variant: Variant::RootReply,
            task: Task::Pair,
            families: vec![Family::Interplay, Family::Style],
            lambda_grid: persuasion::models::DEFAULT_LAMBDA_GRID.to_vec(),
            train_boundary: TRAIN_BOUNDARY_UTC,
            heldout_end: HELDOUT_END_UTC,
            n_resamples: 10_000,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read config {}", p.display()))?;
                serde_json::from_str(&text)
                    .with_context(|| format!("invalid config {}", p.display()))
            }
        }
    }

    /// Hash of the fields that determine artifact contents shared across
    /// stages. Task, variant, and sampling seeds are encoded in artifact
    /// filenames or only affect terminal outputs, so they are excluded —
    /// otherwise switching `--task` would falsely invalidate the corpus.
    pub fn hash(&self) -> String {
        persuasion::report::config_hash(&serde_json::json!({
            "resources": self.resources,
            "families": self.families,
            "lambda_grid": self.lambda_grid,
            "train_boundary": self.train_boundary,
            "heldout_end": self.heldout_end,
        }))
    }
}
