//! Run manifests: one JSON file per subcommand recording what produced the
//! outputs. Written with `complete = false` before any work and finalized
//! afterwards, so an interrupted run is visibly partial. No timestamps —
//! identical inputs must produce byte-identical output trees.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub const FORMAT_TAG: &str = "bancoex-outputs-v1";

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub format: &'static str,
    pub subcommand: &'static str,
    pub config_path: String,
    pub config_hash: String,
    pub seed: u64,
    pub workers: usize,
    pub variants: Vec<String>,
    pub sets: Vec<String>,
    pub complete: bool,
}

impl Manifest {
    pub fn new(
        subcommand: &'static str,
        config_path: &Path,
        config_hash: &str,
        seed: u64,
        workers: usize,
        variants: Vec<String>,
        sets: Vec<String>,
    ) -> Manifest {
        Manifest {
            format: FORMAT_TAG,
            subcommand,
            config_path: config_path.display().to_string(),
            config_hash: config_hash.to_string(),
            seed,
            workers,
            variants,
            sets,
            complete: false,
        }
    }

    fn path(&self, out: &Path) -> PathBuf {
        out.join(format!("{}_manifest.json", self.subcommand))
    }

    pub fn write(&self, out: &Path) -> Result<(), CliError> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Data(format!("manifest serialization: {e}")))?;
        std::fs::write(self.path(out), json + "\n")?;
        Ok(())
    }

    pub fn finalize(mut self, out: &Path) -> Result<(), CliError> {
        self.complete = true;
        self.write(out)
    }
}
