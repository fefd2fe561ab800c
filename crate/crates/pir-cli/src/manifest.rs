//! Run manifests written alongside `--out` artifacts.

use serde::{Deserialize, Serialize};

/// Reproducibility record for one CLI invocation. The artifact itself stays
/// deterministic under identical `(argv, seed)`; wall-clock fields live only
/// here.
#[derive(Serialize, Deserialize, Debug)]
pub struct RunManifest {
    pub schema: u32,
    pub subcommand: String,
    /// The full argv of the invocation.
    pub parameters: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub started_unix: u64,
    pub finished_unix: u64,
    /// SHA-256 of the artifact bytes.
    pub output_sha256: String,
}
