//! Report headers shared by every output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::ExperimentConfig;

/// Version plus `git describe` output at build time.
pub const BUILD_ID: &str = env!("PRIMEWALK_BUILD_ID");

/// Config echo, build identifier and seed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Header {
    pub build: String,
    pub seed: u64,
    pub config: BTreeMap<String, String>,
}

impl Header {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self { build: BUILD_ID.to_string(), seed: cfg.seed, config: cfg.echo() }
    }

    /// `# key=value` comment lines for CSV output.
    pub fn csv_comments(&self) -> String {
        let mut s = format!("# build={}\n# seed={}\n", self.build, self.seed);
        for (k, v) in &self.config {
            s.push_str(&format!("# config.{k}={v}\n"));
        }
        s
    }
}
