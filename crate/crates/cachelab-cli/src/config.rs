//! Declarative experiment description: one TOML file regenerates a whole
//! result set. Unknown keys are rejected so typos fail loudly.

use std::path::{Path, PathBuf};

use cachelab::policy::PolicySpec;
use cachelab::sim::Topology;
use cachelab::workload::{
    chunkify, zipf_stream, ChunkifySpec, RequestStream, ZipfSpec,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Policies to run, e.g. ["fifo", "compact-car", "cfr:0.5", "opt"].
    pub policies: Vec<PolicySpec>,
    pub capacities: Vec<usize>,
    #[serde(default = "default_topology")]
    pub topology: Topology,
    /// Input stream: either a trace file path...
    pub trace: Option<PathBuf>,
    /// ...or an inline workload description.
    pub workload: Option<WorkloadConfig>,
    /// Seed for inline workloads.
    pub seed: Option<u64>,
    /// Tumbling-window length for target-ratio dynamics; applies to the
    /// policies that expose one.
    pub dynamics_window: Option<u64>,
    pub out_dir: PathBuf,
}

fn default_topology() -> Topology {
    Topology::Single
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WorkloadConfig {
    /// Content-level Zipf draws.
    Zipf { alpha: f64, contents: u64, requests: u64 },
    /// Zipf draws expanded into paced chunk requests.
    Chunked {
        alpha: f64,
        contents: u64,
        requests: u64,
        chunk_kb: f64,
        bitrate_kbps: f64,
        #[serde(default = "default_content_kb")]
        content_kb: f64,
        #[serde(default = "default_arrivals")]
        arrivals_per_sec: u64,
    },
}

fn default_content_kb() -> f64 {
    60.0
}

fn default_arrivals() -> u64 {
    1
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Data(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Data(format!("config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.policies.is_empty() {
            return Err(CliError::Data("config: at least one policy required".into()));
        }
        if self.capacities.is_empty() || self.capacities.contains(&0) {
            return Err(CliError::Data("config: capacities must be positive".into()));
        }
        match (&self.trace, &self.workload) {
            (Some(_), Some(_)) => {
                Err(CliError::Data("config: give either a trace or a workload, not both".into()))
            }
            (None, None) => Err(CliError::Data("config: a trace or a workload is required".into())),
            (None, Some(_)) if self.seed.is_none() => {
                Err(CliError::Data("config: inline workloads need an explicit seed".into()))
            }
            _ => Ok(()),
        }
    }

    /// Materializes the configured request stream.
    pub fn stream(&self) -> Result<RequestStream, CliError> {
        if let Some(path) = &self.trace {
            return cachelab::workload::trace::load_trace(path)
                .map_err(|e| CliError::Data(format!("trace {}: {e}", path.display())));
        }
        let seed = self.seed.expect("validated");
        let stream = match self.workload.as_ref().expect("validated") {
            WorkloadConfig::Zipf { alpha, contents, requests } => zipf_stream(&ZipfSpec {
                n_contents: *contents,
                alpha: *alpha,
                n_requests: *requests,
                seed,
            })
            .map_err(|e| CliError::Data(format!("workload: {e}")))?,
            WorkloadConfig::Chunked {
                alpha,
                contents,
                requests,
                chunk_kb,
                bitrate_kbps,
                content_kb,
                arrivals_per_sec,
            } => {
                let content = zipf_stream(&ZipfSpec {
                    n_contents: *contents,
                    alpha: *alpha,
                    n_requests: *requests,
                    seed,
                })
                .map_err(|e| CliError::Data(format!("workload: {e}")))?;
                let mut spec = ChunkifySpec::new(
                    (chunk_kb * 1000.0).round() as u64,
                    (bitrate_kbps * 1000.0).round() as u64,
                    (content_kb * 1000.0).round() as u64,
                );
                spec.arrivals_per_sec = *arrivals_per_sec;
                chunkify(&content, &spec)
                    .map_err(|e| CliError::Data(format!("workload: {e}")))?
                    .reindexed()
            }
        };
        Ok(stream)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        policies = ["fifo", "compact-car"]
        capacities = [10, 100]
        out_dir = "results"
        seed = 7
        [workload]
        kind = "zipf"
        alpha = 1.0
        contents = 100
        requests = 1000
    "#;

    #[test]
    fn minimal_config_parses() {
        let config = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(config.policies.len(), 2);
        assert_eq!(config.topology, Topology::Single);
        assert_eq!(config.stream().unwrap().len(), 1000);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("seed = 7", "seed = 7\nbogus = 1");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn unknown_policy_is_rejected() {
        let text = MINIMAL.replace("\"fifo\"", "\"nru\"");
        let err = ExperimentConfig::parse(&text).unwrap_err();
        assert!(err.message().contains("unknown policy"));
    }

    #[test]
    fn workload_without_seed_is_rejected() {
        let text = MINIMAL.replace("seed = 7", "");
        assert!(ExperimentConfig::parse(&text).is_err());
    }

    #[test]
    fn trace_and_workload_are_mutually_exclusive() {
        let text = MINIMAL.replace("out_dir = \"results\"", "out_dir = \"r\"\ntrace = \"t.csv\"");
        assert!(ExperimentConfig::parse(&text).is_err());
    }
}
