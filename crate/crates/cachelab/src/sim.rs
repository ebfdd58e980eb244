//! Trace-driven simulation: single-node replay, capacity sweeps, the line
//! topology with on-path cache-everything, the ideal-cooperation bound, and
//! target-ratio dynamics sampling.
//!
//! Requests are processed one at a time, end to end: a chunk cached on the
//! return path is visible to the next request only, and link delays are not
//! modeled. Reports are deterministic for a given config and stream.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::{Capacity, KernelError, ReplacementPolicy};
use crate::policy::{BuildError, PolicySpec};
use crate::workload::RequestStream;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Topology {
    Single,
    Line { nodes: usize },
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Single => write!(f, "single"),
            Topology::Line { nodes } => write!(f, "line:{nodes}"),
        }
    }
}

impl FromStr for Topology {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "single" {
            return Ok(Topology::Single);
        }
        if let Some(k) = s.strip_prefix("line:") {
            let nodes: usize =
                k.parse().map_err(|_| SimError::BadTopology(s.to_string()))?;
            if nodes >= 1 {
                return Ok(Topology::Line { nodes });
            }
        }
        Err(SimError::BadTopology(s.to_string()))
    }
}

impl TryFrom<String> for Topology {
    type Error = SimError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Topology> for String {
    fn from(t: Topology) -> String {
        t.to_string()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Capacity(#[from] KernelError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("bad topology {0:?} (expected \"single\" or \"line:<k>\")")]
    BadTopology(String),
    #[error("offline opt cannot run in a line topology: inner nodes see an arrival stream that is not known in advance")]
    OptInLine,
    #[error("policy {0} has no target ratio to log")]
    NoTargetRatio(String),
    #[error("dynamics window must be positive")]
    ZeroWindow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub policy: PolicySpec,
    pub capacity: usize,
    pub topology: Topology,
    /// Tumbling-window length for target-ratio dynamics sampling; only
    /// meaningful for policies exposing a target ratio.
    pub dynamics_window: Option<u64>,
}

impl SimConfig {
    pub fn single(policy: PolicySpec, capacity: usize) -> Self {
        SimConfig { policy, capacity, topology: Topology::Single, dynamics_window: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeStats {
    /// 1-based position counted from the clients.
    pub node: usize,
    /// Requests reaching this node; the hit-rate denominator.
    pub arrivals: u64,
    pub hits: u64,
    pub misses: u64,
    pub ghost_hits: u64,
    pub hit_rate: f64,
    pub hand_movements: u64,
}

impl NodeStats {
    fn new(node: usize) -> Self {
        NodeStats {
            node,
            arrivals: 0,
            hits: 0,
            misses: 0,
            ghost_hits: 0,
            hit_rate: 0.0,
            hand_movements: 0,
        }
    }

    fn finish(&mut self) {
        self.hit_rate = if self.arrivals > 0 { self.hits as f64 / self.arrivals as f64 } else { 0.0 };
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSample {
    /// Virtual time: requests processed when the window closed.
    pub t: u64,
    /// Target ratio q = p/c at the window close.
    pub q: f64,
    pub window_hit_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    /// Fraction of client requests served by any cache.
    pub non_coop_total: f64,
    pub first_node_rate: f64,
    /// Requests that fell through every node to the origin.
    pub server_requests: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub policy: String,
    pub capacity: usize,
    pub topology: String,
    pub requests: u64,
    pub nodes: Vec<NodeStats>,
    pub aggregate: Aggregate,
    pub dynamics: Vec<DynamicsSample>,
}

impl SimulationReport {
    pub fn hit_rate(&self) -> f64 {
        self.aggregate.non_coop_total
    }

    pub fn total_hits(&self) -> u64 {
        self.nodes.iter().map(|n| n.hits).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Per-node CSV rows matching the JSON fields.
    pub fn nodes_csv(&self) -> String {
        let mut out =
            String::from("node,arrivals,hits,misses,ghost_hits,hit_rate,hand_movements\n");
        for n in &self.nodes {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                n.node, n.arrivals, n.hits, n.misses, n.ghost_hits, n.hit_rate, n.hand_movements
            ));
        }
        out
    }

    pub fn dynamics_csv(&self) -> String {
        let mut out = String::from("t,q,window_hit_rate\n");
        for d in &self.dynamics {
            out.push_str(&format!("{},{},{}\n", d.t, d.q, d.window_hit_rate));
        }
        out
    }
}

/// One capacity row per report, for hit-rate-vs-capacity tables.
pub fn sweep_csv(reports: &[SimulationReport]) -> String {
    let mut out = String::from("policy,capacity,requests,hit_rate,hits,ghost_hits,hand_movements\n");
    for r in reports {
        let hits: u64 = r.nodes.iter().map(|n| n.hits).sum();
        let ghosts: u64 = r.nodes.iter().map(|n| n.ghost_hits).sum();
        let movements: u64 = r.nodes.iter().map(|n| n.hand_movements).sum();
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.policy, r.capacity, r.requests, r.aggregate.non_coop_total, hits, ghosts, movements
        ));
    }
    out
}

fn replay_single(
    config: &SimConfig,
    stream: &RequestStream,
) -> Result<SimulationReport, SimError> {
    let capacity = Capacity::new(config.capacity)?;
    let chunks = stream.chunk_vec();
    let mut policy = config.policy.build(capacity, Some(&chunks))?;
    if config.dynamics_window == Some(0) {
        return Err(SimError::ZeroWindow);
    }
    if config.dynamics_window.is_some() && !config.policy.has_target_ratio() {
        return Err(SimError::NoTargetRatio(config.policy.to_string()));
    }

    let mut stats = NodeStats::new(1);
    let mut dynamics = Vec::new();
    let mut window_hits = 0u64;
    let mut window_count = 0u64;
    for (k, &chunk) in chunks.iter().enumerate() {
        let out = policy.access(chunk, k as u64);
        stats.arrivals += 1;
        stats.hand_movements += out.hand_movements;
        match out.kind {
            crate::kernel::AccessKind::Hit => {
                stats.hits += 1;
                window_hits += 1;
            }
            crate::kernel::AccessKind::Miss => stats.misses += 1,
            crate::kernel::AccessKind::GhostHit => stats.ghost_hits += 1,
        }
        window_count += 1;
        if let Some(w) = config.dynamics_window {
            if window_count == w {
                dynamics.push(DynamicsSample {
                    t: (k + 1) as u64,
                    q: policy.target_ratio().expect("checked above"),
                    window_hit_rate: window_hits as f64 / w as f64,
                });
                window_hits = 0;
                window_count = 0;
            }
        }
    }
    stats.finish();
    let aggregate = Aggregate {
        non_coop_total: stats.hit_rate,
        first_node_rate: stats.hit_rate,
        server_requests: stats.arrivals - stats.hits,
    };
    Ok(SimulationReport {
        schema_version: SCHEMA_VERSION,
        policy: config.policy.to_string(),
        capacity: config.capacity,
        topology: config.topology.to_string(),
        requests: chunks.len() as u64,
        nodes: vec![stats],
        aggregate,
        dynamics,
    })
}

fn replay_line(
    config: &SimConfig,
    nodes: usize,
    stream: &RequestStream,
) -> Result<SimulationReport, SimError> {
    if config.policy.requires_stream() {
        return Err(SimError::OptInLine);
    }
    let capacity = Capacity::new(config.capacity)?;
    let mut instances: Vec<Box<dyn ReplacementPolicy>> = (0..nodes)
        .map(|_| config.policy.build(capacity, None))
        .collect::<Result<_, _>>()?;
    let mut stats: Vec<NodeStats> = (1..=nodes).map(NodeStats::new).collect();
    let mut server_requests = 0u64;

    for (k, chunk) in stream.chunks().enumerate() {
        let mut served = false;
        for (node, policy) in instances.iter_mut().enumerate() {
            let out = policy.access(chunk, k as u64);
            let s = &mut stats[node];
            s.arrivals += 1;
            s.hand_movements += out.hand_movements;
            match out.kind {
                crate::kernel::AccessKind::Hit => {
                    s.hits += 1;
                    served = true;
                }
                crate::kernel::AccessKind::Miss => s.misses += 1,
                crate::kernel::AccessKind::GhostHit => s.ghost_hits += 1,
            }
            if served {
                break;
            }
        }
        if !served {
            server_requests += 1;
        }
    }
    for s in &mut stats {
        s.finish();
    }
    let total = stream.len() as u64;
    let aggregate = Aggregate {
        non_coop_total: if total > 0 {
            (total - server_requests) as f64 / total as f64
        } else {
            0.0
        },
        first_node_rate: stats[0].hit_rate,
        server_requests,
    };
    Ok(SimulationReport {
        schema_version: SCHEMA_VERSION,
        policy: config.policy.to_string(),
        capacity: config.capacity,
        topology: config.topology.to_string(),
        requests: total,
        nodes: stats,
        aggregate,
        dynamics: Vec::new(),
    })
}

/// Replays the stream through one policy instance (or the line of them)
/// per the config's topology.
pub fn run(config: &SimConfig, stream: &RequestStream) -> Result<SimulationReport, SimError> {
    match config.topology {
        Topology::Single => replay_single(config, stream),
        Topology::Line { nodes } => replay_line(config, nodes, stream),
    }
}

/// Single-node replay, ignoring the config topology.
pub fn run_single(config: &SimConfig, stream: &RequestStream) -> Result<SimulationReport, SimError> {
    replay_single(config, stream)
}

/// Stand-in for perfect cooperation among `nodes` caches: one node holding
/// their aggregate capacity.
pub fn run_ideal_coop(
    config: &SimConfig,
    nodes: usize,
    stream: &RequestStream,
) -> Result<SimulationReport, SimError> {
    let mut merged = config.clone();
    merged.capacity = config.capacity * nodes.max(1);
    merged.topology = Topology::Single;
    merged.dynamics_window = None;
    replay_single(&merged, stream)
}

/// Independent runs over each capacity, fanned out across workers; results
/// come back in input order.
pub fn sweep_capacities(
    config: &SimConfig,
    capacities: &[usize],
    stream: &RequestStream,
) -> Result<Vec<SimulationReport>, SimError> {
    capacities
        .par_iter()
        .map(|&c| {
            let mut cell = config.clone();
            cell.capacity = c;
            run(&cell, stream)
        })
        .collect()
}

/// Target-ratio dynamics over tumbling windows. Errors for policies with
/// no target ratio.
pub fn log_dynamics(
    policy: &PolicySpec,
    capacity: usize,
    window: u64,
    stream: &RequestStream,
) -> Result<Vec<DynamicsSample>, SimError> {
    if window == 0 {
        return Err(SimError::ZeroWindow);
    }
    if !policy.has_target_ratio() {
        return Err(SimError::NoTargetRatio(policy.to_string()));
    }
    let config = SimConfig {
        policy: policy.clone(),
        capacity,
        topology: Topology::Single,
        dynamics_window: Some(window),
    };
    Ok(replay_single(&config, stream)?.dynamics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workload::{pattern_stream, PatternSpec, RequestStream};

    #[test]
    fn empty_stream_yields_zero_report() {
        let config = SimConfig::single(PolicySpec::Fifo, 4);
        let report = run(&config, &RequestStream::empty()).unwrap();
        assert_eq!(report.requests, 0);
        assert_eq!(report.aggregate.non_coop_total, 0.0);
    }

    #[test]
    fn capacity_at_least_alphabet_leaves_only_cold_misses() {
        let stream = pattern_stream(&PatternSpec::Loop { period: 8, reps: 5 });
        for policy in [PolicySpec::Fifo, PolicySpec::Clock, PolicySpec::Lru, PolicySpec::CompactCar]
        {
            let report = run(&SimConfig::single(policy, 8), &stream).unwrap();
            let misses: u64 = report.nodes.iter().map(|n| n.misses + n.ghost_hits).sum();
            assert_eq!(misses, 8, "only cold misses expected");
        }
    }

    #[test]
    fn hits_plus_misses_equals_stream_length() {
        let stream = pattern_stream(&PatternSpec::Loop { period: 13, reps: 17 });
        let report = run(&SimConfig::single(PolicySpec::CompactCar, 5), &stream).unwrap();
        let n = &report.nodes[0];
        assert_eq!(n.hits + n.misses + n.ghost_hits, stream.len() as u64);
    }

    #[test]
    fn line_second_node_sees_each_chunk_once() {
        // Alphabet fits in node 1, so node 2 receives only cold misses.
        let stream = pattern_stream(&PatternSpec::Loop { period: 4, reps: 10 });
        let config = SimConfig {
            policy: PolicySpec::Lru,
            capacity: 4,
            topology: Topology::Line { nodes: 2 },
            dynamics_window: None,
        };
        let report = run(&config, &stream).unwrap();
        assert_eq!(report.nodes[1].arrivals, 4);
        assert_eq!(report.nodes[1].hits, 0);
        assert_eq!(report.nodes[1].hit_rate, 0.0);
        assert_eq!(report.aggregate.server_requests, 4);
        // Conservation per node: hits + forwarded = arrivals.
        for pair in report.nodes.windows(2) {
            assert_eq!(pair[0].arrivals - pair[0].hits, pair[1].arrivals);
        }
    }

    #[test]
    fn ideal_coop_with_one_node_matches_single() {
        let stream = pattern_stream(&PatternSpec::Loop { period: 9, reps: 6 });
        let config = SimConfig::single(PolicySpec::Clock, 5);
        let single = run_single(&config, &stream).unwrap();
        let coop = run_ideal_coop(&config, 1, &stream).unwrap();
        assert_eq!(single.nodes, coop.nodes);
    }

    #[test]
    fn opt_rejected_in_line_topology() {
        let config = SimConfig {
            policy: PolicySpec::Opt { bypass: true },
            capacity: 2,
            topology: Topology::Line { nodes: 3 },
            dynamics_window: None,
        };
        let err = run(&config, &pattern_stream(&PatternSpec::Scan { length: 4 })).unwrap_err();
        assert!(matches!(err, SimError::OptInLine));
    }

    #[test]
    fn dynamics_require_a_target_ratio() {
        let stream = pattern_stream(&PatternSpec::Scan { length: 100 });
        let err = log_dynamics(&PolicySpec::Fifo, 4, 10, &stream).unwrap_err();
        assert!(matches!(err, SimError::NoTargetRatio(_)));

        let samples = log_dynamics(&PolicySpec::Cfr { q: 0.5 }, 4, 10, &stream).unwrap();
        assert_eq!(samples.len(), 10);
        assert!(samples.iter().all(|s| s.q == 0.5));
        assert!(samples.iter().all(|s| s.window_hit_rate == 0.0));
    }

    #[test]
    fn sweep_returns_results_in_input_order() {
        let stream = pattern_stream(&PatternSpec::Loop { period: 16, reps: 8 });
        let config = SimConfig::single(PolicySpec::Lru, 1);
        let reports = sweep_capacities(&config, &[4, 1, 16], &stream).unwrap();
        let caps: Vec<usize> = reports.iter().map(|r| r.capacity).collect();
        assert_eq!(caps, vec![4, 1, 16]);
        // LRU hit rate is non-decreasing in capacity.
        let sorted = sweep_capacities(&config, &[1, 4, 16], &stream).unwrap();
        assert!(sorted[0].hit_rate() <= sorted[1].hit_rate());
        assert!(sorted[1].hit_rate() <= sorted[2].hit_rate());
    }

    #[test]
    fn identical_config_gives_identical_report() {
        let stream = pattern_stream(&PatternSpec::Loop { period: 40, reps: 12 });
        let mut config = SimConfig::single(PolicySpec::CompactCar, 24);
        config.dynamics_window = Some(50);
        let a = run(&config, &stream).unwrap();
        let b = run(&config, &stream).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn topology_strings_round_trip() {
        for s in ["single", "line:10"] {
            let t: Topology = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert!("line:0".parse::<Topology>().is_err());
        assert!("ring:4".parse::<Topology>().is_err());
    }
}
