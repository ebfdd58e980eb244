//! Replacement policies behind the shared [`ReplacementPolicy`] contract.

mod arc;
mod car;
mod clock;
mod compact_car;
mod fifo;
mod lfu;
mod lirs;
mod list;
mod lru;
mod opt;

pub use arc::Arc;
pub use car::Car;
pub use clock::Clock;
pub use compact_car::CompactCar;
pub use fifo::Fifo;
pub use lfu::Lfu;
pub use lirs::Lirs;
pub use lru::Lru;
pub use opt::{Opt, OptOracle};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kernel::{Capacity, ChunkId, ReplacementPolicy};

/// Parsed policy selection, the unit of configuration for simulations and
/// the CLI. String form examples: `fifo`, `cfr:0.5`, `lirs:400`,
/// `opt-no-bypass`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySpec {
    Fifo,
    Clock,
    Lru,
    Lfu,
    Arc,
    Lirs { ghost_budget: Option<usize> },
    Car,
    CompactCar,
    Cfr { q: f64 },
    Opt { bypass: bool },
}

impl PolicySpec {
    /// Offline OPT needs the full stream to build its oracle.
    pub fn requires_stream(&self) -> bool {
        matches!(self, PolicySpec::Opt { .. })
    }

    /// Whether the policy exposes a target ratio q for dynamics logging.
    pub fn has_target_ratio(&self) -> bool {
        matches!(self, PolicySpec::CompactCar | PolicySpec::Cfr { .. })
    }

    pub fn build(
        &self,
        capacity: Capacity,
        stream: Option<&[ChunkId]>,
    ) -> Result<Box<dyn ReplacementPolicy>, BuildError> {
        Ok(match self {
            PolicySpec::Fifo => Box::new(Fifo::new(capacity)),
            PolicySpec::Clock => Box::new(Clock::new(capacity)),
            PolicySpec::Lru => Box::new(Lru::new(capacity)),
            PolicySpec::Lfu => Box::new(Lfu::new(capacity)),
            PolicySpec::Arc => Box::new(Arc::new(capacity)),
            PolicySpec::Lirs { ghost_budget } => match ghost_budget {
                Some(m) => Box::new(Lirs::with_ghost_budget(capacity, *m)),
                None => Box::new(Lirs::new(capacity)),
            },
            PolicySpec::Car => Box::new(Car::new(capacity)),
            PolicySpec::CompactCar => Box::new(CompactCar::new(capacity)),
            PolicySpec::Cfr { q } => Box::new(CompactCar::with_fixed_ratio(capacity, *q)),
            PolicySpec::Opt { bypass } => {
                let stream = stream.ok_or(BuildError::OptNeedsStream)?;
                Box::new(Opt::new(capacity, OptOracle::build(stream), *bypass))
            }
        })
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Fifo => write!(f, "fifo"),
            PolicySpec::Clock => write!(f, "clock"),
            PolicySpec::Lru => write!(f, "lru"),
            PolicySpec::Lfu => write!(f, "lfu"),
            PolicySpec::Arc => write!(f, "arc"),
            PolicySpec::Lirs { ghost_budget: None } => write!(f, "lirs"),
            PolicySpec::Lirs { ghost_budget: Some(m) } => write!(f, "lirs:{m}"),
            PolicySpec::Car => write!(f, "car"),
            PolicySpec::CompactCar => write!(f, "compact-car"),
            PolicySpec::Cfr { q } => write!(f, "cfr:{q}"),
            PolicySpec::Opt { bypass: true } => write!(f, "opt"),
            PolicySpec::Opt { bypass: false } => write!(f, "opt-no-bypass"),
        }
    }
}

impl FromStr for PolicySpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(q) = s.strip_prefix("cfr:") {
            let q: f64 = q.parse().map_err(|_| ParseError::bad(s))?;
            if !(0.0..=1.0).contains(&q) {
                return Err(ParseError::bad(s));
            }
            return Ok(PolicySpec::Cfr { q });
        }
        if let Some(m) = s.strip_prefix("lirs:") {
            let m: usize = m.parse().map_err(|_| ParseError::bad(s))?;
            return Ok(PolicySpec::Lirs { ghost_budget: Some(m) });
        }
        match s {
            "fifo" => Ok(PolicySpec::Fifo),
            "clock" => Ok(PolicySpec::Clock),
            "lru" => Ok(PolicySpec::Lru),
            "lfu" => Ok(PolicySpec::Lfu),
            "arc" => Ok(PolicySpec::Arc),
            "lirs" => Ok(PolicySpec::Lirs { ghost_budget: None }),
            "car" => Ok(PolicySpec::Car),
            "compact-car" => Ok(PolicySpec::CompactCar),
            "opt" => Ok(PolicySpec::Opt { bypass: true }),
            "opt-no-bypass" => Ok(PolicySpec::Opt { bypass: false }),
            _ => Err(ParseError::bad(s)),
        }
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = ParseError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(spec: PolicySpec) -> String {
        spec.to_string()
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown policy {0:?} (expected fifo, clock, lru, lfu, arc, lirs[:m], car, compact-car, cfr:<q>, opt, opt-no-bypass)")]
pub struct ParseError(String);

impl ParseError {
    fn bad(s: &str) -> Self {
        ParseError(s.to_string())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("offline opt needs the request stream to build its oracle")]
    OptNeedsStream,
}
