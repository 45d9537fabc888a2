//! Clustered wireless sensor network simulator with a two-level
//! authentication defense against denial-of-sleep attacks.

pub mod attacker;
pub mod clustering;
pub mod config;
pub mod crypto;
pub mod defense;
pub mod energy;
pub mod error;
pub mod mac;
pub mod metrics;
pub mod sim;
pub mod types;

pub use config::{AttackKind, DefenseParams, PowerProfile, RadioParams, ScoreRule, SimConfig, SleepUpdateRule};
pub use error::{ConfigError, CryptoError, MetricError, ScheduleError};
pub use metrics::{summarize, ConfusionMatrix, DetectionRates, MetricSummary, RunMetrics};
pub use types::{NodeId, Position};
pub use sim::{build_topology, run, run_traced, NodeSpec, Simulation, Trace, TraceEvent};
