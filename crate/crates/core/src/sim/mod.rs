//! Discrete-event simulation of the clustered network.

pub mod engine;
pub mod topology;
pub mod trace;
pub mod world;

pub use engine::{Event, EventQueue};
pub use topology::{build_topology, NodeSpec};
pub use trace::{Trace, TraceEvent};
pub use world::{run, run_traced, Simulation};
