//! Distributed detection of (Δ,d)-twins in periodic time-varying graphs.
//!
//! Two distinct nodes are *d-twins* at time `t` when they share at least one
//! neighbour and their neighbourhoods, each stripped of the pair itself,
//! differ by at most `d` nodes. They are *(Δ,d)-twins* from `t0` when this
//! holds at the Δ consecutive instants `t0, ..., t0+Δ-1` (mod the period).
//!
//! * [`tvg`]: graph model, `.tel` parsing and random generation.
//! * [`oracle`]: centralized brute-force ground truth.
//! * [`protocol`]: per-node state machines (exact and sketch modes).
//! * [`sketch`]: bottom-k neighbourhood sketches.
//! * [`simulator`]: synchronous round engine with message accounting.
//! * [`compare`]: protocol-versus-oracle verification.
//! * [`report`]: JSON result documents.

pub mod compare;
pub mod exec;
pub mod fixtures;
pub mod oracle;
pub mod protocol;
pub mod report;
pub mod simulator;
pub mod sketch;
pub mod tvg;

pub use exec::Execution;
pub use oracle::{TwinWindow, WindowMap};
pub use simulator::{run, Mode, RunConfig, RunResult};
pub use tvg::{NodeId, ProblemParams, TemporalGraph};
