//! Particle swarm optimization with online coefficient control learned by a
//! deep deterministic policy gradient agent.
//!
//! * [`benchmarks`]: shifted/rotated test functions.
//! * [`swarm`]: PSO, CLPSO and RLPSO update rules plus offline schedules.
//! * [`neural`]: the feed-forward networks and Adam.
//! * [`ddpg`]: state encoding, action mapping, the agent, training and adapted runs.
//! * [`harness`]: experiments, statistics, CSV output and the CLI.

pub mod benchmarks;
pub mod ddpg;
pub mod harness;
pub mod neural;
pub mod swarm;

pub use benchmarks::{make_objective, FunctionId, Objective};
pub use swarm::{CoefficientSet, Swarm};
