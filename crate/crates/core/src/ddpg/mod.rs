//! Reinforcement-learning parameter adaptation.
//!
//! Each swarm iteration the agent observes three running-state signals
//! (progress, diversity, stagnation), encodes them sinusoidally, and the
//! actor emits one block of values per subgroup which are mapped to that
//! subgroup's coefficients. Training follows DDPG with a replay buffer and
//! soft-updated target networks; at run time only the frozen actor is used.

pub mod action;
pub mod agent;
pub mod model;
pub mod replay;
pub mod state;
pub mod train;

use thiserror::Error;

use crate::benchmarks::BenchmarkError;
use crate::neural::NeuralError;
use crate::swarm::SwarmError;

pub use action::{
    coefficients_for, map_action_absolute, map_action_absolute_rlpso, map_action_relative, reward, ActionVector,
    Mode, Variant,
};
pub use agent::{policy, DdpgAgent, DdpgConfig};
pub use model::{load_model, save_model, sidecar_path, ModelMeta};
pub use replay::{ReplayBuffer, Transition};
pub use state::{encode, observe, EncodedState, RawState, STATE_WIDTH};
pub use train::{adapted_run, new_agent, train, EpisodeLog, TrainConfig, DEFAULT_POOL};

#[derive(Debug, Error)]
pub enum DdpgError {
    #[error("replay buffer holds {have} transitions, a batch needs {need}")]
    InsufficientBuffer { have: usize, need: usize },
    #[error("action has {got} values, expected {expected}")]
    ActionWidth { expected: usize, got: usize },
    #[error("invalid agent configuration: {0}")]
    InvalidConfig(String),
    #[error("unknown adaptation mode `{0}` (expected absolute or relative)")]
    UnknownMode(String),
    #[error("unknown variant `{0}` (expected pso, clpso or rlpso)")]
    UnknownVariant(String),
    #[error("bad model sidecar: {0}")]
    BadSidecar(String),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Swarm(#[from] SwarmError),
    #[error(transparent)]
    Benchmark(#[from] BenchmarkError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
