//! Training loop and greedy adapted runs.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::benchmarks::{make_objective, FunctionId, Objective};
use crate::harness::record::{Adapter, RunRecord};
use crate::neural::Mlp;
use crate::swarm::{iteration_count, Swarm, DEFAULT_SUBGROUPS, DEFAULT_SWARM_SIZE};

use super::action::{coefficients_for, reward, Mode, Variant};
use super::agent::{policy, DdpgAgent, DdpgConfig};
use super::replay::Transition;
use super::state::{encode, observe};
use super::DdpgError;

/// Functions trained on when no pool is given.
pub const DEFAULT_POOL: [FunctionId; 4] = [
    FunctionId::Sphere,
    FunctionId::Rastrigin,
    FunctionId::Griewank,
    FunctionId::Ackley,
];

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub variant: Variant,
    pub mode: Mode,
    pub pool: Vec<FunctionId>,
    pub dim: usize,
    pub episodes: usize,
    pub budget: usize,
    pub swarm_size: usize,
    pub seed: u64,
    pub ddpg: DdpgConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            variant: Variant::Pso,
            mode: Mode::Absolute,
            pool: DEFAULT_POOL.to_vec(),
            dim: 10,
            episodes: 300,
            budget: 10_000,
            swarm_size: DEFAULT_SWARM_SIZE,
            seed: 0,
            ddpg: DdpgConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn action_dim(&self) -> usize {
        self.variant.group_width() * DEFAULT_SUBGROUPS
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub function: FunctionId,
    pub fn_seed: u64,
    pub final_gbest: f64,
    /// `None` while the buffer is still warming up.
    pub mean_critic_loss: Option<f64>,
    pub transitions: usize,
}

/// Creates an untrained agent sized for `config`.
pub fn new_agent(config: &TrainConfig) -> Result<DdpgAgent, DdpgError> {
    DdpgAgent::new(config.action_dim(), config.ddpg.clone(), config.seed)
}

/// Trains `agent` for `config.episodes` episodes. Each episode draws a
/// function from the pool with a fresh transform seed and runs one swarm to
/// budget exhaustion, one transition and (once warm) one update per iteration.
pub fn train(agent: &mut DdpgAgent, config: &TrainConfig) -> Result<Vec<EpisodeLog>, DdpgError> {
    if config.episodes == 0 {
        return Err(DdpgError::InvalidConfig("episodes must be at least 1".into()));
    }
    if config.pool.is_empty() {
        return Err(DdpgError::InvalidConfig("training pool is empty".into()));
    }
    if agent.action_dim() != config.action_dim() {
        return Err(DdpgError::ActionWidth {
            expected: config.action_dim(),
            got: agent.action_dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x5EED_0F_E915_0DE5);
    let mut log = Vec::with_capacity(config.episodes);
    for _ in 0..config.episodes {
        let function = config.pool[rng.random_range(0..config.pool.len())];
        let fn_seed: u64 = rng.random();
        let swarm_seed: u64 = rng.random();
        let objective = Arc::new(make_objective(function, config.dim, fn_seed)?);
        let mut swarm = Swarm::new(objective, config.swarm_size, config.budget, swarm_seed)?;
        let t_max = iteration_count(config.swarm_size, config.budget);

        let mut state = encode(&observe(&swarm));
        let mut losses = Vec::new();
        let mut transitions = 0;
        let mut t = 0;
        while !swarm.is_exhausted() {
            let prev = swarm.gbest_fit();
            let action = agent.act(&state, true)?;
            let coeffs = coefficients_for(
                &action,
                config.variant,
                config.mode,
                swarm.subgroup_count(),
                t,
                t_max,
            )?;
            config.variant.step(&mut swarm, &coeffs)?;
            let next = encode(&observe(&swarm));
            agent.remember(Transition {
                s: state,
                a: action,
                r: reward(prev, swarm.gbest_fit()),
                s_next: next,
            });
            transitions += 1;
            if agent.is_warm() {
                losses.push(agent.train_step()?.0);
            }
            state = next;
            t += 1;
        }
        log.push(EpisodeLog {
            function,
            fn_seed,
            final_gbest: swarm.gbest_fit(),
            mean_critic_loss: (!losses.is_empty()).then(|| losses.iter().sum::<f64>() / losses.len() as f64),
            transitions,
        });
    }
    Ok(log)
}

/// Runs `variant` on `objective` with coefficients chosen greedily by a
/// frozen actor every iteration. No learning happens.
pub fn adapted_run(
    actor: &Mlp,
    objective: Arc<Objective>,
    variant: Variant,
    mode: Mode,
    budget: usize,
    swarm_size: usize,
    seed: u64,
) -> Result<RunRecord, DdpgError> {
    let expected = variant.group_width() * DEFAULT_SUBGROUPS;
    if actor.output_dim() != expected {
        return Err(DdpgError::ActionWidth {
            expected,
            got: actor.output_dim(),
        });
    }
    let mut swarm = Swarm::new(Arc::clone(&objective), swarm_size, budget, seed)?;
    let t_max = iteration_count(swarm_size, budget);
    let mut curve = vec![(swarm.eval_count(), swarm.gbest_fit())];
    let mut t = 0;
    while !swarm.is_exhausted() {
        let state = encode(&observe(&swarm));
        let action = policy(actor, &state)?;
        let coeffs = coefficients_for(&action, variant, mode, swarm.subgroup_count(), t, t_max)?;
        variant.step(&mut swarm, &coeffs)?;
        curve.push((swarm.eval_count(), swarm.gbest_fit()));
        t += 1;
    }
    let adapter = match mode {
        Mode::Absolute => Adapter::RlamAbsolute,
        Mode::Relative => Adapter::RlamRelative,
    };
    Ok(RunRecord::new(objective.id(), objective.dim(), seed, variant, adapter, curve))
}
