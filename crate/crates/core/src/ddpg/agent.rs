use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::neural::{Adam, GradientTape, Mlp, OutputActivation};

use super::action::ActionVector;
use super::replay::{ReplayBuffer, Transition};
use super::state::{EncodedState, STATE_WIDTH};
use super::DdpgError;

#[derive(Debug, Clone, PartialEq)]
pub struct DdpgConfig {
    pub gamma: f64,
    pub tau: f64,
    /// Standard deviation of the Gaussian exploration noise.
    pub noise_sigma: f64,
    pub batch_size: usize,
    pub buffer_capacity: usize,
    /// Transitions collected before the first update.
    pub warmup: usize,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub actor_hidden: Vec<usize>,
    pub critic_hidden: Vec<usize>,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        DdpgConfig {
            gamma: 0.99,
            tau: 0.005,
            noise_sigma: 0.5,
            batch_size: 64,
            buffer_capacity: 100_000,
            warmup: 500,
            actor_lr: 1e-4,
            critic_lr: 1e-3,
            actor_hidden: vec![64, 64],
            critic_hidden: vec![128, 128, 64, 64],
        }
    }
}

impl DdpgConfig {
    pub fn validate(&self) -> Result<(), DdpgError> {
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(DdpgError::InvalidConfig(format!("tau {} outside (0, 1]", self.tau)));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(DdpgError::InvalidConfig(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        if self.batch_size == 0 || self.buffer_capacity < self.batch_size {
            return Err(DdpgError::InvalidConfig(
                "batch size must be positive and fit in the buffer".into(),
            ));
        }
        if self.noise_sigma < 0.0 || self.actor_lr <= 0.0 || self.critic_lr <= 0.0 {
            return Err(DdpgError::InvalidConfig("negative noise or non-positive learning rate".into()));
        }
        Ok(())
    }
}

/// Actor, critic, their slow-tracking targets, and the replay buffer.
#[derive(Debug, Clone)]
pub struct DdpgAgent {
    actor: Mlp,
    critic: Mlp,
    actor_target: Mlp,
    critic_target: Mlp,
    actor_opt: Adam,
    critic_opt: Adam,
    buffer: ReplayBuffer,
    config: DdpgConfig,
    noise: Normal<f64>,
    rng: ChaCha8Rng,
}

pub fn actor_dims(action_dim: usize, hidden: &[usize]) -> Vec<usize> {
    let mut dims = vec![STATE_WIDTH];
    dims.extend_from_slice(hidden);
    dims.push(action_dim);
    dims
}

pub fn critic_dims(action_dim: usize, hidden: &[usize]) -> Vec<usize> {
    let mut dims = vec![STATE_WIDTH + action_dim];
    dims.extend_from_slice(hidden);
    dims.push(1);
    dims
}

impl DdpgAgent {
    pub fn new(action_dim: usize, config: DdpgConfig, seed: u64) -> Result<Self, DdpgError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let actor = Mlp::new(
            &actor_dims(action_dim, &config.actor_hidden),
            OutputActivation::Tanh,
            rng.random(),
        )?;
        let critic = Mlp::new(
            &critic_dims(action_dim, &config.critic_hidden),
            OutputActivation::Identity,
            rng.random(),
        )?;
        Self::from_networks(actor, critic, config, rng.random())
    }

    /// Builds an agent around existing networks; targets start as copies.
    pub fn from_networks(actor: Mlp, critic: Mlp, config: DdpgConfig, seed: u64) -> Result<Self, DdpgError> {
        config.validate()?;
        if actor.input_dim() != STATE_WIDTH
            || critic.input_dim() != STATE_WIDTH + actor.output_dim()
            || critic.output_dim() != 1
        {
            return Err(DdpgError::InvalidConfig(format!(
                "actor {:?} and critic {:?} do not fit a {STATE_WIDTH}-wide state",
                actor.dims(),
                critic.dims()
            )));
        }
        let noise = Normal::new(0.0, config.noise_sigma)
            .map_err(|e| DdpgError::InvalidConfig(e.to_string()))?;
        Ok(DdpgAgent {
            actor_target: actor.clone(),
            critic_target: critic.clone(),
            actor_opt: Adam::new(&actor),
            critic_opt: Adam::new(&critic),
            buffer: ReplayBuffer::new(config.buffer_capacity),
            actor,
            critic,
            config,
            noise,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn actor(&self) -> &Mlp {
        &self.actor
    }

    pub fn critic(&self) -> &Mlp {
        &self.critic
    }

    pub fn actor_target(&self) -> &Mlp {
        &self.actor_target
    }

    pub fn critic_target(&self) -> &Mlp {
        &self.critic_target
    }

    pub fn buffer(&self) -> &ReplayBuffer {
        &self.buffer
    }

    pub fn config(&self) -> &DdpgConfig {
        &self.config
    }

    pub fn action_dim(&self) -> usize {
        self.actor.output_dim()
    }

    pub fn into_actor(self) -> Mlp {
        self.actor
    }

    /// Snapshot of the noise/sampling stream, for replaying draws in tests.
    pub fn rng_snapshot(&self) -> ChaCha8Rng {
        self.rng.clone()
    }

    pub fn remember(&mut self, t: Transition) {
        self.buffer.push(t);
    }

    /// Whether enough experience has been collected to start learning.
    pub fn is_warm(&self) -> bool {
        self.buffer.len() >= self.config.warmup.max(self.config.batch_size)
    }

    /// Actor output, plus clipped Gaussian noise when exploring.
    pub fn act(&mut self, s: &EncodedState, explore: bool) -> Result<ActionVector, DdpgError> {
        let mut a = policy(&self.actor, s)?;
        if explore {
            for v in &mut a.0 {
                *v = (*v + self.rng.sample(self.noise)).clamp(-1.0, 1.0);
            }
        }
        Ok(a)
    }

    /// One DDPG update from a uniform batch: critic regression toward the
    /// bootstrapped target, deterministic policy gradient for the actor,
    /// then soft target updates. Returns `(critic_loss, mean_q)`.
    pub fn train_step(&mut self) -> Result<(f64, f64), DdpgError> {
        let batch_size = self.config.batch_size;
        if self.buffer.len() < batch_size {
            return Err(DdpgError::InsufficientBuffer {
                have: self.buffer.len(),
                need: batch_size,
            });
        }
        let indices = self.buffer.sample_indices(batch_size, &mut self.rng);
        let batch: Vec<&Transition> = indices.iter().map(|&i| self.buffer.get(i).expect("sampled slot")).collect();
        let (critic_loss, mean_q) = update_networks(
            &mut self.actor,
            &mut self.critic,
            &self.actor_target,
            &self.critic_target,
            &mut self.actor_opt,
            &mut self.critic_opt,
            &self.config,
            &batch,
        )?;
        self.actor_target.soft_update_from(&self.actor, self.config.tau)?;
        self.critic_target.soft_update_from(&self.critic, self.config.tau)?;
        Ok((critic_loss, mean_q))
    }

    /// Soft-updates both targets toward their sources without learning.
    pub fn soft_update_targets(&mut self) -> Result<(), DdpgError> {
        self.actor_target.soft_update_from(&self.actor, self.config.tau)?;
        self.critic_target.soft_update_from(&self.critic, self.config.tau)?;
        Ok(())
    }
}

/// Greedy action of a frozen actor.
pub fn policy(actor: &Mlp, s: &EncodedState) -> Result<ActionVector, DdpgError> {
    Ok(ActionVector(actor.forward(s.as_slice())?))
}

fn concat(s: &EncodedState, a: &[f64]) -> Vec<f64> {
    let mut x = Vec::with_capacity(STATE_WIDTH + a.len());
    x.extend_from_slice(s.as_slice());
    x.extend_from_slice(a);
    x
}

#[allow(clippy::too_many_arguments)]
fn update_networks(
    actor: &mut Mlp,
    critic: &mut Mlp,
    actor_target: &Mlp,
    critic_target: &Mlp,
    actor_opt: &mut Adam,
    critic_opt: &mut Adam,
    config: &DdpgConfig,
    batch: &[&Transition],
) -> Result<(f64, f64), DdpgError> {
    let n = batch.len() as f64;

    // Critic: minimize mean (y − Q(s, a))² with y held constant.
    let mut critic_tape = GradientTape::new(critic);
    let mut loss = 0.0;
    for t in batch {
        let next_action = actor_target.forward(t.s_next.as_slice())?;
        let q_next = critic_target.forward(&concat(&t.s_next, &next_action))?[0];
        let y = t.r + config.gamma * q_next;
        let q = critic.forward_recorded(&concat(&t.s, t.a.as_slice()), &mut critic_tape)?[0];
        let err = q - y;
        loss += err * err;
        critic.backward(&mut critic_tape, &[2.0 * err / n])?;
    }
    critic_opt.update(critic, critic_tape.grads(), config.critic_lr)?;

    // Actor: ascend mean Q(s, μ(s)) by chaining ∂Q/∂a into the actor.
    let mut actor_tape = GradientTape::new(actor);
    let mut probe = GradientTape::new(critic);
    let mut q_sum = 0.0;
    let state_width = STATE_WIDTH;
    for t in batch {
        let a = actor.forward_recorded(t.s.as_slice(), &mut actor_tape)?;
        q_sum += critic.forward_recorded(&concat(&t.s, &a), &mut probe)?[0];
        let dq = critic.input_gradient(&mut probe, &[-1.0 / n])?;
        actor.backward(&mut actor_tape, &dq[state_width..])?;
    }
    actor_opt.update(actor, actor_tape.grads(), config.actor_lr)?;

    Ok((loss / n, q_sum / n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> DdpgConfig {
        DdpgConfig {
            batch_size: 4,
            buffer_capacity: 16,
            warmup: 4,
            actor_hidden: vec![8],
            critic_hidden: vec![8, 8],
            ..DdpgConfig::default()
        }
    }

    #[test]
    fn zero_actor_acts_zero() {
        let actor = Mlp::zeros(&actor_dims(20, &[64, 64]), OutputActivation::Tanh).unwrap();
        let critic = Mlp::new(&critic_dims(20, &[8]), OutputActivation::Identity, 1).unwrap();
        let mut agent = DdpgAgent::from_networks(actor, critic, DdpgConfig::default(), 1).unwrap();
        let s = EncodedState([0.3; STATE_WIDTH]);
        assert_eq!(agent.act(&s, false).unwrap().0, vec![0.0; 20]);
    }

    #[test]
    fn greedy_actions_are_repeatable() {
        let mut agent = DdpgAgent::new(20, DdpgConfig::default(), 5).unwrap();
        let s = EncodedState([0.1; STATE_WIDTH]);
        let a = agent.act(&s, false).unwrap();
        let b = agent.act(&s, false).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn exploration_noise_replays_from_the_seeded_stream() {
        let mut agent = DdpgAgent::new(20, DdpgConfig::default(), 9).unwrap();
        let s = EncodedState([0.4; STATE_WIDTH]);
        let mean = agent.act(&s, false).unwrap();
        let mut replay = agent.rng_snapshot();
        let noise = Normal::new(0.0, 0.5).unwrap();
        let expected: Vec<f64> = mean
            .0
            .iter()
            .map(|m| (m + replay.sample(noise)).clamp(-1.0, 1.0))
            .collect();
        assert_eq!(agent.act(&s, true).unwrap().0, expected);
    }

    #[test]
    fn rejects_bad_hyperparameters() {
        let cfg = DdpgConfig {
            tau: 0.0,
            ..DdpgConfig::default()
        };
        assert!(matches!(DdpgAgent::new(4, cfg, 0), Err(DdpgError::InvalidConfig(_))));
        let cfg = DdpgConfig {
            gamma: 1.0,
            ..DdpgConfig::default()
        };
        assert!(matches!(DdpgAgent::new(4, cfg, 0), Err(DdpgError::InvalidConfig(_))));
    }

    #[test]
    fn train_step_needs_a_full_batch() {
        let mut agent = DdpgAgent::new(4, small_config(), 2).unwrap();
        assert!(matches!(
            agent.train_step(),
            Err(DdpgError::InsufficientBuffer { have: 0, need: 4 })
        ));
    }

    #[test]
    fn unit_tau_copies_sources_into_targets() {
        let cfg = DdpgConfig {
            tau: 1.0,
            ..small_config()
        };
        let mut agent = DdpgAgent::new(4, cfg, 3).unwrap();
        for k in 0..8 {
            agent.remember(Transition {
                s: EncodedState([k as f64 * 0.1; STATE_WIDTH]),
                a: ActionVector(vec![0.2; 4]),
                r: if k % 2 == 0 { 1.0 } else { -1.0 },
                s_next: EncodedState([k as f64 * 0.1 + 0.05; STATE_WIDTH]),
            });
        }
        let before = agent.actor().clone();
        agent.train_step().unwrap();
        assert_ne!(agent.actor(), &before);
        assert_eq!(agent.actor_target(), agent.actor());
        assert_eq!(agent.critic_target(), agent.critic());
    }
}
