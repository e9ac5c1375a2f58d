//! Swarm observation and its sinusoidal encoding.

use crate::swarm::Swarm;

/// Frequencies `2^i` used by the encoder.
pub const ENCODING_OCTAVES: usize = 5;
/// Three raw inputs, each expanded to [`ENCODING_OCTAVES`] values.
pub const STATE_WIDTH: usize = 3 * ENCODING_OCTAVES;

/// The three running-state signals read off a swarm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawState {
    /// `eval_count / eval_budget`.
    pub iteration_frac: f64,
    /// Mean distance to the swarm centroid over the domain diagonal.
    pub diversity_norm: f64,
    /// `(eval_count − last_improve_eval) / eval_budget`.
    pub stagnation_frac: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodedState(pub [f64; STATE_WIDTH]);

impl EncodedState {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

pub fn observe(swarm: &Swarm) -> RawState {
    let budget = swarm.eval_budget() as f64;
    let positions: Vec<&[f64]> = swarm.particles().iter().map(|p| p.position.as_slice()).collect();
    let obj = swarm.objective();
    RawState {
        iteration_frac: swarm.eval_count() as f64 / budget,
        diversity_norm: normalized_diversity(&positions, obj.lower(), obj.upper()),
        stagnation_frac: (swarm.eval_count() - swarm.last_improve_eval()) as f64 / budget,
    }
}

/// `(1/N)·Σ_i ‖x_i − x̄‖₂`.
pub fn diversity(positions: &[&[f64]]) -> f64 {
    let n = positions.len();
    if n == 0 {
        return 0.0;
    }
    let dim = positions[0].len();
    let mut mean = vec![0.0; dim];
    for x in positions {
        for (m, v) in mean.iter_mut().zip(x.iter()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    positions
        .iter()
        .map(|x| {
            x.iter()
                .zip(&mean)
                .map(|(v, m)| (v - m) * (v - m))
                .sum::<f64>()
                .sqrt()
        })
        .sum::<f64>()
        / n as f64
}

/// [`diversity`] divided by the domain diagonal `√D·(upper − lower)`.
pub fn normalized_diversity(positions: &[&[f64]], lower: f64, upper: f64) -> f64 {
    let dim = positions.first().map_or(1, |x| x.len());
    diversity(positions) / ((dim as f64).sqrt() * (upper - lower))
}

/// `sin(x·2^i)` for `i = 0..5`, blocks ordered iteration, diversity, stagnation.
pub fn encode(raw: &RawState) -> EncodedState {
    let mut out = [0.0; STATE_WIDTH];
    for (block, x) in [raw.iteration_frac, raw.diversity_norm, raw.stagnation_frac]
        .into_iter()
        .enumerate()
    {
        for i in 0..ENCODING_OCTAVES {
            out[block * ENCODING_OCTAVES + i] = (x * f64::powi(2.0, i as i32)).sin();
        }
    }
    EncodedState(out)
}
