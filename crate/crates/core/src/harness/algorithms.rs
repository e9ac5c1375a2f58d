//! The named algorithms the harness can run.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::benchmarks::Objective;
use crate::ddpg::{adapted_run, Mode, ModelMeta, Variant};
use crate::neural::Mlp;
use crate::swarm::{iteration_count, schedule_coeffs, CoefficientSet, Schedule, Swarm};

use super::record::{Adapter, RunRecord};
use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    /// Constant coefficients.
    Pso,
    /// Linearly decreasing inertia.
    PsoLdw,
    /// Time-varying acceleration coefficients.
    HpsoTvac,
    Clpso,
    /// PSO steered by a trained actor.
    RlamPso,
    /// CLPSO steered by a trained actor.
    RlamClpso,
    Rlpso,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Pso,
        Algorithm::PsoLdw,
        Algorithm::HpsoTvac,
        Algorithm::Clpso,
        Algorithm::RlamPso,
        Algorithm::RlamClpso,
        Algorithm::Rlpso,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::PsoLdw => "pso-ldw",
            Algorithm::HpsoTvac => "hpso-tvac",
            Algorithm::Clpso => "clpso",
            Algorithm::RlamPso => "rlam-pso",
            Algorithm::RlamClpso => "rlam-clpso",
            Algorithm::Rlpso => "rlpso",
        }
    }

    /// The swarm variant a trained model must have been trained for.
    pub fn model_variant(self) -> Option<Variant> {
        match self {
            Algorithm::RlamPso => Some(Variant::Pso),
            Algorithm::RlamClpso => Some(Variant::Clpso),
            Algorithm::Rlpso => Some(Variant::Rlpso),
            _ => None,
        }
    }

    pub fn needs_model(self) -> bool {
        self.model_variant().is_some()
    }

    pub fn valid_names() -> String {
        Self::ALL.iter().map(|a| a.name()).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .iter()
            .copied()
            .find(|a| a.name() == s)
            .ok_or_else(|| HarnessError::UnknownAlgorithm(s.to_string()))
    }
}

/// A loaded actor together with its sidecar.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub actor: Mlp,
    pub meta: ModelMeta,
}

/// Runs `algorithm` once. Model-driven algorithms require `model`.
pub fn run_algorithm(
    algorithm: Algorithm,
    objective: Arc<Objective>,
    budget: usize,
    swarm_size: usize,
    seed: u64,
    model: Option<&LoadedModel>,
) -> Result<RunRecord, HarnessError> {
    if let Some(variant) = algorithm.model_variant() {
        let model = model.ok_or(HarnessError::MissingModel(algorithm))?;
        if model.meta.variant != variant {
            return Err(HarnessError::ModelMismatch {
                algorithm,
                trained_for: model.meta.variant,
            });
        }
        return Ok(adapted_run(
            &model.actor,
            objective,
            variant,
            model.meta.mode,
            budget,
            swarm_size,
            seed,
        )?);
    }
    let mut swarm = Swarm::new(Arc::clone(&objective), swarm_size, budget, seed)?;
    let t_max = iteration_count(swarm_size, budget).max(1);
    let groups = swarm.subgroup_count();
    let mut curve = vec![(swarm.eval_count(), swarm.gbest_fit())];
    let mut t = 0;
    while !swarm.is_exhausted() {
        match algorithm {
            Algorithm::Clpso => {
                let c = Variant::Clpso.origin_coeffs(t, t_max);
                swarm.clpso_step(c.w, c.c1, crate::swarm::DEFAULT_REFRESHING_GAP)?;
            }
            _ => {
                let schedule = schedule_of(algorithm).expect("schedule-driven algorithm");
                let c: CoefficientSet = schedule_coeffs(schedule, t.min(t_max), t_max)?;
                swarm.pso_step(&vec![c; groups])?;
            }
        }
        curve.push((swarm.eval_count(), swarm.gbest_fit()));
        t += 1;
    }
    let (variant, adapter) = match algorithm {
        Algorithm::Clpso => (Variant::Clpso, Adapter::None),
        other => (Variant::Pso, Adapter::Schedule(schedule_of(other).expect("schedule"))),
    };
    Ok(RunRecord::new(objective.id(), objective.dim(), seed, variant, adapter, curve))
}

fn schedule_of(algorithm: Algorithm) -> Option<Schedule> {
    match algorithm {
        Algorithm::Pso => Some(Schedule::Constant),
        Algorithm::PsoLdw => Some(Schedule::LinearDecW),
        Algorithm::HpsoTvac => Some(Schedule::Tvac),
        _ => None,
    }
}

/// Adapter tag a model-driven run will carry.
pub fn rlam_adapter(mode: Mode) -> Adapter {
    match mode {
        Mode::Absolute => Adapter::RlamAbsolute,
        Mode::Relative => Adapter::RlamRelative,
    }
}
