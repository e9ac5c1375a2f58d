//! Actor output → swarm coefficients, and the per-iteration reward.

use std::fmt;
use std::str::FromStr;

use crate::swarm::{linear_inertia, CoefficientSet, Swarm, SwarmError, DEFAULT_REFRESHING_GAP};

use super::DdpgError;

/// Guard against an all-zero share in the absolute mapping.
const SCALE_GUARD: f64 = 1e-5;
/// Total acceleration budget `c1 + c2 (+ c3)` available in absolute mode.
const ACCEL_BUDGET: f64 = 8.0;
const RELATIVE_STEP: f64 = 0.5;
const RELATIVE_W_RANGE: (f64, f64) = (0.05, 1.2);

/// Standard CLPSO acceleration coefficient.
pub const CLPSO_C: f64 = 1.494_45;

/// Actor output in `[-1, 1]`, one block per subgroup.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionVector(pub Vec<f64>);

impl ActionVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// How an action block turns into coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Coefficients generated from scratch.
    Absolute,
    /// Perturbations around the variant's own coefficients.
    Relative,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Absolute => "absolute",
            Mode::Relative => "relative",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = DdpgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "absolute" => Ok(Mode::Absolute),
            "relative" => Ok(Mode::Relative),
            other => Err(DdpgError::UnknownMode(other.to_string())),
        }
    }
}

/// Swarm update rule steered by the agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Pso,
    Clpso,
    Rlpso,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Pso => "pso",
            Variant::Clpso => "clpso",
            Variant::Rlpso => "rlpso",
        }
    }

    /// Action values per subgroup.
    pub fn group_width(self) -> usize {
        match self {
            Variant::Pso | Variant::Clpso => 4,
            Variant::Rlpso => 5,
        }
    }

    /// The variant's own coefficients at iteration `t` of `t_max`; the
    /// origin for relative-mode perturbations.
    pub fn origin_coeffs(self, t: usize, t_max: usize) -> CoefficientSet {
        let w = if t_max == 0 {
            0.9
        } else {
            linear_inertia(t.min(t_max), t_max)
        };
        match self {
            Variant::Pso => CoefficientSet::new(0.729, 1.494, 1.494),
            Variant::Clpso => CoefficientSet::new(w, CLPSO_C, 0.0),
            Variant::Rlpso => CoefficientSet {
                w,
                c1: CLPSO_C,
                c2: 0.5,
                c3: 0.5,
                c4: 0.5,
            },
        }
    }

    /// Runs one iteration of this variant's update.
    pub fn step(self, swarm: &mut Swarm, coeffs: &[CoefficientSet]) -> Result<bool, SwarmError> {
        let report = match self {
            Variant::Pso => swarm.pso_step(coeffs)?,
            Variant::Clpso => swarm.clpso_step_grouped(coeffs, DEFAULT_REFRESHING_GAP)?,
            Variant::Rlpso => swarm.rlpso_step(coeffs, DEFAULT_REFRESHING_GAP)?,
        };
        Ok(report.improved)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = DdpgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pso" => Ok(Variant::Pso),
            "clpso" => Ok(Variant::Clpso),
            "rlpso" => Ok(Variant::Rlpso),
            other => Err(DdpgError::UnknownVariant(other.to_string())),
        }
    }
}

fn unit(a: f64) -> f64 {
    (a + 1.0) / 2.0
}

/// Absolute mapping of a 4-value block: `w` in [0.1, 0.9] and `c1 + c2`
/// scaled to `8·â₃`, with `â = (a + 1)/2`.
pub fn map_action_absolute(a: &[f64]) -> CoefficientSet {
    let h: Vec<f64> = a.iter().map(|&v| unit(v)).collect();
    let scale = 1.0 / (h[1] + h[2] + SCALE_GUARD) * h[3] * ACCEL_BUDGET;
    CoefficientSet::new(h[0] * 0.8 + 0.1, scale * h[1], scale * h[2])
}

/// Absolute mapping of a 5-value RLPSO block: `w` from `â₀`, the budget of 8
/// shared among `c1, c2, c3` in proportion to `â₁, â₂, â₃`, and `c4 = â₄`.
pub fn map_action_absolute_rlpso(a: &[f64]) -> CoefficientSet {
    let h: Vec<f64> = a.iter().map(|&v| unit(v)).collect();
    let scale = ACCEL_BUDGET / (h[1] + h[2] + h[3] + SCALE_GUARD);
    CoefficientSet {
        w: h[0] * 0.8 + 0.1,
        c1: scale * h[1],
        c2: scale * h[2],
        c3: scale * h[3],
        c4: h[4],
    }
}

/// Relative mapping: each coefficient moves by `0.5·a` from `origin`.
/// Only as many coefficients as `a` has values are perturbed.
pub fn map_action_relative(a: &[f64], origin: CoefficientSet) -> CoefficientSet {
    let get = |k: usize| a.get(k).copied().unwrap_or(0.0) * RELATIVE_STEP;
    let mut c = CoefficientSet {
        w: origin.w + get(0),
        c1: origin.c1 + get(1),
        c2: origin.c2 + get(2),
        c3: origin.c3,
        c4: origin.c4,
    };
    if a.len() >= 5 {
        c.c3 += get(3);
        c.c4 = (c.c4 + get(4)).clamp(0.0, 1.0);
    }
    c.w = c.w.clamp(RELATIVE_W_RANGE.0, RELATIVE_W_RANGE.1);
    c
}

/// Splits a full action vector into one coefficient set per subgroup.
pub fn coefficients_for(
    action: &ActionVector,
    variant: Variant,
    mode: Mode,
    groups: usize,
    t: usize,
    t_max: usize,
) -> Result<Vec<CoefficientSet>, DdpgError> {
    let width = variant.group_width();
    if action.len() != width * groups {
        return Err(DdpgError::ActionWidth {
            expected: width * groups,
            got: action.len(),
        });
    }
    let origin = variant.origin_coeffs(t, t_max);
    Ok(action
        .0
        .chunks_exact(width)
        .map(|block| match (mode, variant) {
            (Mode::Absolute, Variant::Rlpso) => map_action_absolute_rlpso(block),
            (Mode::Absolute, _) => map_action_absolute(block),
            (Mode::Relative, Variant::Rlpso) => map_action_relative(block, origin),
            (Mode::Relative, _) => map_action_relative(&block[..3], origin),
        })
        .collect())
}

/// `+1` when gbest strictly improved, `−1` otherwise.
pub fn reward(prev_gbest: f64, new_gbest: f64) -> f64 {
    if new_gbest < prev_gbest {
        1.0
    } else {
        -1.0
    }
}
