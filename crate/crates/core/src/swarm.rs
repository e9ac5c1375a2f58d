//! Particle swarm state and the velocity/position update rules.
//!
//! A [`Swarm`] is a small state machine over a shared [`Objective`]. Each
//! `*_step` method performs one iteration of a PSO flavor using externally
//! supplied coefficients, one [`CoefficientSet`] per subgroup, so an outside
//! controller can steer the search every iteration.
//!
//! Random draws come from a single seeded ChaCha stream in a fixed order:
//!
//! * init: per particle, `dim` position draws then `dim` velocity draws; after
//!   all particles are evaluated, one exemplar assignment per particle.
//! * [`Swarm::pso_step`]: per particle, per dimension, `r1` then `r2`.
//! * [`Swarm::clpso_step`]: per particle, per dimension, one `r`; then any
//!   exemplar refresh for that particle.
//! * [`Swarm::rlpso_step`]: per particle, per dimension, `r1`, `r2`, `r3`; then
//!   `r4`, then `dim` position draws if the mutation fires; then any exemplar
//!   refresh.
//! * exemplar assignment: per dimension one `u`, followed by two tournament
//!   index draws when `u < Pc`; then the all-own fallback draws.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::benchmarks::Objective;

pub const DEFAULT_SWARM_SIZE: usize = 40;
pub const DEFAULT_SUBGROUPS: usize = 5;
pub const DEFAULT_REFRESHING_GAP: usize = 7;
/// Velocity limit as a fraction of the domain width.
pub const VMAX_FRACTION: f64 = 0.2;

const PC_BASE: f64 = 0.05;
const PC_SPAN: f64 = 0.45;

#[derive(Debug, Error, PartialEq)]
pub enum SwarmError {
    #[error("swarm of {n} particles cannot be split into {groups} subgroups")]
    TooFewParticles { n: usize, groups: usize },
    #[error("evaluation budget {budget} is smaller than the swarm size {n}")]
    BudgetTooSmall { budget: usize, n: usize },
    #[error("evaluation budget exhausted")]
    BudgetExhausted,
    #[error("expected {expected} coefficient sets, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("refreshing gap must be at least 1")]
    InvalidRefreshingGap,
    #[error("unknown schedule `{0}` (expected constant, linear_dec_w or tvac)")]
    UnknownSchedule(String),
    #[error("iteration {t} outside [0, {t_max}]")]
    IterationOutOfRange { t: usize, t_max: usize },
}

/// Coefficients driving one subgroup for one iteration.
///
/// `c3` and `c4` are only read by the RLPSO update; CLPSO reads `w` and uses
/// `c1` as its single acceleration coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
}

impl CoefficientSet {
    pub fn new(w: f64, c1: f64, c2: f64) -> Self {
        CoefficientSet {
            w,
            c1,
            c2,
            c3: 0.0,
            c4: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.w, self.c1, self.c2, self.c3, self.c4]
            .iter()
            .all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub pbest_pos: Vec<f64>,
    pub pbest_fit: f64,
    /// Index of the particle whose pbest each dimension learns from.
    pub exemplar: Vec<usize>,
    /// Iterations without pbest improvement under the current exemplar.
    pub stall_count: usize,
}

/// Outcome of one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepReport {
    /// Whether gbest strictly decreased.
    pub improved: bool,
    pub evaluations: usize,
    pub mutations: usize,
}

#[derive(Debug, Clone)]
pub struct Swarm {
    particles: Vec<Particle>,
    gbest_pos: Vec<f64>,
    gbest_fit: f64,
    objective: Arc<Objective>,
    eval_count: usize,
    eval_budget: usize,
    last_improve_eval: usize,
    rng: ChaCha8Rng,
    subgroup_count: usize,
    v_max: f64,
}

impl Swarm {
    /// Initializes `n` particles uniformly in the domain with the default
    /// subgroup count.
    pub fn new(objective: Arc<Objective>, n: usize, budget: usize, seed: u64) -> Result<Self, SwarmError> {
        Self::with_subgroups(objective, n, budget, seed, DEFAULT_SUBGROUPS)
    }

    pub fn with_subgroups(
        objective: Arc<Objective>,
        n: usize,
        budget: usize,
        seed: u64,
        subgroup_count: usize,
    ) -> Result<Self, SwarmError> {
        if subgroup_count == 0 || n < subgroup_count {
            return Err(SwarmError::TooFewParticles {
                n,
                groups: subgroup_count,
            });
        }
        if budget < n {
            return Err(SwarmError::BudgetTooSmall { budget, n });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (lower, upper) = (objective.lower(), objective.upper());
        let v_max = VMAX_FRACTION * (upper - lower);
        let dim = objective.dim();

        let mut particles = Vec::with_capacity(n);
        for _ in 0..n {
            let position: Vec<f64> = (0..dim).map(|_| rng.random_range(lower..=upper)).collect();
            let velocity: Vec<f64> = (0..dim).map(|_| rng.random_range(-v_max..=v_max)).collect();
            particles.push(Particle {
                pbest_pos: position.clone(),
                position,
                velocity,
                pbest_fit: f64::INFINITY,
                exemplar: Vec::new(),
                stall_count: 0,
            });
        }
        let mut swarm = Swarm {
            particles,
            gbest_pos: vec![0.0; dim],
            gbest_fit: f64::INFINITY,
            objective,
            eval_count: 0,
            eval_budget: budget,
            last_improve_eval: 0,
            rng,
            subgroup_count,
            v_max,
        };
        for i in 0..n {
            let fit = swarm.evaluate(i);
            let p = &mut swarm.particles[i];
            p.pbest_fit = fit;
            if fit < swarm.gbest_fit || i == 0 {
                swarm.gbest_fit = fit;
                swarm.gbest_pos.clone_from(&p.position);
            }
        }
        swarm.last_improve_eval = swarm.eval_count;
        for i in 0..n {
            swarm.assign_exemplar(i);
        }
        Ok(swarm)
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    /// Mutable access for controlled experiments; callers must keep
    /// `pbest_fit` consistent with `pbest_pos`.
    pub fn particles_mut(&mut self) -> &mut [Particle] {
        &mut self.particles
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn gbest_pos(&self) -> &[f64] {
        &self.gbest_pos
    }

    pub fn gbest_fit(&self) -> f64 {
        self.gbest_fit
    }

    pub fn eval_count(&self) -> usize {
        self.eval_count
    }

    pub fn eval_budget(&self) -> usize {
        self.eval_budget
    }

    pub fn last_improve_eval(&self) -> usize {
        self.last_improve_eval
    }

    pub fn subgroup_count(&self) -> usize {
        self.subgroup_count
    }

    pub fn v_max(&self) -> f64 {
        self.v_max
    }

    pub fn is_exhausted(&self) -> bool {
        self.eval_count >= self.eval_budget
    }

    /// Snapshot of the random stream, for replaying draws in tests.
    pub fn rng_snapshot(&self) -> ChaCha8Rng {
        self.rng.clone()
    }

    /// Subgroup of particle `i`: contiguous equal blocks, remainder in the last.
    pub fn subgroup_of(&self, i: usize) -> usize {
        subgroup_of(i, self.particles.len(), self.subgroup_count)
    }

    /// Classic PSO iteration: `v ← w·v + c1·r1∘(pbest − x) + c2·r2∘(gbest − x)`.
    pub fn pso_step(&mut self, coeffs: &[CoefficientSet]) -> Result<StepReport, SwarmError> {
        self.check_step(coeffs)?;
        let start = self.gbest_fit;
        let mut report = StepReport::default();
        for i in 0..self.particles.len() {
            if self.is_exhausted() {
                break;
            }
            let c = coeffs[self.subgroup_of(i)];
            let p = &mut self.particles[i];
            for d in 0..p.position.len() {
                let r1: f64 = self.rng.random();
                let r2: f64 = self.rng.random();
                let x = p.position[d];
                p.velocity[d] = c.w * p.velocity[d]
                    + c.c1 * r1 * (p.pbest_pos[d] - x)
                    + c.c2 * r2 * (self.gbest_pos[d] - x);
            }
            self.move_particle(i);
            self.evaluate_and_record(i);
            report.evaluations += 1;
        }
        report.improved = self.finish_iteration(start);
        Ok(report)
    }

    /// CLPSO iteration with a single `(w, c)` pair for the whole swarm.
    pub fn clpso_step(&mut self, w: f64, c: f64, refreshing_gap: usize) -> Result<StepReport, SwarmError> {
        let coeffs = vec![CoefficientSet::new(w, c, 0.0); self.subgroup_count];
        self.clpso_step_grouped(&coeffs, refreshing_gap)
    }

    /// CLPSO iteration, `v ← w·v + c·r∘(pbest_f(d) − x)`, with per-subgroup
    /// `w` and `c = c1`.
    pub fn clpso_step_grouped(
        &mut self,
        coeffs: &[CoefficientSet],
        refreshing_gap: usize,
    ) -> Result<StepReport, SwarmError> {
        if refreshing_gap == 0 {
            return Err(SwarmError::InvalidRefreshingGap);
        }
        self.check_step(coeffs)?;
        let start = self.gbest_fit;
        let mut report = StepReport::default();
        for i in 0..self.particles.len() {
            if self.is_exhausted() {
                break;
            }
            let c = coeffs[self.subgroup_of(i)];
            for d in 0..self.dim() {
                let r: f64 = self.rng.random();
                let target = self.particles[self.particles[i].exemplar[d]].pbest_pos[d];
                let p = &mut self.particles[i];
                p.velocity[d] = c.w * p.velocity[d] + c.c1 * r * (target - p.position[d]);
            }
            self.move_particle(i);
            let improved = self.evaluate_and_record(i);
            self.stall_bookkeeping(i, improved, refreshing_gap);
            report.evaluations += 1;
        }
        report.improved = self.finish_iteration(start);
        Ok(report)
    }

    /// RLPSO iteration: comprehensive-learning, gbest and own-pbest terms
    /// followed by the stall-gated position mutation.
    pub fn rlpso_step(
        &mut self,
        coeffs: &[CoefficientSet],
        refreshing_gap: usize,
    ) -> Result<StepReport, SwarmError> {
        if refreshing_gap == 0 {
            return Err(SwarmError::InvalidRefreshingGap);
        }
        self.check_step(coeffs)?;
        let start = self.gbest_fit;
        let (lower, upper) = (self.objective.lower(), self.objective.upper());
        let mut report = StepReport::default();
        for i in 0..self.particles.len() {
            if self.is_exhausted() {
                break;
            }
            let c = coeffs[self.subgroup_of(i)];
            for d in 0..self.dim() {
                let r1: f64 = self.rng.random();
                let r2: f64 = self.rng.random();
                let r3: f64 = self.rng.random();
                let learn = self.particles[self.particles[i].exemplar[d]].pbest_pos[d];
                let p = &mut self.particles[i];
                let x = p.position[d];
                p.velocity[d] = c.w * p.velocity[d]
                    + c.c1 * r1 * (learn - x)
                    + c.c2 * r2 * (self.gbest_pos[d] - x)
                    + c.c3 * r3 * (p.pbest_pos[d] - x);
            }
            let r4: f64 = self.rng.random();
            if r4 < mutation_threshold(c.c4, self.particles[i].stall_count) {
                let p = &mut self.particles[i];
                for d in 0..p.position.len() {
                    p.position[d] = self.rng.random_range(lower..=upper);
                    p.velocity[d] = 0.0;
                }
                report.mutations += 1;
            } else {
                self.move_particle(i);
            }
            let improved = self.evaluate_and_record(i);
            self.stall_bookkeeping(i, improved, refreshing_gap);
            report.evaluations += 1;
        }
        report.improved = self.finish_iteration(start);
        Ok(report)
    }

    /// Draws a fresh exemplar row for particle `i` and resets its stall count.
    pub fn assign_exemplar(&mut self, i: usize) -> &[usize] {
        let n = self.particles.len();
        let pc = learning_probability(i, n);
        let dim = self.dim();
        let mut row = Vec::with_capacity(dim);
        for _ in 0..dim {
            let u: f64 = self.rng.random();
            if follows_own(u, pc) || n < 2 {
                row.push(i);
            } else {
                row.push(self.tournament(i));
            }
        }
        if n >= 2 && row.iter().all(|&e| e == i) {
            let d = self.rng.random_range(0..dim);
            row[d] = random_other(&mut self.rng, n, i);
        }
        let p = &mut self.particles[i];
        p.exemplar = row;
        p.stall_count = 0;
        &self.particles[i].exemplar
    }

    /// Size-2 tournament among particles other than `i`; lower pbest wins.
    fn tournament(&mut self, i: usize) -> usize {
        let n = self.particles.len();
        let a = random_other(&mut self.rng, n, i);
        if n < 3 {
            return a;
        }
        let mut b = self.rng.random_range(0..n - 2);
        for skip in [i.min(a), i.max(a)] {
            if b >= skip {
                b += 1;
            }
        }
        if self.particles[b].pbest_fit < self.particles[a].pbest_fit {
            b
        } else {
            a
        }
    }

    fn check_step(&self, coeffs: &[CoefficientSet]) -> Result<(), SwarmError> {
        if self.is_exhausted() {
            return Err(SwarmError::BudgetExhausted);
        }
        if coeffs.len() != self.subgroup_count {
            return Err(SwarmError::CoefficientCount {
                expected: self.subgroup_count,
                got: coeffs.len(),
            });
        }
        Ok(())
    }

    /// Clamps the velocity, moves, and clamps the position (zeroing the
    /// velocity component on any clamped axis).
    fn move_particle(&mut self, i: usize) {
        let (lower, upper, v_max) = (self.objective.lower(), self.objective.upper(), self.v_max);
        let p = &mut self.particles[i];
        for (x, v) in p.position.iter_mut().zip(p.velocity.iter_mut()) {
            *v = v.clamp(-v_max, v_max);
            *x += *v;
            if *x < lower {
                *x = lower;
                *v = 0.0;
            } else if *x > upper {
                *x = upper;
                *v = 0.0;
            }
        }
    }

    fn evaluate(&mut self, i: usize) -> f64 {
        self.eval_count += 1;
        self.objective.value(&self.particles[i].position)
    }

    /// Evaluates particle `i`, updating pbest and gbest. Returns whether pbest improved.
    fn evaluate_and_record(&mut self, i: usize) -> bool {
        let fit = self.evaluate(i);
        let p = &mut self.particles[i];
        if fit < p.pbest_fit {
            p.pbest_fit = fit;
            p.pbest_pos.clone_from(&p.position);
            if fit < self.gbest_fit {
                self.gbest_fit = fit;
                self.gbest_pos.clone_from(&p.position);
            }
            true
        } else {
            false
        }
    }

    fn stall_bookkeeping(&mut self, i: usize, improved: bool, refreshing_gap: usize) {
        let p = &mut self.particles[i];
        if improved {
            p.stall_count = 0;
        } else {
            p.stall_count += 1;
            if p.stall_count > refreshing_gap {
                self.assign_exemplar(i);
            }
        }
    }

    fn finish_iteration(&mut self, start: f64) -> bool {
        let improved = self.gbest_fit < start;
        if improved {
            self.last_improve_eval = self.eval_count;
        }
        improved
    }
}

pub(crate) fn subgroup_of(i: usize, n: usize, groups: usize) -> usize {
    (i / (n / groups)).min(groups - 1)
}

fn random_other(rng: &mut ChaCha8Rng, n: usize, i: usize) -> usize {
    let k = rng.random_range(0..n - 1);
    if k >= i {
        k + 1
    } else {
        k
    }
}

/// CLPSO learning probability for the zero-based particle index `i` in a
/// swarm of `ps` particles.
pub fn learning_probability(i: usize, ps: usize) -> f64 {
    if ps < 2 {
        return PC_BASE;
    }
    let num = (10.0 * i as f64 / (ps - 1) as f64).exp() - 1.0;
    let den = 10f64.exp() - 1.0;
    PC_BASE + PC_SPAN * num / den
}

/// A dimension follows the particle's own pbest when the uniform draw is not
/// below the learning probability.
pub fn follows_own(u: f64, pc: f64) -> bool {
    u >= pc
}

/// Probability gate for the RLPSO position reset.
pub fn mutation_threshold(c4: f64, stall_count: usize) -> f64 {
    c4 * 0.01 * stall_count as f64
}

/// Offline coefficient schedules used by the baseline variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// `w = 0.729`, `c1 = c2 = 1.494`.
    Constant,
    /// `w` from 0.9 down to 0.4, `c1 = c2 = 2`.
    LinearDecW,
    /// Linear `w` plus time-varying acceleration: `c1` 2.5→0.5, `c2` 0.5→2.5.
    Tvac,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::Constant => "constant",
            Schedule::LinearDecW => "linear_dec_w",
            Schedule::Tvac => "tvac",
        }
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schedule {
    type Err = SwarmError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constant" => Ok(Schedule::Constant),
            "linear_dec_w" => Ok(Schedule::LinearDecW),
            "tvac" => Ok(Schedule::Tvac),
            other => Err(SwarmError::UnknownSchedule(other.to_string())),
        }
    }
}

/// Linearly decreasing inertia, 0.9 at `t = 0` to 0.4 at `t = t_max`.
pub fn linear_inertia(t: usize, t_max: usize) -> f64 {
    (t_max - t) as f64 / t_max as f64 * (0.9 - 0.4) + 0.4
}

pub fn schedule_coeffs(kind: Schedule, t: usize, t_max: usize) -> Result<CoefficientSet, SwarmError> {
    if t_max == 0 || t > t_max {
        return Err(SwarmError::IterationOutOfRange { t, t_max });
    }
    Ok(match kind {
        Schedule::Constant => CoefficientSet::new(0.729, 1.494, 1.494),
        Schedule::LinearDecW => CoefficientSet::new(linear_inertia(t, t_max), 2.0, 2.0),
        Schedule::Tvac => {
            let frac = t as f64 / t_max as f64;
            CoefficientSet::new(linear_inertia(t, t_max), 2.5 - 2.0 * frac, 0.5 + 2.0 * frac)
        }
    })
}

/// Number of full iterations that fit after initialization.
pub fn iteration_count(n: usize, budget: usize) -> usize {
    budget.saturating_sub(n).div_ceil(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{make_objective, FunctionId};

    fn sphere(dim: usize) -> Arc<Objective> {
        Arc::new(make_objective(FunctionId::Sphere, dim, 1).unwrap())
    }

    #[test]
    fn init_accounts_one_evaluation_per_particle() {
        let s = Swarm::new(sphere(10), 40, 10_000, 3).unwrap();
        assert_eq!(s.eval_count(), 40);
        assert_eq!(s.last_improve_eval(), 40);
        let min = s.particles().iter().map(|p| p.pbest_fit).fold(f64::INFINITY, f64::min);
        assert_eq!(s.gbest_fit(), min);
    }

    #[test]
    fn init_is_deterministic() {
        let a = Swarm::new(sphere(4), 10, 100, 42).unwrap();
        let b = Swarm::new(sphere(4), 10, 100, 42).unwrap();
        assert_eq!(a.particles(), b.particles());
    }

    #[test]
    fn init_rejects_bad_sizes() {
        assert_eq!(
            Swarm::new(sphere(2), 4, 100, 0).unwrap_err(),
            SwarmError::TooFewParticles { n: 4, groups: 5 }
        );
        assert_eq!(
            Swarm::new(sphere(2), 10, 5, 0).unwrap_err(),
            SwarmError::BudgetTooSmall { budget: 5, n: 10 }
        );
    }

    #[test]
    fn subgroups_are_contiguous_with_remainder_last() {
        let groups: Vec<usize> = (0..12).map(|i| subgroup_of(i, 12, 5)).collect();
        assert_eq!(groups, vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 4, 4]);
    }

    #[test]
    fn pure_inertia_moves_by_velocity() {
        let mut s = Swarm::new(sphere(3), 5, 100, 9).unwrap();
        for p in s.particles_mut() {
            p.position = vec![0.0; 3];
            p.velocity = vec![1.0, -2.0, 3.0];
        }
        s.pso_step(&[CoefficientSet::new(1.0, 0.0, 0.0); 5]).unwrap();
        for p in s.particles() {
            assert_eq!(p.position, vec![1.0, -2.0, 3.0]);
        }
    }

    #[test]
    fn particle_at_gbest_with_only_social_term_stops() {
        let mut s = Swarm::new(sphere(2), 5, 100, 9).unwrap();
        let g = s.gbest_pos().to_vec();
        let best = s
            .particles()
            .iter()
            .position(|p| p.pbest_pos == g)
            .unwrap();
        s.particles_mut()[best].position = g.clone();
        s.pso_step(&[CoefficientSet::new(0.0, 0.0, 2.0); 5]).unwrap();
        assert_eq!(s.particles()[best].velocity, vec![0.0, 0.0]);
    }

    #[test]
    fn degenerate_coefficients_freeze_positions() {
        let mut s = Swarm::new(sphere(4), 10, 1000, 5).unwrap();
        let zero = CoefficientSet::new(0.0, 0.0, 0.0);
        s.rlpso_step(&[zero; 5], 7).unwrap();
        let frozen: Vec<Vec<f64>> = s.particles().iter().map(|p| p.position.clone()).collect();
        assert!(s.particles().iter().all(|p| p.velocity.iter().all(|&v| v == 0.0)));
        s.pso_step(&[zero; 5]).unwrap();
        s.clpso_step(0.0, 0.0, 7).unwrap();
        let after: Vec<Vec<f64>> = s.particles().iter().map(|p| p.position.clone()).collect();
        assert_eq!(frozen, after);
    }

    #[test]
    fn clpso_without_acceleration_is_pure_inertia() {
        let mut s = Swarm::new(sphere(3), 5, 100, 9).unwrap();
        for p in s.particles_mut() {
            p.position = vec![10.0; 3];
            p.velocity = vec![2.0, 0.5, -1.0];
        }
        s.clpso_step(0.5, 0.0, 7).unwrap();
        for p in s.particles() {
            assert_eq!(p.velocity, vec![1.0, 0.25, -0.5]);
            assert_eq!(p.position, vec![11.0, 10.25, 9.5]);
        }
    }

    #[test]
    fn clpso_own_exemplar_at_pbest_scales_velocity() {
        let mut s = Swarm::new(sphere(2), 5, 100, 4).unwrap();
        let p = &mut s.particles_mut()[0];
        p.exemplar = vec![0, 0];
        p.position = p.pbest_pos.clone();
        p.velocity = vec![4.0, -6.0];
        s.clpso_step(0.7, 1.5, 7).unwrap();
        let v = &s.particles()[0].velocity;
        assert!((v[0] - 2.8).abs() < 1e-15 && (v[1] + 4.2).abs() < 1e-15);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let mut s = Swarm::new(sphere(2), 5, 12, 0).unwrap();
        let c = [CoefficientSet::new(0.7, 1.5, 1.5); 5];
        assert_eq!(s.pso_step(&c).unwrap().evaluations, 5);
        assert_eq!(s.pso_step(&c).unwrap().evaluations, 2);
        assert_eq!(s.eval_count(), 12);
        assert_eq!(s.pso_step(&c).unwrap_err(), SwarmError::BudgetExhausted);
    }

    #[test]
    fn wrong_coefficient_count_is_rejected() {
        let mut s = Swarm::new(sphere(2), 5, 100, 0).unwrap();
        assert_eq!(
            s.pso_step(&[CoefficientSet::new(0.7, 1.5, 1.5); 3]).unwrap_err(),
            SwarmError::CoefficientCount { expected: 5, got: 3 }
        );
        assert_eq!(
            s.clpso_step(0.7, 1.5, 0).unwrap_err(),
            SwarmError::InvalidRefreshingGap
        );
    }

    #[test]
    fn learning_probability_endpoints() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(learning_probability(0, 40), 0.05));
        assert!(close(learning_probability(39, 40), 0.5));
        assert!(close(learning_probability(0, 2), 0.05));
        assert!(close(learning_probability(1, 2), 0.5));
        // u = 1.0 is never below either threshold.
        assert!(follows_own(1.0, 0.05) && follows_own(1.0, 0.5));
        assert!(!follows_own(0.0, 0.05));
    }

    #[test]
    fn exemplar_rows_never_point_only_at_self() {
        let mut s = Swarm::new(sphere(3), 10, 1000, 17).unwrap();
        for round in 0..50 {
            let i = round % 10;
            let row = s.assign_exemplar(i).to_vec();
            assert_eq!(row.len(), 3);
            assert!(row.iter().any(|&e| e != i));
            assert!(row.iter().all(|&e| e < 10));
            assert_eq!(s.particles()[i].stall_count, 0);
        }
    }

    #[test]
    fn mutation_gate() {
        assert_eq!(mutation_threshold(0.0, 50), 0.0);
        assert_eq!(mutation_threshold(1.0, 0), 0.0);
        assert_eq!(mutation_threshold(1.0, 100), 1.0);
    }

    #[test]
    fn forced_mutation_reinitializes_every_particle() {
        let mut s = Swarm::new(sphere(3), 5, 100, 21).unwrap();
        for p in s.particles_mut() {
            p.stall_count = 100;
        }
        let mut c = CoefficientSet::new(0.5, 1.0, 1.0);
        c.c4 = 1.0;
        // Refreshing gap above the stall count keeps the forced value in place.
        let report = s.rlpso_step(&[c; 5], 1000).unwrap();
        assert_eq!(report.mutations, 5);
        assert!(s.particles().iter().all(|p| p.velocity.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn mutation_never_fires_without_gate() {
        let mut s = Swarm::new(sphere(3), 10, 5000, 21).unwrap();
        let c = CoefficientSet::new(0.5, 1.0, 1.0);
        while !s.is_exhausted() {
            assert_eq!(s.rlpso_step(&[c; 5], 7).unwrap().mutations, 0);
        }
        let mut s = Swarm::new(sphere(3), 10, 5000, 21).unwrap();
        let mut c = c;
        c.c4 = 1.0;
        let report = s.rlpso_step(&[c; 5], 7).unwrap();
        // Every stall count is zero right after init.
        assert_eq!(report.mutations, 0);
    }

    #[test]
    fn schedules() {
        let c = schedule_coeffs(Schedule::LinearDecW, 0, 100).unwrap();
        assert_eq!(c.w, 0.9);
        let c = schedule_coeffs(Schedule::LinearDecW, 100, 100).unwrap();
        assert_eq!(c.w, 0.4);
        let c = schedule_coeffs(Schedule::Tvac, 50, 100).unwrap();
        assert_eq!((c.c1, c.c2), (1.5, 1.5));
        let c = schedule_coeffs(Schedule::Constant, 3, 100).unwrap();
        assert_eq!((c.w, c.c1, c.c2), (0.729, 1.494, 1.494));
        assert!(schedule_coeffs(Schedule::Tvac, 101, 100).is_err());
        assert!(matches!(
            "cosine".parse::<Schedule>(),
            Err(SwarmError::UnknownSchedule(_))
        ));
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(iteration_count(40, 10_000), 249);
        assert_eq!(iteration_count(40, 10_010), 250);
        assert_eq!(iteration_count(5, 5), 0);
    }
}
