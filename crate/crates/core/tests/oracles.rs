mod common;

use std::sync::Arc;

use common::{clpso_oracle, pso_oracle, wilcoxon_brute_force, SimState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rlam::benchmarks::{make_objective, FunctionId};
use rlam::harness::stats::wilcoxon_signed_rank;
use rlam::swarm::{CoefficientSet, Swarm};

fn small_swarm(id: FunctionId, n: usize, seed: u64) -> (Swarm, Arc<rlam::Objective>) {
    let obj = Arc::new(make_objective(id, 2, 5).unwrap());
    (Swarm::with_subgroups(Arc::clone(&obj), n, 1000, seed, 1).unwrap(), obj)
}

#[test]
fn pso_matches_hand_simulation_for_three_iterations() {
    for (id, seed, n) in [(FunctionId::Sphere, 1, 3), (FunctionId::Rastrigin, 2, 2), (FunctionId::Elliptic, 8, 3)] {
        let (mut swarm, obj) = small_swarm(id, n, seed);
        let f = |x: &[f64]| obj.evaluate(x).unwrap();
        let bounds = (obj.lower(), obj.upper());
        let c = CoefficientSet::new(0.729, 1.494, 1.494);
        let mut sim = SimState::capture(&swarm);
        let mut rng = swarm.rng_snapshot();
        for _ in 0..3 {
            pso_oracle(&mut sim, &mut rng, c, bounds, swarm.v_max(), &f);
            swarm.pso_step(&[c]).unwrap();
            assert_eq!(SimState::capture(&swarm), sim, "{id:?}");
        }
    }
}

#[test]
fn clpso_matches_hand_simulation_for_three_iterations() {
    for (id, seed) in [(FunctionId::Sphere, 3), (FunctionId::Griewank, 4)] {
        let (mut swarm, obj) = small_swarm(id, 3, seed);
        let f = |x: &[f64]| obj.evaluate(x).unwrap();
        let bounds = (obj.lower(), obj.upper());
        let exemplars: Vec<Vec<usize>> = swarm.particles().iter().map(|p| p.exemplar.clone()).collect();
        let mut sim = SimState::capture(&swarm);
        let mut rng = swarm.rng_snapshot();
        for _ in 0..3 {
            clpso_oracle(&mut sim, &mut rng, &exemplars, 0.7, 1.49445, bounds, swarm.v_max(), &f);
            swarm.clpso_step(0.7, 1.49445, 100).unwrap();
            assert_eq!(SimState::capture(&swarm), sim, "{id:?}");
        }
    }
}

#[test]
fn exemplar_rows_follow_documented_draw_order() {
    let (swarm, _) = small_swarm(FunctionId::Sphere, 3, 11);
    for (i, p) in swarm.particles().iter().enumerate() {
        assert_eq!(p.exemplar.len(), 2);
        assert!(p.exemplar.iter().any(|&e| e != i), "particle {i} learns only from itself");
        assert!(p.exemplar.iter().all(|&e| e < 3));
    }
}

#[test]
fn wilcoxon_six_positive_differences() {
    let x = [2.0, 3.0, 4.0, 5.0, 6.0, 7.0];
    let y = [1.0; 6];
    let r = wilcoxon_signed_rank(&x, &y).unwrap();
    assert_eq!(r.statistic, 0.0);
    assert_eq!(r.p_value, 0.03125);
    assert!(r.exact);
}

#[test]
fn wilcoxon_all_ties_is_an_error() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert!(wilcoxon_signed_rank(&x, &x).is_err());
}

#[test]
fn wilcoxon_matches_brute_force_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(5..=12);
        // Coarse values so ties and zero differences both occur.
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..8) as f64).collect();
        let Some((stat, p)) = wilcoxon_brute_force(&x, &y) else {
            assert!(wilcoxon_signed_rank(&x, &y).is_err());
            continue;
        };
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert_eq!(r.statistic, stat);
        assert!((r.p_value - p).abs() < 1e-12, "{x:?} {y:?}: {} vs {p}", r.p_value);
        let swapped = wilcoxon_signed_rank(&y, &x).unwrap();
        assert_eq!(swapped.p_value, r.p_value);
        checked += 1;
    }
}

#[test]
fn wilcoxon_normal_branch_tracks_enumeration_above_the_limit() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..3 {
        let x: Vec<f64> = (0..21).map(|_| rng.random_range(0.0..1.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + rng.random_range(-0.6..0.4)).collect();
        let r = wilcoxon_signed_rank(&x, &y).unwrap();
        assert!(!r.exact);
        let (_, p) = wilcoxon_brute_force(&x, &y).unwrap();
        assert!((r.p_value - p).abs() < 0.01, "{} vs {p}", r.p_value);
    }
}
