//! Independent reference implementations shared by the integration suites.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rlam::neural::{GradientTape, Mlp, OutputActivation};
use rlam::swarm::{CoefficientSet, Swarm};

/// Plain-data copy of a swarm, advanced by the oracles below.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub pbest: Vec<Vec<f64>>,
    pub pbest_fit: Vec<f64>,
    pub gbest: Vec<f64>,
    pub gbest_fit: f64,
    pub evals: usize,
}

impl SimState {
    pub fn capture(s: &Swarm) -> Self {
        let ps = s.particles();
        SimState {
            x: ps.iter().map(|p| p.position.clone()).collect(),
            v: ps.iter().map(|p| p.velocity.clone()).collect(),
            pbest: ps.iter().map(|p| p.pbest_pos.clone()).collect(),
            pbest_fit: ps.iter().map(|p| p.pbest_fit).collect(),
            gbest: s.gbest_pos().to_vec(),
            gbest_fit: s.gbest_fit(),
            evals: s.eval_count(),
        }
    }
}

fn clamp_move(x: &mut [f64], v: &mut [f64], lo: f64, hi: f64, vmax: f64) {
    for d in 0..x.len() {
        v[d] = v[d].max(-vmax).min(vmax);
        x[d] += v[d];
        if x[d] < lo {
            x[d] = lo;
            v[d] = 0.0;
        }
        if x[d] > hi {
            x[d] = hi;
            v[d] = 0.0;
        }
    }
}

fn record(st: &mut SimState, i: usize, f: &dyn Fn(&[f64]) -> f64) {
    let fit = f(&st.x[i]);
    st.evals += 1;
    if fit < st.pbest_fit[i] {
        st.pbest_fit[i] = fit;
        st.pbest[i] = st.x[i].clone();
        if fit < st.gbest_fit {
            st.gbest_fit = fit;
            st.gbest = st.x[i].clone();
        }
    }
}

/// One classic PSO iteration with a single coefficient set, drawing
/// `r1, r2` per dimension in particle-major order.
pub fn pso_oracle(
    st: &mut SimState,
    rng: &mut ChaCha8Rng,
    c: CoefficientSet,
    bounds: (f64, f64),
    vmax: f64,
    f: &dyn Fn(&[f64]) -> f64,
) {
    for i in 0..st.x.len() {
        for d in 0..st.x[i].len() {
            let r1: f64 = rng.random();
            let r2: f64 = rng.random();
            let x = st.x[i][d];
            st.v[i][d] = c.w * st.v[i][d] + c.c1 * r1 * (st.pbest[i][d] - x) + c.c2 * r2 * (st.gbest[d] - x);
        }
        let (x, v) = (&mut st.x[i], &mut st.v[i]);
        clamp_move(x, v, bounds.0, bounds.1, vmax);
        record(st, i, f);
    }
}

/// One CLPSO iteration with fixed exemplar rows (no refresh), drawing one
/// `r` per dimension.
pub fn clpso_oracle(
    st: &mut SimState,
    rng: &mut ChaCha8Rng,
    exemplars: &[Vec<usize>],
    w: f64,
    c: f64,
    bounds: (f64, f64),
    vmax: f64,
    f: &dyn Fn(&[f64]) -> f64,
) {
    for i in 0..st.x.len() {
        for d in 0..st.x[i].len() {
            let r: f64 = rng.random();
            let target = st.pbest[exemplars[i][d]][d];
            st.v[i][d] = w * st.v[i][d] + c * r * (target - st.x[i][d]);
        }
        let (x, v) = (&mut st.x[i], &mut st.v[i]);
        clamp_move(x, v, bounds.0, bounds.1, vmax);
        record(st, i, f);
    }
}

/// Two-sided p-value by enumerating every sign assignment of the ranks of
/// the nonzero differences. Returns `(statistic, p)`.
pub fn wilcoxon_brute_force(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n < 5 {
        return None;
    }
    let abs: Vec<f64> = d.iter().map(|v| v.abs()).collect();
    let ranks: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as f64;
            let equal = abs.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let w_plus: f64 = d.iter().zip(&ranks).filter(|(v, _)| **v > 0.0).map(|(_, r)| r).sum();
    let total: f64 = ranks.iter().sum();
    let stat = w_plus.min(total - w_plus);
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| ranks[k]).sum();
        if s <= stat + 1e-9 {
            hits += 1;
        }
    }
    let p = (2.0 * hits as f64 / (1u64 << n) as f64).min(1.0);
    Some((stat, p))
}

/// Largest relative error between backprop and central differences over
/// `probes` randomly chosen parameters of `net` for the loss
/// `L = Σ_k g_k · out_k` at input `x`.
pub fn gradient_check(net: &mut Mlp, x: &[f64], g: &[f64], probes: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut tape = GradientTape::new(net);
    net.forward_recorded(x, &mut tape).unwrap();
    net.backward(&mut tape, g).unwrap();
    let analytic = tape.grads().to_vec();
    let loss = |net: &Mlp| -> f64 { net.forward(x).unwrap().iter().zip(g).map(|(o, w)| o * w).sum() };
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..probes {
        let k = rng.random_range(0..analytic.len());
        let orig = net.params()[k];
        net.params_mut()[k] = orig + eps;
        let up = loss(net);
        net.params_mut()[k] = orig - eps;
        let down = loss(net);
        net.params_mut()[k] = orig;
        let numeric = (up - down) / (2.0 * eps);
        let err = (numeric - analytic[k]).abs() / (numeric.abs() + analytic[k].abs()).max(1e-6);
        worst = worst.max(err);
    }
    worst
}

/// Central-difference relative error of the input gradient.
pub fn input_gradient_check(net: &Mlp, x: &[f64], g: &[f64]) -> f64 {
    let mut tape = GradientTape::new(net);
    net.forward_recorded(x, &mut tape).unwrap();
    let analytic = net.input_gradient(&mut tape, g).unwrap();
    let loss = |x: &[f64]| -> f64 { net.forward(x).unwrap().iter().zip(g).map(|(o, w)| o * w).sum() };
    let eps = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..x.len() {
        let mut up = x.to_vec();
        up[k] += eps;
        let mut down = x.to_vec();
        down[k] -= eps;
        let numeric = (loss(&up) - loss(&down)) / (2.0 * eps);
        let err = (numeric - analytic[k]).abs() / (numeric.abs() + analytic[k].abs()).max(1e-6);
        worst = worst.max(err);
    }
    worst
}

/// Random net of the given shape plus a random input and output weighting.
pub fn random_probe(dims: &[usize], output: OutputActivation, seed: u64) -> (Mlp, Vec<f64>, Vec<f64>) {
    let net = Mlp::new(dims, output, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let x = (0..dims[0]).map(|_| rng.random_range(-1.0..1.0)).collect();
    let g = (0..*dims.last().unwrap()).map(|_| rng.random_range(-1.0..1.0)).collect();
    (net, x, g)
}
