//! Shifted and rotated benchmark objectives in the style of the CEC2013 suite.
//!
//! Every objective is built from a 64-bit seed: the seed drives a ChaCha
//! stream that produces the shift vector and (for rotated functions) an
//! orthogonal matrix obtained by Gram-Schmidt on standard normal draws. The
//! function value is `raw(M·(x − o)) + bias`, minimized everywhere.

use std::f64::consts::{E, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

/// Lower bound of every search domain.
pub const LOWER: f64 = -100.0;
/// Upper bound of every search domain.
pub const UPPER: f64 = 100.0;

/// Shift components stay this far from the domain edge.
const SHIFT_MARGIN: f64 = 20.0;

const WEIERSTRASS_A: f64 = 0.5;
const WEIERSTRASS_B: f64 = 3.0;
const WEIERSTRASS_KMAX: usize = 20;

/// Location of the maximum of `z·sin(√|z|)` on [-500, 500].
const SCHWEFEL_OPTIMUM: f64 = 4.209_687_462_275_036e2;

const COMPOSITION_SIGMA: f64 = 20.0;
const COMPOSITION_LAMBDA: [f64; 3] = [1.0, 10.0, 1e-3];
const COMPOSITION_BIAS: [f64; 3] = [0.0, 100.0, 200.0];

#[derive(Debug, Error, PartialEq)]
pub enum BenchmarkError {
    #[error("unknown benchmark function `{0}`")]
    UnknownFunction(String),
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("point has length {got}, objective expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("rotation must be a {dim}x{dim} orthogonal matrix")]
    BadRotation { dim: usize },
}

/// The implemented subset of the CEC2013 functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionId {
    Sphere,
    Elliptic,
    BentCigar,
    Discus,
    DifferentPowers,
    Rosenbrock,
    Ackley,
    Weierstrass,
    Griewank,
    Rastrigin,
    RotatedRastrigin,
    Schwefel,
    Composition,
}

impl FunctionId {
    pub const ALL: [FunctionId; 13] = [
        FunctionId::Sphere,
        FunctionId::Elliptic,
        FunctionId::BentCigar,
        FunctionId::Discus,
        FunctionId::DifferentPowers,
        FunctionId::Rosenbrock,
        FunctionId::Ackley,
        FunctionId::Weierstrass,
        FunctionId::Griewank,
        FunctionId::Rastrigin,
        FunctionId::RotatedRastrigin,
        FunctionId::Schwefel,
        FunctionId::Composition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionId::Sphere => "sphere",
            FunctionId::Elliptic => "elliptic",
            FunctionId::BentCigar => "bent_cigar",
            FunctionId::Discus => "discus",
            FunctionId::DifferentPowers => "different_powers",
            FunctionId::Rosenbrock => "rosenbrock",
            FunctionId::Ackley => "ackley",
            FunctionId::Weierstrass => "weierstrass",
            FunctionId::Griewank => "griewank",
            FunctionId::Rastrigin => "rastrigin",
            FunctionId::RotatedRastrigin => "rotated_rastrigin",
            FunctionId::Schwefel => "schwefel",
            FunctionId::Composition => "composition",
        }
    }

    /// Optimal value of the function (the bias added to the raw form).
    pub fn bias(self) -> f64 {
        match self {
            FunctionId::Sphere => -1400.0,
            FunctionId::Elliptic => -1300.0,
            FunctionId::BentCigar => -1200.0,
            FunctionId::Discus => -1100.0,
            FunctionId::DifferentPowers => -1000.0,
            FunctionId::Rosenbrock => -900.0,
            FunctionId::Ackley => -700.0,
            FunctionId::Weierstrass => -600.0,
            FunctionId::Griewank => -500.0,
            FunctionId::Rastrigin => -400.0,
            FunctionId::RotatedRastrigin => -300.0,
            FunctionId::Schwefel => -100.0,
            FunctionId::Composition => 900.0,
        }
    }

    pub fn is_rotated(self) -> bool {
        !matches!(
            self,
            FunctionId::Sphere
                | FunctionId::DifferentPowers
                | FunctionId::Rastrigin
                | FunctionId::Schwefel
                | FunctionId::Composition
        )
    }

    pub fn is_composition(self) -> bool {
        self == FunctionId::Composition
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionId {
    type Err = BenchmarkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FunctionId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| BenchmarkError::UnknownFunction(s.to_string()))
    }
}

/// A fully instantiated benchmark problem. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Objective {
    id: FunctionId,
    dim: usize,
    lower: f64,
    upper: f64,
    shift: Vec<f64>,
    /// Row-major `dim × dim`.
    rotation: Vec<f64>,
    bias: f64,
    seed: u64,
    /// Optima of the second and third composition components.
    extra_shifts: Vec<Vec<f64>>,
}

/// Builds the objective `id` in `dim` dimensions with transforms drawn from `seed`.
pub fn make_objective(id: FunctionId, dim: usize, seed: u64) -> Result<Objective, BenchmarkError> {
    if dim < 2 {
        return Err(BenchmarkError::DimensionTooSmall(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift = random_shift(&mut rng, dim);
    let rotation = if id.is_rotated() {
        random_rotation(&mut rng, dim)
    } else {
        identity(dim)
    };
    let extra_shifts = if id.is_composition() {
        vec![random_shift(&mut rng, dim), random_shift(&mut rng, dim)]
    } else {
        Vec::new()
    };
    Ok(Objective {
        id,
        dim,
        lower: LOWER,
        upper: UPPER,
        shift,
        rotation,
        bias: id.bias(),
        seed,
        extra_shifts,
    })
}

impl Objective {
    pub fn id(&self) -> FunctionId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn rotation(&self) -> &[f64] {
        &self.rotation
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Replaces the rotation with another orthogonal matrix (row-major).
    pub fn with_rotation(mut self, rotation: Vec<f64>) -> Result<Self, BenchmarkError> {
        if rotation.len() != self.dim * self.dim || orthogonality_error(&rotation, self.dim) > 1e-9 {
            return Err(BenchmarkError::BadRotation { dim: self.dim });
        }
        self.rotation = rotation;
        Ok(self)
    }

    /// Evaluates the objective at `x`. No bounds check; callers clamp.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, BenchmarkError> {
        if x.len() != self.dim {
            return Err(BenchmarkError::LengthMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.value(x))
    }

    /// Same as [`Objective::evaluate`] with the length already checked.
    pub(crate) fn value(&self, x: &[f64]) -> f64 {
        if self.id.is_composition() {
            return self.composition(x) + self.bias;
        }
        let z = self.transform(x, &self.shift);
        raw(self.id, &z) + self.bias
    }

    /// `M·(x − o)`.
    fn transform(&self, x: &[f64], shift: &[f64]) -> Vec<f64> {
        let diff: Vec<f64> = x.iter().zip(shift).map(|(a, b)| a - b).collect();
        if !self.id.is_rotated() {
            return diff;
        }
        self.rotation
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(&diff).map(|(m, d)| m * d).sum())
            .collect()
    }

    fn composition(&self, x: &[f64]) -> f64 {
        let components = [FunctionId::Rastrigin, FunctionId::Griewank, FunctionId::Sphere];
        let optima = [&self.shift, &self.extra_shifts[0], &self.extra_shifts[1]];
        let mut weights = [0.0; 3];
        let mut values = [0.0; 3];
        for k in 0..3 {
            let z = self.transform(x, optima[k]);
            values[k] = COMPOSITION_LAMBDA[k] * raw(components[k], &z) + COMPOSITION_BIAS[k];
            let sq: f64 = z.iter().map(|v| v * v).sum();
            if sq == 0.0 {
                // Sitting exactly on a component optimum: that component owns the point.
                return values[k];
            }
            weights[k] =
                (-sq / (2.0 * self.dim as f64 * COMPOSITION_SIGMA * COMPOSITION_SIGMA)).exp() / sq.sqrt();
        }
        let total: f64 = weights.iter().sum();
        if total == 0.0 {
            // Far from every optimum all weights underflow; fall back to the cheapest component.
            return values.iter().copied().fold(f64::INFINITY, f64::min);
        }
        weights.iter().zip(&values).map(|(w, v)| w / total * v).sum()
    }
}

/// Raw (unbiased) function value at the already-transformed point `z`.
fn raw(id: FunctionId, z: &[f64]) -> f64 {
    let d = z.len() as f64;
    match id {
        FunctionId::Sphere | FunctionId::Composition => z.iter().map(|v| v * v).sum(),
        FunctionId::Elliptic => z
            .iter()
            .enumerate()
            .map(|(i, v)| 10f64.powf(6.0 * i as f64 / (d - 1.0)) * v * v)
            .sum(),
        FunctionId::BentCigar => z[0] * z[0] + 1e6 * z[1..].iter().map(|v| v * v).sum::<f64>(),
        FunctionId::Discus => 1e6 * z[0] * z[0] + z[1..].iter().map(|v| v * v).sum::<f64>(),
        FunctionId::DifferentPowers => z
            .iter()
            .enumerate()
            .map(|(i, v)| v.abs().powf(2.0 + 4.0 * i as f64 / (d - 1.0)))
            .sum::<f64>()
            .sqrt(),
        FunctionId::Rosenbrock => {
            let y: Vec<f64> = z.iter().map(|v| v * 2.048 / 100.0 + 1.0).collect();
            y.windows(2)
                .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
                .sum()
        }
        FunctionId::Ackley => {
            let sq = z.iter().map(|v| v * v).sum::<f64>() / d;
            let cos = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / d;
            -20.0 * (-0.2 * sq.sqrt()).exp() - cos.exp() + 20.0 + E
        }
        FunctionId::Weierstrass => {
            let terms: Vec<(f64, f64)> = (0..=WEIERSTRASS_KMAX)
                .map(|k| (WEIERSTRASS_A.powi(k as i32), WEIERSTRASS_B.powi(k as i32)))
                .collect();
            let offset: f64 = terms.iter().map(|(a, b)| a * (PI * b).cos()).sum();
            z.iter()
                .map(|v| {
                    let y = v * 0.5 / 100.0;
                    terms
                        .iter()
                        .map(|(a, b)| a * (2.0 * PI * b * (y + 0.5)).cos())
                        .sum::<f64>()
                })
                .sum::<f64>()
                - d * offset
        }
        FunctionId::Griewank => {
            let mut sum = 0.0;
            let mut prod = 1.0;
            for (i, v) in z.iter().enumerate() {
                let y = v * 600.0 / 100.0;
                sum += y * y / 4000.0;
                prod *= (y / ((i + 1) as f64).sqrt()).cos();
            }
            sum - prod + 1.0
        }
        FunctionId::Rastrigin | FunctionId::RotatedRastrigin => z
            .iter()
            .map(|v| {
                let y = v * 5.12 / 100.0;
                y * y - 10.0 * (2.0 * PI * y).cos() + 10.0
            })
            .sum(),
        FunctionId::Schwefel => {
            let peak = schwefel_term(SCHWEFEL_OPTIMUM, d);
            z.iter()
                .map(|v| peak - schwefel_term(v * 1000.0 / 100.0 + SCHWEFEL_OPTIMUM, d))
                .sum()
        }
    }
}

/// `z·sin(√|z|)` with the quadratic penalty outside [-500, 500].
fn schwefel_term(z: f64, d: f64) -> f64 {
    if z.abs() <= 500.0 {
        z * z.abs().sqrt().sin()
    } else if z > 500.0 {
        let m = 500.0 - z % 500.0;
        m * m.abs().sqrt().sin() - (z - 500.0).powi(2) / (10_000.0 * d)
    } else {
        let m = z.abs() % 500.0 - 500.0;
        m * m.abs().sqrt().sin() - (z + 500.0).powi(2) / (10_000.0 * d)
    }
}

fn random_shift(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim)
        .map(|_| rng.random_range(LOWER + SHIFT_MARGIN..UPPER - SHIFT_MARGIN))
        .collect()
}

fn identity(dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim * dim];
    for i in 0..dim {
        m[i * dim + i] = 1.0;
    }
    m
}

/// Orthonormal rows via modified Gram-Schmidt on a Gaussian matrix.
fn random_rotation(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut rows: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        let mut degenerate = false;
        for i in 0..dim {
            // Gram-Schmidt, applied twice.
            for _ in 0..2 {
                for j in 0..i {
                    let dot: f64 = rows[i].iter().zip(&rows[j]).map(|(a, b)| a * b).sum();
                    let (head, tail) = rows.split_at_mut(i);
                    for (a, b) in tail[0].iter_mut().zip(&head[j]) {
                        *a -= dot * b;
                    }
                }
            }
            let norm = rows[i].iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm < 1e-8 {
                degenerate = true;
                break;
            }
            rows[i].iter_mut().for_each(|v| *v /= norm);
        }
        if !degenerate {
            return rows.concat();
        }
    }
}

/// `‖MᵀM − I‖∞` for a row-major square matrix.
pub fn orthogonality_error(m: &[f64], dim: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let dot: f64 = (0..dim).map(|k| m[k * dim + i] * m[k * dim + j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dot - target).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_and_rastrigin_hit_their_bias_at_the_shift() {
        for seed in [0, 1, 99] {
            let sphere = make_objective(FunctionId::Sphere, 10, seed).unwrap();
            assert_eq!(sphere.evaluate(sphere.shift()).unwrap(), -1400.0);
            let rastrigin = make_objective(FunctionId::Rastrigin, 10, seed).unwrap();
            assert_eq!(rastrigin.evaluate(rastrigin.shift()).unwrap(), -400.0);
        }
    }

    #[test]
    fn sphere_offset_by_ones() {
        let obj = make_objective(FunctionId::Sphere, 2, 7).unwrap();
        let x: Vec<f64> = obj.shift().iter().map(|v| v + 1.0).collect();
        let got = obj.evaluate(&x).unwrap();
        assert!((got - (-1398.0)).abs() < 1e-9, "{got}");
    }

    #[test]
    fn elliptic_first_axis_has_unit_weight() {
        let obj = make_objective(FunctionId::Elliptic, 2, 3).unwrap();
        let m = obj.rotation();
        // x = o + Mᵀe₁, i.e. o plus the first row of M.
        let x: Vec<f64> = obj.shift().iter().zip(&m[0..2]).map(|(o, r)| o + r).collect();
        let got = obj.evaluate(&x).unwrap();
        assert!((got - (-1300.0 + 1.0)).abs() < 1e-9, "{got}");
    }

    #[test]
    fn ackley_unrotated_zero_at_shift() {
        let obj = make_objective(FunctionId::Ackley, 5, 11)
            .unwrap()
            .with_rotation(identity(5))
            .unwrap();
        assert!((obj.evaluate(obj.shift()).unwrap() - (-700.0)).abs() < 1e-12);
    }

    #[test]
    fn composition_is_bias_at_first_component_optimum() {
        let obj = make_objective(FunctionId::Composition, 10, 5).unwrap();
        assert_eq!(obj.evaluate(obj.shift()).unwrap(), 900.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert_eq!(
            make_objective(FunctionId::Sphere, 1, 0).unwrap_err(),
            BenchmarkError::DimensionTooSmall(1)
        );
        assert!(matches!(
            "nope".parse::<FunctionId>(),
            Err(BenchmarkError::UnknownFunction(_))
        ));
        let obj = make_objective(FunctionId::Sphere, 3, 0).unwrap();
        assert_eq!(
            obj.evaluate(&[0.0; 2]).unwrap_err(),
            BenchmarkError::LengthMismatch { expected: 3, got: 2 }
        );
        assert!(obj.clone().with_rotation(vec![1.0; 9]).is_err());
    }

    #[test]
    fn names_round_trip() {
        for id in FunctionId::ALL {
            assert_eq!(id.name().parse::<FunctionId>().unwrap(), id);
        }
    }

    #[test]
    fn shift_stays_interior() {
        for id in FunctionId::ALL {
            let obj = make_objective(id, 30, 1234).unwrap();
            assert!(obj
                .shift()
                .iter()
                .all(|&v| v > LOWER + 5.0 && v < UPPER - 5.0));
        }
    }
}
