//! Synthetic vacuum fields: superpositions of transverse plane waves in
//! natural units (`c = 1`), plus the operator-term evaluators.

use std::f64::consts::TAU;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::terms::{Field, Operator, OperatorTerm};

pub type Vec3 = Vector3<f64>;

pub const MIN_WAVES: usize = 3;

/// Minimum relative separation between any two wave numbers `|k|`.
pub const MIN_FREQUENCY_SEPARATION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SceneError {
    #[error("need at least {MIN_WAVES} waves, got {0}")]
    TooFewWaves(usize),
    #[error("need at least one wave")]
    NoWaves,
    #[error("need at least one sample point")]
    NoSamples,
}

/// `amplitude · e · cos(k·x − ωt + phase)` with `ω = |k|` and `e·k = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWave {
    pub k: Vec3,
    pub polarization: Vec3,
    pub amplitude: f64,
    pub phase: f64,
}

impl PlaneWave {
    pub fn omega(&self) -> f64 {
        self.k.norm()
    }

    /// Unit direction of the magnetic field, `k̂ × e`.
    pub fn b_polarization(&self) -> Vec3 {
        (self.k / self.k.norm()).cross(&self.polarization)
    }

    fn direction(&self, field: Field) -> Vec3 {
        match field {
            Field::E => self.polarization,
            Field::B => self.b_polarization(),
        }
    }

    fn phase_at(&self, x: &Vec3, t: f64) -> f64 {
        self.k.dot(x) - self.omega() * t + self.phase
    }
}

/// A term evaluated at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TermValue {
    Scalar(f64),
    Vector(Vec3),
}

impl TermValue {
    pub fn components(&self) -> impl Iterator<Item = f64> + '_ {
        let (s, v) = match self {
            TermValue::Scalar(s) => (std::slice::from_ref(s), &[][..]),
            TermValue::Vector(v) => (&[][..], v.as_slice()),
        };
        s.iter().chain(v).copied()
    }

    pub fn max_abs_diff(&self, other: &TermValue) -> f64 {
        self.components()
            .zip(other.components())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// How term values are computed from the scene.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EvalMode {
    /// Closed-form derivatives of the plane-wave sum.
    Analytic,
    /// Second-order central differences with step `h`.
    FiniteDifference { h: f64 },
}

impl EvalMode {
    pub const DEFAULT_STEP: f64 = 1e-3;

    pub fn finite_difference() -> Self {
        EvalMode::FiniteDifference {
            h: Self::DEFAULT_STEP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldScene {
    pub waves: Vec<PlaneWave>,
}

fn unit_vector(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..TAU);
    let r = (1.0 - z * z).sqrt();
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

fn transverse_unit(rng: &mut ChaCha8Rng, k: &Vec3) -> Vec3 {
    let khat = k.normalize();
    loop {
        let v = unit_vector(rng);
        let e = v - khat * khat.dot(&v);
        if e.norm() > 0.1 {
            let e = e.normalize();
            // one more projection pass leaves e·k at rounding level
            return (e - khat * khat.dot(&e)).normalize();
        }
    }
}

fn random_wave(rng: &mut ChaCha8Rng, wavenumber: f64) -> PlaneWave {
    let k = unit_vector(rng) * wavenumber;
    let polarization = transverse_unit(rng, &k);
    PlaneWave {
        k,
        polarization,
        amplitude: rng.gen_range(0.5..1.5),
        phase: rng.gen_range(0.0..TAU),
    }
}

/// Random scene of `wave_count >= 3` waves with pairwise distinct wave
/// numbers. Successive `|k|` grow by a factor in `[1.2, 1.3)` from a base in
/// `[0.6, 0.7)`, so every pair is separated by at least 20%.
pub fn gen_scene(wave_count: usize, seed: u64) -> Result<FieldScene, SceneError> {
    if wave_count < MIN_WAVES {
        return Err(SceneError::TooFewWaves(wave_count));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wavenumber = rng.gen_range(0.6..0.7);
    let mut waves = Vec::with_capacity(wave_count);
    for _ in 0..wave_count {
        waves.push(random_wave(&mut rng, wavenumber));
        wavenumber *= rng.gen_range(1.2..1.3);
    }
    Ok(FieldScene { waves })
}

/// Random directions and polarizations, all with `|k| = 1`. Such data
/// satisfies the Helmholtz relation `∇²F + F = 0` in addition to the
/// Maxwell equations.
pub fn gen_monochromatic_scene(wave_count: usize, seed: u64) -> Result<FieldScene, SceneError> {
    if wave_count == 0 {
        return Err(SceneError::NoWaves);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves = (0..wave_count).map(|_| random_wave(&mut rng, 1.0)).collect();
    Ok(FieldScene { waves })
}

impl FieldScene {
    /// Copy with every amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> FieldScene {
        FieldScene {
            waves: self
                .waves
                .iter()
                .map(|w| PlaneWave {
                    amplitude: w.amplitude * factor,
                    ..w.clone()
                })
                .collect(),
        }
    }

    /// Smallest `|Δ|k|| / max(|k|)` over all wave pairs.
    pub fn min_frequency_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (i, a) in self.waves.iter().enumerate() {
            for b in &self.waves[i + 1..] {
                let (x, y) = (a.omega(), b.omega());
                best = best.min((x - y).abs() / x.max(y));
            }
        }
        best
    }

    pub fn field(&self, field: Field, x: &Vec3, t: f64) -> Vec3 {
        self.waves
            .iter()
            .map(|w| w.direction(field) * (w.amplitude * w.phase_at(x, t).cos()))
            .sum()
    }

    pub fn eval(&self, term: OperatorTerm, x: &Vec3, t: f64, mode: EvalMode) -> TermValue {
        match mode {
            EvalMode::Analytic => self.eval_analytic(term, x, t),
            EvalMode::FiniteDifference { h } => self.eval_fd(term, x, t, h),
        }
    }

    fn eval_analytic(&self, term: OperatorTerm, x: &Vec3, t: f64) -> TermValue {
        if term.operator == Operator::Divergence {
            let div = self
                .waves
                .iter()
                .map(|w| -w.amplitude * w.phase_at(x, t).sin() * w.k.dot(&w.direction(term.field)))
                .sum();
            return TermValue::Scalar(div);
        }
        let v = self
            .waves
            .iter()
            .map(|w| {
                let d = w.direction(term.field);
                let phi = w.phase_at(x, t);
                let (s, c) = phi.sin_cos();
                let a = w.amplitude;
                let omega = w.omega();
                match term.operator {
                    Operator::Identity => d * (a * c),
                    Operator::Curl => w.k.cross(&d) * (-a * s),
                    Operator::Laplacian => d * (-a * w.k.norm_squared() * c),
                    Operator::Dt => d * (a * omega * s),
                    Operator::Dtt => d * (-a * omega * omega * c),
                    Operator::Divergence => unreachable!(),
                }
            })
            .sum();
        TermValue::Vector(v)
    }

    fn eval_fd(&self, term: OperatorTerm, x: &Vec3, t: f64, h: f64) -> TermValue {
        let f = |p: &Vec3, tt: f64| self.field(term.field, p, tt);
        let shifted = |axis: usize, sign: f64| {
            let mut p = *x;
            p[axis] += sign * h;
            f(&p, t)
        };
        match term.operator {
            Operator::Identity => TermValue::Vector(f(x, t)),
            Operator::Dt => TermValue::Vector((f(x, t + h) - f(x, t - h)) / (2.0 * h)),
            Operator::Dtt => {
                TermValue::Vector((f(x, t + h) - f(x, t) * 2.0 + f(x, t - h)) / (h * h))
            }
            Operator::Laplacian => {
                let centre = f(x, t);
                let lap = (0..3)
                    .map(|axis| (shifted(axis, 1.0) - centre * 2.0 + shifted(axis, -1.0)) / (h * h))
                    .sum();
                TermValue::Vector(lap)
            }
            Operator::Divergence | Operator::Curl => {
                // jac[i][j] = ∂_i F_j
                let jac: [Vec3; 3] =
                    std::array::from_fn(|axis| (shifted(axis, 1.0) - shifted(axis, -1.0)) / (2.0 * h));
                if term.operator == Operator::Divergence {
                    TermValue::Scalar(jac[0][0] + jac[1][1] + jac[2][2])
                } else {
                    TermValue::Vector(Vec3::new(
                        jac[1][2] - jac[2][1],
                        jac[2][0] - jac[0][2],
                        jac[0][1] - jac[1][0],
                    ))
                }
            }
        }
    }
}

/// Space-time sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub points: Vec<(Vec3, f64)>,
}

impl SampleSet {
    pub const DEFAULT_COUNT: usize = 64;

    /// `count` points drawn uniformly from `[0, 2π)³ × [0, 2π)`.
    pub fn uniform(count: usize, seed: u64) -> Result<SampleSet, SceneError> {
        if count == 0 {
            return Err(SceneError::NoSamples);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coord = || rng.gen_range(0.0..TAU);
        let points = (0..count)
            .map(|_| (Vec3::new(coord(), coord(), coord()), coord()))
            .collect();
        Ok(SampleSet { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}
