//! Random-walk orbit sampler and a boundedness estimate from its norms.
//!
//! Each step flows the current covector for time `eps` along a generator
//! drawn uniformly from the unit sphere of `g`. The estimate is deliberately
//! conservative: besides a stabilized running maximum, "bounded" needs the
//! norm sequence to look stationary (saturated mean squared displacement and
//! little variance between blocks), since a diffusive walk on an unbounded
//! orbit can look flat over a short window.

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{Covector, LieAlgebra};
use crate::coadjoint::{expm_action, DIVERGENCE_BOUND};
use crate::error::{Error, Result};

pub const DEFAULT_EPS: f64 = 0.1;
pub const DEFAULT_STEPS: usize = 50_000;
pub const DEFAULT_ESCAPE_THRESHOLD: f64 = 100.0;
/// Walks shorter than this are never called bounded.
pub const MIN_STEPS_FOR_BOUNDED: usize = 1024;
/// Allowed rise of the running maximum over the second half, as a fraction
/// of the norm range of the walk.
pub const STABILIZATION_FRACTION: f64 = 0.05;
/// Largest allowed `MSD(N/16) / MSD(N/256)` of the norms; diffusion gives 16.
pub const SATURATION_RATIO_LIMIT: f64 = 4.0;
/// Blocks used for the between-block variance fraction of the norms.
pub const BLOCK_COUNT: usize = 16;
/// Largest allowed between-block variance fraction; diffusion gives about 0.9.
pub const BLOCK_VARIANCE_LIMIT: f64 = 0.25;
/// Smallest allowed ratio of the slowest to the fastest block-mean step
/// length. A walk creeping towards the boundary of a non-closed orbit slows
/// down; on a compact orbit the speed is stationary.
pub const SPEED_RATIO_LIMIT: f64 = 0.5;

pub const GENERATOR_DISTRIBUTION: &str = "uniform unit sphere";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkConfig {
    pub seed: u64,
    pub eps: f64,
    pub steps: usize,
    pub escape_threshold: f64,
}

impl WalkConfig {
    pub fn new(seed: u64) -> Self {
        WalkConfig {
            seed,
            eps: DEFAULT_EPS,
            steps: DEFAULT_STEPS,
            escape_threshold: DEFAULT_ESCAPE_THRESHOLD,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitSample {
    pub config: WalkConfig,
    pub start: Covector,
    /// `start` followed by one point per completed step.
    pub points: Vec<Covector>,
    pub max_norm: f64,
    /// Step at which a flow diverged, if any.
    pub diverged_at: Option<usize>,
}

impl OrbitSample {
    pub fn norms(&self) -> Vec<f64> {
        self.points.iter().map(Covector::norm).collect()
    }

    /// Largest Euclidean distance of a point from `start`.
    pub fn radius(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (&p.0 - &self.start.0).norm())
            .fold(0.0, f64::max)
    }
}

fn unit_generator(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| {
            let x: f64 = StandardNormal.sample(rng);
            x
        });
        let norm = v.norm();
        if norm > 0.0 {
            return v / norm;
        }
    }
}

pub fn sample_orbit(g: &LieAlgebra, f: &Covector, config: &WalkConfig) -> Result<OrbitSample> {
    if g.dim() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: f.dim(),
        });
    }
    if !(config.eps.is_finite() && config.eps > 0.0) {
        return Err(Error::InvalidInput(format!("step size {} must be positive", config.eps)));
    }
    if !(config.escape_threshold.is_finite() && config.escape_threshold > 1.0) {
        return Err(Error::InvalidInput(format!(
            "escape threshold {} must exceed 1",
            config.escape_threshold
        )));
    }
    if f.0.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("covector has non-finite entries".into()));
    }
    let n = g.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut points = Vec::with_capacity(config.steps + 1);
    points.push(f.clone());
    let mut max_norm = f.norm();
    let mut diverged_at = None;
    let mut cur = f.0.clone();
    for step in 0..config.steps {
        let x = unit_generator(&mut rng, n);
        let next = expm_action(&g.coad_coords(&x), config.eps, &cur);
        if next.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_BOUND) {
            diverged_at = Some(step);
            break;
        }
        max_norm = max_norm.max(next.norm());
        points.push(Covector(next.clone()));
        cur = next;
    }
    Ok(OrbitSample {
        config: *config,
        start: f.clone(),
        points,
        max_norm,
        diverged_at,
    })
}

/// Independent walks for several seeds, returned in the order given.
pub fn sample_many(g: &LieAlgebra, f: &Covector, configs: &[WalkConfig]) -> Result<Vec<OrbitSample>> {
    configs.par_iter().map(|c| sample_orbit(g, f, c)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundednessStatus {
    Bounded,
    Unbounded,
    Inconclusive,
}

impl BoundednessStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundednessStatus::Bounded => "bounded",
            BoundednessStatus::Unbounded => "unbounded",
            BoundednessStatus::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundednessEstimate {
    pub status: BoundednessStatus,
    pub growth_ratio: f64,
    pub escape_threshold: f64,
    /// Rise of the running maximum over the second half of the walk.
    pub late_max_increase: f64,
    /// `MSD(N/16) / MSD(N/256)` of the norms, when the walk is long enough.
    pub msd_ratio: Option<f64>,
    /// Fraction of the norm variance explained by block means.
    pub block_variance: Option<f64>,
    /// Slowest over fastest block-mean step length.
    pub speed_ratio: Option<f64>,
    pub notes: Vec<String>,
}

fn mean_squared_displacement(xs: &[f64], lag: usize) -> f64 {
    let count = xs.len() - lag;
    let total: f64 = (0..count).map(|i| (xs[i + lag] - xs[i]).powi(2)).sum();
    total / count as f64
}

/// `1 - within / total` variance over `BLOCK_COUNT` equal blocks; zero for a
/// constant sequence.
fn between_block_fraction(xs: &[f64], scale: f64) -> f64 {
    let len = xs.len() / BLOCK_COUNT;
    let used = &xs[..len * BLOCK_COUNT];
    let mean = used.iter().sum::<f64>() / used.len() as f64;
    let total = used.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / used.len() as f64;
    if total <= 1e-24 * scale * scale {
        return 0.0;
    }
    let within = used
        .chunks(len)
        .map(|b| {
            let m = b.iter().sum::<f64>() / len as f64;
            b.iter().map(|x| (x - m).powi(2)).sum::<f64>()
        })
        .sum::<f64>()
        / used.len() as f64;
    1.0 - within / total
}

/// Slowest over fastest block-mean step length; one for a walk that never moves.
fn speed_ratio(points: &[Covector], scale: f64) -> f64 {
    let steps: Vec<f64> = points.windows(2).map(|w| (&w[1].0 - &w[0].0).norm()).collect();
    let len = steps.len() / BLOCK_COUNT;
    let means: Vec<f64> = steps[..len * BLOCK_COUNT]
        .chunks(len)
        .map(|b| b.iter().sum::<f64>() / len as f64)
        .collect();
    let fastest = means.iter().cloned().fold(0.0, f64::max);
    if fastest <= 1e-15 * scale {
        return 1.0;
    }
    means.iter().cloned().fold(f64::INFINITY, f64::min) / fastest
}

pub fn estimate_bounded(sample: &OrbitSample) -> BoundednessEstimate {
    let threshold = sample.config.escape_threshold;
    let start = sample.start.norm();
    let growth_ratio = if start > 0.0 {
        sample.max_norm / start
    } else if sample.max_norm == 0.0 {
        1.0
    } else {
        f64::INFINITY
    };
    let mut out = BoundednessEstimate {
        status: BoundednessStatus::Inconclusive,
        growth_ratio,
        escape_threshold: threshold,
        late_max_increase: 0.0,
        msd_ratio: None,
        block_variance: None,
        speed_ratio: None,
        notes: Vec::new(),
    };
    if let Some(step) = sample.diverged_at {
        out.status = BoundednessStatus::Unbounded;
        out.growth_ratio = f64::INFINITY;
        out.notes.push(format!("flow diverged at step {step}"));
        return out;
    }
    if growth_ratio > threshold {
        out.status = BoundednessStatus::Unbounded;
        out.notes.push(format!("growth ratio exceeds {threshold}"));
        return out;
    }
    let norms = sample.norms();
    let steps = norms.len() - 1;
    let half = steps / 2;
    let max_all = norms.iter().cloned().fold(0.0, f64::max);
    let min_all = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_first = norms[..=half].iter().cloned().fold(0.0, f64::max);
    out.late_max_increase = max_all - max_first;
    if steps < MIN_STEPS_FOR_BOUNDED {
        out.notes.push(format!("walk of {steps} steps is shorter than {MIN_STEPS_FOR_BOUNDED}"));
        return out;
    }
    let stabilized =
        out.late_max_increase <= STABILIZATION_FRACTION * (max_all - min_all) + 1e-9 * start.max(max_all);
    if !stabilized {
        out.notes.push("running maximum still rising in the second half".into());
    }
    let short = mean_squared_displacement(&norms, (steps / 256).max(1));
    let long = mean_squared_displacement(&norms, (steps / 16).max(1));
    let ratio = if short <= 1e-24 * max_all.max(1e-300).powi(2) {
        1.0
    } else {
        long / short
    };
    out.msd_ratio = Some(ratio);
    let saturated = ratio <= SATURATION_RATIO_LIMIT;
    if !saturated {
        out.notes.push(format!("displacement not saturated (ratio {ratio:.3})"));
    }
    let block = between_block_fraction(&norms[1..], max_all);
    out.block_variance = Some(block);
    let stationary = block <= BLOCK_VARIANCE_LIMIT;
    if !stationary {
        out.notes.push(format!("block means drift (between-block fraction {block:.3})"));
    }
    let speed = speed_ratio(&sample.points, max_all);
    out.speed_ratio = Some(speed);
    let steady = speed >= SPEED_RATIO_LIMIT;
    if !steady {
        out.notes.push(format!("walk slows down (speed ratio {speed:.3})"));
    }
    if stabilized && saturated && stationary && steady {
        out.status = BoundednessStatus::Bounded;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    fn alg(name: &str) -> LieAlgebra {
        catalog::algebra(name).unwrap()
    }

    #[test]
    fn fixed_point_walk_stays_put() {
        let g = alg("heisenberg3");
        let f = Covector::dual_basis(3, 0);
        let s = sample_orbit(&g, &f, &WalkConfig::new(3).with_steps(500)).unwrap();
        assert!(s.points.iter().all(|p| p == &f));
        assert_eq!(s.points.len(), 501);
    }

    #[test]
    fn su2_walk_keeps_norm() {
        let g = alg("su2");
        let f = Covector::dual_basis(3, 2);
        let s = sample_orbit(&g, &f, &WalkConfig::new(5).with_steps(10_000)).unwrap();
        assert!((s.max_norm - 1.0).abs() < 1e-8);
        assert!(s.norms().iter().all(|n| (n - 1.0).abs() < 1e-8));
        let e = estimate_bounded(&s);
        assert_eq!(e.status, BoundednessStatus::Bounded);
        assert!((e.growth_ratio - 1.0).abs() < 1e-8);
    }

    #[test]
    fn short_walk_is_inconclusive() {
        let g = alg("sl2R");
        let f = Covector::new(vec![0.2, 0.3, 0.1]);
        let s = sample_orbit(&g, &f, &WalkConfig::new(1).with_steps(10)).unwrap();
        assert_eq!(estimate_bounded(&s).status, BoundednessStatus::Inconclusive);
    }

    #[test]
    fn seeds_reproduce_bitwise() {
        let g = alg("se3");
        let f = Covector::new(vec![0.1, 0.2, 0.3, 1.0, -1.0, 0.5]);
        let c = WalkConfig::new(42).with_steps(300);
        assert_eq!(sample_orbit(&g, &f, &c).unwrap(), sample_orbit(&g, &f, &c).unwrap());
        let many = sample_many(&g, &f, &[c, WalkConfig::new(43).with_steps(300)]).unwrap();
        assert_eq!(many[0], sample_orbit(&g, &f, &c).unwrap());
    }

    #[test]
    fn divergence_is_unbounded() {
        let g = alg("sl2R");
        let f = Covector::dual_basis(3, 1);
        let mut c = WalkConfig::new(1).with_steps(50);
        c.eps = 200.0;
        let s = sample_orbit(&g, &f, &c).unwrap();
        let e = estimate_bounded(&s);
        assert_eq!(e.status, BoundednessStatus::Unbounded);
    }
}
