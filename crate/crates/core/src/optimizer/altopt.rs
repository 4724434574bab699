//! Multi-start alternating optimization of RIS phases and transmit covariance.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::phase::sweep_all_phases;
use super::waterfill::{capacity_given_covariance, waterfill, WaterfillResult};
use super::OptimizerError;
use crate::channel::effective_channel;
use crate::linalg::CMatrix;

pub const DEFAULT_MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct AltOptConfig {
    /// Number of random initial phase profiles.
    pub starts: usize,
    /// Stop once an outer iteration raises capacity by less than this
    /// fraction.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// ChaCha stream used for the initial profiles; lets independent runs
    /// share a seed without sharing draws.
    pub stream: u64,
}

impl Default for AltOptConfig {
    fn default() -> Self {
        Self {
            starts: 100,
            tolerance: 1e-5,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            seed: 0,
            stream: 0,
        }
    }
}

impl AltOptConfig {
    pub fn validate(&self) -> Result<(), OptimizerError> {
        if self.starts == 0 {
            return Err(OptimizerError::Argument("need at least one start".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(OptimizerError::Argument(format!(
                "convergence threshold must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_iterations == 0 {
            return Err(OptimizerError::Argument(
                "iteration cap must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Converged,
    /// Stopped at `max_iterations` before the threshold was met.
    IterationCap,
}

#[derive(Debug, Clone)]
pub struct AltOptResult {
    pub phases: Vec<Complex64>,
    pub waterfill: WaterfillResult,
    /// Objective after the initial covariance, then after every phase pass
    /// and every covariance update.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub convergence: Convergence,
    /// Index of the initial profile that won the multi-start selection.
    pub best_start: usize,
    /// Capacity of that profile before any alternation.
    pub initial_capacity: f64,
}

impl AltOptResult {
    pub fn capacity(&self) -> f64 {
        self.waterfill.capacity
    }
}

/// `count` profiles of `len` unit-magnitude coefficients with phases uniform
/// on `[0, 2 pi)`, drawn from ChaCha8 `(seed, stream)`.
pub fn random_phase_profiles(seed: u64, stream: u64, count: usize, len: usize) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..count)
        .map(|_| {
            (0..len)
                .map(|_| Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>()))
                .collect()
        })
        .collect()
}

pub fn alternating_optimize(
    tx_ris: &CMatrix,
    ris_rx: &CMatrix,
    power: f64,
    noise: f64,
    cfg: &AltOptConfig,
) -> Result<AltOptResult, OptimizerError> {
    cfg.validate()?;
    let w = tx_ris.nrows();
    if ris_rx.ncols() != w {
        return Err(OptimizerError::Argument(format!(
            "T has {} rows but R has {} columns",
            w,
            ris_rx.ncols()
        )));
    }

    let profiles = random_phase_profiles(cfg.seed, cfg.stream, cfg.starts, w);
    let evaluated = profiles
        .into_par_iter()
        .map(|phases| {
            let h = effective_channel(tx_ris, ris_rx, &phases)?;
            let wf = waterfill(&h, power, noise)?;
            Ok((phases, wf))
        })
        .collect::<Result<Vec<_>, OptimizerError>>()?;

    // lowest index wins ties
    let mut best_start = 0;
    for (i, (_, wf)) in evaluated.iter().enumerate() {
        if wf.capacity > evaluated[best_start].1.capacity {
            best_start = i;
        }
    }
    let (mut phases, mut wf) = evaluated.into_iter().nth(best_start).expect("starts >= 1");
    let initial_capacity = wf.capacity;

    let mut h = effective_channel(tx_ris, ris_rx, &phases)?;
    let mut current = capacity_given_covariance(&h, &wf.covariance, noise)?;
    let mut trace = vec![current];
    let mut convergence = Convergence::IterationCap;
    let mut iterations = 0;

    while iterations < cfg.max_iterations {
        iterations += 1;
        let previous = current;

        phases = sweep_all_phases(ris_rx, tx_ris, &wf.covariance, &phases, noise);
        h = effective_channel(tx_ris, ris_rx, &phases)?;
        trace.push(capacity_given_covariance(&h, &wf.covariance, noise)?);

        wf = waterfill(&h, power, noise)?;
        current = capacity_given_covariance(&h, &wf.covariance, noise)?;
        trace.push(current);

        let gain = current - previous;
        if previous <= 0.0 || gain < cfg.tolerance * previous {
            convergence = Convergence::Converged;
            break;
        }
    }

    Ok(AltOptResult {
        phases,
        waterfill: wf,
        trace,
        iterations,
        convergence,
        best_start,
        initial_capacity,
    })
}
