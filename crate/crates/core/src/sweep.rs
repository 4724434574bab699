//! RIS placement sweeps between a fixed Tx and Rx, and the LoS MIMO baseline.
//!
//! The Tx array, the Rx array and the RIS share one in-plane center; only the
//! RIS z-coordinate moves. The direct Tx -> Rx path is assumed blocked by the
//! panel, so RIS-aided capacity uses the cascade alone and the LoS baseline is
//! computed separately with no RIS present.
//!
//! Positions are independent and are evaluated on a worker pool. Each one draws
//! its multi-start profiles from the configured seed on a stream equal to its
//! index, so results do not depend on evaluation order or thread count.

use std::time::{Duration, Instant};

use log::warn;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{build_direct_los, build_ris_rx, build_tx_ris, ChannelError, PhysicalParams};
use crate::geometry::{
    array_element_positions, fresnel_bounds, ris_element_positions, CartesianPoint,
    FresnelBounds, GeometryError, PlanarArray, RisLayout, RisPanel,
};
use crate::linalg::CMatrix;
use crate::optimizer::{
    alternating_optimize, waterfill, AltOptConfig, Convergence, OptimizerError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrayShape {
    pub rows: usize,
    pub cols: usize,
}

impl ArrayShape {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Inter-antenna spacing of the Tx and Rx arrays in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spacing {
    pub tx: f64,
    pub rx: f64,
}

impl Spacing {
    pub fn uniform(wavelengths: f64) -> Self {
        Self {
            tx: wavelengths,
            rx: wavelengths,
        }
    }

    /// `"2"` for equal spacings, `"2_3"` otherwise.
    pub fn label(&self) -> String {
        if self.tx == self.rx {
            format!("{}", self.tx)
        } else {
            format!("{}_{}", self.tx, self.rx)
        }
    }
}

/// How `count` positions are laid out over `(min, max)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Cell midpoints `min + (i + 1/2) (max - min) / count`; never touches
    /// the endpoints.
    Midpoints,
    /// `min + i (max - min) / (count - 1)`, both endpoints included.
    Endpoints,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub placement: Placement,
}

impl SweepRange {
    /// Swept z-coordinates in ascending order.
    pub fn positions(&self) -> Vec<f64> {
        let span = self.max - self.min;
        match self.placement {
            Placement::Midpoints => (0..self.count)
                .map(|i| self.min + (i as f64 + 0.5) * span / self.count as f64)
                .collect(),
            Placement::Endpoints if self.count == 1 => vec![self.min + span / 2.0],
            Placement::Endpoints => (0..self.count)
                .map(|i| self.min + i as f64 * span / (self.count - 1) as f64)
                .collect(),
        }
    }

    pub fn midpoint(&self) -> f64 {
        (self.min + self.max) / 2.0
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub physical: PhysicalParams,
    pub tx_shape: ArrayShape,
    pub rx_shape: ArrayShape,
    /// Shared in-plane center of the Tx array, Rx array and RIS (meters).
    pub center_x: f64,
    pub center_y: f64,
    pub tx_z: f64,
    pub rx_z: f64,
    pub ris: RisLayout,
    pub range: SweepRange,
    pub spacings: Vec<Spacing>,
    pub optimizer: AltOptConfig,
    /// Total transmit power in watts.
    pub power: f64,
    /// Noise power in watts.
    pub noise: f64,
    pub include_baseline: bool,
    /// Worker threads for position sweeps; 0 uses all available cores.
    pub jobs: usize,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let invalid = |msg: String| Err(ScenarioError::Invalid(msg));
        if self.range.count == 0 {
            return invalid("sweep needs at least one position".into());
        }
        if !(self.range.min < self.range.max) {
            return invalid(format!(
                "sweep range min ({}) must be below max ({})",
                self.range.min, self.range.max
            ));
        }
        if self.tx_z == self.rx_z {
            return invalid("Tx and Rx must sit at different z".into());
        }
        if self.tx_shape.is_empty() || self.rx_shape.is_empty() {
            return invalid("Tx and Rx arrays need at least one element".into());
        }
        if let Some(s) = self
            .spacings
            .iter()
            .find(|s| !(s.tx.is_finite() && s.tx > 0.0 && s.rx.is_finite() && s.rx > 0.0))
        {
            return invalid(format!("spacings must be positive, got {s:?}"));
        }
        if !(self.power.is_finite() && self.power >= 0.0) {
            return invalid(format!("transmit power must be non-negative, got {}", self.power));
        }
        if !(self.noise.is_finite() && self.noise > 0.0) {
            return invalid(format!("noise power must be positive, got {}", self.noise));
        }
        self.optimizer.validate()?;
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        self.physical.wavelength()
    }

    pub fn tx_array(&self, spacing: Spacing) -> Result<PlanarArray, GeometryError> {
        PlanarArray::new(
            self.tx_shape.rows,
            self.tx_shape.cols,
            spacing.tx * self.wavelength(),
            CartesianPoint::new(self.center_x, self.center_y, self.tx_z)?,
        )
    }

    pub fn rx_array(&self, spacing: Spacing) -> Result<PlanarArray, GeometryError> {
        PlanarArray::new(
            self.rx_shape.rows,
            self.rx_shape.cols,
            spacing.rx * self.wavelength(),
            CartesianPoint::new(self.center_x, self.center_y, self.rx_z)?,
        )
    }

    pub fn panel_at(&self, z: f64) -> RisPanel {
        RisPanel::centered_at(self.ris.clone(), self.center_x, self.center_y, z)
    }

    pub fn fresnel_bounds(&self) -> FresnelBounds {
        fresnel_bounds(&self.ris, self.wavelength())
    }

    /// Optimizer settings for the position with the given sweep index.
    pub fn optimizer_for_position(&self, index: usize) -> AltOptConfig {
        AltOptConfig {
            stream: index as u64,
            ..self.optimizer.clone()
        }
    }
}

/// Whether every antenna of each terminal lies in the RIS Fresnel zone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelStatus {
    pub tx_inside: bool,
    pub rx_inside: bool,
    /// Centroid-to-centroid distances.
    pub tx_distance: f64,
    pub rx_distance: f64,
    pub bounds: FresnelBounds,
}

impl FresnelStatus {
    pub fn evaluate(
        panel: &RisPanel,
        tx: &[CartesianPoint],
        rx: &[CartesianPoint],
        wavelength: f64,
    ) -> Self {
        let bounds = fresnel_bounds(panel.layout(), wavelength);
        let centroid = panel.centroid();
        let all_inside = |points: &[CartesianPoint]| {
            points
                .iter()
                .all(|p| bounds.contains(centroid.distance_to(p)))
        };
        let center = |points: &[CartesianPoint]| {
            CartesianPoint::centroid(points).unwrap_or(CartesianPoint::ORIGIN)
        };
        Self {
            tx_inside: all_inside(tx),
            rx_inside: all_inside(rx),
            tx_distance: centroid.distance_to(&center(tx)),
            rx_distance: centroid.distance_to(&center(rx)),
            bounds,
        }
    }

    pub fn both_inside(&self) -> bool {
        self.tx_inside && self.rx_inside
    }
}

#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub index: usize,
    pub z: f64,
    pub capacity: f64,
    /// Singular values of the optimized effective channel, descending.
    pub singular_values: Vec<f64>,
    pub variance: f64,
    pub powers: Vec<f64>,
    pub dof: usize,
    pub convergence: Convergence,
    pub iterations: usize,
    pub wall_time: Duration,
    pub phases: Vec<Complex64>,
    pub covariance: CMatrix,
    pub fresnel: FresnelStatus,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("position {index} (z = {z}): {reason}")]
pub struct PositionFailure {
    pub index: usize,
    pub z: f64,
    pub reason: String,
}

pub type PositionOutcome = Result<SweepRecord, PositionFailure>;

#[derive(Debug, Clone)]
pub struct BaselineRecord {
    pub spacing: Spacing,
    pub capacity: f64,
    pub singular_values: Vec<f64>,
    pub powers: Vec<f64>,
    pub dof: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumStats {
    /// Population variance of the singular values.
    pub variance: f64,
    /// Streams with strictly positive power.
    pub dof: usize,
}

pub fn singular_value_stats(values: &[f64], powers: &[f64]) -> Result<SpectrumStats, ScenarioError> {
    if values.is_empty() {
        return Err(ScenarioError::Invalid(
            "singular value statistics need at least one value".into(),
        ));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok(SpectrumStats {
        variance,
        dof: powers.iter().filter(|&&p| p > 0.0).count(),
    })
}

/// Fixed-size worker pool with results returned in index order.
#[derive(Debug, Clone, Copy)]
pub struct WorkerPool {
    jobs: usize,
}

impl WorkerPool {
    /// `jobs == 0` uses every available core.
    pub fn new(jobs: usize) -> Self {
        Self { jobs }
    }

    pub fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Send + Sync,
    {
        let run = || (0..count).into_par_iter().map(&f).collect::<Vec<T>>();
        if self.jobs == 0 {
            return run();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(self.jobs).build() {
            Ok(pool) => pool.install(run),
            Err(e) => {
                warn!("could not start {} worker threads ({e}); running sequentially", self.jobs);
                (0..count).map(f).collect()
            }
        }
    }
}

/// Optimizes one RIS placement.
pub fn evaluate_position(
    cfg: &ScenarioConfig,
    spacing: Spacing,
    index: usize,
    z: f64,
) -> PositionOutcome {
    let started = Instant::now();
    let fail = |reason: String| PositionFailure { index, z, reason };

    let tx = array_element_positions(&cfg.tx_array(spacing).map_err(|e| fail(e.to_string()))?);
    let rx = array_element_positions(&cfg.rx_array(spacing).map_err(|e| fail(e.to_string()))?);
    let panel = cfg.panel_at(z);
    let fresnel = FresnelStatus::evaluate(&panel, &tx, &rx, cfg.wavelength());
    if !fresnel.both_inside() {
        warn!(
            "RIS at z = {z}: Tx in Fresnel zone {}, Rx in Fresnel zone {} (bounds {:.4}..{:.4} m)",
            fresnel.tx_inside, fresnel.rx_inside, fresnel.bounds.lower, fresnel.bounds.upper
        );
    }

    let ris = ris_element_positions(&panel);
    let tx_ris = build_tx_ris(&cfg.physical, &tx, &ris, &cfg.ris).map_err(|e| fail(e.to_string()))?;
    let ris_rx = build_ris_rx(&cfg.physical, &ris, &rx, &cfg.ris).map_err(|e| fail(e.to_string()))?;
    let result = alternating_optimize(
        &tx_ris,
        &ris_rx,
        cfg.power,
        cfg.noise,
        &cfg.optimizer_for_position(index),
    )
    .map_err(|e| fail(e.to_string()))?;

    let wf = &result.waterfill;
    let stats =
        singular_value_stats(&wf.singular_values, &wf.powers).map_err(|e| fail(e.to_string()))?;
    Ok(SweepRecord {
        index,
        z,
        capacity: wf.capacity,
        singular_values: wf.singular_values.clone(),
        variance: stats.variance,
        powers: wf.powers.clone(),
        dof: stats.dof,
        convergence: result.convergence,
        iterations: result.iterations,
        wall_time: started.elapsed(),
        covariance: wf.covariance.clone(),
        phases: result.phases,
        fresnel,
    })
}

/// Optimizes every swept position for one spacing. Results are in ascending z.
pub fn run_position_sweep(cfg: &ScenarioConfig, spacing: Spacing) -> Vec<PositionOutcome> {
    let zs = cfg.range.positions();
    WorkerPool::new(cfg.jobs).map(zs.len(), |i| evaluate_position(cfg, spacing, i, zs[i]))
}

pub fn run_los_baseline(cfg: &ScenarioConfig, spacing: Spacing) -> Result<BaselineRecord, ScenarioError> {
    let tx = array_element_positions(&cfg.tx_array(spacing)?);
    let rx = array_element_positions(&cfg.rx_array(spacing)?);
    let h = build_direct_los(&cfg.physical, &tx, &rx)?;
    let wf = waterfill(&h, cfg.power, cfg.noise)?;
    Ok(BaselineRecord {
        spacing,
        capacity: wf.capacity,
        dof: wf.dof,
        singular_values: wf.singular_values,
        powers: wf.powers,
    })
}

#[derive(Debug, Clone)]
pub struct SpacingResult {
    pub spacing: Spacing,
    pub baseline: Option<Result<BaselineRecord, ScenarioError>>,
    pub positions: Vec<PositionOutcome>,
}

impl SpacingResult {
    /// Best successful position; the lowest z wins ties.
    pub fn argmax(&self) -> Option<&SweepRecord> {
        self.positions
            .iter()
            .filter_map(|p| p.as_ref().ok())
            .fold(None, |best: Option<&SweepRecord>, r| match best {
                Some(b) if b.capacity >= r.capacity => Some(b),
                _ => Some(r),
            })
    }

    /// `(z, capacity)` per position; `None` marks a failed position.
    pub fn curve(&self) -> Vec<(f64, Option<f64>)> {
        self.positions
            .iter()
            .map(|p| match p {
                Ok(r) => (r.z, Some(r.capacity)),
                Err(f) => (f.z, None),
            })
            .collect()
    }

    pub fn failures(&self) -> usize {
        self.positions.iter().filter(|p| p.is_err()).count()
    }
}

#[derive(Debug, Clone)]
pub struct CampaignResult {
    pub spacings: Vec<SpacingResult>,
}

/// Baseline and position sweep for every configured spacing.
pub fn run_campaign(cfg: &ScenarioConfig) -> Result<CampaignResult, ScenarioError> {
    cfg.validate()?;
    let spacings = cfg
        .spacings
        .iter()
        .map(|&spacing| SpacingResult {
            spacing,
            baseline: cfg
                .include_baseline
                .then(|| run_los_baseline(cfg, spacing)),
            positions: run_position_sweep(cfg, spacing),
        })
        .collect();
    Ok(CampaignResult { spacings })
}
