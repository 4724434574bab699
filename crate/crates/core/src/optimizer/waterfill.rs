//! Capacity-optimal transmit covariance for a fixed channel.

use nalgebra::DVector;
use num_complex::Complex64;

use super::OptimizerError;
use crate::linalg::{self, CMatrix};

/// Singular values below this fraction of the largest are treated as zero
/// when counting usable streams.
pub const RANK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct WaterfillResult {
    /// All `min(N_r, N_t)` singular values of the channel, descending.
    pub singular_values: Vec<f64>,
    /// Power per stream in watts, aligned with `singular_values`; zero beyond `rank`.
    pub powers: Vec<f64>,
    /// Common level `1/p0` reached by `p_i + sigma^2 / s_i^2` on active streams.
    pub water_level: f64,
    /// bits/s/Hz
    pub capacity: f64,
    /// Optimal transmit covariance, `N_t x N_t`.
    pub covariance: CMatrix,
    /// Number of singular values above the rank cutoff.
    pub rank: usize,
    /// Streams with strictly positive power.
    pub dof: usize,
}

/// Allocates `power` over parallel channels with noise-to-gain ratios
/// `floors[i] = sigma^2 / s_i^2`, sorted ascending.
///
/// Returns the per-channel powers and the water level. The active set is
/// always a prefix; for each prefix length the level is available in closed
/// form, and the longest prefix whose level exceeds its own last floor is the
/// optimum.
pub fn allocate_power(floors: &[f64], power: f64) -> (Vec<f64>, f64) {
    debug_assert!(floors.windows(2).all(|w| w[0] <= w[1]));
    if floors.is_empty() {
        return (Vec::new(), 0.0);
    }
    if power <= 0.0 {
        return (vec![0.0; floors.len()], floors[0]);
    }
    let mut prefix_sum: f64 = floors.iter().sum();
    let mut active = floors.len();
    let mut level = (power + prefix_sum) / active as f64;
    while active > 1 && level <= floors[active - 1] {
        prefix_sum -= floors[active - 1];
        active -= 1;
        level = (power + prefix_sum) / active as f64;
    }
    let powers = floors
        .iter()
        .enumerate()
        .map(|(i, f)| if i < active { (level - f).max(0.0) } else { 0.0 })
        .collect();
    (powers, level)
}

pub fn waterfill(h: &CMatrix, power: f64, noise: f64) -> Result<WaterfillResult, OptimizerError> {
    if !(power.is_finite() && power >= 0.0) {
        return Err(OptimizerError::Argument(format!(
            "transmit power must be non-negative, got {power}"
        )));
    }
    if !(noise.is_finite() && noise > 0.0) {
        return Err(OptimizerError::Argument(format!(
            "noise power must be positive, got {noise}"
        )));
    }
    let nt = h.ncols();
    let (singular_values, right) = linalg::svd_descending(h);
    let largest = singular_values.first().copied().unwrap_or(0.0);
    let rank = if largest > 0.0 {
        singular_values
            .iter()
            .take_while(|&&s| s > RANK_TOLERANCE * largest)
            .count()
    } else {
        0
    };

    let floors: Vec<f64> = singular_values[..rank]
        .iter()
        .map(|s| noise / (s * s))
        .collect();
    let (active_powers, water_level) = allocate_power(&floors, power);

    let mut powers = vec![0.0; singular_values.len()];
    powers[..rank].copy_from_slice(&active_powers);

    let capacity = singular_values
        .iter()
        .zip(&powers)
        .map(|(s, p)| (s * s * p / noise).ln_1p())
        .sum::<f64>()
        / std::f64::consts::LN_2;

    let basis = right.columns(0, rank);
    let weights = DVector::from_iterator(rank, active_powers.iter().map(|&p| Complex64::new(p, 0.0)));
    let mut weighted = basis.clone_owned();
    for (mut col, w) in weighted.column_iter_mut().zip(weights.iter()) {
        col *= *w;
    }
    let covariance = if rank == 0 {
        CMatrix::zeros(nt, nt)
    } else {
        linalg::hermitian_part(&(weighted * basis.adjoint()))
    };

    let dof = powers.iter().filter(|&&p| p > 0.0).count();
    Ok(WaterfillResult {
        singular_values,
        powers,
        water_level,
        capacity,
        covariance,
        rank,
        dof,
    })
}

/// `log2 det(I + H R_s H^H / sigma^2)` for a Hermitian PSD covariance.
pub fn capacity_given_covariance(
    h: &CMatrix,
    covariance: &CMatrix,
    noise: f64,
) -> Result<f64, OptimizerError> {
    if !(noise.is_finite() && noise > 0.0) {
        return Err(OptimizerError::Argument(format!(
            "noise power must be positive, got {noise}"
        )));
    }
    let nt = h.ncols();
    if covariance.nrows() != nt || covariance.ncols() != nt {
        return Err(OptimizerError::Argument(format!(
            "covariance is {}x{}, channel has {} inputs",
            covariance.nrows(),
            covariance.ncols(),
            nt
        )));
    }
    let (eigenvalues, _) = linalg::hermitian_eigen(covariance);
    let trace = linalg::trace_re(covariance);
    let min_eig = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min_eig < -1e-9 * trace.abs() {
        return Err(OptimizerError::Argument(format!(
            "covariance is not positive semidefinite (eigenvalue {min_eig:e}, trace {trace:e})"
        )));
    }
    let nr = h.nrows();
    let gram = h * covariance * h.adjoint();
    let a = CMatrix::identity(nr, nr) + gram.unscale(noise);
    linalg::log2_det_hpd(&a).ok_or_else(|| {
        OptimizerError::Numerical("I + H R_s H^H / sigma^2 lost positive definiteness".into())
    })
}
