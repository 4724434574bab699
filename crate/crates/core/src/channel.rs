//! Spherical-wavefront channel matrices for the Tx -> RIS -> Rx cascade and
//! for the direct line-of-sight link.
//!
//! The two RIS hops use different models on purpose. The Tx -> RIS hop is an
//! aperture path loss with no obliquity term and phase `exp(-jkD)`. The
//! RIS -> Rx hop is a Fresnel-Kirchhoff element radiator with the
//! `(1 + cos(theta)) / 2` leaning factor, a `1 / (j lambda D)` amplitude and
//! phase `exp(+jkD)`. Their product yields the cascade phase
//! `exp(-jk(D_m - D_n))`. Capacity depends only on singular values, so the
//! sign asymmetry does not change any reported result.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{CartesianPoint, RisLayout, RisPanel};
use crate::linalg::CMatrix;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("{link}: {from} #{from_index} and {to} #{to_index} coincide")]
    Coincident {
        link: &'static str,
        from: &'static str,
        from_index: usize,
        to: &'static str,
        to_index: usize,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid physical parameter {what}: {value}")]
    Parameter { what: &'static str, value: f64 },
}

/// Carrier and antenna parameters. Gains are linear; absorption in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    frequency: f64,
    wavelength: f64,
    wavenumber: f64,
    absorption: f64,
    tx_gain: f64,
    rx_gain: f64,
}

impl PhysicalParams {
    pub fn new(
        frequency_hz: f64,
        absorption_per_m: f64,
        tx_gain: f64,
        rx_gain: f64,
    ) -> Result<Self, ChannelError> {
        let positive = |what, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ChannelError::Parameter { what, value })
            }
        };
        positive("frequency", frequency_hz)?;
        positive("tx gain", tx_gain)?;
        positive("rx gain", rx_gain)?;
        if !(absorption_per_m.is_finite() && absorption_per_m >= 0.0) {
            return Err(ChannelError::Parameter {
                what: "absorption coefficient",
                value: absorption_per_m,
            });
        }
        let wavelength = SPEED_OF_LIGHT / frequency_hz;
        Ok(Self {
            frequency: frequency_hz,
            wavelength,
            wavenumber: 2.0 * PI / wavelength,
            absorption: absorption_per_m,
            tx_gain,
            rx_gain,
        })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn absorption(&self) -> f64 {
        self.absorption
    }

    pub fn tx_gain(&self) -> f64 {
        self.tx_gain
    }

    pub fn rx_gain(&self) -> f64 {
        self.rx_gain
    }

    pub fn with_absorption(mut self, absorption_per_m: f64) -> Self {
        self.absorption = absorption_per_m;
        self
    }
}

/// `D[i, j] = |rows[i] - cols[j]|`.
pub fn distance_matrix(rows: &[CartesianPoint], cols: &[CartesianPoint]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| rows[i].distance_to(&cols[j]))
}

fn checked_distances(
    rows: &[CartesianPoint],
    cols: &[CartesianPoint],
    link: &'static str,
    row_kind: &'static str,
    col_kind: &'static str,
) -> Result<DMatrix<f64>, ChannelError> {
    let d = distance_matrix(rows, cols);
    for i in 0..d.nrows() {
        for j in 0..d.ncols() {
            if !(d[(i, j)] > 0.0) {
                return Err(ChannelError::Coincident {
                    link,
                    from: row_kind,
                    from_index: i,
                    to: col_kind,
                    to_index: j,
                });
            }
        }
    }
    Ok(d)
}

/// Obliquity factor `(1 + cos(theta)) / 2`.
pub fn leaning_factor(cos_theta: f64) -> f64 {
    (1.0 + cos_theta) / 2.0
}

/// Tx -> RIS channel, `W x N_t`.
///
/// Entry `(w, m)` is `sqrt(PL) exp(-j k D)` with
/// `PL = G_m L_x L_y exp(-kappa D) / (4 pi D^2)`.
pub fn build_tx_ris(
    params: &PhysicalParams,
    tx_positions: &[CartesianPoint],
    ris_positions: &[CartesianPoint],
    layout: &RisLayout,
) -> Result<CMatrix, ChannelError> {
    let d = checked_distances(
        ris_positions,
        tx_positions,
        "Tx -> RIS",
        "RIS element",
        "Tx antenna",
    )?;
    let area = layout.element_area();
    let k = params.wavenumber;
    Ok(CMatrix::from_fn(d.nrows(), d.ncols(), |w, m| {
        let dist = d[(w, m)];
        let path_loss =
            params.tx_gain * area * (-params.absorption * dist).exp() / (4.0 * PI * dist * dist);
        Complex64::from_polar(path_loss.sqrt(), -k * dist)
    }))
}

/// RIS -> Rx channel, `N_r x W`.
///
/// Entry `(n, w)` is
/// `sqrt(G_n exp(-kappa D)) L_x L_y / (j lambda D) F(theta) exp(+j k D)`,
/// where `theta` is the angle between the element-to-antenna vector and the
/// panel normal, `cos(theta) = |z_n - z_w| / D`.
pub fn build_ris_rx(
    params: &PhysicalParams,
    ris_positions: &[CartesianPoint],
    rx_positions: &[CartesianPoint],
    layout: &RisLayout,
) -> Result<CMatrix, ChannelError> {
    let d = checked_distances(
        rx_positions,
        ris_positions,
        "RIS -> Rx",
        "Rx antenna",
        "RIS element",
    )?;
    let area = layout.element_area();
    let k = params.wavenumber;
    let lambda = params.wavelength;
    Ok(CMatrix::from_fn(d.nrows(), d.ncols(), |n, w| {
        let dist = d[(n, w)];
        let cos_theta = (rx_positions[n].z - ris_positions[w].z).abs() / dist;
        let magnitude = (params.rx_gain * (-params.absorption * dist).exp()).sqrt() * area
            / (lambda * dist)
            * leaning_factor(cos_theta);
        // 1/j = exp(-j pi/2)
        Complex64::from_polar(magnitude, k * dist - PI / 2.0)
    }))
}

/// Direct Tx -> Rx line-of-sight channel, `N_r x N_t`.
pub fn build_direct_los(
    params: &PhysicalParams,
    tx_positions: &[CartesianPoint],
    rx_positions: &[CartesianPoint],
) -> Result<CMatrix, ChannelError> {
    let d = checked_distances(
        rx_positions,
        tx_positions,
        "Tx -> Rx",
        "Rx antenna",
        "Tx antenna",
    )?;
    let k = params.wavenumber;
    let lambda = params.wavelength;
    let gain = params.tx_gain * params.rx_gain;
    Ok(CMatrix::from_fn(d.nrows(), d.ncols(), |n, m| {
        let dist = d[(n, m)];
        let magnitude = (gain * (-params.absorption * dist).exp()).sqrt() * lambda / (4.0 * PI * dist);
        Complex64::from_polar(magnitude, -k * dist)
    }))
}

/// `R diag(phases) T`.
pub fn effective_channel(
    tx_ris: &CMatrix,
    ris_rx: &CMatrix,
    phases: &[Complex64],
) -> Result<CMatrix, ChannelError> {
    let w = phases.len();
    if tx_ris.nrows() != w || ris_rx.ncols() != w {
        return Err(ChannelError::Dimension(format!(
            "T is {}x{}, R is {}x{}, phase profile has {} entries",
            tx_ris.nrows(),
            tx_ris.ncols(),
            ris_rx.nrows(),
            ris_rx.ncols(),
            w
        )));
    }
    let mut scaled = ris_rx.clone();
    for (mut col, beta) in scaled.column_iter_mut().zip(phases) {
        col *= *beta;
    }
    Ok(scaled * tx_ris)
}

/// The channel matrices of one placement.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    pub tx_ris: CMatrix,
    pub ris_rx: CMatrix,
    pub effective: CMatrix,
    pub direct: Option<CMatrix>,
}

impl ChannelSet {
    /// Builds `T`, `R` and `R diag(beta) T` for the panel's current phase
    /// profile, plus the direct channel when `with_direct` is set.
    pub fn build(
        params: &PhysicalParams,
        tx_positions: &[CartesianPoint],
        rx_positions: &[CartesianPoint],
        panel: &RisPanel,
        with_direct: bool,
    ) -> Result<Self, ChannelError> {
        let ris_positions = crate::geometry::ris_element_positions(panel);
        let tx_ris = build_tx_ris(params, tx_positions, &ris_positions, panel.layout())?;
        let ris_rx = build_ris_rx(params, &ris_positions, rx_positions, panel.layout())?;
        let effective = effective_channel(&tx_ris, &ris_rx, panel.phases())?;
        let direct = if with_direct {
            Some(build_direct_los(params, tx_positions, rx_positions)?)
        } else {
            None
        };
        Ok(Self {
            tx_ris,
            ris_rx,
            effective,
            direct,
        })
    }
}
