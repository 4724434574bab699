//! Capacity of transmissive-RIS-assisted MIMO links in the radiating near
//! field.
//!
//! - [`geometry`]: array and RIS element positions, Fresnel-zone bounds.
//! - [`channel`]: spherical-wavefront Tx -> RIS, RIS -> Rx and direct channels.
//! - [`optimizer`]: water-filling, closed-form phase updates and the
//!   multi-start alternating optimizer.
//! - [`sweep`]: RIS position sweeps, LoS baselines and whole campaigns.

pub mod channel;
pub mod geometry;
pub mod linalg;
pub mod optimizer;
pub mod sweep;
pub mod units;

pub use num_complex::Complex64;
