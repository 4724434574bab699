//! Antenna-array and RIS geometry.
//!
//! All arrays lie in planes parallel to the xy-plane, so the plane normal is
//! always the z-axis. Positions are in meters.
//!
//! RIS elements are flattened with `w = a * elements_y + b` (a-major), and
//! planar-array elements row-major with `m = row * cols + col`. Every module
//! that indexes channel rows or columns relies on these two orders.

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("distance must be non-negative and finite, got {0}")]
    Distance(f64),
    #[error("polar angle must lie in [0, pi], got {0}")]
    PolarAngle(f64),
    #[error("azimuth must lie in [0, 2pi), got {0}")]
    Azimuth(f64),
    #[error("{what} must be a positive integer")]
    EmptyGrid { what: &'static str },
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("{what} must be non-negative and finite, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("phase profile has {got} entries, panel has {expected} elements")]
    PhaseCount { expected: usize, got: usize },
    #[error("phase coefficient {index} has magnitude {magnitude}, expected 1")]
    NotUnimodular { index: usize, magnitude: f64 },
}

/// A point in spherical coordinates about the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    distance: f64,
    polar: f64,
    azimuth: f64,
}

impl SphericalPoint {
    pub fn new(distance: f64, polar: f64, azimuth: f64) -> Result<Self, GeometryError> {
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(GeometryError::Distance(distance));
        }
        if !(0.0..=PI).contains(&polar) {
            return Err(GeometryError::PolarAngle(polar));
        }
        if !(0.0..2.0 * PI).contains(&azimuth) {
            return Err(GeometryError::Azimuth(azimuth));
        }
        Ok(Self {
            distance,
            polar,
            azimuth,
        })
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn polar(&self) -> f64 {
        self.polar
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CartesianPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl CartesianPoint {
    pub const ORIGIN: CartesianPoint = CartesianPoint {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Self { x, y, z })
        } else {
            Err(GeometryError::NonFinite)
        }
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn distance_to(&self, other: &CartesianPoint) -> f64 {
        (*self - *other).norm()
    }

    /// Arithmetic mean of a non-empty set of points.
    pub fn centroid(points: &[CartesianPoint]) -> Option<CartesianPoint> {
        if points.is_empty() {
            return None;
        }
        let n = points.len() as f64;
        let sum = points
            .iter()
            .fold(CartesianPoint::ORIGIN, |acc, p| acc + *p);
        Some(CartesianPoint {
            x: sum.x / n,
            y: sum.y / n,
            z: sum.z / n,
        })
    }
}

impl Add for CartesianPoint {
    type Output = CartesianPoint;
    fn add(self, rhs: Self) -> Self {
        CartesianPoint {
            x: self.x + rhs.x,
            y: self.y + rhs.y,
            z: self.z + rhs.z,
        }
    }
}

impl Sub for CartesianPoint {
    type Output = CartesianPoint;
    fn sub(self, rhs: Self) -> Self {
        CartesianPoint {
            x: self.x - rhs.x,
            y: self.y - rhs.y,
            z: self.z - rhs.z,
        }
    }
}

/// `(D cos(phi) sin(theta), D sin(phi) sin(theta), D cos(theta))`
pub fn spherical_to_cartesian(p: &SphericalPoint) -> CartesianPoint {
    let (sin_t, cos_t) = p.polar.sin_cos();
    let (sin_p, cos_p) = p.azimuth.sin_cos();
    CartesianPoint {
        x: p.distance * cos_p * sin_t,
        y: p.distance * sin_p * sin_t,
        z: p.distance * cos_t,
    }
}

/// Uniform planar array of point radiators, normal along z.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarArray {
    rows: usize,
    cols: usize,
    spacing: f64,
    center: CartesianPoint,
}

impl PlanarArray {
    pub fn new(
        rows: usize,
        cols: usize,
        spacing: f64,
        center: CartesianPoint,
    ) -> Result<Self, GeometryError> {
        if rows == 0 {
            return Err(GeometryError::EmptyGrid { what: "array rows" });
        }
        if cols == 0 {
            return Err(GeometryError::EmptyGrid {
                what: "array columns",
            });
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(GeometryError::NonPositive {
                what: "element spacing",
                value: spacing,
            });
        }
        Ok(Self {
            rows,
            cols,
            spacing,
            center,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn center(&self) -> CartesianPoint {
        self.center
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Element positions of `arr`, row-major: rows step along x, columns along y.
pub fn array_element_positions(arr: &PlanarArray) -> Vec<CartesianPoint> {
    let half_x = (arr.rows - 1) as f64 / 2.0;
    let half_y = (arr.cols - 1) as f64 / 2.0;
    let mut out = Vec::with_capacity(arr.len());
    for row in 0..arr.rows {
        for col in 0..arr.cols {
            out.push(CartesianPoint {
                x: arr.center.x + (row as f64 - half_x) * arr.spacing,
                y: arr.center.y + (col as f64 - half_y) * arr.spacing,
                z: arr.center.z,
            });
        }
    }
    out
}

/// Size and spacing of a rectangular RIS element grid, independent of where
/// the panel sits.
#[derive(Debug, Clone, PartialEq)]
pub struct RisLayout {
    elements_x: usize,
    elements_y: usize,
    element_width: f64,
    element_length: f64,
    gap_x: f64,
    gap_y: f64,
}

impl RisLayout {
    pub fn new(
        elements_x: usize,
        elements_y: usize,
        element_width: f64,
        element_length: f64,
        gap_x: f64,
        gap_y: f64,
    ) -> Result<Self, GeometryError> {
        if elements_x == 0 {
            return Err(GeometryError::EmptyGrid {
                what: "RIS elements along x",
            });
        }
        if elements_y == 0 {
            return Err(GeometryError::EmptyGrid {
                what: "RIS elements along y",
            });
        }
        for (what, value) in [
            ("element width", element_width),
            ("element length", element_length),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(GeometryError::NonPositive { what, value });
            }
        }
        for (what, value) in [("gap along x", gap_x), ("gap along y", gap_y)] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(GeometryError::Negative { what, value });
            }
        }
        Ok(Self {
            elements_x,
            elements_y,
            element_width,
            element_length,
            gap_x,
            gap_y,
        })
    }

    pub fn elements_x(&self) -> usize {
        self.elements_x
    }

    pub fn elements_y(&self) -> usize {
        self.elements_y
    }

    pub fn element_width(&self) -> f64 {
        self.element_width
    }

    pub fn element_length(&self) -> f64 {
        self.element_length
    }

    pub fn gap_x(&self) -> f64 {
        self.gap_x
    }

    pub fn gap_y(&self) -> f64 {
        self.gap_y
    }

    /// Element count `W`.
    pub fn len(&self) -> usize {
        self.elements_x * self.elements_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn element_area(&self) -> f64 {
        self.element_width * self.element_length
    }

    pub fn pitch_x(&self) -> f64 {
        self.element_width + self.gap_x
    }

    pub fn pitch_y(&self) -> f64 {
        self.element_length + self.gap_y
    }

    /// Flattened index of element `(a, b)`.
    pub fn index(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < self.elements_x && b < self.elements_y);
        a * self.elements_y + b
    }

    /// Largest physical side of the panel, `L_RIS`.
    pub fn max_dimension(&self) -> f64 {
        let nx = self.elements_x as f64;
        let ny = self.elements_y as f64;
        let lx = nx * self.element_width + (nx - 1.0) * self.gap_x;
        let ly = ny * self.element_length + (ny - 1.0) * self.gap_y;
        lx.max(ly)
    }

    /// In-plane offset of the element-center centroid from element (0, 0).
    pub fn centroid_offset(&self) -> (f64, f64) {
        (
            (self.elements_x - 1) as f64 / 2.0 * self.pitch_x(),
            (self.elements_y - 1) as f64 / 2.0 * self.pitch_y(),
        )
    }

    /// Scales every length of the layout by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, GeometryError> {
        Self::new(
            self.elements_x,
            self.elements_y,
            self.element_width * factor,
            self.element_length * factor,
            self.gap_x * factor,
            self.gap_y * factor,
        )
    }
}

/// An RIS placed in space with its transmission coefficients.
///
/// Element `(a, b)` sits at `origin + (a * pitch_x, b * pitch_y)` in the plane
/// `z`. With the default origin the `(0, 0)` element is on the z-axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RisPanel {
    layout: RisLayout,
    origin_x: f64,
    origin_y: f64,
    z: f64,
    phases: Vec<num_complex::Complex64>,
}

impl RisPanel {
    /// Panel with element `(0, 0)` on the z-axis and all coefficients equal to 1.
    pub fn new(layout: RisLayout, z: f64) -> Self {
        Self::with_origin(layout, 0.0, 0.0, z)
    }

    pub fn with_origin(layout: RisLayout, origin_x: f64, origin_y: f64, z: f64) -> Self {
        let phases = vec![num_complex::Complex64::new(1.0, 0.0); layout.len()];
        Self {
            layout,
            origin_x,
            origin_y,
            z,
            phases,
        }
    }

    /// Panel whose element centroid is at `(center_x, center_y, z)`.
    pub fn centered_at(layout: RisLayout, center_x: f64, center_y: f64, z: f64) -> Self {
        let (off_x, off_y) = layout.centroid_offset();
        Self::with_origin(layout, center_x - off_x, center_y - off_y, z)
    }

    pub fn layout(&self) -> &RisLayout {
        &self.layout
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.origin_x, self.origin_y)
    }

    pub fn len(&self) -> usize {
        self.layout.len()
    }

    pub fn is_empty(&self) -> bool {
        self.layout.is_empty()
    }

    pub fn phases(&self) -> &[num_complex::Complex64] {
        &self.phases
    }

    /// Replaces the transmission coefficients; each must have unit magnitude
    /// to within 1e-9.
    pub fn set_phases(&mut self, phases: Vec<num_complex::Complex64>) -> Result<(), GeometryError> {
        if phases.len() != self.len() {
            return Err(GeometryError::PhaseCount {
                expected: self.len(),
                got: phases.len(),
            });
        }
        if let Some((index, beta)) = phases
            .iter()
            .enumerate()
            .find(|(_, b)| (b.norm() - 1.0).abs() > 1e-9)
        {
            return Err(GeometryError::NotUnimodular {
                index,
                magnitude: beta.norm(),
            });
        }
        self.phases = phases;
        Ok(())
    }

    pub fn element_position(&self, a: usize, b: usize) -> CartesianPoint {
        CartesianPoint {
            x: self.origin_x + a as f64 * self.layout.pitch_x(),
            y: self.origin_y + b as f64 * self.layout.pitch_y(),
            z: self.z,
        }
    }

    pub fn centroid(&self) -> CartesianPoint {
        let (off_x, off_y) = self.layout.centroid_offset();
        CartesianPoint {
            x: self.origin_x + off_x,
            y: self.origin_y + off_y,
            z: self.z,
        }
    }
}

/// Element centers in flattened order `w = a * elements_y + b`.
pub fn ris_element_positions(panel: &RisPanel) -> Vec<CartesianPoint> {
    let layout = &panel.layout;
    let mut out = Vec::with_capacity(layout.len());
    for a in 0..layout.elements_x {
        for b in 0..layout.elements_y {
            out.push(panel.element_position(a, b));
        }
    }
    out
}

/// Radiating near-field band of an aperture: `lower < D <= upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FresnelBounds {
    pub fn contains(&self, distance: f64) -> bool {
        self.lower < distance && distance <= self.upper
    }
}

pub fn fresnel_bounds(layout: &RisLayout, wavelength: f64) -> FresnelBounds {
    let l = layout.max_dimension();
    FresnelBounds {
        lower: 0.62 * (l * l * l / wavelength).sqrt(),
        upper: 2.0 * l * l / wavelength,
    }
}

/// Whether `point` lies in the panel's Fresnel zone, measuring distance from
/// the element centroid.
pub fn in_fresnel_zone(panel: &RisPanel, point: &CartesianPoint, wavelength: f64) -> bool {
    let d = panel.centroid().distance_to(point);
    fresnel_bounds(panel.layout(), wavelength).contains(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const LAMBDA_300GHZ: f64 = 299_792_458.0 / 300e9;

    fn study_layout(n: usize, lambda: f64) -> RisLayout {
        RisLayout::new(n, n, lambda / 2.0, lambda / 2.0, lambda / 8.0, lambda / 8.0).unwrap()
    }

    #[test]
    fn spherical_examples() {
        let p = spherical_to_cartesian(&SphericalPoint::new(1.0, 0.0, 0.0).unwrap());
        assert_abs_diff_eq!(p.x, 0.0);
        assert_abs_diff_eq!(p.y, 0.0);
        assert_abs_diff_eq!(p.z, 1.0);

        let p = spherical_to_cartesian(&SphericalPoint::new(0.0, PI / 2.0, 1.0).unwrap());
        assert_eq!(p.norm(), 0.0);

        let p = spherical_to_cartesian(&SphericalPoint::new(2.0, PI / 2.0, PI / 2.0).unwrap());
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.z, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn spherical_rejects_out_of_range() {
        assert!(SphericalPoint::new(-1.0, 0.0, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, 4.0, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, 0.0, 2.0 * PI).is_err());
    }

    #[test]
    fn single_element_array() {
        let arr = PlanarArray::new(1, 1, 1.0, CartesianPoint::ORIGIN).unwrap();
        assert_eq!(array_element_positions(&arr), vec![CartesianPoint::ORIGIN]);
    }

    #[test]
    fn two_by_two_array_straddles_center() {
        let c = CartesianPoint::new(0.5, 0.5, 2.0).unwrap();
        let arr = PlanarArray::new(2, 2, 0.2, c).unwrap();
        let pos = array_element_positions(&arr);
        let expected = [(0.4, 0.4), (0.4, 0.6), (0.6, 0.4), (0.6, 0.6)];
        for (p, (x, y)) in pos.iter().zip(expected) {
            assert_abs_diff_eq!(p.x, x, epsilon = 1e-15);
            assert_abs_diff_eq!(p.y, y, epsilon = 1e-15);
            assert_eq!(p.z, 2.0);
        }
    }

    #[test]
    fn study_tx_array_positions() {
        let lambda = 0.99931e-3;
        let c = CartesianPoint::new(0.0122, 0.0122, 0.2629).unwrap();
        let arr = PlanarArray::new(2, 2, 2.0 * lambda, c).unwrap();
        let pos = array_element_positions(&arr);
        let mut xs: Vec<f64> = pos.iter().map(|p| p.x).collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        assert_eq!(xs.len(), 2);
        assert_abs_diff_eq!(xs[0], 0.01120, epsilon = 1e-5);
        assert_abs_diff_eq!(xs[1], 0.01320, epsilon = 1e-5);
    }

    #[test]
    fn ris_single_element_at_axis() {
        let layout = RisLayout::new(1, 1, 0.5, 0.5, 0.1, 0.1).unwrap();
        let panel = RisPanel::new(layout, 0.3);
        assert_eq!(
            ris_element_positions(&panel),
            vec![CartesianPoint::new(0.0, 0.0, 0.3).unwrap()]
        );
    }

    #[test]
    fn ris_pitch_is_width_plus_gap() {
        let lambda = 1.0;
        let layout = RisLayout::new(2, 1, lambda / 2.0, lambda / 2.0, lambda / 8.0, 0.0).unwrap();
        let pos = ris_element_positions(&RisPanel::new(layout, 0.0));
        assert_abs_diff_eq!(pos[1].x, 0.625 * lambda, epsilon = 1e-15);
    }

    #[test]
    fn study_panel_centroid_matches_stated_center() {
        let layout = study_layout(40, LAMBDA_300GHZ);
        let (cx, cy) = layout.centroid_offset();
        assert_abs_diff_eq!(cx, 12.1875 * LAMBDA_300GHZ, epsilon = 1e-15);
        assert_abs_diff_eq!(cx, 0.0122, epsilon = 5e-5);
        assert_eq!(cx, cy);
        let centroid =
            CartesianPoint::centroid(&ris_element_positions(&RisPanel::new(layout, 0.1))).unwrap();
        assert_abs_diff_eq!(centroid.x, cx, epsilon = 1e-15);
    }

    #[test]
    fn centered_panel_centroid() {
        let layout = study_layout(5, 1.0);
        let panel = RisPanel::centered_at(layout, 0.3, -0.2, 1.0);
        let c = CartesianPoint::centroid(&ris_element_positions(&panel)).unwrap();
        assert_abs_diff_eq!(c.x, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(c.y, -0.2, epsilon = 1e-14);
        assert_eq!(panel.centroid().z, 1.0);
    }

    #[test]
    fn index_is_a_major() {
        let layout = RisLayout::new(3, 4, 1.0, 1.0, 0.0, 0.0).unwrap();
        let panel = RisPanel::new(layout.clone(), 0.0);
        let pos = ris_element_positions(&panel);
        assert_eq!(layout.index(2, 1), 9);
        assert_eq!(pos[layout.index(2, 1)], panel.element_position(2, 1));
    }

    #[test]
    fn fresnel_single_element() {
        let lambda = 1e-3;
        let layout = RisLayout::new(1, 1, lambda / 2.0, lambda / 2.0, 0.0, 0.0).unwrap();
        let b = fresnel_bounds(&layout, lambda);
        assert_abs_diff_eq!(b.lower, 0.62 * (1.25e-10f64 / 1e-3).sqrt(), epsilon = 1e-18);
        assert_abs_diff_eq!(b.lower, 2.19e-4, epsilon = 1e-6);
        assert_abs_diff_eq!(b.upper, 5e-4, epsilon = 1e-15);
    }

    #[test]
    fn fresnel_full_size_panel() {
        let layout = study_layout(40, LAMBDA_300GHZ);
        assert_abs_diff_eq!(layout.max_dimension(), 24.875 * LAMBDA_300GHZ, epsilon = 1e-15);
        assert_abs_diff_eq!(layout.max_dimension(), 0.02486, epsilon = 1e-5);
        let b = fresnel_bounds(&layout, LAMBDA_300GHZ);
        assert_abs_diff_eq!(b.lower, 0.0769, epsilon = 1e-4);
        assert_abs_diff_eq!(b.upper, 1.237, epsilon = 1e-3);
    }

    #[test]
    fn fresnel_upper_halves_when_wavelength_doubles() {
        let layout = study_layout(10, 1e-3);
        let a = fresnel_bounds(&layout, 1e-3);
        let b = fresnel_bounds(&layout, 2e-3);
        assert_abs_diff_eq!(b.upper, a.upper / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn fresnel_membership_edges() {
        let lambda = LAMBDA_300GHZ;
        let layout = study_layout(40, lambda);
        let panel = RisPanel::centered_at(layout.clone(), 0.0122, 0.0122, 0.1860);
        assert!(!in_fresnel_zone(&panel, &panel.centroid(), lambda));

        let b = fresnel_bounds(&layout, lambda);
        assert!(b.contains(b.upper));
        assert!(!b.contains(b.lower));
        // a point on the normal at exactly the upper distance
        let on_axis = RisPanel::centered_at(layout, 0.0, 0.0, 0.0);
        let p = CartesianPoint::new(0.0, 0.0, b.upper).unwrap();
        assert!(in_fresnel_zone(&on_axis, &p, lambda));

        let tx = CartesianPoint::new(0.0122, 0.0122, 0.2629).unwrap();
        let d = panel.centroid().distance_to(&tx);
        assert_abs_diff_eq!(d, 0.0769, epsilon = 1e-12);
        assert!(d > b.lower);
        assert!(in_fresnel_zone(&panel, &tx, lambda));
    }

    #[test]
    fn set_phases_validates() {
        let layout = RisLayout::new(2, 1, 1.0, 1.0, 0.0, 0.0).unwrap();
        let mut panel = RisPanel::new(layout, 0.0);
        assert!(panel
            .set_phases(vec![num_complex::Complex64::new(0.0, 1.0)])
            .is_err());
        assert!(panel
            .set_phases(vec![
                num_complex::Complex64::new(0.0, 1.0),
                num_complex::Complex64::new(2.0, 0.0)
            ])
            .is_err());
        assert!(panel
            .set_phases(vec![
                num_complex::Complex64::new(0.0, 1.0),
                num_complex::Complex64::from_polar(1.0, 0.3)
            ])
            .is_ok());
    }

    proptest! {
        #[test]
        fn array_centroid_is_center(
            rows in 1usize..6, cols in 1usize..6,
            spacing in 1e-4f64..0.1,
            cx in -1.0f64..1.0, cy in -1.0f64..1.0, cz in -1.0f64..1.0,
        ) {
            let c = CartesianPoint::new(cx, cy, cz).unwrap();
            let arr = PlanarArray::new(rows, cols, spacing, c).unwrap();
            let pos = array_element_positions(&arr);
            prop_assert_eq!(pos.len(), rows * cols);
            let m = CartesianPoint::centroid(&pos).unwrap();
            prop_assert!((m.x - cx).abs() < 1e-14);
            prop_assert!((m.y - cy).abs() < 1e-14);
            prop_assert!(pos.iter().all(|p| p.z == cz));
        }

        #[test]
        fn ris_grid_steps_are_exact(
            nx in 1usize..8, ny in 1usize..8,
            width in 1e-4f64..1e-2, gap in 0.0f64..1e-2, z in -1.0f64..1.0,
        ) {
            let layout = RisLayout::new(nx, ny, width, width, gap, gap).unwrap();
            let panel = RisPanel::new(layout.clone(), z);
            let pos = ris_element_positions(&panel);
            for a in 0..nx.saturating_sub(1) {
                for b in 0..ny {
                    let d = pos[layout.index(a + 1, b)] - pos[layout.index(a, b)];
                    // Positions are a * pitch, so consecutive differences
                    // round to at most one ulp of the larger coordinate.
                    prop_assert!((d.x - (width + gap)).abs() <= 4.0 * f64::EPSILON * (a + 1) as f64 * (width + gap));
                    prop_assert_eq!(d.y, 0.0);
                    prop_assert_eq!(d.z, 0.0);
                }
            }
            let mut sorted = pos.clone();
            sorted.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
            sorted.dedup();
            prop_assert_eq!(sorted.len(), pos.len());
        }

        #[test]
        fn fresnel_scaling(
            n in 1usize..50, width in 1e-4f64..1e-2, gap in 0.0f64..1e-2,
            alpha in 0.1f64..10.0, lambda in 1e-4f64..1e-2,
        ) {
            let layout = RisLayout::new(n, n, width, width, gap, gap).unwrap();
            let a = fresnel_bounds(&layout, lambda);
            let b = fresnel_bounds(&layout.scaled(alpha).unwrap(), lambda);
            prop_assert!((b.lower / a.lower - alpha.powf(1.5)).abs() < 1e-12 * alpha.powf(1.5));
            prop_assert!((b.upper / a.upper - alpha * alpha).abs() < 1e-12 * alpha * alpha);
        }

        #[test]
        fn spherical_norm_recovers_distance(
            d in 0.0f64..100.0, theta in 0.0f64..=PI, phi in 0.0f64..(2.0 * PI),
        ) {
            let p = spherical_to_cartesian(&SphericalPoint::new(d, theta, phi).unwrap());
            prop_assert!((p.norm() - d).abs() <= 1e-12 * d.max(f64::MIN_POSITIVE));
        }
    }
}
