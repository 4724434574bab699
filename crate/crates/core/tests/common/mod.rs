//! Independent reference computations used by the integration and acceptance
//! tests. Nothing here calls the library's channel products, SVD-based
//! water-filling or closed-form phase updates.

#![allow(dead_code)]

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use risplace::channel::PhysicalParams;
use risplace::geometry::{
    array_element_positions, CartesianPoint, PlanarArray, RisLayout, RisPanel,
};

pub type CMatrix = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    Complex64::from_polar((-u1.ln()).sqrt(), 2.0 * PI * u2)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_phases(rng: &mut ChaCha8Rng, w: usize) -> Vec<Complex64> {
    (0..w)
        .map(|_| Complex64::from_polar(1.0, 2.0 * PI * rng.random::<f64>()))
        .collect()
}

/// Random 3x2 Tx and 2x2 Rx arrays on either side of a 2x2 RIS with random
/// phases, frequency, gains and absorption.
pub fn random_geometry(
    seed: u64,
) -> (PhysicalParams, Vec<CartesianPoint>, Vec<CartesianPoint>, RisPanel) {
    let mut r = rng(seed);
    let params = PhysicalParams::new(
        r.random_range(100e9..400e9),
        r.random_range(0.0..0.01),
        r.random_range(1.0..200.0),
        r.random_range(1.0..200.0),
    )
    .unwrap();
    let lambda = params.wavelength();
    let tx = PlanarArray::new(
        3,
        2,
        r.random_range(0.5..10.0) * lambda,
        CartesianPoint::new(r.random_range(-0.01..0.01), r.random_range(-0.01..0.01), r.random_range(0.05..0.3)).unwrap(),
    )
    .unwrap();
    let rx = PlanarArray::new(
        2,
        2,
        r.random_range(0.5..10.0) * lambda,
        CartesianPoint::new(r.random_range(-0.01..0.01), r.random_range(-0.01..0.01), r.random_range(-0.3..-0.05)).unwrap(),
    )
    .unwrap();
    let layout = RisLayout::new(
        2,
        2,
        lambda / 2.0,
        lambda / 2.0,
        r.random_range(0.0..0.5) * lambda,
        r.random_range(0.0..0.5) * lambda,
    )
    .unwrap();
    let mut panel = RisPanel::centered_at(layout, r.random_range(-0.01..0.01), r.random_range(-0.01..0.01), r.random_range(-0.03..0.03));
    panel.set_phases(random_phases(&mut r, 4)).unwrap();
    (
        params,
        array_element_positions(&tx),
        array_element_positions(&rx),
        panel,
    )
}

/// Effective-channel entries as the explicit double sum over RIS elements,
/// evaluated directly from positions.
pub fn effective_channel_double_sum(
    params: &PhysicalParams,
    tx: &[CartesianPoint],
    rx: &[CartesianPoint],
    panel: &RisPanel,
) -> CMatrix {
    let layout = panel.layout();
    let (lx, ly) = (layout.element_width(), layout.element_length());
    let lambda = params.wavelength();
    let k = 2.0 * PI / lambda;
    let kappa = params.absorption();
    let j = Complex64::new(0.0, 1.0);
    CMatrix::from_fn(rx.len(), tx.len(), |n, m| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..layout.elements_x() {
            for b in 0..layout.elements_y() {
                let p = CartesianPoint {
                    x: panel.origin().0 + a as f64 * (lx + layout.gap_x()),
                    y: panel.origin().1 + b as f64 * (ly + layout.gap_y()),
                    z: panel.z(),
                };
                let w = a * layout.elements_y() + b;
                let dm = ((tx[m].x - p.x).powi(2) + (tx[m].y - p.y).powi(2) + (tx[m].z - p.z).powi(2)).sqrt();
                let dn = ((rx[n].x - p.x).powi(2) + (rx[n].y - p.y).powi(2) + (rx[n].z - p.z).powi(2)).sqrt();
                let pl = params.tx_gain() * lx * ly * (-kappa * dm).exp() / (4.0 * PI * dm * dm);
                let cos_theta = (rx[n].z - p.z).abs() / dn;
                let f = (1.0 + cos_theta) / 2.0;
                let amp = Complex64::new((pl * params.rx_gain()).sqrt(), 0.0) * (lx * ly) / (j * lambda * dn) * f;
                let phase = (-j * k * (dm - dn)).exp() * panel.phases()[w] * (-(kappa / 2.0) * dn).exp();
                acc += amp * phase;
            }
        }
        acc
    })
}

/// `log2 det(I + H R H^H / noise)` for two receive antennas, via the 2x2
/// determinant formula.
pub fn capacity_2rx(h: &CMatrix, rs: &CMatrix, noise: f64) -> f64 {
    assert_eq!(h.nrows(), 2);
    let g = h * rs * h.adjoint() / Complex64::new(noise, 0.0);
    let a = 1.0 + g[(0, 0)].re;
    let d = 1.0 + g[(1, 1)].re;
    let b = g[(0, 1)];
    (a * d - b.norm_sqr()).log2()
}

fn cascade(t: &CMatrix, r: &CMatrix, phases: &[Complex64]) -> CMatrix {
    let mut h = CMatrix::zeros(r.nrows(), t.ncols());
    for (w, beta) in phases.iter().enumerate() {
        for n in 0..r.nrows() {
            for m in 0..t.ncols() {
                h[(n, m)] += r[(n, w)] * beta * t[(w, m)];
            }
        }
    }
    h
}

/// Best capacity over a uniform grid of `points` phases for element `w`,
/// all other coefficients and the covariance held fixed. Two receive
/// antennas only.
pub fn grid_best_single_phase(
    t: &CMatrix,
    r: &CMatrix,
    rs: &CMatrix,
    phases: &[Complex64],
    w: usize,
    noise: f64,
    points: usize,
) -> f64 {
    let mut trial = phases.to_vec();
    trial[w] = Complex64::new(0.0, 0.0);
    let rest = cascade(t, r, &trial);
    let mut single = vec![Complex64::new(0.0, 0.0); phases.len()];
    single[w] = Complex64::new(1.0, 0.0);
    let own = cascade(t, r, &single);
    (0..points)
        .map(|i| {
            let beta = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / points as f64);
            capacity_2rx(&(&rest + &own * beta), rs, noise)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Water-filling capacity of a 2x2 channel from the closed-form eigenvalues
/// of `H H^H`.
pub fn waterfill_capacity_2x2(h: [[Complex64; 2]; 2], power: f64, noise: f64) -> f64 {
    let a = h[0][0].norm_sqr() + h[0][1].norm_sqr();
    let d = h[1][0].norm_sqr() + h[1][1].norm_sqr();
    let b = h[0][0] * h[1][0].conj() + h[0][1] * h[1][1].conj();
    let mid = 0.5 * (a + d);
    let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    let g1 = (mid + rad) / noise;
    let g2 = (mid - rad).max(0.0) / noise;
    if g1 <= 0.0 {
        return 0.0;
    }
    // both streams active iff the level exceeds 1/g2
    if g2 > 0.0 {
        let level = (power + 1.0 / g1 + 1.0 / g2) / 2.0;
        if level > 1.0 / g2 {
            return ((g1 * level).ln() + (g2 * level).ln()) / LN_2;
        }
    }
    (1.0 + g1 * power).log2()
}

/// Exhaustive search over `levels` phases per element for a 2x2 link,
/// with element 0 fixed to 1 (the objective is invariant to a common phase).
pub fn exhaustive_discrete_capacity(
    t: &CMatrix,
    r: &CMatrix,
    power: f64,
    noise: f64,
    levels: usize,
) -> f64 {
    assert_eq!((r.nrows(), t.ncols()), (2, 2));
    let w = t.nrows();
    // contribution of element e at level l
    let terms: Vec<Vec<[[Complex64; 2]; 2]>> = (0..w)
        .map(|e| {
            (0..levels)
                .map(|l| {
                    let beta = Complex64::from_polar(1.0, 2.0 * PI * l as f64 / levels as f64);
                    let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
                    for n in 0..2 {
                        for m in 0..2 {
                            c[n][m] = r[(n, e)] * beta * t[(e, m)];
                        }
                    }
                    c
                })
                .collect()
        })
        .collect();

    fn add(a: [[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        [
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ]
    }

    fn search(
        terms: &[Vec<[[Complex64; 2]; 2]>],
        depth: usize,
        acc: [[Complex64; 2]; 2],
        power: f64,
        noise: f64,
    ) -> f64 {
        if depth == terms.len() {
            return waterfill_capacity_2x2(acc, power, noise);
        }
        terms[depth]
            .iter()
            .map(|c| search(terms, depth + 1, add(acc, c), power, noise))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    let start = terms[0][0];
    if w == 1 {
        return waterfill_capacity_2x2(start, power, noise);
    }
    terms[1]
        .par_iter()
        .map(|c| search(&terms, 2, add(start, c), power, noise))
        .reduce(|| f64::NEG_INFINITY, f64::max)
}
