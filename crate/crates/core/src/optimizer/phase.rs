//! Closed-form update of one RIS coefficient with everything else fixed.
//!
//! With the transmit covariance whitened into the Tx -> RIS rows,
//! `t'_w = Lambda^{1/2} U^H t_w`, the objective as a function of `beta_w` is
//! `log det(X_w + beta_w Y_w + conj(beta_w) Y_w^H)`. `Y_w` has rank one, so
//! its only nonzero eigenvalue against `X_w^{-1}` is the trace
//! `psi_w = t'_w^H M^H X_w^{-1} r_w / sigma^2`, and the maximizer is
//! `exp(-j arg(psi_w))`.

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::linalg::{self, CMatrix, CVector};

/// Per-element columns of `R`, whitened rows of `T`, and the running sum
/// `S = sum_i beta_i r_i t'_i^H`.
#[derive(Debug, Clone)]
pub struct PhaseStepContext {
    ris_rx_cols: Vec<CVector>,
    whitened_rows: Vec<CVector>,
    phases: Vec<Complex64>,
    sum: CMatrix,
}

/// `T' = T U Lambda^{1/2}` from the eigen-decomposition of `covariance`,
/// with eigenvalues below `1e-14 * trace` clamped to zero.
pub fn whiten(tx_ris: &CMatrix, covariance: &CMatrix) -> CMatrix {
    let (eigenvalues, vectors) = linalg::hermitian_eigen(covariance);
    let floor = 1e-14 * linalg::trace_re(covariance).abs();
    let mut factor = vectors;
    for (mut col, lambda) in factor.column_iter_mut().zip(eigenvalues) {
        let root = if lambda <= floor { 0.0 } else { lambda.sqrt() };
        col *= Complex64::new(root, 0.0);
    }
    tx_ris * factor
}

impl PhaseStepContext {
    pub fn new(
        tx_ris: &CMatrix,
        ris_rx: &CMatrix,
        covariance: &CMatrix,
        phases: &[Complex64],
    ) -> Self {
        let whitened = whiten(tx_ris, covariance);
        let ris_rx_cols: Vec<CVector> = ris_rx.column_iter().map(|c| c.clone_owned()).collect();
        // row w of T' is t'_w^H
        let whitened_rows: Vec<CVector> = whitened
            .row_iter()
            .map(|r| r.adjoint())
            .collect();
        let mut ctx = Self {
            ris_rx_cols,
            whitened_rows,
            phases: phases.to_vec(),
            sum: CMatrix::zeros(ris_rx.nrows(), tx_ris.ncols()),
        };
        ctx.recompute_sum();
        ctx
    }

    fn term(&self, w: usize) -> CMatrix {
        &self.ris_rx_cols[w] * self.whitened_rows[w].adjoint()
    }

    fn recompute_sum(&mut self) {
        let mut sum = CMatrix::zeros(self.sum.nrows(), self.sum.ncols());
        for w in 0..self.phases.len() {
            sum += self.term(w) * self.phases[w];
        }
        self.sum = sum;
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    pub fn into_phases(self) -> Vec<Complex64> {
        self.phases
    }

    /// `sum_i beta_i r_i t'_i^H` over all elements, i.e. `R diag(beta) T'`.
    pub fn full_sum(&self) -> &CMatrix {
        &self.sum
    }

    /// `M = sum_{i != w} beta_i r_i t'_i^H`.
    pub fn partial_sum(&self, w: usize) -> CMatrix {
        &self.sum - self.term(w) * self.phases[w]
    }

    pub fn ris_rx_col(&self, w: usize) -> &CVector {
        &self.ris_rx_cols[w]
    }

    pub fn whitened_row(&self, w: usize) -> &CVector {
        &self.whitened_rows[w]
    }

    /// Sets `beta_w`, updating the running sum incrementally.
    pub fn set_phase(&mut self, w: usize, beta: Complex64) {
        let delta = beta - self.phases[w];
        if delta != Complex64::new(0.0, 0.0) {
            self.sum += self.term(w) * delta;
        }
        self.phases[w] = beta;
    }
}

/// `psi_w`, the sole nonzero eigenvalue of `X_w^{-1} Y_w`.
pub fn phase_eigenvalue(ctx: &PhaseStepContext, w: usize, noise: f64) -> (Complex64, f64) {
    let m = ctx.partial_sum(w);
    let r = ctx.ris_rx_col(w);
    let t = ctx.whitened_row(w);
    let nr = r.len();
    let t_energy = t.norm_squared();
    let x = CMatrix::identity(nr, nr)
        + (&m * m.adjoint()).unscale(noise)
        + (r * r.adjoint()).scale(t_energy / noise);
    let x = linalg::hermitian_part(&x);
    let solved = match Cholesky::new(x.clone()) {
        Some(chol) => chol.solve(r),
        // X_w >= I in exact arithmetic; LU covers catastrophic rounding
        None => x.lu().solve(r).unwrap_or_else(|| CVector::zeros(nr)),
    };
    let mt = &m * t;
    let psi = mt.dotc(&solved) / noise;
    let scale = mt.norm() * solved.norm() / noise;
    (psi, scale)
}

/// Optimal `beta_w` with all other coefficients and the covariance fixed.
pub fn optimize_single_phase(ctx: &PhaseStepContext, w: usize, noise: f64) -> Complex64 {
    let (psi, scale) = phase_eigenvalue(ctx, w, noise);
    if psi.norm() > 1e-15 * (1.0 + scale) {
        Complex64::from_polar(1.0, -psi.arg())
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// One ascending pass `w = 0..W` of single-element updates.
pub fn sweep_all_phases(
    ris_rx: &CMatrix,
    tx_ris: &CMatrix,
    covariance: &CMatrix,
    phases: &[Complex64],
    noise: f64,
) -> Vec<Complex64> {
    let mut ctx = PhaseStepContext::new(tx_ris, ris_rx, covariance, phases);
    for w in 0..ctx.len() {
        let beta = optimize_single_phase(&ctx, w, noise);
        ctx.set_phase(w, beta);
    }
    ctx.into_phases()
}
