//! Small dense complex linear-algebra helpers on top of nalgebra.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Singular values in descending order together with the matching right
/// singular vectors as columns.
pub(crate) fn svd_descending(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let nt = h.ncols();
    if h.nrows() == 0 || nt == 0 {
        return (Vec::new(), CMatrix::zeros(nt, 0));
    }
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let mut right = CMatrix::zeros(nt, order.len());
    for (col, &i) in order.iter().enumerate() {
        for r in 0..nt {
            right[(r, col)] = v_t[(i, r)].conj();
        }
    }
    (values, right)
}

/// Eigen-decomposition of the Hermitian part of `m`: `(eigenvalues, eigenvectors)`.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = hermitian_part(m);
    let eig = SymmetricEigen::new(herm);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `log2 det(A)` for Hermitian positive-definite `A` via Cholesky.
pub(crate) fn log2_det_hpd(a: &CMatrix) -> Option<f64> {
    let chol = Cholesky::new(hermitian_part(a))?;
    let l = chol.l_dirty();
    let mut sum = 0.0;
    for i in 0..l.nrows() {
        // complex square roots never fail, so a non-positive pivot shows up
        // as an imaginary diagonal entry
        let d = l[(i, i)];
        if !(d.re > 0.0) || d.im.abs() > 1e-12 * d.re {
            return None;
        }
        sum += d.re.ln();
    }
    Some(2.0 * sum / std::f64::consts::LN_2)
}

pub(crate) fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// `sqrt(sum |a_ij - b_ij|^2) / sqrt(sum |b_ij|^2)`, or the absolute error
/// when `b` is zero.
pub fn relative_frobenius_error(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = (a - b).norm();
    let scale = b.norm();
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}
