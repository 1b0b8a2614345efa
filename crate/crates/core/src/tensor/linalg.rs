//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{GeoError, Result};
use crate::tolerance::{NULL_SPACE_REL, SINGULAR_DET, SPD_EIGEN};

fn symmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m - m.transpose()).amax()
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Inverse of a symmetric (possibly indefinite) metric matrix.
pub fn invert_metric(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !g.is_square() {
        return Err(GeoError::Dimension(format!("metric is {}x{}", g.nrows(), g.ncols())));
    }
    let det = g.determinant();
    if !(det.abs() > SINGULAR_DET) {
        return Err(GeoError::SingularMetric { det });
    }
    let inv = g.clone().lu().try_inverse().ok_or(GeoError::SingularMetric { det })?;
    Ok(symmetrize(&inv))
}

fn check_symmetric(s: &DMatrix<f64>) -> Result<()> {
    if !s.is_square() {
        return Err(GeoError::Dimension(format!("matrix is {}x{}", s.nrows(), s.ncols())));
    }
    let scale = s.amax().max(1.0);
    if symmetry_defect(s) > 1e-12 * scale {
        return Err(GeoError::InvalidParameter(format!(
            "matrix not symmetric (defect {:e})",
            symmetry_defect(s)
        )));
    }
    Ok(())
}

fn spd_power(s: &DMatrix<f64>, power: f64) -> Result<DMatrix<f64>> {
    check_symmetric(s)?;
    let eig = SymmetricEigen::new(symmetrize(s));
    let min = eig.eigenvalues.min();
    if !(min > SPD_EIGEN) {
        return Err(GeoError::NotSpd { min_eigenvalue: min });
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(power)));
    let r = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    Ok(symmetrize(&r))
}

/// `S^{-1/2}` for symmetric positive definite `S`.
pub fn spd_inverse_sqrt(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_power(s, -0.5)
}

/// `S^{1/2}` for symmetric positive definite `S`.
pub fn spd_sqrt(s: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    spd_power(s, 0.5)
}

/// `(negative, positive)` eigenvalue counts; eigenvalues within `1e-12` of
/// zero count as neither.
pub fn signature(g: &DMatrix<f64>) -> (usize, usize) {
    let eig = SymmetricEigen::new(symmetrize(g));
    let neg = eig.eigenvalues.iter().filter(|&&l| l < -SPD_EIGEN).count();
    let pos = eig.eigenvalues.iter().filter(|&&l| l > SPD_EIGEN).count();
    (neg, pos)
}

/// Singular values in decreasing order, padded with zeros up to `ncols`.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.ncols();
    let padded = pad_rows(m);
    let mut s: Vec<f64> = padded.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s.resize(n, 0.0);
    s
}

fn pad_rows(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() >= m.ncols() {
        return m.clone();
    }
    let mut p = DMatrix::zeros(m.ncols(), m.ncols());
    p.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    p
}

/// Dimension of the numerical null space: singular values below
/// `1e-9 * sigma_max` count as zero.
pub fn null_space_dim(m: &DMatrix<f64>) -> usize {
    null_space_dim_rel(m, NULL_SPACE_REL)
}

pub fn null_space_dim_rel(m: &DMatrix<f64>, rel: f64) -> usize {
    let s = singular_values(m);
    let max = s.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return s.len();
    }
    s.iter().filter(|&&x| x < rel * max).count()
}

/// Orthonormal basis of the numerical null space (columns).
pub fn null_space(m: &DMatrix<f64>, rel: f64) -> Vec<DVector<f64>> {
    let padded = pad_rows(m);
    let n = padded.ncols();
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let max = svd.singular_values.max();
    (0..n)
        .filter(|&i| max == 0.0 || svd.singular_values[i] < rel * max)
        .map(|i| v_t.row(i).transpose())
        .collect()
}
