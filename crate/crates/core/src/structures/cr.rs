//! CR structures from sub-Riemannian data, and the Nijenhuis tensor.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeoError, Result};
use crate::tensor::chart::Chart;
use crate::tensor::lie::{lie_bracket, VectorField};
use crate::tensor::linalg::{singular_values, spd_inverse_sqrt, spd_sqrt};

/// The CR data attached to a contact sub-Riemannian structure `(h, ω)` on
/// the contact distribution, all in one fixed basis of it.
#[derive(Debug, Clone, PartialEq)]
pub struct CrData {
    /// Complex structure, `J² = −I`.
    pub j: DMatrix<f64>,
    /// `(−K²)^{−1/2}` with `K = h⁻¹ω`; self-adjoint for `h`, positive.
    pub b: DMatrix<f64>,
    /// Levi form `ω(·, J·)`, positive definite.
    pub levi: DMatrix<f64>,
}

impl CrData {
    /// `(|J² + I|, |levi·B − h|, levi asymmetry)` maxima.
    pub fn defects(&self, h: &DMatrix<f64>) -> (f64, f64, f64) {
        let n = self.j.nrows();
        let j2 = (&self.j * &self.j + DMatrix::identity(n, n)).amax();
        let lb = (&self.levi * &self.b - h).amax();
        let sym = (&self.levi - self.levi.transpose()).amax();
        (j2, lb, sym)
    }
}

/// Builds `J = BK` from an SPD `h` and a nondegenerate skew `ω`.
///
/// The sign of `K` is fixed so that the Levi form has a positive first
/// diagonal entry; the result is then positive definite.
pub fn cr_from_subriemannian(h: &DMatrix<f64>, omega: &DMatrix<f64>) -> Result<CrData> {
    let n = h.nrows();
    if n % 2 != 0 || omega.nrows() != n || !h.is_square() || !omega.is_square() {
        return Err(GeoError::Dimension(format!(
            "need even-dimensional square h and omega, got {}x{} and {}x{}",
            h.nrows(),
            h.ncols(),
            omega.nrows(),
            omega.ncols()
        )));
    }
    let skew = (omega + omega.transpose()).amax();
    if skew > 1e-12 * omega.amax().max(1.0) {
        return Err(GeoError::InvalidParameter(format!("omega not skew (defect {skew:e})")));
    }
    let sv = singular_values(omega);
    let (max, min) = (sv[0], sv[n - 1]);
    if !(min > 1e-12 * max.max(1.0)) {
        return Err(GeoError::DegenerateOmega { min_singular: min });
    }
    let h_half = spd_sqrt(h)?;
    let h_mhalf = spd_inverse_sqrt(h)?;
    let h_inv = &h_mhalf * &h_mhalf;
    // K = h⁻¹ω is similar to the skew M = h^{-1/2} ω h^{-1/2}, so
    // −K² = h^{-1/2} (M Mᵀ) h^{1/2} and its inverse square root is explicit.
    let m = &h_mhalf * omega * &h_mhalf;
    let mmt = &m * m.transpose();
    let mmt = (&mmt + mmt.transpose()) * 0.5;
    let b = &h_mhalf * spd_inverse_sqrt(&mmt)? * &h_half;
    let mut j = &b * (&h_inv * omega);
    let mut levi = omega * &j;
    if levi[(0, 0)] < 0.0 {
        j = -j;
        levi = -levi;
    }
    let levi = (&levi + levi.transpose()) * 0.5;
    Ok(CrData { j, b, levi })
}

/// Applies the endomorphism field `j` to the vector field `x`.
struct Apply<'a, X: ?Sized, J: ?Sized> {
    j: &'a J,
    x: &'a X,
}

impl<X, J> VectorField for Apply<'_, X, J>
where
    X: VectorField + ?Sized,
    J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + ?Sized,
{
    fn eval(&self, p: &[f64]) -> DVector<f64> {
        (self.j)(p) * self.x.eval(p)
    }
}

/// `N_J(X, Y) = [X,Y] − [JX,JY] + J([JX,Y] + [X,JY])` at `p`, with brackets
/// by central differences of step `h`.
pub fn nijenhuis_tensor<J, X, Y>(chart: &Chart, j: &J, x: &X, y: &Y, p: &[f64], h: f64) -> Result<DVector<f64>>
where
    J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + ?Sized,
    X: VectorField + ?Sized,
    Y: VectorField + ?Sized,
{
    let jx = Apply { j, x };
    let jy = Apply { j, x: y };
    let xy = lie_bracket(chart, x, y, p, h)?;
    let jxjy = lie_bracket(chart, &jx, &jy, p, h)?;
    let jxy = lie_bracket(chart, &jx, y, p, h)?;
    let xjy = lie_bracket(chart, x, &jy, p, h)?;
    Ok(xy - jxjy + j(p) * (jxy + xjy))
}

/// Projects a nearly complex matrix onto `{J : J² = −I}` by the iteration
/// `X ← (X − X⁻¹)/2`, which fixes the eigenvalues `±i`.
pub fn normalize_complex_structure(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mut x = m.clone();
    for _ in 0..60 {
        let inv = x
            .clone()
            .try_inverse()
            .ok_or_else(|| GeoError::InvalidParameter("singular endomorphism".into()))?;
        let next = (&x - inv) * 0.5;
        let done = (&next - &x).amax() < 1e-15 * next.amax().max(1.0);
        x = next;
        if done {
            break;
        }
    }
    let defect = (&x * &x + DMatrix::identity(n, n)).amax();
    if defect > 1e-10 {
        return Err(GeoError::InvalidParameter(format!(
            "no nearby complex structure (defect {defect:e})"
        )));
    }
    Ok(x)
}
