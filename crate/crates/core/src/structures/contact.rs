//! Contact data: Reeb fields and the twisting degree of a distribution.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeoError, Result};
use crate::tensor::forms::{exterior_derivative, Form, FormField};
use crate::tensor::linalg::{null_space, null_space_dim, singular_values};
use crate::tensor::metric::Scheme;
use crate::tolerance::NULL_SPACE_REL;

/// Matrix `Ω_ab = dθ(e_a, e_b)` of a 2-form in coordinates.
pub fn two_form_matrix(f: &Form) -> DMatrix<f64> {
    let n = f.dim();
    DMatrix::from_fn(n, n, |a, b| f.get(&[a, b]))
}

/// Number of basis vectors spanning `ker θ` on which `dθ` degenerates:
/// the null-space dimension of `dθ(b_a, b_b)`.
pub fn twisting_degree(theta: &Form, dtheta: &Form, w_basis: &[DVector<f64>]) -> Result<usize> {
    let n = theta.dim();
    let expected = n - 1;
    if w_basis.is_empty() {
        return Err(GeoError::RankDeficientBasis { rank: 0, expected });
    }
    let basis = DMatrix::from_columns(w_basis);
    let sv = singular_values(&basis);
    let rank = sv.iter().filter(|&&s| s > NULL_SPACE_REL * sv[0]).count();
    let annihilated = w_basis
        .iter()
        .all(|b| theta.evaluate(&[b.as_slice()]).abs() <= 1e-12 * b.amax().max(1.0));
    if w_basis.len() != expected || rank != expected || !annihilated {
        return Err(GeoError::RankDeficientBasis { rank, expected });
    }
    let omega = two_form_matrix(dtheta);
    let restricted = basis.transpose() * omega * &basis;
    if restricted.amax() == 0.0 {
        return Ok(expected);
    }
    Ok(null_space_dim(&restricted))
}

/// Same as [`twisting_degree`], with `dθ` computed from a form field.
pub fn twisting_degree_at<F: FormField + ?Sized>(
    theta: &F,
    w_basis: &[DVector<f64>],
    p: &[f64],
    scheme: Scheme,
) -> Result<usize> {
    let dtheta = exterior_derivative(theta, p, scheme)?;
    twisting_degree(&theta.eval(p), &dtheta, w_basis)
}

/// The Reeb vector `Z`: `θ(Z) = 1`, `Z⌟dθ = 0`.
pub fn reeb_field(theta: &Form, dtheta: &Form) -> Result<DVector<f64>> {
    let n = theta.dim();
    let omega = two_form_matrix(dtheta);
    let sv = singular_values(&omega);
    let rank = sv.iter().filter(|&&s| s > NULL_SPACE_REL * sv[0]).count();
    if sv[0] == 0.0 {
        return Err(GeoError::NotContact { rank: 0, dim: n });
    }
    let kernel = null_space(&omega, NULL_SPACE_REL);
    if kernel.len() != 1 {
        return Err(GeoError::NotContact { rank, dim: n });
    }
    let z = &kernel[0];
    let tz = theta.evaluate(&[z.as_slice()]);
    if tz.abs() < 1e-12 {
        return Err(GeoError::NotContact { rank, dim: n });
    }
    Ok(z / tz)
}

/// [`reeb_field`] for a 1-form field, `dθ` by the given scheme.
pub fn reeb_field_at<F: FormField + ?Sized>(theta: &F, p: &[f64], scheme: Scheme) -> Result<DVector<f64>> {
    let dtheta = exterior_derivative(theta, p, scheme)?;
    reeb_field(&theta.eval(p), &dtheta)
}
