//! Lie derivatives and brackets in coordinates.

use nalgebra::{DMatrix, DVector};

use super::chart::Chart;
use super::forms::{combos, d_central, Form};
use super::metric::{flatten, metric_partials, unflatten, MetricField, Scheme};
use super::stencil;
use crate::error::Result;
use crate::tolerance::STEP_FIRST;

/// A vector field on a chart.
pub trait VectorField: Send + Sync {
    fn eval(&self, p: &[f64]) -> DVector<f64>;
}

impl<F> VectorField for F
where
    F: Fn(&[f64]) -> DVector<f64> + Send + Sync,
{
    fn eval(&self, p: &[f64]) -> DVector<f64> {
        self(p)
    }
}

/// The coordinate field `∂_k` on an `n`-dimensional chart.
#[derive(Debug, Clone, Copy)]
pub struct CoordinateField {
    pub n: usize,
    pub k: usize,
}

impl VectorField for CoordinateField {
    fn eval(&self, _p: &[f64]) -> DVector<f64> {
        let mut v = DVector::zeros(self.n);
        v[self.k] = 1.0;
        v
    }
}

/// `J[(i, c)] = ∂_c X^i`.
fn jacobian<X: VectorField + ?Sized>(x: &X, p: &[f64], h: f64) -> DMatrix<f64> {
    let n = p.len();
    let f = |q: &[f64]| x.eval(q).as_slice().to_vec();
    let mut j = DMatrix::zeros(n, n);
    for c in 0..n {
        let col = stencil::first(&f, p, c, h);
        for i in 0..n {
            j[(i, c)] = col[i];
        }
    }
    j
}

fn lie_tensor_core(x: &DVector<f64>, t: &DMatrix<f64>, dt: &[DMatrix<f64>], jac: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.len();
    let mut out = DMatrix::zeros(n, n);
    for (c, dtc) in dt.iter().enumerate() {
        out += dtc * x[c];
    }
    // T_{cb} ∂_a X^c + T_{ac} ∂_b X^c
    out += jac.transpose() * t + t * jac;
    out
}

/// `ℒ_X T` for a covariant 2-tensor field `T` given as a closure.
pub fn lie_derivative_tensor<X, T>(chart: &Chart, x: &X, t: &T, p: &[f64], h: f64) -> Result<DMatrix<f64>>
where
    X: VectorField + ?Sized,
    T: Fn(&[f64]) -> DMatrix<f64> + ?Sized,
{
    chart.check(p, stencil::REACH * h)?;
    let n = chart.dim();
    let f = |q: &[f64]| flatten(&t(q));
    let dt: Vec<DMatrix<f64>> = (0..n).map(|c| unflatten(n, stencil::first(&f, p, c, h))).collect();
    Ok(lie_tensor_core(&x.eval(p), &t(p), &dt, &jacobian(x, p, h)))
}

/// `ℒ_X g`. Under [`Scheme::Analytic`] the metric partials come from the
/// analytic hooks and only `∂X` is differenced (step `1e-5`).
pub fn lie_derivative_metric<M, X>(g: &M, x: &X, p: &[f64], scheme: Scheme) -> Result<DMatrix<f64>>
where
    M: MetricField + ?Sized,
    X: VectorField + ?Sized,
{
    let h = match scheme {
        Scheme::Analytic => STEP_FIRST,
        Scheme::Central { h } => h,
    };
    g.chart().check(p, stencil::REACH * h)?;
    let dg = metric_partials(g, p, scheme)?;
    Ok(lie_tensor_core(&x.eval(p), &g.components(p), &dg, &jacobian(x, p, h)))
}

/// `ℒ_X ω` for a form field, coordinate formula
/// `X^c ∂_c ω_I + Σ_a ω_{i_1..c..i_k} ∂_{i_a} X^c`.
pub fn lie_derivative_form<X, W>(chart: &Chart, x: &X, w: &W, p: &[f64], h: f64) -> Result<Form>
where
    X: VectorField + ?Sized,
    W: Fn(&[f64]) -> Form + ?Sized,
{
    chart.check(p, stencil::REACH * h)?;
    let n = chart.dim();
    let w0 = w(p);
    let k = w0.degree();
    let xv = x.eval(p);
    let jac = jacobian(x, p, h);
    let f = |q: &[f64]| w(q).components().to_vec();
    let mut comps = vec![0.0; w0.components().len()];
    for c in 0..n {
        if xv[c] != 0.0 {
            let d = stencil::first(&f, p, c, h);
            for (o, v) in comps.iter_mut().zip(d) {
                *o += xv[c] * v;
            }
        }
    }
    for (slot, idx) in combos(n, k).iter().enumerate() {
        let mut acc = 0.0;
        for a in 0..k {
            for c in 0..n {
                let dx = jac[(c, idx[a])];
                if dx == 0.0 {
                    continue;
                }
                let mut j = idx.clone();
                j[a] = c;
                acc += w0.get(&j) * dx;
            }
        }
        comps[slot] += acc;
    }
    Form::from_components(n, k, comps)
}

/// `ℒ_X ω = d(X⌟ω) + X⌟dω` (Cartan), both exterior derivatives by central
/// differences of step `h`.
pub fn lie_derivative_cartan<X, W>(chart: &Chart, x: &X, w: &W, p: &[f64], h: f64) -> Result<Form>
where
    X: VectorField + ?Sized,
    W: Fn(&[f64]) -> Form + ?Sized,
{
    chart.check(p, stencil::REACH * h)?;
    let contracted = |q: &[f64]| w(q).interior(x.eval(q).as_slice());
    let first = d_central(&contracted, p, h);
    let second = d_central(w, p, h).interior(x.eval(p).as_slice());
    Ok(first.add(&second))
}

/// `[X, Y]^i = X^j ∂_j Y^i − Y^j ∂_j X^i`.
pub fn lie_bracket<X, Y>(chart: &Chart, x: &X, y: &Y, p: &[f64], h: f64) -> Result<DVector<f64>>
where
    X: VectorField + ?Sized,
    Y: VectorField + ?Sized,
{
    chart.check(p, stencil::REACH * h)?;
    Ok(jacobian(y, p, h) * x.eval(p) - jacobian(x, p, h) * y.eval(p))
}

/// Leibniz self-test: `ℒ_X(α⊗β) − (ℒ_Xα)⊗β − α⊗(ℒ_Xβ)` for 1-form fields,
/// returns the largest component.
pub fn leibniz_residual<X, A, B>(chart: &Chart, x: &X, a: &A, b: &B, p: &[f64], h: f64) -> Result<f64>
where
    X: VectorField + ?Sized,
    A: Fn(&[f64]) -> Form + ?Sized,
    B: Fn(&[f64]) -> Form + ?Sized,
{
    let outer = |q: &[f64]| {
        let (u, v) = (a(q), b(q));
        DVector::from_column_slice(u.components()) * DVector::from_column_slice(v.components()).transpose()
    };
    let lhs = lie_derivative_tensor(chart, x, &outer, p, h)?;
    let la = lie_derivative_form(chart, x, a, p, h)?;
    let lb = lie_derivative_form(chart, x, b, p, h)?;
    let (ua, ub) = (
        DVector::from_column_slice(a(p).components()),
        DVector::from_column_slice(b(p).components()),
    );
    let rhs = DVector::from_column_slice(la.components()) * ub.transpose()
        + ua * DVector::from_column_slice(lb.components()).transpose();
    Ok((lhs - rhs).amax())
}
