use std::sync::Arc;

use nalgebra::DMatrix;

use super::chart::Chart;
use super::linalg;
use super::stencil;
use crate::error::{GeoError, Result};
use crate::tolerance::{SINGULAR_DET, STEP_CURVATURE, STEP_FIRST};

/// How derivatives of a field are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Use the field's analytic hooks. Second partials that have no hook are
    /// obtained by differencing the analytic first partials.
    Analytic,
    /// Fourth-order central differences with step `h`.
    Central { h: f64 },
}

impl Scheme {
    pub fn first_derivative() -> Self {
        Scheme::Central { h: STEP_FIRST }
    }

    pub fn curvature() -> Self {
        Scheme::Central { h: STEP_CURVATURE }
    }

    /// Distance from `p` probed when first derivatives are taken.
    pub fn reach_first(&self) -> f64 {
        match *self {
            Scheme::Analytic => 0.0,
            Scheme::Central { h } => stencil::REACH * h,
        }
    }

    /// Distance from `p` probed when second derivatives are taken.
    pub fn reach_second(&self) -> f64 {
        match *self {
            Scheme::Analytic => stencil::REACH * STEP_CURVATURE,
            Scheme::Central { h } => stencil::REACH * h,
        }
    }
}

/// A pointwise symmetric bilinear form on a chart.
pub trait MetricField: Send + Sync {
    fn chart(&self) -> &Chart;

    fn components(&self, p: &[f64]) -> DMatrix<f64>;

    /// `(num_negative, num_positive)`.
    fn signature(&self) -> (usize, usize);

    /// `+1` when the chart coordinate order is positively oriented.
    fn orientation(&self) -> f64 {
        1.0
    }

    /// `∂_k g` for each coordinate `k`, when known in closed form.
    fn analytic_partials(&self, _p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        None
    }

    /// `∂_k ∂_l g`, when known in closed form.
    fn analytic_second_partials(&self, _p: &[f64]) -> Option<Vec<Vec<DMatrix<f64>>>> {
        None
    }

    fn dim(&self) -> usize {
        self.chart().dim()
    }
}

type MatFn = dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync;
type PartialsFn = dyn Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync;

/// A metric given by closures. Cheap to clone.
#[derive(Clone)]
pub struct ChartMetric {
    chart: Chart,
    signature: (usize, usize),
    orientation: f64,
    components: Arc<MatFn>,
    partials: Option<Arc<PartialsFn>>,
}

impl std::fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChartMetric")
            .field("chart", &self.chart.name)
            .field("signature", &self.signature)
            .field("orientation", &self.orientation)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

impl ChartMetric {
    pub fn new<F>(chart: Chart, signature: (usize, usize), components: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        Self {
            chart,
            signature,
            orientation: 1.0,
            components: Arc::new(components),
            partials: None,
        }
    }

    pub fn with_partials<F>(mut self, partials: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<DMatrix<f64>> + Send + Sync + 'static,
    {
        self.partials = Some(Arc::new(partials));
        self
    }

    pub fn with_orientation(mut self, orientation: f64) -> Self {
        self.orientation = orientation.signum();
        self
    }

    /// The same metric with its analytic hooks removed.
    pub fn without_partials(mut self) -> Self {
        self.partials = None;
        self
    }
}

impl MetricField for ChartMetric {
    fn chart(&self) -> &Chart {
        &self.chart
    }
    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        (self.components)(p)
    }
    fn signature(&self) -> (usize, usize) {
        self.signature
    }
    fn orientation(&self) -> f64 {
        self.orientation
    }
    fn analytic_partials(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        self.partials.as_ref().map(|f| f(p))
    }
}

pub(crate) fn flatten(m: &DMatrix<f64>) -> Vec<f64> {
    m.as_slice().to_vec()
}

pub(crate) fn unflatten(n: usize, v: Vec<f64>) -> DMatrix<f64> {
    DMatrix::from_vec(n, n, v)
}

/// Components at `p` after checking symmetry, nondegeneracy and signature.
pub fn validated_components<M: MetricField + ?Sized>(g: &M, p: &[f64]) -> Result<DMatrix<f64>> {
    g.chart().check(p, 0.0)?;
    let m = g.components(p);
    let n = g.dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(GeoError::Dimension(format!(
            "metric components are {}x{} on a {n}-dimensional chart",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let defect = (&m - m.transpose()).amax();
    if defect > 1e-14 * scale {
        return Err(GeoError::InvalidParameter(format!(
            "metric not symmetric (defect {defect:e})"
        )));
    }
    let det = m.determinant();
    if !(det.abs() > SINGULAR_DET) {
        return Err(GeoError::SingularMetric { det });
    }
    let found = linalg::signature(&m);
    if found != g.signature() {
        return Err(GeoError::SignatureError {
            expected: g.signature(),
            found,
        });
    }
    Ok(m)
}

/// `∂_k g` at `p` for every coordinate `k`.
pub fn metric_partials<M: MetricField + ?Sized>(g: &M, p: &[f64], scheme: Scheme) -> Result<Vec<DMatrix<f64>>> {
    let chart = g.chart();
    chart.check(p, scheme.reach_first())?;
    let n = chart.dim();
    match scheme {
        Scheme::Analytic => g
            .analytic_partials(p)
            .ok_or_else(|| GeoError::MissingDerivative(format!("first partials of metric on `{}`", chart.name))),
        Scheme::Central { h } => {
            let f = |q: &[f64]| flatten(&g.components(q));
            Ok((0..n).map(|k| unflatten(n, stencil::first(&f, p, k, h))).collect())
        }
    }
}

/// `∂_k ∂_l g` at `p`, indexed `[k][l]`.
pub fn metric_second_partials<M: MetricField + ?Sized>(
    g: &M,
    p: &[f64],
    scheme: Scheme,
) -> Result<Vec<Vec<DMatrix<f64>>>> {
    let chart = g.chart();
    chart.check(p, scheme.reach_second())?;
    let n = chart.dim();
    let zero = DMatrix::zeros(n, n);
    let mut out = vec![vec![zero; n]; n];
    match scheme {
        Scheme::Analytic => {
            if let Some(h2) = g.analytic_second_partials(p) {
                return Ok(h2);
            }
            if g.analytic_partials(p).is_none() {
                return Err(GeoError::MissingDerivative(format!(
                    "partials of metric on `{}`",
                    chart.name
                )));
            }
            // difference the analytic first partials
            let f = |q: &[f64]| -> Vec<f64> {
                g.analytic_partials(q)
                    .expect("hook present at p")
                    .iter()
                    .flat_map(|m| m.as_slice().to_vec())
                    .collect()
            };
            for k in 0..n {
                let d = stencil::first(&f, p, k, STEP_CURVATURE);
                for l in 0..n {
                    out[k][l] = unflatten(n, d[l * n * n..(l + 1) * n * n].to_vec());
                }
            }
            // symmetrize in (k, l) to remove the stencil's asymmetric rounding
            for k in 0..n {
                for l in (k + 1)..n {
                    let avg = (&out[k][l] + &out[l][k]) * 0.5;
                    out[k][l] = avg.clone();
                    out[l][k] = avg;
                }
            }
            Ok(out)
        }
        Scheme::Central { h } => {
            let f = |q: &[f64]| flatten(&g.components(q));
            for k in 0..n {
                out[k][k] = unflatten(n, stencil::second_diag(&f, p, k, h));
                for l in (k + 1)..n {
                    let m = unflatten(n, stencil::second_mixed(&f, p, k, l, h));
                    out[k][l] = m.clone();
                    out[l][k] = m;
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere() -> ChartMetric {
        let chart = Chart::new("s2", &["psi", "phi"], &[(0.0, std::f64::consts::PI), (-3.0, 3.0)], 0.1).unwrap();
        ChartMetric::new(chart, (0, 2), |p| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, p[0].sin().powi(2)]))
        })
        .with_partials(|p| {
            let s2 = (2.0 * p[0]).sin();
            vec![
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![0.0, s2])),
                DMatrix::zeros(2, 2),
            ]
        })
    }

    #[test]
    fn analytic_and_central_partials_agree() {
        let g = sphere();
        let p = [0.8, 0.3];
        let a = metric_partials(&g, &p, Scheme::Analytic).unwrap();
        let c = metric_partials(&g, &p, Scheme::first_derivative()).unwrap();
        for k in 0..2 {
            assert!((&a[k] - &c[k]).amax() < 1e-9);
        }
    }

    #[test]
    fn second_partials_both_routes() {
        let g = sphere();
        let p = [0.8, 0.3];
        let a = metric_second_partials(&g, &p, Scheme::Analytic).unwrap();
        let c = metric_second_partials(&g, &p, Scheme::curvature()).unwrap();
        let expect = 2.0 * (1.6f64).cos();
        assert!((a[0][0][(1, 1)] - expect).abs() < 1e-9);
        assert!((c[0][0][(1, 1)] - expect).abs() < 1e-9);
    }

    #[test]
    fn missing_hook_is_an_error() {
        let g = sphere().without_partials();
        assert!(matches!(
            metric_partials(&g, &[0.8, 0.3], Scheme::Analytic),
            Err(GeoError::MissingDerivative(_))
        ));
    }

    #[test]
    fn validation_catches_signature_drift() {
        let chart = Chart::new("line", &["x", "y"], &[(-1.0, 1.0), (-1.0, 1.0)], 0.1).unwrap();
        let g = ChartMetric::new(chart, (0, 2), |p| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, p[0]]))
        });
        assert!(validated_components(&g, &[0.5, 0.0]).is_ok());
        assert!(matches!(
            validated_components(&g, &[-0.5, 0.0]),
            Err(GeoError::SignatureError { .. })
        ));
    }
}
