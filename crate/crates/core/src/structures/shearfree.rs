//! Shearfree decompositions `ℒ_p g = f g + p♭∨η`, geodesic factors and the
//! rescaling to a standard pair along a fiber.

use std::cell::RefCell;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeoError, Result};
use crate::ode::rk4;
use crate::tensor::chart::Chart;
use crate::tensor::connection::christoffel_coordinate;
use crate::tensor::lie::{lie_derivative_metric, VectorField};
use crate::tensor::linalg::null_space;
use crate::tensor::metric::{MetricField, Scheme};
use crate::tensor::stencil;
use crate::tolerance::{NULL_SPACE_REL, STEP_FIRST};

/// Threshold on `|g(p, p)|` for a null vector.
pub const NULL_TOL: f64 = 1e-10;
/// Fit residual above which a field counts as not shearfree.
pub const DECOMPOSITION_TOL: f64 = 1e-4;
/// RK4 step along the fiber.
pub const FIBER_STEP: f64 = 1e-3;
/// Anchor of the fiber integration.
pub const ANCHOR: f64 = 1.0;

/// `f`, `η` and the fit residual of `ℒ_p g = f g + p♭∨η` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearfreeDecomposition {
    pub f: f64,
    /// Covector components of `η`.
    pub eta: DVector<f64>,
    /// Largest coordinate component of `ℒ_p g − f g − p♭∨η`.
    pub residual: f64,
}

impl ShearfreeDecomposition {
    /// `η(v)`.
    pub fn eta_on(&self, v: &DVector<f64>) -> f64 {
        self.eta.dot(v)
    }
}

/// `α∨β = ½(α⊗β + β⊗α)`.
pub fn sym_product(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    (a * b.transpose() + b * a.transpose()) * 0.5
}

/// Fits `f` and `η` in `ℒ_p g = f g + p♭∨η` at `x`.
///
/// On `W = ker p♭` the equation reads `ℒ_p g = f g`, which fixes `f`; pairing
/// with the transversal `q` (the components of `p♭` read as a vector) then
/// fixes `η` exactly.
pub fn shearfree_decompose<M, P>(g: &M, p: &P, x: &[f64], scheme: Scheme) -> Result<ShearfreeDecomposition>
where
    M: MetricField + ?Sized,
    P: VectorField + ?Sized,
{
    let gx = g.components(x);
    let pv = p.eval(x);
    let norm = pv.dot(&(&gx * &pv));
    if pv.amax() == 0.0 || norm.abs() > NULL_TOL {
        return Err(GeoError::NotNull { value: norm });
    }
    let lie = lie_derivative_metric(g, p, x, scheme)?;
    decompose_from(&gx, &pv, &lie)
}

/// The algebraic part of [`shearfree_decompose`], given `g`, `p` and `ℒ_p g`
/// at a point.
pub fn decompose_from(gx: &DMatrix<f64>, pv: &DVector<f64>, lie: &DMatrix<f64>) -> Result<ShearfreeDecomposition> {
    let n = gx.nrows();
    let flat = gx * pv;
    let w = null_space(&DMatrix::from_row_slice(1, n, flat.as_slice()), NULL_SPACE_REL);
    if w.len() != n - 1 {
        return Err(GeoError::RankDeficientBasis {
            rank: w.len(),
            expected: n - 1,
        });
    }
    let wm = DMatrix::from_columns(&w);
    let lw = wm.transpose() * lie * &wm;
    let gw = wm.transpose() * gx * &wm;
    let denom = gw.norm_squared();
    if denom == 0.0 {
        return Err(GeoError::NoDecomposition {
            residual: f64::INFINITY,
        });
    }
    let f = lw.dot(&gw) / denom;
    let rest = lie - gx * f;
    let q = flat.clone();
    let pq = flat.dot(&q);
    let mut values = DVector::zeros(n);
    for (a, wa) in w.iter().enumerate() {
        values[a] = 2.0 * q.dot(&(&rest * wa)) / pq;
    }
    values[n - 1] = q.dot(&(&rest * &q)) / pq;
    let mut frame = wm.clone().insert_column(n - 1, 0.0);
    frame.set_column(n - 1, &q);
    let eta = frame.transpose().lu().solve(&values).ok_or(GeoError::NoDecomposition {
        residual: f64::INFINITY,
    })?;
    let residual = (rest - sym_product(&flat, &eta)).amax();
    if residual > DECOMPOSITION_TOL {
        return Err(GeoError::NoDecomposition { residual });
    }
    Ok(ShearfreeDecomposition { f, eta, residual })
}

/// Geodesic factor `λ = f + ½η(p)` and the residual
/// `max_e |g(∇_p p − λp, e)|` over coordinate vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicFactor {
    pub lambda: f64,
    pub residual: f64,
}

/// `∇_p p` at `x` from the coordinate connection.
pub fn self_acceleration<M, P>(g: &M, p: &P, x: &[f64], scheme: Scheme) -> Result<DVector<f64>>
where
    M: MetricField + ?Sized,
    P: VectorField + ?Sized,
{
    let gamma = christoffel_coordinate(g, x, scheme)?;
    let pv = p.eval(x);
    let h = match scheme {
        Scheme::Analytic => STEP_FIRST,
        Scheme::Central { h } => h,
    };
    let comps = |q: &[f64]| p.eval(q).as_slice().to_vec();
    let dp = stencil::directional(&comps, x, pv.as_slice(), h);
    Ok(DVector::from_vec(gamma.covariant(pv.as_slice(), pv.as_slice(), &dp)))
}

pub fn geodesic_factor<M, P>(g: &M, p: &P, x: &[f64], scheme: Scheme) -> Result<GeodesicFactor>
where
    M: MetricField + ?Sized,
    P: VectorField + ?Sized,
{
    let dec = shearfree_decompose(g, p, x, scheme)?;
    let pv = p.eval(x);
    let lambda = dec.f + 0.5 * dec.eta_on(&pv);
    let acc = self_acceleration(g, p, x, scheme)?;
    let residual = (g.components(x) * (acc - &pv * lambda)).amax();
    Ok(GeodesicFactor { lambda, residual })
}

/// One node of a standardization along a fiber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberNode {
    pub t: f64,
    pub sigma_tilde: f64,
    pub tau: f64,
    pub f: f64,
    pub eta_p: f64,
}

/// Rescaling functions `σ̃(t)`, `τ(t)` on a fiber interval.
///
/// They solve `p(σ̃) = −σ̃ f` and `p(τ) = −½ τ η(p)` with `σ̃ = τ = 1` at the
/// anchor, so that `(σ̃ g, τ p)` is geodesic with vanishing conformal factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardization {
    pub nodes: Vec<FiberNode>,
}

impl Standardization {
    fn locate(&self, t: f64) -> usize {
        let i = self.nodes.partition_point(|n| n.t <= t);
        i.clamp(1, self.nodes.len() - 1) - 1
    }

    fn hermite(&self, t: f64, value: impl Fn(&FiberNode) -> f64, slope: impl Fn(&FiberNode) -> f64) -> f64 {
        if self.nodes.len() == 1 {
            return value(&self.nodes[0]);
        }
        let i = self.locate(t);
        let (a, b) = (&self.nodes[i], &self.nodes[i + 1]);
        let h = b.t - a.t;
        let s = (t - a.t) / h;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * value(a)
            + (s3 - 2.0 * s2 + s) * h * slope(a)
            + (-2.0 * s3 + 3.0 * s2) * value(b)
            + (s3 - s2) * h * slope(b)
    }

    /// Cubic Hermite interpolant of `σ̃`, using the ODE for the slopes.
    pub fn sigma_tilde(&self, t: f64) -> f64 {
        self.hermite(t, |n| n.sigma_tilde, |n| -n.sigma_tilde * n.f)
    }

    pub fn tau(&self, t: f64) -> f64 {
        self.hermite(t, |n| n.tau, |n| -0.5 * n.tau * n.eta_p)
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.nodes[0].t, self.nodes[self.nodes.len() - 1].t)
    }
}

/// Integrates the standardization ODEs for given `f(t)` and `η(p)(t)` on
/// `[a, b]`, anchored at `t = 1` (clamped into the interval).
pub fn integrate_standardization<F, E>(f: F, eta_p: E, interval: (f64, f64)) -> Result<Standardization>
where
    F: Fn(f64) -> Result<f64>,
    E: Fn(f64) -> Result<f64>,
{
    let (a, b) = interval;
    if !(b > a) {
        return Err(GeoError::InvalidParameter(format!("empty fiber interval [{a}, {b}]")));
    }
    let anchor = ANCHOR.clamp(a, b);
    let failure: RefCell<Option<GeoError>> = RefCell::new(None);
    let eval = |t: f64| -> (f64, f64) {
        match (f(t), eta_p(t)) {
            (Ok(x), Ok(y)) => (x, y),
            (Err(e), _) | (_, Err(e)) => {
                failure.borrow_mut().get_or_insert(e);
                (f64::NAN, f64::NAN)
            }
        }
    };
    let rhs = |t: f64, y: &[f64]| {
        let (fv, ev) = eval(t);
        vec![-y[0] * fv, -0.5 * y[1] * ev]
    };
    let mut nodes = Vec::new();
    for end in [a, b] {
        let path = rk4(rhs, anchor, &[1.0, 1.0], end, FIBER_STEP);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        for (t, y) in path? {
            let (fv, ev) = eval(t);
            nodes.push(FiberNode {
                t,
                sigma_tilde: y[0],
                tau: y[1],
                f: fv,
                eta_p: ev,
            });
        }
    }
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    nodes.sort_by(|x, y| x.t.total_cmp(&y.t));
    nodes.dedup_by(|x, y| x.t == y.t);
    Ok(Standardization { nodes })
}

/// Runs [`shearfree_decompose`] along the fiber through `x` (coordinate
/// `t_slot` varies over `interval`) and integrates the rescaling.
pub fn standardize_pair<M, P>(
    g: &M,
    p: &P,
    x: &[f64],
    t_slot: usize,
    interval: (f64, f64),
    scheme: Scheme,
) -> Result<Standardization>
where
    M: MetricField + ?Sized,
    P: VectorField + ?Sized,
{
    let at = |t: f64| -> Vec<f64> {
        let mut q = x.to_vec();
        q[t_slot] = t;
        q
    };
    let dec = |t: f64| -> Result<(f64, f64)> {
        let q = at(t);
        let d = shearfree_decompose(g, p, &q, scheme)?;
        Ok((d.f, d.eta_on(&p.eval(&q))))
    };
    integrate_standardization(|t| dec(t).map(|v| v.0), |t| dec(t).map(|v| v.1), interval)
}

/// `σ̃(t) g`, on the same chart.
pub struct RescaledMetric<'a, M: ?Sized> {
    pub g: &'a M,
    pub pair: &'a Standardization,
    pub t_slot: usize,
}

impl<M: MetricField + ?Sized> MetricField for RescaledMetric<'_, M> {
    fn chart(&self) -> &Chart {
        self.g.chart()
    }
    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        self.g.components(p) * self.pair.sigma_tilde(p[self.t_slot])
    }
    fn signature(&self) -> (usize, usize) {
        self.g.signature()
    }
    fn orientation(&self) -> f64 {
        self.g.orientation()
    }
}

/// `τ(t) p`.
pub struct RescaledField<'a, P: ?Sized> {
    pub p: &'a P,
    pub pair: &'a Standardization,
    pub t_slot: usize,
}

impl<P: VectorField + ?Sized> VectorField for RescaledField<'_, P> {
    fn eval(&self, q: &[f64]) -> DVector<f64> {
        self.p.eval(q) * self.pair.tau(q[self.t_slot])
    }
}

/// `(|λ|, |f|)` of the rescaled pair at `x`, by central differences.
pub fn standard_pair_defects<M, P>(g: &M, p: &P, pair: &Standardization, x: &[f64], t_slot: usize) -> Result<(f64, f64)>
where
    M: MetricField + ?Sized,
    P: VectorField + ?Sized,
{
    let gm = RescaledMetric { g, pair, t_slot };
    let pm = RescaledField { p, pair, t_slot };
    let scheme = Scheme::first_derivative();
    let geo = geodesic_factor(&gm, &pm, x, scheme)?;
    let dec = shearfree_decompose(&gm, &pm, x, scheme)?;
    Ok((geo.lambda.abs().max(geo.residual), dec.f.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::lie::CoordinateField;
    use crate::tensor::metric::ChartMetric;

    /// `σ(t)(dx² + dy²) + dt∨du + β(t) du²` on `(t, u, x, y)`.
    fn plane_wave(sigma: fn(f64) -> f64, beta: fn(f64) -> f64) -> ChartMetric {
        let chart = Chart::new(
            "tuxy",
            &["t", "u", "x", "y"],
            &[(0.0, 3.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)],
            0.1,
        )
        .unwrap();
        ChartMetric::new(chart, (1, 3), move |p| {
            let mut g = DMatrix::zeros(4, 4);
            g[(0, 1)] = 0.5;
            g[(1, 0)] = 0.5;
            g[(1, 1)] = beta(p[0]);
            g[(2, 2)] = sigma(p[0]);
            g[(3, 3)] = sigma(p[0]);
            g
        })
    }

    #[test]
    fn killing_null_field() {
        let g = plane_wave(|_| 2.0, |_| 0.3);
        let p = CoordinateField { n: 4, k: 0 };
        let d = shearfree_decompose(&g, &p, &[1.0, 0.0, 0.2, 0.1], Scheme::first_derivative()).unwrap();
        assert_eq!(d.f, 0.0);
        assert!(d.eta.amax() < 1e-12 && d.residual < 1e-10);
        let geo = geodesic_factor(&g, &p, &[1.0, 0.0, 0.2, 0.1], Scheme::first_derivative()).unwrap();
        assert_eq!(geo.lambda, 0.0);
    }

    #[test]
    fn conformal_factor_is_log_derivative() {
        let g = plane_wave(|t| 1.0 + t * t, |t| t);
        let p = CoordinateField { n: 4, k: 0 };
        let d = shearfree_decompose(&g, &p, &[1.0, 0.0, 0.2, 0.1], Scheme::first_derivative()).unwrap();
        assert!((d.f - 1.0).abs() < 1e-9);
        assert!(d.residual < 1e-8);
        let geo = geodesic_factor(&g, &p, &[1.0, 0.0, 0.2, 0.1], Scheme::first_derivative()).unwrap();
        assert!(geo.lambda.abs() < 1e-9 && geo.residual < 1e-7);
    }

    #[test]
    fn spacelike_field_rejected() {
        let g = plane_wave(|_| 1.0, |_| 0.0);
        let x = CoordinateField { n: 4, k: 2 };
        assert!(matches!(
            shearfree_decompose(&g, &x, &[1.0, 0.0, 0.2, 0.1], Scheme::first_derivative()),
            Err(GeoError::NotNull { .. })
        ));
    }

    #[test]
    fn trivial_and_exponential_standardization() {
        let s = integrate_standardization(|_| Ok(0.0), |_| Ok(0.0), (0.5, 2.0)).unwrap();
        assert!(s.nodes.iter().all(|n| n.sigma_tilde == 1.0 && n.tau == 1.0));
        let s = integrate_standardization(|_| Ok(1.0), |_| Ok(0.0), (0.5, 2.0)).unwrap();
        for t in [0.5, 0.77, 1.0, 1.5, 2.0] {
            assert!((s.sigma_tilde(t) - (-(t - 1.0f64)).exp()).abs() < 1e-10);
            assert!((s.tau(t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn standardized_pair_is_geodesic_and_distinguished() {
        let g = plane_wave(|t| 1.0 + t * t, |t| t);
        let p = CoordinateField { n: 4, k: 0 };
        let x = [1.0, 0.0, 0.2, 0.1];
        let pair = standardize_pair(&g, &p, &x, 0, (0.5, 2.0), Scheme::first_derivative()).unwrap();
        for t in [0.6, 1.3, 1.9] {
            assert!((pair.sigma_tilde(t) - 2.0 / (1.0 + t * t)).abs() < 1e-9);
            let (lambda, f) = standard_pair_defects(&g, &p, &pair, &[t, 0.0, 0.2, 0.1], 0).unwrap();
            assert!(lambda < 1e-6 && f < 1e-6, "{lambda} {f}");
        }
    }
}
