//! Compatible Lorentzian metrics on `M = S × ℝ` in coordinates
//! `(t, u, x¹, …, x^m)`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::sasaki::SasakiChart;
use crate::error::{GeoError, Result};
use crate::par;
use crate::tensor::chart::Chart;
use crate::tensor::linalg::signature;
use crate::tensor::metric::{MetricField, Scheme};
use crate::tensor::stencil;

/// Smallest admissible `|α|`.
pub const ALPHA_GUARD: f64 = 1e-8;

/// Samples per axis when a profile is scanned over the chart.
const SCAN: usize = 5;

/// `t ↦ (f, f′, f″)`.
pub type Jet1 = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// The functions `σ(t) > 0` and `β̃(t)` of a firmly compatible metric.
#[derive(Clone)]
pub struct FirmProfile {
    pub label: String,
    /// Working `t` interval.
    pub interval: (f64, f64),
    sigma: Jet1,
    beta: Jet1,
}

impl fmt::Debug for FirmProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FirmProfile")
            .field("label", &self.label)
            .field("interval", &self.interval)
            .finish()
    }
}

impl FirmProfile {
    pub fn new<S, B>(label: &str, interval: (f64, f64), sigma: S, beta: B) -> Self
    where
        S: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        B: Fn(f64) -> [f64; 3] + Send + Sync + 'static,
    {
        Self {
            label: label.to_string(),
            interval,
            sigma: Arc::new(sigma),
            beta: Arc::new(beta),
        }
    }

    pub fn constant(sigma: f64, beta: f64, interval: (f64, f64)) -> Self {
        Self::new(
            &format!("constant(sigma={sigma},beta={beta})"),
            interval,
            move |_| [sigma, 0.0, 0.0],
            move |_| [beta, 0.0, 0.0],
        )
    }

    /// `(σ, σ′, σ″)` at `t`.
    pub fn sigma(&self, t: f64) -> [f64; 3] {
        (self.sigma)(t)
    }

    /// `(β̃, β̃′, β̃″)` at `t`.
    pub fn beta(&self, t: f64) -> [f64; 3] {
        (self.beta)(t)
    }
}

/// Frame derivatives of a scalar at a point: the value and its derivatives
/// along `p_o`, each `Ê_i` and `q_o`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub p: f64,
    pub e: Vec<f64>,
    pub q: f64,
}

impl Jet {
    pub fn constant(value: f64, m: usize) -> Self {
        Self {
            value,
            p: 0.0,
            e: vec![0.0; m],
            q: 0.0,
        }
    }

    /// From the coordinate gradient `(∂_t, ∂_u, ∂_{x^i})` and `η`:
    /// `Ê_i = ∂_i − η_i ∂_u`.
    pub fn from_gradient(value: f64, grad: &[f64], eta: &DVector<f64>) -> Self {
        let m = eta.len();
        Self {
            value,
            p: grad[0],
            e: (0..m).map(|i| grad[2 + i] - eta[i] * grad[1]).collect(),
            q: grad[1],
        }
    }
}

type ScalarFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64]) -> Vec<f64> + Send + Sync;

/// A scalar function on `M` with an optional closed-form gradient.
#[derive(Clone)]
pub struct ScalarField {
    f: Arc<ScalarFn>,
    grad: Option<Arc<GradFn>>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.grad.is_some())
            .finish()
    }
}

impl ScalarField {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            f: Arc::new(f),
            grad: None,
        }
    }

    pub fn with_gradient<G>(mut self, g: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c).with_gradient(|p| vec![0.0; p.len()])
    }

    pub fn value(&self, p: &[f64]) -> f64 {
        (self.f)(p)
    }

    pub fn has_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn gradient(&self, p: &[f64], scheme: Scheme) -> Result<Vec<f64>> {
        match scheme {
            Scheme::Analytic => self
                .grad
                .as_ref()
                .map(|g| g(p))
                .ok_or_else(|| GeoError::MissingDerivative("gradient of profile function".into())),
            Scheme::Central { h } => {
                let f = |q: &[f64]| vec![(self.f)(q)];
                Ok((0..p.len()).map(|k| stencil::first(&f, p, k, h)[0]).collect())
            }
        }
    }
}

/// The functions `(σ, α, β, γⁱ)` of a general compatible metric.
#[derive(Debug, Clone)]
pub struct GeneralProfile {
    pub label: String,
    pub interval: (f64, f64),
    pub sigma: ScalarField,
    pub alpha: ScalarField,
    pub beta: ScalarField,
    pub gamma: Vec<ScalarField>,
}

impl GeneralProfile {
    /// The general form of a firm profile: `α = 1/σ`, `β = β̃/σ`, `γ = 0`.
    pub fn from_firm(prof: &FirmProfile, m: usize) -> Self {
        let (a, b, c, d) = (prof.clone(), prof.clone(), prof.clone(), prof.clone());
        let grad_t = |v: f64, p: &[f64]| {
            let mut g = vec![0.0; p.len()];
            g[0] = v;
            g
        };
        let (ga, gb, gc) = (grad_t, grad_t, grad_t);
        let (e, f) = (prof.clone(), prof.clone());
        Self {
            label: format!("general({})", prof.label),
            interval: prof.interval,
            sigma: ScalarField::new(move |p| a.sigma(p[0])[0]).with_gradient(move |p| ga(e.sigma(p[0])[1], p)),
            alpha: ScalarField::new(move |p| 1.0 / b.sigma(p[0])[0]).with_gradient(move |p| {
                let s = f.sigma(p[0]);
                gb(-s[1] / (s[0] * s[0]), p)
            }),
            beta: ScalarField::new(move |p| {
                let s = c.sigma(p[0])[0];
                c.beta(p[0])[0] / s
            })
            .with_gradient(move |p| {
                let s = d.sigma(p[0]);
                let b = d.beta(p[0]);
                gc((b[1] * s[0] - b[0] * s[1]) / (s[0] * s[0]), p)
            }),
            gamma: (0..m).map(|_| ScalarField::constant(0.0)).collect(),
        }
    }
}

/// Shared accessors of the metrics built over a Sasaki chart.
pub trait BundleMetric: MetricField {
    fn sasaki(&self) -> &SasakiChart;

    /// Frame jets of the profile functions at `p`.
    fn jets(&self, p: &[f64], scheme: Scheme) -> Result<ProfileJets>;

    /// Base dimension `m = n − 2`.
    fn base_dim(&self) -> usize {
        self.dim() - 2
    }
}

/// Profile data in the frame `(p_o, Ê_i, q_o)` at one point.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileJets {
    /// `(σ, σ′)` and `(β̃, β̃′)`.
    Firm { sigma: [f64; 2], beta: [f64; 2] },
    General {
        sigma: Jet,
        alpha: Jet,
        beta: Jet,
        gamma: Vec<Jet>,
    },
}

impl ProfileJets {
    /// The general form, `α = 1/σ`, `β = β̃/σ`, `γ = 0`.
    pub fn to_general(&self, m: usize) -> Self {
        match self {
            ProfileJets::Firm { sigma, beta } => {
                let [s, ds] = *sigma;
                let [b, db] = *beta;
                let t_only = |value: f64, p: f64| Jet {
                    value,
                    p,
                    e: vec![0.0; m],
                    q: 0.0,
                };
                ProfileJets::General {
                    sigma: t_only(s, ds),
                    alpha: t_only(1.0 / s, -ds / (s * s)),
                    beta: t_only(b / s, (db * s - b * ds) / (s * s)),
                    gamma: (0..m).map(|_| Jet::constant(0.0, m)).collect(),
                }
            }
            general => general.clone(),
        }
    }
}

/// `π*g_o` with zero `(t, u)` rows, and `θ = (0, 1, η)`, on `M`.
fn lifted_base(s: &SasakiChart, x: &[f64]) -> (DMatrix<f64>, DVector<f64>) {
    let go = s.base.g_o(x);
    let eta = s.base.eta(x);
    let m = go.nrows();
    let mut big = DMatrix::zeros(m + 2, m + 2);
    big.view_mut((2, 2), (m, m)).copy_from(&go);
    let mut theta = DVector::zeros(m + 2);
    theta[1] = 1.0;
    theta.rows_mut(2, m).copy_from(&eta);
    (big, theta)
}

fn e_t(n: usize) -> DVector<f64> {
    DVector::from_fn(n, |i, _| if i == 0 { 1.0 } else { 0.0 })
}

/// `a∨b = ½(a⊗b + b⊗a)`.
fn vee(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    (a * b.transpose() + b * a.transpose()) * 0.5
}

fn total_chart(s: &SasakiChart, interval: (f64, f64), label: &str) -> Result<Chart> {
    let c = s
        .chart()
        .extend_front(&format!("{label} over {}", s.chart().name), &[("t", interval)]);
    let names: Vec<&str> = c.coord_names.iter().map(String::as_str).collect();
    Chart::new(&c.name, &names, &c.bounds, c.margin)
}

/// Scan grid: `SCAN` points per axis over the sample box, `u` fixed at the
/// middle of its interval.
fn scan_points(chart: &Chart) -> Vec<Vec<f64>> {
    let b = chart.sample_box();
    let axes: Vec<Vec<f64>> = b
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            if i == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                par::linspace(lo, hi, SCAN)
            }
        })
        .collect();
    par::cartesian(&axes)
}

/// `g = σ π*g_o + dt∨θ + β̃ θ⊗θ`.
#[derive(Debug, Clone)]
pub struct FirmMetric {
    pub sasaki: SasakiChart,
    pub profile: FirmProfile,
    chart: Chart,
}

/// Builds the firmly compatible metric of `prof` over `s`. Fails with
/// [`GeoError::SignatureError`] if `σ` is not positive along the interval.
pub fn build_lorentz_firm(s: &SasakiChart, prof: &FirmProfile) -> Result<FirmMetric> {
    let chart = total_chart(s, prof.interval, &prof.label)?;
    let metric = FirmMetric {
        sasaki: s.clone(),
        profile: prof.clone(),
        chart,
    };
    let n = metric.dim();
    let (lo, hi) = prof.interval;
    let x0: Vec<f64> = s.chart().sample_box().iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    for t in par::linspace(lo, hi, 1001) {
        let sigma = prof.sigma(t)[0];
        if !(sigma > 0.0) {
            let mut p = vec![t];
            p.extend_from_slice(&x0);
            return Err(GeoError::SignatureError {
                expected: (1, n - 1),
                found: signature(&metric.components(&p)),
            });
        }
    }
    Ok(metric)
}

impl FirmMetric {
    pub fn profile(&self) -> &FirmProfile {
        &self.profile
    }
}

impl MetricField for FirmMetric {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        let (big, theta) = lifted_base(&self.sasaki, &p[2..]);
        let s = self.profile.sigma(p[0])[0];
        let b = self.profile.beta(p[0])[0];
        big * s + vee(&e_t(p.len()), &theta) + &theta * theta.transpose() * b
    }

    fn signature(&self) -> (usize, usize) {
        (1, self.dim() - 1)
    }

    fn analytic_partials(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let n = p.len();
        let x = &p[2..];
        let (big, theta) = lifted_base(&self.sasaki, x);
        let [s, ds, _] = self.profile.sigma(p[0]);
        let [b, db, _] = self.profile.beta(p[0]);
        let dgo = self.sasaki.base.dg_o(x);
        let deta = self.sasaki.base.deta(x);
        let m = n - 2;
        let mut out = Vec::with_capacity(n);
        out.push(big * ds + &theta * theta.transpose() * db);
        out.push(DMatrix::zeros(n, n));
        let et = e_t(n);
        for k in 0..m {
            let mut dth = DVector::zeros(n);
            for i in 0..m {
                dth[2 + i] = deta[(k, i)];
            }
            let mut d = vee(&et, &dth) + (&dth * theta.transpose() + &theta * dth.transpose()) * b;
            let mut block = d.view_mut((2, 2), (m, m));
            block += &dgo[k] * s;
            out.push(d);
        }
        Some(out)
    }
}

impl BundleMetric for FirmMetric {
    fn sasaki(&self) -> &SasakiChart {
        &self.sasaki
    }

    fn jets(&self, p: &[f64], _scheme: Scheme) -> Result<ProfileJets> {
        let s = self.profile.sigma(p[0]);
        let b = self.profile.beta(p[0]);
        Ok(ProfileJets::Firm {
            sigma: [s[0], s[1]],
            beta: [b[0], b[1]],
        })
    }
}

/// `g = σ(π*g_o + θ∨(α dt + γ♭ + βθ))`, `γ♭ = g_o(γ, ·)`.
#[derive(Debug, Clone)]
pub struct GeneralMetric {
    pub sasaki: SasakiChart,
    pub profile: GeneralProfile,
    chart: Chart,
}

/// Builds a general compatible metric. Fails with
/// [`GeoError::SignatureError`] where `|α| < 1e-8` or `σ ≤ 0` on the scan
/// grid, before the metric degenerates.
pub fn build_lorentz_general(s: &SasakiChart, prof: &GeneralProfile) -> Result<GeneralMetric> {
    let m = s.base.real_dim();
    if prof.gamma.len() != m {
        return Err(GeoError::Dimension(format!(
            "{} gamma coefficients over a {m}-dimensional base",
            prof.gamma.len()
        )));
    }
    let chart = total_chart(s, prof.interval, &prof.label)?;
    let metric = GeneralMetric {
        sasaki: s.clone(),
        profile: prof.clone(),
        chart,
    };
    let n = metric.dim();
    for p in scan_points(&metric.chart) {
        let a = prof.alpha.value(&p);
        let sigma = prof.sigma.value(&p);
        if !(a.abs() >= ALPHA_GUARD && sigma > 0.0) {
            let g = metric.components(&p);
            let scale = g.amax().max(1.0);
            let eig = nalgebra::SymmetricEigen::new(g).eigenvalues;
            let neg = eig.iter().filter(|&&l| l < -ALPHA_GUARD * scale).count();
            let pos = eig.iter().filter(|&&l| l > ALPHA_GUARD * scale).count();
            return Err(GeoError::SignatureError {
                expected: (1, n - 1),
                found: (neg, pos),
            });
        }
    }
    Ok(metric)
}

impl GeneralMetric {
    fn gamma_vec(&self, p: &[f64]) -> DVector<f64> {
        DVector::from_iterator(self.profile.gamma.len(), self.profile.gamma.iter().map(|g| g.value(p)))
    }

    /// `γ♭` as a covector on `M`.
    fn gamma_flat(&self, p: &[f64]) -> DVector<f64> {
        let go = self.sasaki.base.g_o(&p[2..]);
        let gl = go * self.gamma_vec(p);
        let mut out = DVector::zeros(p.len());
        out.rows_mut(2, gl.len()).copy_from(&gl);
        out
    }

    fn unscaled(&self, p: &[f64]) -> DMatrix<f64> {
        let (big, theta) = lifted_base(&self.sasaki, &p[2..]);
        let a = self.profile.alpha.value(p);
        let b = self.profile.beta.value(p);
        let w = e_t(p.len()) * a + self.gamma_flat(p) + &theta * b;
        big + vee(&theta, &w)
    }
}

impl MetricField for GeneralMetric {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        self.unscaled(p) * self.profile.sigma.value(p)
    }

    fn signature(&self) -> (usize, usize) {
        (1, self.dim() - 1)
    }

    fn analytic_partials(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        let pr = &self.profile;
        if !(pr.sigma.has_gradient()
            && pr.alpha.has_gradient()
            && pr.beta.has_gradient()
            && pr.gamma.iter().all(ScalarField::has_gradient))
        {
            return None;
        }
        let n = p.len();
        let m = n - 2;
        let x = &p[2..];
        let (_, theta) = lifted_base(&self.sasaki, x);
        let go = self.sasaki.base.g_o(x);
        let dgo = self.sasaki.base.dg_o(x);
        let deta = self.sasaki.base.deta(x);
        let sigma = pr.sigma.value(p);
        let a = pr.alpha.value(p);
        let b = pr.beta.value(p);
        let gam = self.gamma_vec(p);
        let gs = pr.sigma.gradient(p, Scheme::Analytic).ok()?;
        let ga = pr.alpha.gradient(p, Scheme::Analytic).ok()?;
        let gb = pr.beta.gradient(p, Scheme::Analytic).ok()?;
        let gg: Vec<Vec<f64>> = pr
            .gamma
            .iter()
            .map(|g| g.gradient(p, Scheme::Analytic))
            .collect::<Result<_>>()
            .ok()?;
        let base_part = self.unscaled(p);
        let et = e_t(n);
        let gl = &go * &gam;
        let mut gflat = DVector::zeros(n);
        gflat.rows_mut(2, m).copy_from(&gl);
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            // ∂_k of each ingredient
            let mut dth = DVector::zeros(n);
            let mut dbig = DMatrix::zeros(n, n);
            let mut dgl = DVector::zeros(m);
            let dgam = DVector::from_iterator(m, gg.iter().map(|g| g[k]));
            if k >= 2 {
                for i in 0..m {
                    dth[2 + i] = deta[(k - 2, i)];
                }
                dbig.view_mut((2, 2), (m, m)).copy_from(&dgo[k - 2]);
                dgl += &dgo[k - 2] * &gam;
            }
            dgl += &go * dgam;
            let mut dgflat = DVector::zeros(n);
            dgflat.rows_mut(2, m).copy_from(&dgl);
            let w = &et * a + &gflat + &theta * b;
            let dw = &et * ga[k] + dgflat + &theta * gb[k] + &dth * b;
            let d_unscaled = dbig + vee(&dth, &w) + vee(&theta, &dw);
            out.push(&base_part * gs[k] + d_unscaled * sigma);
        }
        Some(out)
    }
}

impl BundleMetric for GeneralMetric {
    fn sasaki(&self) -> &SasakiChart {
        &self.sasaki
    }

    fn jets(&self, p: &[f64], scheme: Scheme) -> Result<ProfileJets> {
        let eta = self.sasaki.base.eta(&p[2..]);
        let jet =
            |f: &ScalarField| -> Result<Jet> { Ok(Jet::from_gradient(f.value(p), &f.gradient(p, scheme)?, &eta)) };
        Ok(ProfileJets::General {
            sigma: jet(&self.profile.sigma)?,
            alpha: jet(&self.profile.alpha)?,
            beta: jet(&self.profile.beta)?,
            gamma: self.profile.gamma.iter().map(jet).collect::<Result<_>>()?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::sasaki::build_sasaki;
    use crate::kahler::{make_base, BaseKind};
    use crate::tensor::metric::metric_partials;

    fn sasaki(kind: BaseKind) -> SasakiChart {
        let l0 = if kind == BaseKind::Torus { 0.0 } else { 1.0 };
        build_sasaki(make_base(kind, l0).unwrap()).unwrap()
    }

    fn taub_nut_like() -> FirmProfile {
        // σ = t²/4 + 1/4, β̃ = (1 − t²)/(1 + t²)
        FirmProfile::new(
            "tn",
            (0.3, 2.5),
            |t| [t * t / 4.0 + 0.25, t / 2.0, 0.5],
            |t| {
                let d = 1.0 + t * t;
                [
                    (1.0 - t * t) / d,
                    -4.0 * t / (d * d),
                    (12.0 * t * t - 4.0) / (d * d * d),
                ]
            },
        )
    }

    #[test]
    fn flat_profile_components() {
        let s = sasaki(BaseKind::Torus);
        let g = build_lorentz_firm(&s, &FirmProfile::constant(1.0, 0.0, (-1.0, 1.0))).unwrap();
        let c = g.components(&[0.0, 0.3, 0.5, -0.2]);
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.5, 0.0, 0.25,
            0.5, 0.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.25, 0.0, 0.0, 1.0,
        ]);
        assert_eq!(c, expected);
        assert_eq!(signature(&c), (1, 3));
        assert!((c.determinant() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn taub_nut_instance_at_t_one() {
        let s = sasaki(BaseKind::S2Spherical);
        let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
        let (psi, phi) = (1.0f64, 0.4);
        let c = g.components(&[1.0, 0.0, psi, phi]);
        // σ(1) = 1/2, β̃(1) = 0
        #[rustfmt::skip]
        let expected = DMatrix::from_row_slice(4, 4, &[
            0.0, 0.5, 0.0, 0.5 * psi.cos(),
            0.5, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.5, 0.0,
            0.5 * psi.cos(), 0.0, 0.0, 0.5 * psi.sin().powi(2),
        ]);
        assert!((&c - expected).amax() < 1e-15);
        let eig = nalgebra::SymmetricEigen::new(c).eigenvalues;
        assert_eq!(eig.iter().filter(|&&l| l < 0.0).count(), 1);
        assert_eq!(eig.iter().filter(|&&l| l > 0.0).count(), 3);
    }

    #[test]
    fn p_o_is_null_and_pairs_with_theta() {
        let s = sasaki(BaseKind::S2Spherical);
        let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
        for p in [[0.5, 0.1, 0.7, 2.0], [2.0, -1.0, 2.5, -3.0]] {
            let c = g.components(&p);
            assert_eq!(c[(0, 0)], 0.0);
            let th = s.theta(&p[1..]);
            for k in 1..4 {
                assert_eq!(c[(0, k)], 0.5 * th[k - 1]);
            }
        }
    }

    #[test]
    fn nonpositive_sigma_is_rejected() {
        let s = sasaki(BaseKind::Torus);
        let prof = FirmProfile::new("bad", (-1.0, 1.0), |t| [t, 1.0, 0.0], |_| [0.0; 3]);
        assert!(matches!(
            build_lorentz_firm(&s, &prof),
            Err(GeoError::SignatureError { .. })
        ));
    }

    #[test]
    fn firm_partials_match_differences() {
        for kind in [BaseKind::S2Spherical, BaseKind::S2Stereographic, BaseKind::s2xs2()] {
            let s = sasaki(kind);
            let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
            let p: Vec<f64> = g
                .chart()
                .sample_box()
                .iter()
                .map(|&(lo, hi)| 0.35 * lo + 0.65 * hi)
                .collect();
            let a = metric_partials(&g, &p, Scheme::Analytic).unwrap();
            let c = metric_partials(&g, &p, Scheme::first_derivative()).unwrap();
            for (x, y) in a.iter().zip(&c) {
                assert!((x - y).amax() < 1e-8);
            }
        }
    }

    #[test]
    fn general_reduces_to_firm() {
        let s = sasaki(BaseKind::S2Spherical);
        let prof = taub_nut_like();
        let firm = build_lorentz_firm(&s, &prof).unwrap();
        let gen = build_lorentz_general(&s, &GeneralProfile::from_firm(&prof, 2)).unwrap();
        for p in [[0.5, 0.1, 0.7, 2.0], [2.0, -1.0, 2.5, -3.0], [1.3, 0.0, 1.5, 0.0]] {
            assert!((firm.components(&p) - gen.components(&p)).amax() < 1e-14);
            let a = firm.analytic_partials(&p).unwrap();
            let b = gen.analytic_partials(&p).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).amax() < 1e-13);
            }
        }
    }

    fn gamma_profile() -> GeneralProfile {
        GeneralProfile {
            label: "gamma".into(),
            interval: (-1.0, 1.0),
            sigma: ScalarField::new(|p| 1.0 + 0.1 * p[0] * p[0] + 0.05 * p[2] * p[3])
                .with_gradient(|p| vec![0.2 * p[0], 0.0, 0.05 * p[3], 0.05 * p[2]]),
            alpha: ScalarField::new(|p| 0.5 + 0.1 * p[0].sin() + 0.03 * p[2] + 0.02 * p[1])
                .with_gradient(|p| vec![0.1 * p[0].cos(), 0.02, 0.03, 0.0]),
            beta: ScalarField::new(|p| 0.3 * p[0] + 0.1 * p[3] * p[3] + 0.05 * p[1] * p[2])
                .with_gradient(|p| vec![0.3, 0.05 * p[2], 0.05 * p[1], 0.2 * p[3]]),
            gamma: vec![
                ScalarField::new(|p| 0.2 * p[0] + 0.1 * p[3] + 0.03 * p[1])
                    .with_gradient(|_| vec![0.2, 0.03, 0.0, 0.1]),
                ScalarField::constant(-0.15),
            ],
        }
    }

    #[test]
    fn general_partials_match_differences() {
        let s = sasaki(BaseKind::Torus);
        let g = build_lorentz_general(&s, &gamma_profile()).unwrap();
        let p = [0.4, 0.3, 0.2, -0.5];
        let a = metric_partials(&g, &p, Scheme::Analytic).unwrap();
        let c = metric_partials(&g, &p, Scheme::first_derivative()).unwrap();
        for (x, y) in a.iter().zip(&c) {
            assert!((x - y).amax() < 1e-9);
        }
    }

    #[test]
    fn gamma_keeps_p_o_null_and_lorentzian() {
        let s = sasaki(BaseKind::Torus);
        let g = build_lorentz_general(&s, &gamma_profile()).unwrap();
        for p in scan_points(g.chart()) {
            let c = crate::tensor::metric::validated_components(&g, &p).unwrap();
            assert_eq!(c[(0, 0)], 0.0);
        }
    }

    #[test]
    fn small_alpha_is_guarded() {
        let s = sasaki(BaseKind::Torus);
        let mut prof = gamma_profile();
        prof.alpha = ScalarField::constant(1e-9);
        assert!(matches!(
            build_lorentz_general(&s, &prof),
            Err(GeoError::SignatureError { .. })
        ));
    }
}
