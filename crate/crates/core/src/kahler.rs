//! Catalog of Kähler base manifolds with an explicit connection primitive
//! `η` (`dη = ω`) on a single chart.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeoError, Result};
use crate::par;
use crate::report::{Check, Report};
use crate::tensor::chart::Chart;
use crate::tensor::connection::{christoffel_coordinate, curvature_coordinate};
use crate::tensor::forms::{exterior_derivative, ChartForm, Form};
use crate::tensor::linalg::invert_metric;
use crate::tensor::metric::{flatten, unflatten, MetricField, Scheme};
use crate::tensor::stencil;
use crate::tolerance::{CURVATURE, EXACT, FIRST_DERIVATIVE};

/// Base manifolds known to the catalog.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseKind {
    /// Round sphere in `(ψ, φ)`.
    S2Spherical,
    /// Round sphere in stereographic `(x, y)`.
    S2Stereographic,
    /// Flat torus in `(x, y)`.
    Torus,
    /// Poincaré disk of curvature `Λ₀ < 0` in `(x, y)`.
    HyperbolicDisk,
    /// Sphere with the `ψ` direction stretched by `1 + ε cos ψ`: Kähler but
    /// not Einstein.
    PerturbedS2 {
        eps: f64,
    },
    Product(Box<BaseKind>, Box<BaseKind>),
}

impl BaseKind {
    pub fn s2xs2() -> Self {
        BaseKind::Product(Box::new(BaseKind::S2Spherical), Box::new(BaseKind::S2Spherical))
    }

    pub fn real_dim(&self) -> usize {
        match self {
            BaseKind::Product(a, b) => a.real_dim() + b.real_dim(),
            _ => 2,
        }
    }

    fn check_lambda0(&self, lambda0: f64) -> Result<()> {
        let ok = match self {
            BaseKind::S2Spherical | BaseKind::S2Stereographic | BaseKind::PerturbedS2 { .. } => lambda0 > 0.0,
            BaseKind::Torus => lambda0 == 0.0,
            BaseKind::HyperbolicDisk => lambda0 < 0.0,
            BaseKind::Product(a, b) => {
                a.check_lambda0(lambda0)?;
                b.check_lambda0(lambda0)?;
                true
            }
        };
        if ok && lambda0.is_finite() {
            Ok(())
        } else {
            Err(GeoError::BadCurvatureSign {
                kind: self.to_string(),
                lambda0,
            })
        }
    }

    fn chart(&self) -> Chart {
        let c = match self {
            BaseKind::S2Spherical | BaseKind::PerturbedS2 { .. } => {
                Chart::new(&self.to_string(), &["psi", "phi"], &[(0.0, PI), (-PI, PI)], 0.1)
            }
            BaseKind::S2Stereographic => Chart::new(&self.to_string(), &["x", "y"], &[(-7.0, 7.0); 2], 0.1),
            BaseKind::Torus => Chart::new(&self.to_string(), &["x", "y"], &[(-1.5, 1.5); 2], 0.1),
            BaseKind::HyperbolicDisk => Chart::new(&self.to_string(), &["x", "y"], &[(-0.6, 0.6); 2], 0.05),
            BaseKind::Product(a, b) => return a.chart().product(&self.to_string(), &b.chart()),
        };
        c.expect("catalog charts are well formed")
    }

    /// Whether the chart coordinates pair up into holomorphic coordinates.
    pub fn has_holomorphic_chart(&self) -> bool {
        match self {
            BaseKind::S2Stereographic | BaseKind::Torus | BaseKind::HyperbolicDisk => true,
            BaseKind::S2Spherical | BaseKind::PerturbedS2 { .. } => false,
            BaseKind::Product(a, b) => a.has_holomorphic_chart() && b.has_holomorphic_chart(),
        }
    }
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseKind::S2Spherical => write!(f, "s2-spherical"),
            BaseKind::S2Stereographic => write!(f, "s2-stereographic"),
            BaseKind::Torus => write!(f, "torus"),
            BaseKind::HyperbolicDisk => write!(f, "hyperbolic-disk"),
            BaseKind::PerturbedS2 { eps } => write!(f, "perturbed-s2({eps})"),
            BaseKind::Product(a, b) => write!(f, "product({a},{b})"),
        }
    }
}

impl FromStr for BaseKind {
    type Err = String;

    /// Accepts the display names plus the short forms `s2`, `s2-stereo`,
    /// `hyperbolic`, `s2xs2`, `perturbed-s2` (ε = 0.2) and `product(a,b)`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        match s {
            "s2" | "s2-spherical" => return Ok(BaseKind::S2Spherical),
            "s2-stereo" | "s2-stereographic" => return Ok(BaseKind::S2Stereographic),
            "torus" => return Ok(BaseKind::Torus),
            "hyperbolic" | "hyperbolic-disk" => return Ok(BaseKind::HyperbolicDisk),
            "s2xs2" => return Ok(BaseKind::s2xs2()),
            "perturbed-s2" => return Ok(BaseKind::PerturbedS2 { eps: 0.2 }),
            _ => {}
        }
        if let Some(inner) = s.strip_prefix("perturbed-s2(").and_then(|r| r.strip_suffix(')')) {
            let eps = inner
                .parse::<f64>()
                .map_err(|e| format!("bad epsilon `{inner}`: {e}"))?;
            return Ok(BaseKind::PerturbedS2 { eps });
        }
        if let Some(inner) = s.strip_prefix("product(").and_then(|r| r.strip_suffix(')')) {
            // split at the top-level comma
            let mut depth = 0;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    ',' if depth == 0 => {
                        let a = inner[..i].parse()?;
                        let b = inner[i + 1..].parse()?;
                        return Ok(BaseKind::Product(Box::new(a), Box::new(b)));
                    }
                    _ => {}
                }
            }
        }
        Err(format!(
            "unknown base `{s}` (s2, s2-stereo, torus, hyperbolic, s2xs2, perturbed-s2, product(a,b))"
        ))
    }
}

/// Metric, its partials, `η` and `∂η` at a point.
struct Local {
    g: DMatrix<f64>,
    dg: Vec<DMatrix<f64>>,
    eta: DVector<f64>,
    /// `deta[(k, i)] = ∂_k η_i`.
    deta: DMatrix<f64>,
}

fn diag2(a: f64, b: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b])
}

/// Conformally flat disk data: `g = a(r) I`, `η = c(r)(x dy − y dx)`.
fn conformal_disk(x: f64, y: f64, a: f64, da_dr2: f64, c: f64, dc_dr2: f64) -> Local {
    let eta = DVector::from_vec(vec![-c * y, c * x]);
    // ∂_k c = 2 x_k dc/dr²
    let (cx, cy) = (2.0 * x * dc_dr2, 2.0 * y * dc_dr2);
    let deta = DMatrix::from_row_slice(2, 2, &[-cx * y, c + cx * x, -c - cy * y, cy * x]);
    Local {
        g: diag2(a, a),
        dg: vec![
            diag2(2.0 * x * da_dr2, 2.0 * x * da_dr2),
            diag2(2.0 * y * da_dr2, 2.0 * y * da_dr2),
        ],
        eta,
        deta,
    }
}

fn local(kind: &BaseKind, lambda0: f64, x: &[f64]) -> Local {
    match kind {
        BaseKind::S2Spherical => local(&BaseKind::PerturbedS2 { eps: 0.0 }, lambda0, x),
        BaseKind::PerturbedS2 { eps } => {
            let (s, c) = x[0].sin_cos();
            let stretch = 1.0 + eps * c;
            let l = 1.0 / lambda0;
            Local {
                g: diag2(stretch * stretch * l, s * s * l),
                dg: vec![
                    diag2(-2.0 * stretch * eps * s * l, 2.0 * s * c * l),
                    DMatrix::zeros(2, 2),
                ],
                eta: DVector::from_vec(vec![0.0, (c + 0.5 * eps * c * c) * l]),
                deta: DMatrix::from_row_slice(2, 2, &[0.0, -(s + eps * c * s) * l, 0.0, 0.0]),
            }
        }
        BaseKind::S2Stereographic => {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let d = 1.0 + r2;
            conformal_disk(
                x[0],
                x[1],
                4.0 / (lambda0 * d * d),
                -8.0 / (lambda0 * d * d * d),
                2.0 / (lambda0 * d),
                -2.0 / (lambda0 * d * d),
            )
        }
        BaseKind::HyperbolicDisk => {
            let kappa = -lambda0;
            let r2 = x[0] * x[0] + x[1] * x[1];
            let d = 1.0 - r2;
            conformal_disk(
                x[0],
                x[1],
                4.0 / (kappa * d * d),
                8.0 / (kappa * d * d * d),
                2.0 / (kappa * d),
                2.0 / (kappa * d * d),
            )
        }
        BaseKind::Torus => Local {
            g: DMatrix::identity(2, 2),
            dg: vec![DMatrix::zeros(2, 2); 2],
            eta: DVector::from_vec(vec![0.0, x[0]]),
            deta: DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]),
        },
        BaseKind::Product(a, b) => {
            let (na, nb) = (a.real_dim(), b.real_dim());
            let n = na + nb;
            let la = local(a, lambda0, &x[..na]);
            let lb = local(b, lambda0, &x[na..]);
            let mut g = DMatrix::zeros(n, n);
            g.view_mut((0, 0), (na, na)).copy_from(&la.g);
            g.view_mut((na, na), (nb, nb)).copy_from(&lb.g);
            let mut dg = vec![DMatrix::zeros(n, n); n];
            for k in 0..na {
                dg[k].view_mut((0, 0), (na, na)).copy_from(&la.dg[k]);
            }
            for k in 0..nb {
                dg[na + k].view_mut((na, na), (nb, nb)).copy_from(&lb.dg[k]);
            }
            let mut eta = DVector::zeros(n);
            eta.rows_mut(0, na).copy_from(&la.eta);
            eta.rows_mut(na, nb).copy_from(&lb.eta);
            let mut deta = DMatrix::zeros(n, n);
            deta.view_mut((0, 0), (na, na)).copy_from(&la.deta);
            deta.view_mut((na, na), (nb, nb)).copy_from(&lb.deta);
            Local { g, dg, eta, deta }
        }
    }
}

/// A Kähler base `(N, g_o, J, ω)` with Einstein constant `Λ₀` and gauge `η`.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerBase {
    pub kind: BaseKind,
    pub lambda0: f64,
    chart: Chart,
}

/// Builds a catalog base. `Λ₀` must be positive for spheres, zero for the
/// torus and negative for the hyperbolic disk.
pub fn make_base(kind: BaseKind, lambda0: f64) -> Result<KahlerBase> {
    kind.check_lambda0(lambda0)?;
    if let BaseKind::PerturbedS2 { eps } = kind {
        if !(eps.abs() < 0.9) {
            return Err(GeoError::InvalidParameter(format!("perturbation {eps} too large")));
        }
    }
    let chart = kind.chart();
    Ok(KahlerBase { kind, lambda0, chart })
}

impl KahlerBase {
    pub fn name(&self) -> String {
        self.kind.to_string()
    }

    pub fn real_dim(&self) -> usize {
        self.kind.real_dim()
    }

    pub fn g_o(&self, x: &[f64]) -> DMatrix<f64> {
        local(&self.kind, self.lambda0, x).g
    }

    pub fn dg_o(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        local(&self.kind, self.lambda0, x).dg
    }

    /// Components of `η`.
    pub fn eta(&self, x: &[f64]) -> DVector<f64> {
        local(&self.kind, self.lambda0, x).eta
    }

    /// `∂_k η_i` at `[(k, i)]`.
    pub fn deta(&self, x: &[f64]) -> DMatrix<f64> {
        local(&self.kind, self.lambda0, x).deta
    }

    /// `ω_ij = ∂_i η_j − ∂_j η_i`.
    pub fn omega(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.deta(x);
        &d - d.transpose()
    }

    /// `J = g_o⁻¹ ω`, acting on column vectors, so that `ω = g_o(·, J·)`.
    pub fn j(&self, x: &[f64]) -> DMatrix<f64> {
        let l = local(&self.kind, self.lambda0, x);
        let ginv = invert_metric(&l.g).expect("catalog metrics are nondegenerate");
        ginv * (&l.deta - l.deta.transpose())
    }

    /// Christoffel symbols of `g_o` from the analytic partials.
    pub fn christoffel(&self, x: &[f64]) -> Result<crate::tensor::ConnectionCoeffs> {
        christoffel_coordinate(self, x, Scheme::Analytic)
    }

    /// `η` as a form field, with `dη = ω` supplied analytically.
    pub fn eta_field(&self) -> ChartForm {
        let (a, b) = (self.clone(), self.clone());
        ChartForm::new(self.chart.clone(), 1, move |x| Form::one_form(a.eta(x).as_slice()))
            .with_derivative(move |x| omega_form(&b.omega(x)))
    }

    pub fn omega_field(&self) -> ChartForm {
        let a = self.clone();
        ChartForm::new(self.chart.clone(), 2, move |x| omega_form(&a.omega(x)))
    }

    /// Evenly spaced grid over the chart's sample box.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .chart
            .sample_box()
            .iter()
            .map(|&(lo, hi)| par::linspace(lo, hi, per_axis))
            .collect();
        par::cartesian(&axes)
    }
}

/// A skew matrix as a 2-form.
pub fn omega_form(m: &DMatrix<f64>) -> Form {
    let n = m.nrows();
    Form::from_dense(n, 2, m.transpose().as_slice()).expect("square matrix")
}

impl MetricField for KahlerBase {
    fn chart(&self) -> &Chart {
        &self.chart
    }
    fn components(&self, p: &[f64]) -> DMatrix<f64> {
        self.g_o(p)
    }
    fn signature(&self) -> (usize, usize) {
        (0, self.real_dim())
    }
    fn analytic_partials(&self, p: &[f64]) -> Option<Vec<DMatrix<f64>>> {
        Some(self.dg_o(p))
    }
}

/// `η(p)`, checked against the chart.
pub fn base_eta(base: &KahlerBase, p: &[f64]) -> Result<Form> {
    base.chart.check(p, 0.0)?;
    Ok(Form::one_form(base.eta(p).as_slice()))
}

/// `max |∇_k J|` at `x`, with `∂J` by central differences.
pub fn parallel_j_residual(base: &KahlerBase, x: &[f64]) -> Result<f64> {
    let h = crate::tolerance::STEP_FIRST;
    base.chart.check(x, stencil::REACH * h)?;
    let n = base.real_dim();
    let gamma = base.christoffel(x)?;
    let j = base.j(x);
    let jf = |q: &[f64]| flatten(&base.j(q));
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let dj = unflatten(n, stencil::first(&jf, x, k, h));
        for i in 0..n {
            for l in 0..n {
                let mut v = dj[(i, l)];
                for m in 0..n {
                    v += gamma.get(i, k, m) * j[(m, l)] - gamma.get(m, k, l) * j[(i, m)];
                }
                worst = worst.max(v.abs());
            }
        }
    }
    Ok(worst)
}

/// Residuals of the Kähler-Einstein identities over a grid: Einstein
/// equation, parallel `J`, closed `ω`, `dη = ω`, `J² = −I` and
/// `ω = g_o(·, J·)`.
pub fn verify_kahler_einstein(base: &KahlerBase, per_axis: usize) -> Report {
    let grid = base.grid(per_axis);
    let desc = format!(
        "{} points ({}^{} over {})",
        grid.len(),
        per_axis,
        base.real_dim(),
        base.chart.coord_names.join(",")
    );
    let name = base.name();
    type Probe = fn(&KahlerBase, &[f64]) -> Result<f64>;
    let probes: Vec<(&str, &str, f64, Probe)> = vec![
        ("einstein", "Ric(g_o) = Λ₀ g_o", CURVATURE, |b, x| {
            let r = curvature_coordinate(b, x, Scheme::Analytic)?;
            Ok((&r.ricci - b.g_o(x) * b.lambda0).amax())
        }),
        ("parallel_j", "∇J = 0", FIRST_DERIVATIVE, parallel_j_residual),
        ("d_omega", "dω = 0", 1e-6, |b, x| {
            Ok(exterior_derivative(&b.omega_field(), x, Scheme::first_derivative())?.max_abs())
        }),
        ("d_eta", "dη = ω", FIRST_DERIVATIVE, |b, x| {
            let d = exterior_derivative(&b.eta_field(), x, Scheme::first_derivative())?;
            Ok(d.sub(&omega_form(&b.omega(x))).max_abs())
        }),
        ("j_squared", "J² = −I", EXACT, |b, x| {
            let j = b.j(x);
            let n = j.nrows();
            Ok((&j * &j + DMatrix::identity(n, n)).amax())
        }),
        ("omega_compat", "ω = g_o(·, J·)", EXACT, |b, x| {
            Ok((b.omega(x) - b.g_o(x) * b.j(x)).amax())
        }),
    ];
    let mut report = Report::default();
    for (tag, anchor, tol, probe) in probes {
        let results = par::map(&grid, |x| (x.clone(), probe(base, x)));
        report.push(Check::from_results(
            &format!("base.{name}.{tag}"),
            anchor,
            &desc,
            tol,
            results,
        ));
    }
    report
}
