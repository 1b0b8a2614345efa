//! The Sasaki chart `S = N × A` with contact form `θ = du + η`, Reeb field
//! `∂_u` and metric `g^θ = θ⊗θ + π*g_o`.

use nalgebra::{DMatrix, DVector};

use crate::error::Result;
use crate::kahler::{omega_form, BaseKind, KahlerBase};
use crate::par;
use crate::report::{Check, Report};
use crate::structures::contact::reeb_field;
use crate::structures::cr::nijenhuis_tensor;
use crate::tensor::chart::Chart;
use crate::tensor::forms::{exterior_derivative, ChartForm, Form, FormField};
use crate::tensor::lie::{lie_derivative_metric, CoordinateField, VectorField};
use crate::tensor::linalg::invert_metric;
use crate::tensor::metric::{ChartMetric, MetricField, Scheme};
use crate::tolerance::{EXACT, FIRST_DERIVATIVE};

/// Default fiber interval for `u`.
pub const U_INTERVAL: (f64, f64) = (-2.0, 2.0);

/// Step for brackets in the Nijenhuis checks.
const BRACKET_STEP: f64 = 1e-4;

/// Coordinates `(u, x¹, …, x^m)` over a Kähler base.
#[derive(Debug, Clone, PartialEq)]
pub struct SasakiChart {
    pub base: KahlerBase,
    pub u_interval: (f64, f64),
    chart: Chart,
}

pub fn build_sasaki(base: KahlerBase) -> Result<SasakiChart> {
    build_sasaki_with(base, U_INTERVAL)
}

pub fn build_sasaki_with(base: KahlerBase, u_interval: (f64, f64)) -> Result<SasakiChart> {
    let chart = base
        .chart()
        .extend_front(&format!("sasaki({})", base.name()), &[("u", u_interval)]);
    // re-validate through the constructor
    let names: Vec<&str> = chart.coord_names.iter().map(String::as_str).collect();
    let chart = Chart::new(&chart.name, &names, &chart.bounds, chart.margin)?;
    Ok(SasakiChart {
        base,
        u_interval,
        chart,
    })
}

/// Splits a Sasaki point into `(u, x)`.
fn split(p: &[f64]) -> (f64, &[f64]) {
    (p[0], &p[1..])
}

/// `π*ω` as a matrix on `(u, x)`.
fn lift_two_form(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows() + 1;
    let mut out = DMatrix::zeros(n, n);
    out.view_mut((1, 1), (n - 1, n - 1)).copy_from(m);
    out
}

impl SasakiChart {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    /// Components of `θ = du + η`.
    pub fn theta(&self, p: &[f64]) -> DVector<f64> {
        let (_, x) = split(p);
        let eta = self.base.eta(x);
        let mut out = DVector::zeros(self.dim());
        out[0] = 1.0;
        out.rows_mut(1, eta.len()).copy_from(&eta);
        out
    }

    /// `π*ω` as a skew matrix.
    pub fn dtheta_matrix(&self, p: &[f64]) -> DMatrix<f64> {
        lift_two_form(&self.base.omega(split(p).1))
    }

    /// `θ` as a form field with `dθ = π*ω` supplied in closed form.
    pub fn theta_field(&self) -> ChartForm {
        let (a, b) = (self.clone(), self.clone());
        ChartForm::new(self.chart.clone(), 1, move |p| Form::one_form(a.theta(p).as_slice()))
            .with_derivative(move |p| omega_form(&b.dtheta_matrix(p)))
    }

    /// The Reeb field `Z = ∂_u`.
    pub fn reeb(&self) -> CoordinateField {
        CoordinateField { n: self.dim(), k: 0 }
    }

    /// `g^θ = θ⊗θ + π*g_o`.
    pub fn metric_at(&self, p: &[f64]) -> DMatrix<f64> {
        let th = self.theta(p);
        let mut g = &th * th.transpose();
        let go = self.base.g_o(split(p).1);
        let m = go.nrows();
        let mut block = g.view_mut((1, 1), (m, m));
        block += go;
        g
    }

    /// `∂_k g^θ`.
    pub fn metric_partials_at(&self, p: &[f64]) -> Vec<DMatrix<f64>> {
        let n = self.dim();
        let (_, x) = split(p);
        let th = self.theta(p);
        let dgo = self.base.dg_o(x);
        let deta = self.base.deta(x);
        let mut out = vec![DMatrix::zeros(n, n)];
        for k in 0..n - 1 {
            let mut dth = DVector::zeros(n);
            for i in 0..n - 1 {
                dth[i + 1] = deta[(k, i)];
            }
            let mut d = &dth * th.transpose() + &th * dth.transpose();
            let mut block = d.view_mut((1, 1), (n - 1, n - 1));
            block += &dgo[k];
            out.push(d);
        }
        out
    }

    pub fn metric(&self) -> ChartMetric {
        let (a, b) = (self.clone(), self.clone());
        ChartMetric::new(self.chart.clone(), (0, self.dim()), move |p| a.metric_at(p))
            .with_partials(move |p| b.metric_partials_at(p))
    }

    /// The base complex structure lifted to `ker θ` and extended by `J Z = 0`.
    pub fn lifted_j(&self, p: &[f64]) -> DMatrix<f64> {
        lift_endomorphism(&self.base.j(split(p).1), &self.base.eta(split(p).1))
    }

    /// `(g^θ)⁻¹ ∘ dθ` at `p`.
    pub fn recovered_j(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(invert_metric(&self.metric_at(p))? * self.dtheta_matrix(p))
    }

    /// Horizontal lift of the base coordinate field `∂_i`.
    pub fn horizontal(&self, i: usize) -> impl VectorField + '_ {
        move |p: &[f64]| {
            let eta = self.base.eta(split(p).1);
            let mut v = DVector::zeros(self.dim());
            v[0] = -eta[i];
            v[i + 1] = 1.0;
            v
        }
    }

    /// Evenly spaced grid over the sample box, `u` included.
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

/// `[[0, −ηᵀJ], [0, J]]`: the lift of a base endomorphism `J` to `ker θ`
/// extended by zero on the Reeb direction.
pub fn lift_endomorphism(j: &DMatrix<f64>, eta: &DVector<f64>) -> DMatrix<f64> {
    let m = j.nrows();
    let mut out = DMatrix::zeros(m + 1, m + 1);
    out.view_mut((1, 1), (m, m)).copy_from(j);
    let row = -(eta.transpose() * j);
    out.view_mut((0, 1), (1, m)).copy_from(&row);
    out
}

/// Largest component of the `ker θ` projection of `N_J(Xʰ_i, Xʰ_j)` over all
/// pairs of horizontal lifts, for a given endomorphism field.
pub fn horizontal_nijenhuis<J>(s: &SasakiChart, j: &J, p: &[f64]) -> Result<f64>
where
    J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync,
{
    let m = s.dim() - 1;
    let theta = s.theta(p);
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in (a + 1)..m {
            let n = nijenhuis_tensor(s.chart(), j, &s.horizontal(a), &s.horizontal(b), p, BRACKET_STEP)?;
            // project along Z = ∂_u
            let mut proj = n.clone();
            proj[0] -= theta.dot(&n);
            worst = worst.max(proj.amax());
        }
    }
    Ok(worst)
}

/// An almost complex structure on `s2 × s2` conjugated by a point-dependent
/// shear that mixes the factors; it is not integrable.
fn sheared_j(base: &KahlerBase, x: &[f64], eps: f64) -> DMatrix<f64> {
    let j = base.j(x);
    let mut a = DMatrix::identity(4, 4);
    a[(2, 0)] = eps * x[1].sin();
    a[(3, 0)] = eps * x[0].cos();
    let ainv = a.clone().try_inverse().expect("unipotent");
    &a * j * ainv
}

/// Contact, Reeb, Killing and CR identities of the Sasaki chart over a grid
/// with `per_axis` points along each axis.
pub fn verify_sasaki(s: &SasakiChart, per_axis: usize) -> Report {
    let grid = s.grid(per_axis);
    let desc = format!(
        "{} points ({}^{} over {})",
        grid.len(),
        per_axis,
        s.dim(),
        s.chart.coord_names.join(",")
    );
    let name = s.base.name();
    let metric = s.metric();
    type Probe = Box<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;
    let z = DVector::from_fn(s.dim(), |i, _| if i == 0 { 1.0 } else { 0.0 });
    let probes: Vec<(&str, &str, f64, Probe)> = vec![
        ("theta_reeb", "θ(Z) = 1", EXACT, {
            let (s, z) = (s.clone(), z.clone());
            Box::new(move |p| Ok((s.theta(p).dot(&z) - 1.0).abs()))
        }),
        ("reeb_dtheta", "Z ⌟ dθ = 0", EXACT, {
            let (s, z) = (s.clone(), z.clone());
            Box::new(move |p| {
                let dth = exterior_derivative(&s.theta_field(), p, Scheme::Analytic)?;
                Ok(dth.interior(z.as_slice()).max_abs())
            })
        }),
        ("reeb_solve", "Z is the Reeb field of θ", FIRST_DERIVATIVE, {
            let (s, z) = (s.clone(), z.clone());
            Box::new(move |p| {
                let th = s.theta_field();
                let zz = reeb_field(&th.eval(p), &exterior_derivative(&th, p, Scheme::first_derivative())?)?;
                Ok((zz - &z).amax())
            })
        }),
        ("reeb_unit", "g^θ(Z, Z) = 1", FIRST_DERIVATIVE, {
            let (m, z) = (metric.clone(), z.clone());
            Box::new(move |p| Ok((z.dot(&(m.components(p) * &z)) - 1.0).abs()))
        }),
        ("theta_dual", "θ = g^θ(Z, ·)", FIRST_DERIVATIVE, {
            let (s, m, z) = (s.clone(), metric.clone(), z.clone());
            Box::new(move |p| Ok((m.components(p) * &z - s.theta(p)).amax()))
        }),
        ("reeb_killing", "ℒ_Z g^θ = 0", FIRST_DERIVATIVE, {
            let (s, m) = (s.clone(), metric.clone());
            Box::new(move |p| Ok(lie_derivative_metric(&m, &s.reeb(), p, Scheme::first_derivative())?.amax()))
        }),
        ("dtheta_omega", "dθ = π*ω", FIRST_DERIVATIVE, {
            let s = s.clone();
            Box::new(move |p| {
                let d = exterior_derivative(&s.theta_field(), p, Scheme::first_derivative())?;
                Ok(d.sub(&omega_form(&s.dtheta_matrix(p))).max_abs())
            })
        }),
        ("j_recovery", "J = (g^θ)⁻¹ ∘ dθ on ker θ", FIRST_DERIVATIVE, {
            let s = s.clone();
            Box::new(move |p| {
                let rec = s.recovered_j(p)?;
                let lifted = s.lifted_j(p);
                let mut worst: f64 = 0.0;
                for i in 0..s.dim() - 1 {
                    let h = s.horizontal(i).eval(p);
                    worst = worst.max((&rec * &h - &lifted * &h).amax());
                }
                Ok(worst)
            })
        }),
        ("j_squared", "J² = −I on ker θ", EXACT, {
            let s = s.clone();
            Box::new(move |p| {
                let j = s.lifted_j(p);
                let jj = &j * &j;
                let mut worst: f64 = 0.0;
                for i in 0..s.dim() - 1 {
                    let h = s.horizontal(i).eval(p);
                    worst = worst.max((&jj * &h + &h).amax());
                }
                Ok(worst)
            })
        }),
        ("nijenhuis", "N_J = 0 on ker θ", 1e-6, {
            let s = s.clone();
            Box::new(move |p| {
                let s2 = s.clone();
                horizontal_nijenhuis(&s, &move |q: &[f64]| s2.lifted_j(q), p)
            })
        }),
    ];
    let mut report = Report::default();
    for (tag, anchor, tol, probe) in &probes {
        let results = par::map(&grid, |x| (x.clone(), probe(x)));
        report.push(Check::from_results(
            &format!("sasaki.{name}.{tag}"),
            anchor,
            &desc,
            *tol,
            results,
        ));
    }
    if s.base.kind == BaseKind::s2xs2() {
        // a non-integrable J must be detected
        let p: Vec<f64> = s
            .chart
            .sample_box()
            .iter()
            .map(|&(lo, hi)| 0.4 * lo + 0.6 * hi)
            .collect();
        let base = s.base.clone();
        let eta_base = s.base.clone();
        let j = move |q: &[f64]| lift_endomorphism(&sheared_j(&base, &q[1..], 0.3), &eta_base.eta(&q[1..]));
        let check = match horizontal_nijenhuis(s, &j, &p) {
            Ok(obs) => Check::control(
                &format!("sasaki.{name}.nijenhuis_control"),
                "sheared J is not integrable",
                obs,
                1e-3,
            ),
            Err(e) => Check::failed(
                &format!("sasaki.{name}.nijenhuis_control"),
                "sheared J is not integrable",
                1.0,
                &e,
            ),
        };
        report.push(check);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kahler::make_base;
    use crate::tensor::linalg::signature;

    fn chart(kind: BaseKind) -> SasakiChart {
        let lambda0 = if kind == BaseKind::Torus { 0.0 } else { 1.0 };
        build_sasaki(make_base(kind, lambda0).unwrap()).unwrap()
    }

    #[test]
    fn spherical_contact_form() {
        let s = chart(BaseKind::S2Spherical);
        let p = [0.3, 1.1, -0.4];
        let th = s.theta(&p);
        assert_eq!(th[0], 1.0);
        assert_eq!(th[1], 0.0);
        assert!((th[2] - 1.1f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn torus_contact_form() {
        let s = chart(BaseKind::Torus);
        let th = s.theta(&[0.2, 0.7, -0.3]);
        assert_eq!(th.as_slice(), &[1.0, 0.0, 0.7]);
    }

    #[test]
    fn product_chart_is_five_dimensional_riemannian() {
        let s = chart(BaseKind::s2xs2());
        assert_eq!(s.dim(), 5);
        let p = [0.1, 1.0, 0.5, 2.0, -1.0];
        let g = s.metric_at(&p);
        assert_eq!(signature(&g), (0, 5));
        let z = s.reeb().eval(&p);
        assert!((z.dot(&(&g * &z)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn analytic_partials_match_differences() {
        for kind in [BaseKind::S2Spherical, BaseKind::S2Stereographic, BaseKind::s2xs2()] {
            let s = chart(kind);
            let m = s.metric();
            let p: Vec<f64> = s
                .chart()
                .sample_box()
                .iter()
                .map(|&(lo, hi)| 0.3 * lo + 0.7 * hi)
                .collect();
            let a = crate::tensor::metric::metric_partials(&m, &p, Scheme::Analytic).unwrap();
            let c = crate::tensor::metric::metric_partials(&m, &p, Scheme::first_derivative()).unwrap();
            for (x, y) in a.iter().zip(&c) {
                assert!((x - y).amax() < 1e-8);
            }
        }
    }

    #[test]
    fn suites_pass() {
        for kind in [BaseKind::S2Spherical, BaseKind::Torus, BaseKind::S2Stereographic] {
            let r = verify_sasaki(&chart(kind), 4);
            for c in &r.checks {
                assert!(c.pass, "{} {}", c.name, c.max_residual);
            }
        }
    }

    #[test]
    fn product_suite_and_control() {
        let r = verify_sasaki(&chart(BaseKind::s2xs2()), 2);
        for c in &r.checks {
            assert!(c.pass, "{} {} {}", c.name, c.max_residual, c.grid);
        }
        assert!(r
            .get("sasaki.product(s2-spherical,s2-spherical).nijenhuis_control")
            .is_some());
    }

    #[test]
    fn torus_reeb_killing_is_exact() {
        let s = chart(BaseKind::Torus);
        let l = lie_derivative_metric(&s.metric(), &s.reeb(), &[0.1, 0.3, -0.2], Scheme::first_derivative()).unwrap();
        assert_eq!(l.amax(), 0.0);
    }
}
