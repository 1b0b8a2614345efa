//! Generalized electromagnetic plane waves `F = Re(θ ∧ dz¹ ∧ ⋯ ∧ dz^{k−1})`
//! on firmly compatible metrics over bases with holomorphic coordinates.

use nalgebra::{DMatrix, DVector};

use crate::bundle::lorentz::FirmMetric;
use crate::error::{GeoError, Result};
use crate::par;
use crate::report::{Check, Report};
use crate::tensor::forms::{double_star_sign, exterior_derivative, hodge_star, ChartForm, Form, FormField};
use crate::tensor::lie::{lie_derivative_cartan, CoordinateField};
use crate::tensor::linalg::invert_metric;
use crate::tensor::metric::{MetricField, Scheme};
use crate::tolerance::STEP_FIRST;

/// Singular values below this fraction of the largest count as kernel.
pub const KERNEL_REL: f64 = 1e-8;

/// Wave grids keep holomorphic coordinates within this radius of the origin.
pub const WAVE_BOX: f64 = 2.0;

/// A complex form as its real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexForm {
    pub re: Form,
    pub im: Form,
}

impl ComplexForm {
    pub fn real(re: Form) -> Self {
        let im = Form::zero(re.dim(), re.degree());
        Self { re, im }
    }

    pub fn wedge(&self, o: &Self) -> Self {
        Self {
            re: self.re.wedge(&o.re).sub(&self.im.wedge(&o.im)),
            im: self.re.wedge(&o.im).add(&self.im.wedge(&o.re)),
        }
    }

    /// Multiplication by `i^k`.
    pub fn times_i_pow(&self, k: usize) -> Self {
        match k % 4 {
            0 => self.clone(),
            1 => Self {
                re: self.im.scale(-1.0),
                im: self.re.clone(),
            },
            2 => Self {
                re: self.re.scale(-1.0),
                im: self.im.scale(-1.0),
            },
            _ => Self {
                re: self.im.clone(),
                im: self.re.scale(-1.0),
            },
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.re.max_abs().max(self.im.max_abs())
    }
}

/// The wave of degree `k = n/2` on a firm metric.
#[derive(Debug, Clone)]
pub struct WaveForm {
    pub metric: FirmMetric,
    pub k: usize,
    /// `z_a = x_a + s_a i y_a`, with `s_a` chosen so that `dz_a ∘ J = i dz_a`.
    pub signs: Vec<f64>,
}

/// Builds the wave. The base chart must pair up into holomorphic coordinates.
pub fn build_wave(metric: &FirmMetric) -> Result<WaveForm> {
    let base = &metric.sasaki.base;
    if !base.kind.has_holomorphic_chart() {
        return Err(GeoError::NoHolomorphicChart(base.name()));
    }
    let m = base.real_dim();
    let x0: Vec<f64> = base.chart().sample_box().iter().map(|&(a, b)| 0.5 * (a + b)).collect();
    let j = base.j(&x0);
    let mut signs = Vec::with_capacity(m / 2);
    for a in 0..m / 2 {
        let (x, y) = (2 * a, 2 * a + 1);
        // dz(J ∂_x) = J_xx + s i J_yx must equal i
        if j[(x, x)].abs() > 1e-12 || (j[(y, x)].abs() - 1.0).abs() > 1e-12 {
            return Err(GeoError::NoHolomorphicChart(base.name()));
        }
        signs.push(j[(y, x)].signum());
    }
    Ok(WaveForm {
        metric: metric.clone(),
        k: metric.dim() / 2,
        signs,
    })
}

impl WaveForm {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `θ = du + η` on the total space.
    pub fn theta(&self, p: &[f64]) -> Form {
        let eta = self.metric.sasaki.base.eta(&p[2..]);
        let mut c = vec![0.0; self.dim()];
        c[1] = 1.0;
        c[2..].copy_from_slice(eta.as_slice());
        Form::one_form(&c)
    }

    /// `𝓕 = θ ∧ dz¹ ∧ ⋯ ∧ dz^{k−1}`.
    pub fn complex(&self, p: &[f64]) -> ComplexForm {
        let n = self.dim();
        let mut out = ComplexForm::real(self.theta(p));
        for (a, s) in self.signs.iter().enumerate() {
            let dz = ComplexForm {
                re: Form::basis(n, &[2 + 2 * a]),
                im: Form::basis(n, &[3 + 2 * a]).scale(*s),
            };
            out = out.wedge(&dz);
        }
        out
    }

    pub fn f(&self, p: &[f64]) -> Form {
        self.complex(p).re
    }

    pub fn dual(&self, p: &[f64]) -> Result<Form> {
        hodge_star(&self.f(p), &self.metric.components(p), self.metric.orientation())
    }

    /// `∗𝓕`, applied to both parts.
    pub fn complex_dual(&self, p: &[f64]) -> Result<ComplexForm> {
        let c = self.complex(p);
        let g = self.metric.components(p);
        let o = self.metric.orientation();
        Ok(ComplexForm {
            re: hodge_star(&c.re, &g, o)?,
            im: hodge_star(&c.im, &g, o)?,
        })
    }

    pub fn f_field(&self) -> ChartForm {
        let w = self.clone();
        ChartForm::new(self.metric.chart().clone(), self.k, move |p| w.f(p))
    }

    /// `∗F` as a field; points where the metric is singular evaluate to NaN.
    pub fn dual_field(&self) -> ChartForm {
        let w = self.clone();
        let (n, k) = (self.dim(), self.dim() - self.k);
        ChartForm::new(self.metric.chart().clone(), k, move |p| {
            w.dual(p).unwrap_or_else(|_| Form::zero(n, k).scale(f64::NAN))
        })
    }

    /// Grid with `per_axis` samples of `t` and of every base coordinate,
    /// base coordinates clipped to `[−WAVE_BOX, WAVE_BOX]`, `u` at the middle
    /// of its range.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .metric
            .chart()
            .sample_box()
            .iter()
            .enumerate()
            .map(|(i, &(lo, hi))| match i {
                0 => par::linspace(lo, hi, per_axis),
                1 => vec![0.5 * (lo + hi)],
                _ => par::linspace(lo.max(-WAVE_BOX), hi.min(WAVE_BOX), per_axis),
            })
            .collect();
        par::cartesian(&axes)
    }
}

fn sampled<F>(name: &str, anchor: &str, grid: &[Vec<f64>], tolerance: f64, f: F) -> Check
where
    F: Fn(&[f64]) -> Result<f64> + Sync + Send,
{
    let results = par::map(grid, |p| (p.clone(), f(p)));
    Check::from_results(name, anchor, &format!("{} points", grid.len()), tolerance, results)
}

/// Closure, coclosure and the algebraic identities of the wave over a grid.
pub fn harmonicity_check(w: &WaveForm, grid: &[Vec<f64>], prefix: &str, tolerance: f64) -> Report {
    let mut r = Report::default();
    let scheme = Scheme::first_derivative();
    let (ff, df) = (w.f_field(), w.dual_field());
    r.push(sampled(&format!("{prefix}.closed"), "dF = 0", grid, tolerance, |p| {
        Ok(exterior_derivative(&ff, p, scheme)?.max_abs())
    }));
    r.push(sampled(
        &format!("{prefix}.coclosed"),
        "d(∗F) = 0",
        grid,
        tolerance,
        |p| Ok(exterior_derivative(&df, p, scheme)?.max_abs()),
    ));
    r.push(sampled(
        &format!("{prefix}.theta_factor"),
        "θ ∧ F = 0",
        grid,
        1e-12,
        |p| Ok(w.theta(p).wedge(&w.f(p)).max_abs()),
    ));
    r.push(sampled(
        &format!("{prefix}.theta_null"),
        "g⁻¹θ is null",
        grid,
        1e-10,
        |p| {
            let ginv = invert_metric(&w.metric.components(p))?;
            let th = DVector::from_column_slice(w.theta(p).components());
            Ok((th.transpose() * ginv * &th)[(0, 0)].abs())
        },
    ));
    let n = w.dim();
    let mut pt = vec![0.0; n];
    pt[0] = 1.0;
    r.push(sampled(
        &format!("{prefix}.kernel_contraction"),
        "p_o ⌟ F = 0",
        grid,
        1e-10,
        |p| Ok(w.f(p).interior(&pt).max_abs()),
    ));
    r.push(sampled(
        &format!("{prefix}.double_star"),
        "∗∗F = (−1)^{k(n−k)} sign(det g) F",
        grid,
        1e-10,
        |p| {
            let g = w.metric.components(p);
            let o = w.metric.orientation();
            let f = w.f(p);
            let twice = hodge_star(&hodge_star(&f, &g, o)?, &g, o)?;
            let s = double_star_sign(n, w.k, g.determinant());
            Ok(twice.sub(&f.scale(s)).max_abs() / f.max_abs().max(1.0))
        },
    ));
    let eig = eigen_check(w, grid, &format!("{prefix}.eigenform"), 1e-8);
    r.push(eig);
    let min_norm = par::map(grid, |p| w.f(p).max_abs())
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    r.push(Check::control(
        &format!("{prefix}.nonzero"),
        "F ≠ 0 at every sampled point",
        min_norm,
        1e-8,
    ));
    r
}

/// `∗𝓕 = ε i^{k−1} 𝓕` with one sign `ε` for the whole grid, fixed at the
/// first point.
fn eigen_check(w: &WaveForm, grid: &[Vec<f64>], name: &str, tolerance: f64) -> Check {
    let anchor = "∗𝓕 = ±i^{k−1} 𝓕";
    let defect = |p: &[f64], eps: f64| -> Result<f64> {
        let c = w.complex(p);
        let target = c.times_i_pow(w.k - 1);
        let target = if eps > 0.0 { target } else { target.times_i_pow(2) };
        Ok(w.complex_dual(p)?.sub(&target).max_abs() / c.max_abs().max(1.0))
    };
    let Some(first) = grid.first() else {
        return Check::from_samples(name, anchor, "0 points", tolerance, Vec::new());
    };
    let eps = match (defect(first, 1.0), defect(first, -1.0)) {
        (Ok(a), Ok(b)) => {
            if a <= b {
                1.0
            } else {
                -1.0
            }
        }
        (Err(e), _) | (_, Err(e)) => return Check::failed(name, anchor, tolerance, &e),
    };
    let mut c = sampled(name, anchor, grid, tolerance, |p| defect(p, eps));
    c.grid = format!("{}, sign {eps:+}", c.grid);
    c
}

/// Joint kernel of `v ↦ v⌟F` and `v ↦ v⌟∗F` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct JointKernel {
    pub dim: usize,
    /// Smallest nonzero singular value over the largest kernel one.
    pub gap: f64,
    /// Unit vector spanning the kernel when it is a line.
    pub vector: DVector<f64>,
    singular: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl JointKernel {
    /// Part of the kernel vector orthogonal to `∂_t`.
    pub fn off_axis(&self) -> f64 {
        self.vector.rows(1, self.vector.len() - 1).norm()
    }

    /// Relative size of `v⌟F`, `v⌟∗F` for a candidate `v`.
    pub fn annihilation(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        (&self.matrix * &v).norm() / (self.singular[0] * v.norm())
    }
}

pub fn joint_kernel(w: &WaveForm, p: &[f64]) -> Result<JointKernel> {
    let n = w.dim();
    let f = w.f(p);
    let d = w.dual(p)?;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|mu| {
            let mut e = vec![0.0; n];
            e[mu] = 1.0;
            let mut c = f.interior(&e).components().to_vec();
            c.extend_from_slice(d.interior(&e).components());
            c
        })
        .collect();
    let rows = cols[0].len();
    let matrix = DMatrix::from_fn(rows, n, |i, j| cols[j][i]);
    let svd = matrix.clone().svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let singular: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let top = singular[0];
    let dim = singular.iter().filter(|&&s| s < KERNEL_REL * top).count();
    let last = *order.last().expect("nonempty");
    let mut vector = v_t.row(last).transpose();
    if vector[0] < 0.0 {
        vector = -vector;
    }
    let gap = if dim == 0 || dim == n {
        0.0
    } else {
        singular[n - dim - 1] / singular[n - dim].max(f64::MIN_POSITIVE)
    };
    Ok(JointKernel {
        dim,
        gap,
        vector,
        singular,
        matrix,
    })
}

/// Joint kernel over a grid: one-dimensional, spanned by `∂_t`, with a
/// singular-value gap of at least `1e6`.
pub fn kernel_check(w: &WaveForm, grid: &[Vec<f64>], prefix: &str) -> Report {
    let ks = par::map(grid, |p| (p.clone(), joint_kernel(w, p)));
    let mut r = Report::default();
    let desc = format!("{} points", grid.len());
    let pick = |f: &dyn Fn(&JointKernel) -> f64| -> Vec<(Vec<f64>, Result<f64>)> {
        ks.iter().map(|(p, k)| (p.clone(), k.clone().map(|k| f(&k)))).collect()
    };
    r.push(Check::from_results(
        &format!("{prefix}.kernel_dim"),
        "ker F ∩ ker ∗F is a line",
        &desc,
        0.0,
        pick(&|k| (k.dim as f64 - 1.0).abs()),
    ));
    r.push(Check::from_results(
        &format!("{prefix}.kernel_axis"),
        "ker F ∩ ker ∗F = ⟨p_o⟩",
        &desc,
        1e-8,
        pick(&|k| k.off_axis()),
    ));
    r.push(Check::from_results(
        &format!("{prefix}.kernel_gap"),
        "singular-value gap at least 1e6 (residual 1e6/gap)",
        &desc,
        1.0,
        pick(&|k| if k.gap > 0.0 { 1e6 / k.gap } else { f64::INFINITY }),
    ));
    r
}

/// Flag structure and Lie derivatives along `p_o` at one point, with
/// `candidate` proposed as the generator of the joint kernel.
pub fn flag_and_lie_check(w: &WaveForm, p: &[f64], candidate: &[f64], prefix: &str) -> Result<Report> {
    let k = joint_kernel(w, p)?;
    if k.dim != 1 {
        return Err(GeoError::KernelDimensionMismatch {
            expected: 1,
            found: k.dim,
        });
    }
    if k.annihilation(candidate) > KERNEL_REL {
        return Err(GeoError::KernelDimensionMismatch { expected: 1, found: 2 });
    }
    let n = w.dim();
    let chart = w.metric.chart();
    let po = CoordinateField { n, k: 0 };
    let h = STEP_FIRST;
    let mut r = Report::default();
    r.push(Check::scalar(
        &format!("{prefix}.kernel_axis"),
        "ker F ∩ ker ∗F = ⟨p_o⟩",
        k.off_axis(),
        1e-8,
    ));
    let lf = lie_derivative_cartan(chart, &po, &|q: &[f64]| w.f(q), p, h)?;
    r.push(Check::scalar(
        &format!("{prefix}.lie_f"),
        "ℒ_{p_o} F = 0",
        lf.max_abs(),
        1e-7,
    ));
    let dual = w.dual_field();
    let ld = lie_derivative_cartan(chart, &po, &|q: &[f64]| dual.eval(q), p, h)?;
    r.push(Check::scalar(
        &format!("{prefix}.lie_dual"),
        "ℒ_{p_o} ∗F = 0",
        ld.max_abs(),
        1e-7,
    ));
    let th = w.theta(p);
    let lt = lie_derivative_cartan(chart, &po, &|q: &[f64]| w.theta(q), p, h)?;
    let (a, b) = (
        DVector::from_column_slice(lt.components()),
        DVector::from_column_slice(th.components()),
    );
    let f = -a.dot(&b) / b.dot(&b);
    let mut c = Check::scalar(
        &format!("{prefix}.lie_theta"),
        "ℒ_{p_o} θ = −f θ",
        (a + b * f).amax(),
        1e-8,
    );
    c.grid = format!("f = {f:e}");
    r.push(c);
    Ok(r)
}

/// `max |d∗F′|` for `F′ = F + ε du ∧ dx¹ ∧ ⋯` (degree `k`).
pub fn broken_wave_coclosure(w: &WaveForm, grid: &[Vec<f64>], eps: f64) -> Result<f64> {
    let n = w.dim();
    let w2 = w.clone();
    let broken = ChartForm::new(w.metric.chart().clone(), n - w.k, move |p| {
        let f = w2.f(p).add(&broken_term(n, w2.k).scale(eps));
        hodge_star(&f, &w2.metric.components(p), w2.metric.orientation())
            .unwrap_or_else(|_| Form::zero(n, n - w2.k).scale(f64::NAN))
    });
    par::map(grid, |p| {
        exterior_derivative(&broken, p, Scheme::first_derivative()).map(|d| d.max_abs())
    })
    .into_iter()
    .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

/// `du ∧ dx¹ ∧ ⋯` of degree `k`.
fn broken_term(n: usize, k: usize) -> Form {
    let idx: Vec<usize> = (1..=k).collect();
    Form::basis(n, &idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::lorentz::{build_lorentz_firm, FirmProfile};
    use crate::bundle::sasaki::build_sasaki;
    use crate::einstein::{einstein_profile, EinsteinParams};
    use crate::kahler::{make_base, BaseKind};

    fn firm(kind: BaseKind, lambda0: f64, prof: &FirmProfile) -> FirmMetric {
        build_lorentz_firm(&build_sasaki(make_base(kind, lambda0).unwrap()).unwrap(), prof).unwrap()
    }

    fn flat_torus() -> WaveForm {
        build_wave(&firm(
            BaseKind::Torus,
            0.0,
            &FirmProfile::constant(1.0, 0.0, (0.4, 2.1)),
        ))
        .unwrap()
    }

    fn tn_stereo() -> WaveForm {
        let p = EinsteinParams::taub_nut_default();
        build_wave(&firm(BaseKind::S2Stereographic, 1.0, &einstein_profile(&p, (0.4, 2.1)))).unwrap()
    }

    #[test]
    fn torus_components_by_hand() {
        let w = flat_torus();
        assert_eq!(w.signs, vec![-1.0]);
        // θ = du + x dy, dz = dx − i dy: θ∧dz = du∧dx − x dx∧dy − i du∧dy
        let p = [1.0, 0.0, 0.7, -0.3];
        let f = w.f(&p);
        assert_eq!(f.get(&[1, 2]), 1.0);
        assert_eq!(f.get(&[2, 3]), -0.7);
        assert_eq!(f.get(&[1, 3]), 0.0);
        assert_eq!(f.get(&[0, 1]), 0.0);
        let c = w.complex(&p);
        assert_eq!(c.im.get(&[1, 3]), -1.0);
        assert_eq!(c.im.get(&[2, 3]), 0.0);
    }

    #[test]
    fn holomorphic_sign_intertwines_j() {
        for kind in [BaseKind::Torus, BaseKind::S2Stereographic, BaseKind::HyperbolicDisk] {
            let l0 = match kind {
                BaseKind::Torus => 0.0,
                BaseKind::HyperbolicDisk => -1.0,
                _ => 1.0,
            };
            let g = firm(kind.clone(), l0, &FirmProfile::constant(1.0, 0.0, (0.4, 2.1)));
            let w = build_wave(&g).unwrap();
            let x = [0.2, -0.1];
            let j = g.sasaki.base.j(&x);
            let s = w.signs[0];
            // dz ∘ J = i dz, on ∂_x and ∂_y
            for col in 0..2 {
                let dz_j = (j[(0, col)], s * j[(1, col)]);
                let i_dz = if col == 0 { (0.0, 1.0) } else { (-s, 0.0) };
                assert!(
                    (dz_j.0 - i_dz.0).abs() < 1e-12 && (dz_j.1 - i_dz.1).abs() < 1e-12,
                    "{kind}"
                );
            }
        }
    }

    #[test]
    fn spherical_chart_has_no_holomorphic_coordinates() {
        let g = firm(BaseKind::S2Spherical, 1.0, &FirmProfile::constant(1.0, 0.0, (0.4, 2.1)));
        assert!(matches!(build_wave(&g), Err(GeoError::NoHolomorphicChart(_))));
    }

    #[test]
    fn flat_torus_wave_is_harmonic() {
        let w = flat_torus();
        let r = harmonicity_check(&w, &w.grid(3), "w", 1e-10);
        assert!(r.all_pass(), "{}", r.to_human());
    }

    #[test]
    fn taub_nut_wave_is_harmonic() {
        let w = tn_stereo();
        let grid = w.grid(3);
        let r = harmonicity_check(&w, &grid, "w", 1e-6);
        assert!(r.all_pass(), "{}", r.to_human());
        let k = kernel_check(&w, &grid, "w");
        assert!(k.all_pass(), "{}", k.to_human());
    }

    #[test]
    fn product_wave_has_degree_three() {
        let base = BaseKind::Product(Box::new(BaseKind::S2Stereographic), Box::new(BaseKind::S2Stereographic));
        let p = EinsteinParams::new(6, 0.0, 1.0, 0.0, 0.5).unwrap();
        let w = build_wave(&firm(base, 1.0, &einstein_profile(&p, (0.4, 2.1)))).unwrap();
        assert_eq!(w.k, 3);
        let grid = w.grid(2);
        let r = harmonicity_check(&w, &grid, "w", 1e-6);
        assert!(r.all_pass(), "{}", r.to_human());
        assert!(kernel_check(&w, &grid, "w").all_pass());
    }

    #[test]
    fn flag_and_lie_at_a_point() {
        let w = tn_stereo();
        let p = [1.0, 0.0, 0.3, -0.4];
        let r = flag_and_lie_check(&w, &p, &[1.0, 0.0, 0.0, 0.0], "flag").unwrap();
        assert!(r.all_pass(), "{}", r.to_human());
        let spacelike = [0.0, 0.0, 1.0, 0.0];
        assert!(matches!(
            flag_and_lie_check(&w, &p, &spacelike, "flag"),
            Err(GeoError::KernelDimensionMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn broken_wave_is_not_coclosed() {
        let w = tn_stereo();
        let worst = broken_wave_coclosure(&w, &w.grid(3), 1e-2).unwrap();
        assert!(worst > 1e-3, "{worst}");
    }
}
