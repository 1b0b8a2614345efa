//! The frame `(p_o, Ê_i, q_o)`, `Ê_i = ∂_i − η_i ∂_u`, its connection table
//! in closed form, and the frame route to the Ricci tensor.

use nalgebra::{DMatrix, DVector};

use super::lorentz::{BundleMetric, Jet, ProfileJets};
use crate::error::{GeoError, Result};
use crate::par;
use crate::report::{Check, Report};
use crate::tensor::connection::{christoffel_coordinate, ConnectionCoeffs};
use crate::tensor::lie::lie_bracket;
use crate::tensor::linalg::invert_metric;
use crate::tensor::metric::Scheme;
use crate::tensor::stencil;
use crate::tolerance::STEP_FIRST;

/// Which closed-form table to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `σ`, `β̃` functions of `t` only, `α = 1/σ`, `γ = 0`.
    Ansatz,
    /// Arbitrary `(σ, α, β, γ)`.
    General,
}

/// `Γ_A{}^C{}_B`: entry `(a, b, c)` is the `X_C` component of
/// `∇_{X_A} X_B`, frame order `(p_o, Ê_1, …, Ê_m, q_o)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTable {
    n: usize,
    vals: Vec<f64>,
}

impl FrameTable {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            vals: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.vals[(a * self.n + b) * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        self.vals[(a * self.n + b) * self.n + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.vals
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.vals
            .iter()
            .zip(&other.vals)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Index of `Ê_i` in the frame.
#[inline]
pub fn e_idx(i: usize) -> usize {
    1 + i
}

/// Index of `q_o` in an `n`-dimensional frame.
#[inline]
pub fn q_idx(n: usize) -> usize {
    n - 1
}

pub const P: usize = 0;

/// Columns are the frame vectors in coordinates `(t, u, x)`.
pub fn frame_matrix(eta: &DVector<f64>) -> DMatrix<f64> {
    let m = eta.len();
    let n = m + 2;
    let mut f = DMatrix::zeros(n, n);
    f[(0, P)] = 1.0;
    for i in 0..m {
        f[(2 + i, e_idx(i))] = 1.0;
        f[(1, e_idx(i))] = -eta[i];
    }
    f[(1, q_idx(n))] = 1.0;
    f
}

/// Rows are the dual coframe `(dt, dxⁱ, θ)`.
pub fn coframe_matrix(eta: &DVector<f64>) -> DMatrix<f64> {
    let m = eta.len();
    let n = m + 2;
    let mut c = DMatrix::zeros(n, n);
    c[(P, 0)] = 1.0;
    for i in 0..m {
        c[(e_idx(i), 2 + i)] = 1.0;
        c[(q_idx(n), 2 + i)] = eta[i];
    }
    c[(q_idx(n), 1)] = 1.0;
    c
}

/// Base data at one point, in the coordinate frame `E_i = ∂_i` of the base.
#[derive(Debug, Clone)]
pub struct FrameParams {
    /// `g_ij`.
    pub g: DMatrix<f64>,
    /// `g^{ij}`.
    pub ginv: DMatrix<f64>,
    /// `E_k(g_ij)`, indexed `[k]`.
    pub dg: Vec<DMatrix<f64>>,
    /// `ω_ij = g_o(E_i, J E_j)`.
    pub omega: DMatrix<f64>,
    /// `J[(m, i)]`: the `E_m` component of `J E_i`.
    pub j: DMatrix<f64>,
    /// Base Christoffel symbols `Γ°^m_ij`.
    pub base_gamma: ConnectionCoeffs,
    /// Structure functions `c^k_ij` of the base frame, `[(i * m + j) * m + k]`.
    pub c: Vec<f64>,
    pub jets: ProfileJets,
}

impl FrameParams {
    pub fn base_dim(&self) -> usize {
        self.g.nrows()
    }

    fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let m = self.base_dim();
        self.c[(i * m + j) * m + k]
    }

    /// `g_o(∇°_{E_i} E_j, E_k)`.
    fn base_first_kind(&self, i: usize, j: usize, k: usize) -> f64 {
        (0..self.base_dim())
            .map(|l| self.g[(k, l)] * self.base_gamma.get(l, i, j))
            .sum()
    }
}

/// Collects the frame parameters of `metric` at `p`. Profile derivatives use
/// `scheme`; base data is analytic.
pub fn frame_params<M: BundleMetric + ?Sized>(metric: &M, p: &[f64], scheme: Scheme) -> Result<FrameParams> {
    let base = &metric.sasaki().base;
    let x = &p[2..];
    let g = base.g_o(x);
    let ginv = invert_metric(&g)?;
    let m = g.nrows();
    Ok(FrameParams {
        dg: base.dg_o(x),
        omega: base.omega(x),
        j: base.j(x),
        base_gamma: base.christoffel(x)?,
        c: vec![0.0; m * m * m],
        jets: metric.jets(p, scheme)?,
        g,
        ginv,
    })
}

/// Evaluates the closed-form connection table.
pub fn christoffel_frame(fp: &FrameParams, variant: Variant) -> Result<FrameTable> {
    match variant {
        Variant::Ansatz => match fp.jets {
            ProfileJets::Firm { sigma, beta } => Ok(ansatz_table(fp, sigma, beta)),
            ProfileJets::General { .. } => Err(GeoError::InvalidParameter(
                "the ansatz table needs σ and β̃ as functions of t".into(),
            )),
        },
        Variant::General => Ok(general_table(fp)),
    }
}

fn ansatz_table(fp: &FrameParams, sigma: [f64; 2], beta: [f64; 2]) -> FrameTable {
    let m = fp.base_dim();
    let n = m + 2;
    let q = q_idx(n);
    let [s, ds] = sigma;
    let [b, db] = beta;
    let mut t = FrameTable::zeros(n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                t.set(e_idx(i), e_idx(j), e_idx(k), fp.base_gamma.get(k, i, j));
            }
            t.set(e_idx(i), e_idx(j), P, 2.0 * b * ds * fp.g[(i, j)]);
            t.set(e_idx(i), e_idx(j), q, -0.5 * fp.omega[(i, j)] - fp.g[(i, j)] * ds);
        }
        for k in 0..m {
            let delta = if i == k { 1.0 } else { 0.0 };
            let v = -fp.j[(k, i)] / (4.0 * s) + ds * delta / (2.0 * s);
            t.set(e_idx(i), P, e_idx(k), v);
            t.set(P, e_idx(i), e_idx(k), v);
            let v = -b * fp.j[(k, i)] / (2.0 * s);
            t.set(e_idx(i), q, e_idx(k), v);
            t.set(q, e_idx(i), e_idx(k), v);
        }
    }
    t.set(P, q, P, db);
    t.set(q, P, P, db);
    t.set(q, q, P, 2.0 * b * db);
    t.set(q, q, q, -db);
    t
}

fn general_table(fp: &FrameParams) -> FrameTable {
    let m = fp.base_dim();
    let n = m + 2;
    let q = q_idx(n);
    let ProfileJets::General {
        sigma,
        alpha,
        beta,
        gamma,
    } = fp.jets.to_general(m)
    else {
        unreachable!("to_general returns the general form")
    };
    let (g, gi, om) = (&fp.g, &fp.ginv, &fp.omega);
    let s = sigma.value;
    let a = alpha.value;
    let b = beta.value;
    let gam: Vec<f64> = gamma.iter().map(|j| j.value).collect();
    let r = 0..m;

    // γ♭_i and its frame derivatives E_i(γ♭_k)
    let gl: Vec<f64> = r.clone().map(|i| r.clone().map(|t| gam[t] * g[(t, i)]).sum()).collect();
    let egl = |i: usize, k: usize| -> f64 {
        r.clone()
            .map(|t| gamma[t].e[i] * g[(t, k)] + gam[t] * fp.dg[i][(t, k)])
            .sum()
    };
    let gg: f64 = r.clone().map(|i| gam[i] * gl[i]).sum();
    // g_o(P(γ), E_i) and g_o(Q(γ), E_i)
    let pg: Vec<f64> = r
        .clone()
        .map(|i| r.clone().map(|t| gamma[t].p * g[(t, i)]).sum())
        .collect();
    let qg: Vec<f64> = r
        .clone()
        .map(|i| r.clone().map(|t| gamma[t].q * g[(t, i)]).sum())
        .collect();
    // components of grad σ / σ-weighted pieces
    let grad_e = |k: usize, f: &Jet| -> f64 { r.clone().map(|l| gi[(k, l)] * f.e[l]).sum::<f64>() - gam[k] / a * f.p };
    let grad_p = |f: &Jet| -> f64 {
        2.0 / a * f.q + (gg - 4.0 * b) / (a * a) * f.p - r.clone().map(|l| gam[l] * f.e[l]).sum::<f64>() / a
    };
    let s_ijk = |i: usize, j: usize, k: usize| 0.25 * (om[(i, k)] * gl[j] + om[(j, k)] * gl[i] - om[(i, j)] * gl[k]);
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let gom = |k: usize, i: usize| -> f64 { r.clone().map(|l| gi[(k, l)] * om[(i, l)]).sum() };
    let gam_om = |i: usize| -> f64 { r.clone().map(|l| gam[l] * om[(i, l)]).sum() };
    let gsig_p = grad_p(&sigma);
    let sum_gam = |f: &dyn Fn(usize) -> f64| -> f64 { r.clone().map(|l| gam[l] * f(l)).sum() };

    let mut t = FrameTable::zeros(n);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                let mut v: f64 = r
                    .clone()
                    .map(|l| gi[(k, l)] * (fp.base_first_kind(i, j, l) + s_ijk(i, j, l)))
                    .sum();
                v += gam[k] * om[(i, j)] / 4.0;
                v += sigma.e[i] * delta(j, k) / (2.0 * s) + sigma.e[j] * delta(i, k) / (2.0 * s);
                v -= g[(i, j)] / (2.0 * s) * grad_e(k, &sigma);
                t.set(e_idx(i), e_idx(j), e_idx(k), v);
            }
            let v = (egl(i, j) + egl(j, i)) / (2.0 * a)
                - gg * om[(i, j)] / (4.0 * a)
                - sum_gam(&|l| fp.base_first_kind(i, j, l) + s_ijk(i, j, l)) / a
                - g[(i, j)] / (2.0 * s) * gsig_p;
            t.set(e_idx(i), e_idx(j), P, v);
            t.set(e_idx(i), e_idx(j), q, -om[(i, j)] / 2.0 - g[(i, j)] * sigma.p / (a * s));
        }
        for k in 0..m {
            let v = a * gom(k, i) / 4.0 + sigma.p * delta(i, k) / (2.0 * s);
            t.set(e_idx(i), P, e_idx(k), v);
            t.set(P, e_idx(i), e_idx(k), v);
            let mut v: f64 = r.clone().map(|l| gi[(k, l)] * (egl(i, l) - egl(l, i))).sum::<f64>() / 4.0;
            v += b / 2.0 * gom(k, i);
            for l in 0..m {
                for rr in 0..m {
                    for tt in 0..m {
                        v -= gam[l] / 4.0 * fp.c(i, rr, tt) * g[(tt, l)] * gi[(k, rr)];
                    }
                }
            }
            v += -gam[k] / (4.0 * a) * alpha.e[i] + gam[k] / (4.0 * a) * pg[i];
            v += sigma.q * delta(i, k) / (2.0 * s) - gl[i] / (4.0 * s) * grad_e(k, &sigma);
            t.set(e_idx(i), q, e_idx(k), v);
            t.set(q, e_idx(i), e_idx(k), v);
        }
        let v = alpha.e[i] / (2.0 * a) + pg[i] / (2.0 * a) - gam_om(i) / 4.0 + sigma.e[i] / (2.0 * s);
        t.set(e_idx(i), P, P, v);
        t.set(P, e_idx(i), P, v);
        let v = beta.e[i] / a + gg * alpha.e[i] / (4.0 * a * a) - gg * pg[i] / (4.0 * a * a) - b * alpha.e[i] / (a * a)
            + b * pg[i] / (a * a)
            - sum_gam(&|l| egl(i, l)) / (4.0 * a)
            + sum_gam(&|l| egl(l, i)) / (4.0 * a)
            - b * gam_om(i) / (2.0 * a)
            - gl[i] / (4.0 * s) * gsig_p;
        t.set(e_idx(i), q, P, v);
        t.set(q, e_idx(i), P, v);
        let v = alpha.e[i] / (2.0 * a) - pg[i] / (2.0 * a) + sigma.e[i] / (2.0 * s) - gl[i] / (2.0 * a * s) * sigma.p;
        t.set(e_idx(i), q, q, v);
        t.set(q, e_idx(i), q, v);
    }
    for k in 0..m {
        let v = gamma[k].p / 4.0
            - r.clone().map(|l| gi[(k, l)] * alpha.e[l]).sum::<f64>() / 4.0
            - a / (4.0 * s) * grad_e(k, &sigma);
        t.set(P, q, e_idx(k), v);
        t.set(q, P, e_idx(k), v);
        let v = r.clone().map(|l| gi[(k, l)] * qg[l]).sum::<f64>() / 2.0
            - r.clone().map(|l| gi[(k, l)] * beta.e[l]).sum::<f64>() / 2.0
            - gam[k] / (2.0 * a) * alpha.q
            + gam[k] / (2.0 * a) * beta.p
            - b / (2.0 * s) * grad_e(k, &sigma);
        t.set(q, q, e_idx(k), v);
    }
    t.set(P, P, P, alpha.p / a + sigma.p / s);
    let ge_sigma = sum_gam(&|l| sigma.e[l]);
    let v = beta.p / a - sum_gam(&|l| pg[l]) / (4.0 * a) + sum_gam(&|l| alpha.e[l]) / (4.0 * a) + sigma.q / (2.0 * s)
        - (sigma.q + (gg - 4.0 * b) / (2.0 * a) * sigma.p - ge_sigma / 2.0) / (2.0 * s);
    t.set(P, q, P, v);
    t.set(q, P, P, v);
    let v = beta.q / a + gg * alpha.q / (2.0 * a * a) - gg * beta.p / (2.0 * a * a) - 2.0 * b * alpha.q / (a * a)
        + 2.0 * b * beta.p / (a * a)
        - sum_gam(&|l| qg[l]) / (2.0 * a)
        + sum_gam(&|l| beta.e[l]) / (2.0 * a)
        - b / s * (sigma.q / a + (gg - 4.0 * b) / (2.0 * a * a) * sigma.p - ge_sigma / (2.0 * a));
    t.set(q, q, P, v);
    t.set(q, q, q, alpha.q / a - beta.p / a + sigma.q / s - b / (a * s) * sigma.p);
    t
}

/// The coordinate Levi-Civita connection transported to the frame:
/// `Γ(A, B, ·) = F⁻¹ (∇_{F_A} F_B)`, with `∂F` from `∂η` in closed form.
pub fn transported_table(gamma: &ConnectionCoeffs, eta: &DVector<f64>, deta: &DMatrix<f64>) -> FrameTable {
    let m = eta.len();
    let n = m + 2;
    let f = frame_matrix(eta);
    let finv = coframe_matrix(eta);
    let mut t = FrameTable::zeros(n);
    for a in 0..n {
        let fa = f.column(a);
        for b in 0..n {
            let fb = f.column(b);
            // F_A(F_B): only Ê columns vary, through −η_i ∂_u
            let mut dfb = vec![0.0; n];
            if (1..=m).contains(&b) {
                let i = b - 1;
                dfb[1] = -(0..m).map(|k| fa[2 + k] * deta[(k, i)]).sum::<f64>();
            }
            let nabla = gamma.covariant(fa.as_slice(), fb.clone_owned().as_slice(), &dfb);
            let comps = &finv * DVector::from_vec(nabla);
            for c in 0..n {
                t.set(a, b, c, comps[c]);
            }
        }
    }
    t
}

/// Largest difference between the closed-form table and the transported
/// coordinate connection at `p`.
pub fn frame_crosscheck<M: BundleMetric + ?Sized>(
    metric: &M,
    p: &[f64],
    variant: Variant,
    scheme: Scheme,
) -> Result<f64> {
    metric.chart().check(p, scheme.reach_first())?;
    let base = &metric.sasaki().base;
    let x = &p[2..];
    let gamma = christoffel_coordinate(metric, p, scheme)?;
    let transported = transported_table(&gamma, &base.eta(x), &base.deta(x));
    let closed = christoffel_frame(&frame_params(metric, p, Scheme::Analytic)?, variant)?;
    Ok(closed.max_abs_diff(&transported))
}

/// Cross-check report over the given points.
pub fn frame_crosscheck_report<M: BundleMetric + ?Sized>(
    name: &str,
    metric: &M,
    points: &[Vec<f64>],
    variant: Variant,
    tolerance: f64,
) -> Report {
    let results = par::map(points, |p| {
        (p.clone(), frame_crosscheck(metric, p, variant, Scheme::Analytic))
    });
    let mut r = Report::default();
    r.push(Check::from_results(
        name,
        "closed-form frame connection = coordinate Levi-Civita connection",
        &format!("{} points", points.len()),
        tolerance,
        results,
    ));
    r
}

/// Largest components of `[Ê_i, Ê_j] + ω_ij q_o` and of all brackets
/// involving `p_o` or `q_o`, by central differences.
pub fn frame_bracket_residuals<M: BundleMetric + ?Sized>(metric: &M, p: &[f64]) -> Result<(f64, f64)> {
    let base = metric.sasaki().base.clone();
    let n = metric.dim();
    let m = n - 2;
    let chart = metric.chart();
    let field = |a: usize| {
        let base = base.clone();
        move |q: &[f64]| frame_matrix(&base.eta(&q[2..])).column(a).clone_owned()
    };
    let omega = base.omega(&p[2..]);
    let mut horizontal: f64 = 0.0;
    let mut vertical: f64 = 0.0;
    for a in 0..n {
        for b in (a + 1)..n {
            let br = lie_bracket(chart, &field(a), &field(b), p, STEP_FIRST)?;
            let is_e = |x: usize| (1..=m).contains(&x);
            if is_e(a) && is_e(b) {
                let mut expected = DVector::zeros(n);
                expected[1] = -omega[(a - 1, b - 1)];
                horizontal = horizontal.max((br - expected).amax());
            } else {
                vertical = vertical.max(br.amax());
            }
        }
    }
    Ok((horizontal, vertical))
}

/// Frame brackets `[X_A, X_B] = c^F_{AB} X_F` as a table `(a, b, f)`.
fn frame_brackets(omega: &DMatrix<f64>) -> FrameTable {
    let m = omega.nrows();
    let n = m + 2;
    let mut c = FrameTable::zeros(n);
    for i in 0..m {
        for j in 0..m {
            c.set(e_idx(i), e_idx(j), q_idx(n), -omega[(i, j)]);
        }
    }
    c
}

/// Ricci tensor in the frame, assembled from the closed-form table and its
/// frame derivatives (central differences of step `h` along each `X_A`):
/// `R_{ABC}{}^D = X_A Γ_{BC}^D − X_B Γ_{AC}^D + Γ_{BC}^E Γ_{AE}^D
/// − Γ_{AC}^E Γ_{BE}^D − c^F_{AB} Γ_{FC}^D`, `Ric_{BC} = R_{ABC}{}^A`.
pub fn frame_ricci<M: BundleMetric + ?Sized>(metric: &M, p: &[f64], variant: Variant, h: f64) -> Result<DMatrix<f64>> {
    metric.chart().check(p, stencil::REACH * h)?;
    let n = metric.dim();
    let base = &metric.sasaki().base;
    let x = &p[2..];
    let f = frame_matrix(&base.eta(x));
    let table = |q: &[f64]| -> Vec<f64> {
        frame_params(metric, q, Scheme::Analytic)
            .and_then(|fp| christoffel_frame(&fp, variant))
            .map(|t| t.vals)
            .unwrap_or_else(|_| vec![f64::NAN; n * n * n])
    };
    let gam = FrameTable { n, vals: table(p) };
    if gam.vals.iter().any(|v| !v.is_finite()) {
        // surface the underlying error
        christoffel_frame(&frame_params(metric, p, Scheme::Analytic)?, variant)?;
    }
    let dgam: Vec<FrameTable> = (0..n)
        .map(|a| FrameTable {
            n,
            vals: stencil::directional(&table, p, f.column(a).as_slice(), h),
        })
        .collect();
    let c = frame_brackets(&base.omega(x));
    let mut ric = DMatrix::zeros(n, n);
    for bb in 0..n {
        for cc in 0..n {
            let mut acc = 0.0;
            for a in 0..n {
                // D = A
                let mut v = dgam[a].get(bb, cc, a) - dgam[bb].get(a, cc, a);
                for e in 0..n {
                    v += gam.get(bb, cc, e) * gam.get(a, e, a) - gam.get(a, cc, e) * gam.get(bb, e, a);
                }
                for ff in 0..n {
                    v -= c.get(a, bb, ff) * gam.get(ff, cc, a);
                }
                acc += v;
            }
            ric[(bb, cc)] = acc;
        }
    }
    Ok(ric)
}

/// The metric in the frame, `Fᵀ g F`.
pub fn frame_metric<M: BundleMetric + ?Sized>(metric: &M, p: &[f64]) -> DMatrix<f64> {
    let f = frame_matrix(&metric.sasaki().base.eta(&p[2..]));
    f.transpose() * metric.components(p) * f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::lorentz::{build_lorentz_firm, build_lorentz_general, FirmProfile, GeneralProfile, ScalarField};
    use crate::bundle::sasaki::{build_sasaki, SasakiChart};
    use crate::kahler::{make_base, BaseKind};
    use crate::tensor::connection::curvature_coordinate;
    use crate::tensor::metric::MetricField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sasaki(kind: BaseKind) -> SasakiChart {
        let l0 = if kind == BaseKind::Torus { 0.0 } else { 1.0 };
        build_sasaki(make_base(kind, l0).unwrap()).unwrap()
    }

    fn taub_nut_like() -> FirmProfile {
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

    fn random_points(chart: &crate::tensor::chart::Chart, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                chart
                    .sample_box()
                    .iter()
                    .map(|&(lo, hi)| rng.random_range(lo..hi))
                    .collect()
            })
            .collect()
    }

    #[test]
    fn frame_and_coframe_are_inverse() {
        let eta = DVector::from_vec(vec![0.3, -1.2, 0.5, 2.0]);
        let prod = coframe_matrix(&eta) * frame_matrix(&eta);
        assert_eq!(prod, DMatrix::identity(6, 6));
    }

    #[test]
    fn flat_torus_tables_agree_exactly() {
        let s = sasaki(BaseKind::Torus);
        let g = build_lorentz_firm(&s, &FirmProfile::constant(1.0, 0.0, (-1.0, 1.0))).unwrap();
        for p in random_points(g.chart(), 20, 1) {
            for v in [Variant::Ansatz, Variant::General] {
                assert!(frame_crosscheck(&g, &p, v, Scheme::Analytic).unwrap() <= 1e-12);
            }
        }
    }

    #[test]
    fn constant_profile_torus_agrees() {
        let s = sasaki(BaseKind::Torus);
        let g = build_lorentz_firm(&s, &FirmProfile::constant(2.0, 0.7, (-1.0, 1.0))).unwrap();
        for p in random_points(g.chart(), 20, 2) {
            assert!(frame_crosscheck(&g, &p, Variant::Ansatz, Scheme::Analytic).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn ansatz_matches_coordinates_on_curved_bases() {
        for kind in [BaseKind::S2Spherical, BaseKind::S2Stereographic, BaseKind::s2xs2()] {
            let s = sasaki(kind.clone());
            let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
            for p in random_points(g.chart(), 10, 3) {
                for v in [Variant::Ansatz, Variant::General] {
                    let d = frame_crosscheck(&g, &p, v, Scheme::Analytic).unwrap();
                    assert!(d <= 1e-9, "{kind} {v:?} {d}");
                }
            }
        }
    }

    #[test]
    fn ansatz_qqq_entry() {
        let s = sasaki(BaseKind::S2Spherical);
        let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
        let fp = frame_params(&g, &[1.0, 0.0, 1.0, 0.5], Scheme::Analytic).unwrap();
        let t = christoffel_frame(&fp, Variant::Ansatz).unwrap();
        assert!((t.get(3, 3, 3) - 1.0).abs() < 1e-15);
        assert_eq!(t.get(1, P, P), 0.0);
        assert_eq!(t.get(P, 1, P), 0.0);
        assert_eq!(t.get(1, P, 3), 0.0);
    }

    #[test]
    fn general_reduces_to_ansatz() {
        let s = sasaki(BaseKind::S2Spherical);
        let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
        for p in random_points(g.chart(), 10, 4) {
            let fp = frame_params(&g, &p, Scheme::Analytic).unwrap();
            let a = christoffel_frame(&fp, Variant::Ansatz).unwrap();
            let b = christoffel_frame(&fp, Variant::General).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12);
        }
    }

    fn gamma_profile(label: &str) -> GeneralProfile {
        GeneralProfile {
            label: label.into(),
            interval: (-1.0, 1.0),
            sigma: ScalarField::new(|p| 1.0 + 0.1 * p[0] * p[0] + 0.05 * p[2] * p[3] + 0.02 * p[1] * p[0])
                .with_gradient(|p| vec![0.2 * p[0] + 0.02 * p[1], 0.02 * p[0], 0.05 * p[3], 0.05 * p[2]]),
            alpha: ScalarField::new(|p| 0.5 + 0.1 * p[0].sin() + 0.03 * p[2] + 0.025 * p[1])
                .with_gradient(|p| vec![0.1 * p[0].cos(), 0.025, 0.03, 0.0]),
            beta: ScalarField::new(|p| 0.3 * p[0] + 0.1 * p[3] * p[3] + 0.05 * p[1] * p[2])
                .with_gradient(|p| vec![0.3, 0.05 * p[2], 0.05 * p[1], 0.2 * p[3]]),
            gamma: vec![
                ScalarField::new(|p| 0.2 * p[0] + 0.1 * p[3] + 0.03 * p[1])
                    .with_gradient(|_| vec![0.2, 0.03, 0.0, 0.1]),
                ScalarField::new(|p| -1.0 / 7.0 + 0.1 * p[2] * p[0] + 0.04 * p[1])
                    .with_gradient(|p| vec![0.1 * p[2], 0.04, 0.1 * p[0], 0.0]),
            ],
        }
    }

    #[test]
    fn general_table_without_gamma_matches_on_torus() {
        let s = sasaki(BaseKind::Torus);
        let mut prof = gamma_profile("no-gamma");
        prof.gamma = vec![ScalarField::constant(0.0), ScalarField::constant(0.0)];
        let g = build_lorentz_general(&s, &prof).unwrap();
        for p in random_points(g.chart(), 10, 5) {
            let d = frame_crosscheck(&g, &p, Variant::General, Scheme::Analytic).unwrap();
            assert!(d <= 1e-10, "{d}");
        }
    }

    #[test]
    fn general_table_with_gamma() {
        for kind in [BaseKind::Torus, BaseKind::S2Spherical] {
            let s = sasaki(kind.clone());
            let g = build_lorentz_general(&s, &gamma_profile("gamma")).unwrap();
            let mut worst: f64 = 0.0;
            for p in random_points(g.chart(), 10, 6) {
                worst = worst.max(frame_crosscheck(&g, &p, Variant::General, Scheme::Analytic).unwrap());
            }
            assert!(worst <= 1e-9, "{kind}: {worst}");
        }
    }

    #[test]
    fn brackets_hold() {
        for kind in [BaseKind::S2Spherical, BaseKind::s2xs2()] {
            let s = sasaki(kind);
            let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
            for p in random_points(g.chart(), 5, 7) {
                let (h, v) = frame_bracket_residuals(&g, &p).unwrap();
                assert!(h <= 1e-6 && v <= 1e-8, "{h} {v}");
            }
        }
    }

    #[test]
    fn frame_ricci_matches_coordinate_ricci() {
        let s = sasaki(BaseKind::S2Spherical);
        let g = build_lorentz_firm(&s, &taub_nut_like()).unwrap();
        for p in random_points(g.chart(), 5, 8) {
            let f = frame_matrix(&s.base.eta(&p[2..]));
            let coord = curvature_coordinate(&g, &p, Scheme::curvature()).unwrap().ricci;
            let expected = f.transpose() * coord * &f;
            for v in [Variant::Ansatz, Variant::General] {
                let ric = frame_ricci(&g, &p, v, STEP_FIRST).unwrap();
                assert!((&ric - &expected).amax() < 1e-6, "{v:?} {}", (&ric - &expected).amax());
            }
        }
    }
}
