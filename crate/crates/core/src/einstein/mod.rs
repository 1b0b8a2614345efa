//! The closed-form Einstein family of firmly compatible metrics over a
//! Kähler-Einstein base: `σ(t) = t²/(16C) + C` and a rational `β̃(t)`, with
//! residual checks at the level of the reduced ODEs and of the full Ricci
//! tensor.

pub mod poly;
pub mod taubnut;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};

use crate::bundle::frame::{frame_metric, frame_ricci, Variant};
use crate::bundle::lorentz::{BundleMetric, FirmProfile};
use crate::error::{GeoError, Result};
use crate::par;
use crate::report::{Check, Report};
use crate::tensor::connection::curvature_coordinate;
use crate::tensor::metric::{MetricField, Scheme};
use crate::tolerance::STEP_CURVATURE;

pub use poly::{integer, rational, Poly};
pub use taubnut::{taub_nut_transform, TaubNut, TaubNutParams};

/// Parameters `(n, Λ, Λ₀, B, C)` of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EinsteinParams {
    /// Dimension of the total space, even and at least 4.
    pub n: usize,
    pub lambda: f64,
    pub lambda0: f64,
    pub b: f64,
    /// Positive.
    pub c: f64,
}

impl EinsteinParams {
    pub fn new(n: usize, lambda: f64, lambda0: f64, b: f64, c: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(GeoError::InvalidParameter(format!(
                "n = {n} must be even and at least 4"
            )));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(GeoError::InvalidParameter(format!("C = {c} must be positive")));
        }
        if ![lambda, lambda0, b].iter().all(|v| v.is_finite()) {
            return Err(GeoError::InvalidParameter("non-finite parameter".into()));
        }
        Ok(Self {
            n,
            lambda,
            lambda0,
            b,
            c,
        })
    }

    /// `n = 4`, `Λ = 0`, `Λ₀ = 1`, `B = 0`, `C = 1/4`.
    pub fn taub_nut_default() -> Self {
        Self {
            n: 4,
            lambda: 0.0,
            lambda0: 1.0,
            b: 0.0,
            c: 0.25,
        }
    }

    /// `n/2 − 1`.
    pub fn half_rank(&self) -> u32 {
        (self.n / 2 - 1) as u32
    }
}

/// `(σ, σ′, σ″)` for `σ(t) = t²/(16C) + C`.
pub fn sigma_profile(c: f64, t: f64) -> [f64; 3] {
    [t * t / (16.0 * c) + c, t / (8.0 * c), 1.0 / (8.0 * c)]
}

/// `σ` as an exact polynomial.
pub fn sigma_poly(c: f64) -> Poly {
    let c = rational(c);
    Poly::new(vec![c.clone(), BigRational::zero(), (integer(16) * c).recip()])
}

/// `b² − 4ac` of the quadratic `σ`, exactly.
pub fn sigma_discriminant(c: f64) -> BigRational {
    let s = sigma_poly(c);
    s.coeff(1) * s.coeff(1) - integer(4) * s.coeff(2) * s.coeff(0)
}

/// A rational function `numerator / denominator` of `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalProfile {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl RationalProfile {
    pub fn eval_exact(&self, t: &BigRational) -> BigRational {
        self.numerator.eval(t) / self.denominator.eval(t)
    }

    /// Value and first two derivatives, exactly.
    pub fn jet_exact(&self, t: &BigRational) -> [BigRational; 3] {
        let (n, d) = (&self.numerator, &self.denominator);
        let (n1, d1) = (n.derivative(), d.derivative());
        let (n2, d2) = (n1.derivative(), d1.derivative());
        let dv = d.eval(t);
        let f = n.eval(t) / &dv;
        let f1 = (n1.eval(t) - &f * d1.eval(t)) / &dv;
        let f2 = (n2.eval(t) - integer(2) * &f1 * d1.eval(t) - &f * d2.eval(t)) / &dv;
        [f, f1, f2]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.numerator.eval_f64(t) / self.denominator.eval_f64(t)
    }

    /// Value and first two derivatives in floating point.
    pub fn jet(&self, t: f64) -> [f64; 3] {
        let (n, d) = (&self.numerator, &self.denominator);
        let (n1, d1) = (n.derivative(), d.derivative());
        let (n2, d2) = (n1.derivative(), d1.derivative());
        let dv = d.eval_f64(t);
        let f = n.eval_f64(t) / dv;
        let f1 = (n1.eval_f64(t) - f * d1.eval_f64(t)) / dv;
        let f2 = (n2.eval_f64(t) - 2.0 * f1 * d1.eval_f64(t) - f * d2.eval_f64(t)) / dv;
        [f, f1, f2]
    }

    /// Precomputes the derivative polynomials with float coefficients, for
    /// repeated evaluation on grids.
    pub fn float_jet(&self) -> impl Fn(f64) -> [f64; 3] + Send + Sync + 'static {
        let to_f = |p: &Poly| -> Vec<f64> {
            p.coeffs()
                .iter()
                .map(|c| num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN))
                .collect()
        };
        let n = [
            to_f(&self.numerator),
            to_f(&self.numerator.derivative()),
            to_f(&self.numerator.derivative().derivative()),
        ];
        let d = [
            to_f(&self.denominator),
            to_f(&self.denominator.derivative()),
            to_f(&self.denominator.derivative().derivative()),
        ];
        move |t| {
            let h = |c: &[f64]| c.iter().rev().fold(0.0, |acc, a| acc * t + a);
            let dv = h(&d[0]);
            let f = h(&n[0]) / dv;
            let f1 = (h(&n[1]) - f * h(&d[1])) / dv;
            let f2 = (h(&n[2]) - 2.0 * f1 * h(&d[1]) - f * h(&d[2])) / dv;
            [f, f1, f2]
        }
    }
}

/// `P(x) = (16C² + x)^{n/2−1} (16CΛ₀ − Λ(16C² + x)) / 4`, so that the
/// integrand is `P(s²)/s²`.
fn integrand_numerator(p: &EinsteinParams) -> Poly {
    let c = rational(p.c);
    let c16sq = integer(16) * &c * &c;
    let shift = Poly::new(vec![c16sq.clone(), BigRational::one()]);
    let lin = Poly::new(vec![
        integer(16) * &c * rational(p.lambda0) - rational(p.lambda) * &c16sq,
        -rational(p.lambda),
    ]);
    (&shift.pow(p.half_rank()) * &lin).scale(&BigRational::new(1.into(), 4.into()))
}

/// `β̃(t) = t (B − ∫₁ᵗ P(s²)/s² ds) / (t² + 16C²)^{n/2−1}` with the integral
/// taken exactly. Writing `P(x) = Σ c_j x^j`, the antiderivative is
/// `A(s) = −c₀/s + Σ_{j≥1} c_j s^{2j−1}/(2j−1)`, and multiplying by `t`
/// cancels the pole, so the numerator is a polynomial.
pub fn beta_profile(p: &EinsteinParams) -> RationalProfile {
    let pc = integrand_numerator(p);
    let deg = pc.degree().unwrap_or(0);
    let c0 = pc.coeff(0);
    // A(1)
    let mut a1 = -c0.clone();
    for j in 1..=deg {
        a1 += pc.coeff(j) / integer(2 * j as i64 - 1);
    }
    let mut num = vec![BigRational::zero(); 2 * deg + 2];
    num[0] = c0;
    num[1] = rational(p.b) + a1;
    for j in 1..=deg {
        num[2 * j] -= pc.coeff(j) / integer(2 * j as i64 - 1);
    }
    let c = rational(p.c);
    let den = Poly::new(vec![integer(16) * &c * &c, BigRational::zero(), BigRational::one()]).pow(p.half_rank());
    RationalProfile {
        numerator: Poly::new(num),
        denominator: den,
    }
}

/// `β̃(0) = 4C(Λ₀ − CΛ)`.
pub fn beta_at_origin(p: &EinsteinParams) -> f64 {
    4.0 * p.c * (p.lambda0 - p.c * p.lambda)
}

/// Residuals of the reduced Einstein equations for given jets of `σ` and
/// `β̃` at one `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduced<T> {
    /// First-order linear equation for `β̃` with `σ` substituted.
    pub ode: T,
    /// Base block.
    pub r_base: T,
    /// `(p_o, q_o)` block.
    pub r_pq: T,
    /// `(p_o, p_o)` block.
    pub r_pp: T,
}

impl Reduced<f64> {
    pub fn max_abs(&self) -> f64 {
        self.ode
            .abs()
            .max(self.r_base.abs())
            .max(self.r_pq.abs())
            .max(self.r_pp.abs())
    }
}

impl Reduced<BigRational> {
    pub fn all_zero(&self) -> bool {
        self.ode.is_zero() && self.r_base.is_zero() && self.r_pq.is_zero() && self.r_pp.is_zero()
    }
}

/// Evaluates the four residuals in any field. `n`, `Λ`, `Λ₀`, `C` and `t`
/// are given in that field, together with `(σ, σ′, σ″)` and `(β̃, β̃′, β̃″)`.
#[allow(clippy::too_many_arguments)]
fn reduced_in<T: Num + Clone + FromPrimitive>(
    n: T,
    lambda: T,
    lambda0: T,
    c: T,
    t: T,
    s: &[T; 3],
    b: &[T; 3],
) -> Reduced<T> {
    let k = |v: i64| T::from_i64(v).expect("small integer");
    let (s0, s1, s2) = (s[0].clone(), s[1].clone(), s[2].clone());
    let (b0, b1, b2) = (b[0].clone(), b[1].clone(), b[2].clone());
    let n4 = n.clone() - k(4);
    let n2 = n - k(2);

    let sig_t = t.clone() * t.clone() / (k(16) * c.clone()) + c.clone();
    let q = t.clone() / (k(8) * c.clone());
    let ode = t / (k(4) * c.clone()) * b1.clone()
        + (n4.clone() / sig_t.clone() * q.clone() * q - k(1) / (k(2) * sig_t.clone()) + k(1) / (k(4) * c)) * b0.clone()
        - sig_t * lambda.clone()
        + lambda0.clone();

    let r_base = k(2) * b1.clone() * s1.clone()
        + (n4 / (k(2) * s0.clone()) * s1.clone() * s1.clone() - k(1) / (k(4) * s0.clone()) + s2.clone())
            * k(2)
            * b0.clone()
        - s0.clone() * lambda.clone()
        + lambda0;

    let r_pq =
        k(2) * b2 + n2.clone() / s0.clone() * b1 * s1.clone() + n2.clone() / (k(4) * s0.clone() * s0.clone()) * b0
            - lambda;

    let r_pp = n2 / (k(4) * s0.clone() * s0.clone()) * (s1.clone() * s1 + k(1) / k(4) - k(2) * s0 * s2);

    Reduced {
        ode,
        r_base,
        r_pq,
        r_pp,
    }
}

/// Reduced residuals in floating point for arbitrary jets.
pub fn reduced_residuals(p: &EinsteinParams, t: f64, sigma: [f64; 3], beta: [f64; 3]) -> Reduced<f64> {
    reduced_in(p.n as f64, p.lambda, p.lambda0, p.c, t, &sigma, &beta)
}

/// Reduced residuals of the closed-form profiles at `t`, in floating point.
pub fn reduced_einstein_residuals(p: &EinsteinParams, beta: &RationalProfile, t: f64) -> Reduced<f64> {
    reduced_residuals(p, t, sigma_profile(p.c, t), beta.jet(t))
}

/// Reduced residuals of the closed-form profiles at a rational `t`, exactly.
pub fn reduced_einstein_residuals_exact(
    p: &EinsteinParams,
    beta: &RationalProfile,
    t: &BigRational,
) -> Reduced<BigRational> {
    let c = rational(p.c);
    let s = sigma_poly(p.c);
    let sig = [s.eval(t), s.derivative().eval(t), s.derivative().derivative().eval(t)];
    reduced_in(
        integer(p.n as i64),
        rational(p.lambda),
        rational(p.lambda0),
        c,
        t.clone(),
        &sig,
        &beta.jet_exact(t),
    )
}

/// The base-block bracket `−2σσ″ + σ′² + ¼` as a polynomial in `t`.
pub fn sigma_bracket(sigma: &Poly) -> Poly {
    let d1 = sigma.derivative();
    let d2 = d1.derivative();
    let quarter = Poly::constant(BigRational::new(1.into(), 4.into()));
    let lhs = &(sigma * &d2).scale(&integer(-2)) + &(&d1 * &d1);
    &lhs + &quarter
}

/// Integrates the first-order equation `β̃′ = (4C/t)(σΛ − Λ₀ − k(t)β̃)` by
/// classical RK4 from `t = 1`, starting at `beta1`.
pub fn beta_rk4(p: &EinsteinParams, beta1: f64, t_end: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    let p = *p;
    let rhs = move |t: f64, y: &[f64]| {
        let s = t * t / (16.0 * p.c) + p.c;
        let q = t / (8.0 * p.c);
        let k = (p.n as f64 - 4.0) / s * q * q - 1.0 / (2.0 * s) + 1.0 / (4.0 * p.c);
        vec![4.0 * p.c / t * (s * p.lambda - p.lambda0 - k * y[0])]
    };
    Ok(crate::ode::rk4(rhs, 1.0, &[beta1], t_end, step)?
        .into_iter()
        .map(|(t, y)| (t, y[0]))
        .collect())
}

/// The firmly compatible profile pair of the family on a working interval.
pub fn einstein_profile(p: &EinsteinParams, interval: (f64, f64)) -> FirmProfile {
    let c = p.c;
    let beta = beta_profile(p).float_jet();
    FirmProfile::new(
        &format!(
            "einstein(n={},L={},L0={},B={},C={})",
            p.n, p.lambda, p.lambda0, p.b, p.c
        ),
        interval,
        move |t| sigma_profile(c, t),
        beta,
    )
}

/// Grid with `per_axis` samples of `t` and of every base coordinate over the
/// chart's sample box, `u` fixed at the middle of its range.
pub fn einstein_grid<M: MetricField + ?Sized>(metric: &M, per_axis: usize) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = metric
        .chart()
        .sample_box()
        .iter()
        .enumerate()
        .map(|(i, &(lo, hi))| {
            if i == 1 {
                vec![0.5 * (lo + hi)]
            } else {
                par::linspace(lo, hi, per_axis)
            }
        })
        .collect();
    par::cartesian(&axes)
}

/// `max |Ric − Λg|` over the grid, by the coordinate route (fourth-order
/// central differences of the metric) and by the frame route (closed-form
/// frame connection and its frame derivatives).
pub fn full_einstein_residual<M: BundleMetric + ?Sized>(
    name: &str,
    metric: &M,
    lambda: f64,
    grid: &[Vec<f64>],
    tolerance: f64,
) -> Report {
    let desc = format!("{} points", grid.len());
    let coord = par::map(grid, |p| {
        let r = curvature_coordinate(metric, p, Scheme::curvature())
            .map(|c| (&c.ricci - metric.components(p) * lambda).amax());
        (p.clone(), r)
    });
    let frame = par::map(grid, |p| {
        let r = frame_ricci(metric, p, Variant::Ansatz, STEP_CURVATURE)
            .map(|ric: DMatrix<f64>| (ric - frame_metric(metric, p) * lambda).amax());
        (p.clone(), r)
    });
    let mut r = Report::default();
    let anchor = "Ric = Λ g for the closed-form profiles";
    r.push(Check::from_results(
        &format!("{name}.coordinate"),
        anchor,
        &desc,
        tolerance,
        coord,
    ));
    r.push(Check::from_results(
        &format!("{name}.frame"),
        anchor,
        &desc,
        tolerance,
        frame,
    ));
    r
}

/// Largest `|Ric − Λg|` (coordinate route) over the grid, or the first error.
pub fn max_einstein_residual<M: BundleMetric + ?Sized>(metric: &M, lambda: f64, grid: &[Vec<f64>]) -> Result<f64> {
    par::map(grid, |p| {
        curvature_coordinate(metric, p, Scheme::curvature()).map(|c| (&c.ricci - metric.components(p) * lambda).amax())
    })
    .into_iter()
    .try_fold(0.0f64, |acc, r| r.map(|v| acc.max(v)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bundle::lorentz::build_lorentz_firm;
    use crate::bundle::sasaki::build_sasaki;
    use crate::kahler::{make_base, BaseKind};

    fn tn() -> EinsteinParams {
        EinsteinParams::taub_nut_default()
    }

    #[test]
    fn params_validate() {
        assert!(EinsteinParams::new(5, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(EinsteinParams::new(2, 0.0, 1.0, 0.0, 1.0).is_err());
        assert!(EinsteinParams::new(4, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(EinsteinParams::new(6, 1.0, 2.0, 3.0, 1.0).is_ok());
    }

    #[test]
    fn sigma_values() {
        assert_eq!(sigma_profile(0.7, 0.0)[0], 0.7);
        let s = sigma_profile(0.25, 2.0);
        assert_eq!((s[0], s[1], s[2]), (1.25, 1.0, 0.5));
        for c in [0.1, 0.25, 1.0, 3.7] {
            assert_eq!(sigma_discriminant(c), BigRational::new((-1).into(), 4.into()));
        }
    }

    #[test]
    fn sigma_bracket_vanishes_identically() {
        for c in [0.1, 0.25, 1.0, 3.7] {
            assert!(sigma_bracket(&sigma_poly(c)).is_zero());
        }
        let wrong = Poly::new(vec![rational(0.25), integer(0), integer(1)]);
        assert!(!sigma_bracket(&wrong).is_zero());
    }

    #[test]
    fn taub_nut_beta_is_the_expected_rational_function() {
        let b = beta_profile(&tn());
        for t in [0.0, 0.3, 1.0, 2.0, 7.5] {
            let want = -(t * t - 1.0) / (t * t + 1.0);
            assert!((b.eval(t) - want).abs() <= 1e-15, "t = {t}");
        }
        assert_eq!(b.eval_exact(&integer(1)), integer(0));
        assert_eq!(b.eval_exact(&integer(0)), integer(1));
    }

    #[test]
    fn beta_at_anchor_is_b_over_denominator() {
        let p = EinsteinParams::new(6, 1.0, 2.0, 3.0, 1.0).unwrap();
        let b = beta_profile(&p);
        assert_eq!(b.eval_exact(&integer(1)), integer(3) / integer(17).pow(2));
    }

    #[test]
    fn reduced_equations_exact_at_rational_points() {
        let cases = [
            tn(),
            EinsteinParams::new(6, 1.0, 2.0, 3.0, 1.0).unwrap(),
            EinsteinParams::new(8, -0.5, 1.5, -2.0, 0.75).unwrap(),
        ];
        for p in cases {
            let b = beta_profile(&p);
            for t in [1, 2, 5, 10] {
                let t = integer(t) / integer(4);
                assert!(reduced_einstein_residuals_exact(&p, &b, &t).all_zero(), "{p:?} at {t}");
            }
        }
    }

    #[test]
    fn reduced_equations_in_floating_point() {
        let p = EinsteinParams::new(6, 1.0, 2.0, 3.0, 1.0).unwrap();
        let b = beta_profile(&p);
        for t in [0.1, 0.5, 1.0, 2.0, 10.0] {
            assert!(reduced_einstein_residuals(&p, &b, t).max_abs() <= 1e-9, "t = {t}");
        }
        let b = beta_profile(&tn());
        assert!(reduced_einstein_residuals(&tn(), &b, 1.0).max_abs() <= 1e-12);
        assert!(reduced_einstein_residuals(&tn(), &b, 2.0).ode.abs() <= 1e-12);
    }

    #[test]
    fn perturbed_sigma_breaks_the_base_bracket() {
        let p = tn();
        let b = beta_profile(&p);
        let r = reduced_residuals(&p, 1.0, [1.0 + p.c, 2.0, 2.0], b.jet(1.0));
        assert!(r.r_pp.abs() > 1e-1);
    }

    #[test]
    fn float_jet_matches_exact_jet() {
        let p = EinsteinParams::new(6, 1.0, 2.0, 3.0, 1.0).unwrap();
        let b = beta_profile(&p);
        let f = b.float_jet();
        for t in [0.1, 1.0, 3.3] {
            let (a, e) = (f(t), b.jet(t));
            for k in 0..3 {
                assert!((a[k] - e[k]).abs() <= 1e-13 * (1.0 + e[k].abs()));
            }
        }
    }

    #[test]
    fn linear_in_b_exactly() {
        let p0 = EinsteinParams::new(6, 0.5, 1.0, 0.0, 0.75).unwrap();
        let p1 = EinsteinParams { b: 2.5, ..p0 };
        let (b0, b1) = (beta_profile(&p0), beta_profile(&p1));
        assert_eq!(b0.denominator, b1.denominator);
        let diff = &b1.numerator - &b0.numerator;
        assert_eq!(diff, Poly::monomial(rational(2.5), 1));
    }

    #[test]
    fn origin_value_independent_of_b() {
        for n in [4, 6, 8] {
            for lambda in [-1.0, 0.0, 1.5] {
                for lambda0 in [-2.0, 0.0, 1.0] {
                    for c in [0.2, 1.0, 2.5] {
                        let want = 4.0 * c * (lambda0 - c * lambda);
                        for b in [-10.0, 0.0, 10.0] {
                            let p = EinsteinParams::new(n, lambda, lambda0, b, c).unwrap();
                            let v = beta_profile(&p).eval(0.0);
                            assert!((v - want).abs() <= 1e-12 * (1.0 + want.abs()), "{p:?}: {v} vs {want}");
                            assert!((beta_at_origin(&p) - want).abs() == 0.0);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn einstein_taub_nut_on_small_grid() {
        let p = tn();
        let s = build_sasaki(make_base(BaseKind::S2Spherical, 1.0).unwrap()).unwrap();
        let g = build_lorentz_firm(&s, &einstein_profile(&p, (0.4, 2.1))).unwrap();
        let grid = einstein_grid(&g, 3);
        let r = full_einstein_residual("tn", &g, 0.0, &grid, 1e-5);
        assert!(r.all_pass(), "{}", r.to_human());
    }

    #[test]
    fn non_einstein_base_is_rejected() {
        let p = tn();
        let s = build_sasaki(make_base(BaseKind::PerturbedS2 { eps: 0.2 }, 1.0).unwrap()).unwrap();
        let g = build_lorentz_firm(&s, &einstein_profile(&p, (0.4, 2.1))).unwrap();
        let worst = max_einstein_residual(&g, 0.0, &einstein_grid(&g, 3)).unwrap();
        assert!(worst > 1e-2, "{worst}");
    }
}
