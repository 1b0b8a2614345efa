//! The 4D member over the round sphere in Taub-NUT coordinates
//! `(ť, v, ψ, φ)`, with `ť = t/(4ℓ)` and `v = Λ₀(u + ∫₀ᵗ ds/(2β̃))`.

use nalgebra::DMatrix;

use super::{beta_profile, einstein_profile, EinsteinParams, RationalProfile};
use crate::bundle::lorentz::{build_lorentz_firm, FirmMetric};
use crate::bundle::sasaki::build_sasaki;
use crate::error::{GeoError, Result};
use crate::kahler::{make_base, BaseKind};
use crate::ode::rk4;
use crate::par;
use crate::report::{Check, Report};
use crate::tensor::metric::MetricField;

/// Spacing of the sign scan of `β̃` before the coordinate change.
pub const HORIZON_SCAN: f64 = 1e-3;

/// Step of the RK4 quadrature for `∫₀ᵗ ds/(2β̃)`.
const V_STEP: f64 = 1e-3;

/// `ℓ = √C`, `m = B̌/(32ℓ³)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaubNutParams {
    pub ell: f64,
    pub m: f64,
    /// `B̌` for which the displayed `β̃` equals the closed-form one.
    pub b_check: f64,
    /// `B̌` as printed in the Taub-NUT parametrization.
    pub b_check_printed: f64,
}

/// `B̌ = B/Λ₀ + 4C(1 − 16C²)`.
pub fn b_check(b: f64, c: f64, lambda0: f64) -> f64 {
    b / lambda0 + 4.0 * c * (1.0 - 16.0 * c * c)
}

/// `B̌ = B(1 + 16C²)/(2Λ₀) + 4C(1 − 16C²)`. Agrees with [`b_check`] only when
/// `B = 0` or `C = 1/4`.
pub fn b_check_printed(b: f64, c: f64, lambda0: f64) -> f64 {
    b * (1.0 + 16.0 * c * c) / (2.0 * lambda0) + 4.0 * c * (1.0 - 16.0 * c * c)
}

/// `β̃ = Λ₀(B̌t − 4C(t² − 16C²))/(t² + 16C²)`.
pub fn displayed_beta(b_check: f64, c: f64, lambda0: f64, t: f64) -> f64 {
    let d = t * t + 16.0 * c * c;
    lambda0 * (b_check * t - 4.0 * c * (t * t - 16.0 * c * c)) / d
}

/// The firm metric over the round sphere together with the Taub-NUT
/// coordinates on `ť ∈ interval`.
#[derive(Debug, Clone)]
pub struct TaubNut {
    pub params: TaubNutParams,
    pub einstein: EinsteinParams,
    pub metric: FirmMetric,
    /// Working `ť` interval, open on the left.
    pub interval: (f64, f64),
    beta: RationalProfile,
}

/// Builds the Taub-NUT chart. Requires `n = 4`, `Λ = 0` and `Λ₀ > 0`; fails
/// with [`GeoError::HorizonCrossing`] if `β̃` vanishes on `[0, 4ℓ ť_max]`.
pub fn taub_nut_transform(p: &EinsteinParams, interval: (f64, f64)) -> Result<TaubNut> {
    if p.n != 4 || p.lambda != 0.0 {
        return Err(GeoError::InvalidParameter(format!(
            "Taub-NUT coordinates need n = 4 and Lambda = 0, got n = {}, Lambda = {}",
            p.n, p.lambda
        )));
    }
    if !(interval.0 >= 0.0 && interval.1 > interval.0) {
        return Err(GeoError::InvalidParameter(format!("bad interval {interval:?}")));
    }
    let ell = p.c.sqrt();
    let bc = b_check(p.b, p.c, p.lambda0);
    let params = TaubNutParams {
        ell,
        m: bc / (32.0 * ell.powi(3)),
        b_check: bc,
        b_check_printed: b_check_printed(p.b, p.c, p.lambda0),
    };
    let beta = beta_profile(p);
    let t_max = 4.0 * ell * interval.1;
    let b0 = beta.eval(0.0);
    let steps = (t_max / HORIZON_SCAN).ceil() as usize;
    for k in 0..=steps {
        let t = (k as f64 * HORIZON_SCAN).min(t_max);
        let b = beta.eval(t);
        if b == 0.0 || b.signum() != b0.signum() {
            return Err(GeoError::HorizonCrossing { t });
        }
    }
    let base = make_base(BaseKind::S2Spherical, p.lambda0)?;
    let sasaki = build_sasaki(base)?;
    let t_range = (4.0 * ell * interval.0 - 1.0, t_max + 1.0);
    let metric = build_lorentz_firm(&sasaki, &einstein_profile(p, t_range))?;
    Ok(TaubNut {
        params,
        einstein: *p,
        metric,
        interval,
        beta,
    })
}

impl TaubNut {
    /// `∫₀ᵗ ds/(2β̃)`.
    pub fn v_integral(&self, t: f64) -> Result<f64> {
        let beta = self.beta.clone();
        let nodes = rk4(move |s, _| vec![0.5 / beta.eval(s)], 0.0, &[0.0], t, V_STEP)?;
        Ok(nodes.last().map_or(0.0, |(_, y)| y[0]))
    }

    /// `(t, u, ψ, φ)` of the point with Taub-NUT coordinates `(ť, v, ψ, φ)`.
    pub fn old_point(&self, q: &[f64]) -> Result<Vec<f64>> {
        let t = 4.0 * self.params.ell * q[0];
        let u = q[1] / self.einstein.lambda0 - self.v_integral(t)?;
        Ok(vec![t, u, q[2], q[3]])
    }

    /// `∂(t, u, ψ, φ)/∂(ť, v, ψ, φ)`.
    pub fn jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let ell = self.params.ell;
        let t = 4.0 * ell * q[0];
        let mut j = DMatrix::identity(4, 4);
        j[(0, 0)] = 4.0 * ell;
        j[(1, 0)] = -4.0 * ell / (2.0 * self.beta.eval(t));
        j[(1, 1)] = 1.0 / self.einstein.lambda0;
        j
    }

    /// The firm metric in Taub-NUT coordinates.
    pub fn pushed_forward(&self, q: &[f64]) -> Result<DMatrix<f64>> {
        let j = self.jacobian(q);
        let g = self.metric.components(&self.old_point(q)?);
        Ok(j.transpose() * g * j)
    }

    /// `(1/Λ₀){(ť²+ℓ²)(dψ² + sin²ψ dφ²) + 4ℓ²F/(ť²+ℓ²)(dv + cos ψ dφ)²
    /// − (ť²+ℓ²)/F dť²}` with `F = 2mť + ℓ² − ť²`.
    pub fn displayed(&self, q: &[f64]) -> DMatrix<f64> {
        let TaubNutParams { ell, m, .. } = self.params;
        let l0 = self.einstein.lambda0;
        let (tc, psi) = (q[0], q[2]);
        let r2 = tc * tc + ell * ell;
        let f = 2.0 * m * tc + ell * ell - tc * tc;
        let (s, c) = psi.sin_cos();
        let w = 4.0 * ell * ell * f / r2;
        let mut g = DMatrix::zeros(4, 4);
        g[(0, 0)] = -r2 / f;
        g[(1, 1)] = w;
        g[(1, 3)] = w * c;
        g[(3, 1)] = w * c;
        g[(2, 2)] = r2;
        g[(3, 3)] = r2 * s * s + w * c * c;
        g / l0
    }

    /// `per_axis` samples of `ť` in the half-open interval and of `ψ`, `φ`
    /// over the sphere chart, at `v = 0`.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let (lo, hi) = self.interval;
        let tc: Vec<f64> = (1..=per_axis)
            .map(|k| lo + (hi - lo) * k as f64 / per_axis as f64)
            .collect();
        let sb = self.metric.sasaki.base.chart().sample_box();
        par::cartesian(&[
            tc,
            vec![0.0],
            par::linspace(sb[0].0, sb[0].1, per_axis),
            par::linspace(sb[1].0, sb[1].1, per_axis),
        ])
    }

    /// Component agreement plus the derived constants.
    pub fn report(&self, per_axis: usize, tolerance: f64) -> Report {
        let grid = self.grid(per_axis);
        let results = par::map(&grid, |q| {
            let r = self.pushed_forward(q).map(|g| (g - self.displayed(q)).amax());
            (q.clone(), r)
        });
        let mut r = Report::default();
        let (lo, hi) = self.interval;
        r.push(Check::from_results(
            "taubnut.components",
            "firm metric in (ť, v, ψ, φ) = displayed Taub-NUT metric",
            &format!("{} points, ť in ({lo}, {hi}]", grid.len()),
            tolerance,
            results,
        ));
        let TaubNutParams {
            ell,
            m,
            b_check,
            b_check_printed,
        } = self.params;
        let mut ell_check = Check::scalar("taubnut.ell", "ℓ² = C", (ell * ell - self.einstein.c).abs(), tolerance);
        ell_check.grid = format!("ell = {ell}");
        r.push(ell_check);
        let mut m_check = Check::scalar(
            "taubnut.m",
            "32 m ℓ³ = B̌",
            (32.0 * m * ell.powi(3) - b_check).abs(),
            tolerance,
        );
        m_check.grid = format!("m = {m}");
        r.push(m_check);
        let mut printed = Check::scalar(
            "taubnut.b_check_printed",
            "printed B̌ agrees with the closed-form B̌",
            (b_check_printed - b_check).abs(),
            tolerance,
        );
        printed.grid = format!("printed {b_check_printed}, closed form {b_check}");
        r.push(printed);
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_parameters() {
        let tn = taub_nut_transform(&EinsteinParams::taub_nut_default(), (0.05, 0.4)).unwrap();
        assert_eq!(tn.params.ell, 0.5);
        assert_eq!(tn.params.m, 0.0);
        assert_eq!(tn.params.b_check_printed, 0.0);
    }

    #[test]
    fn components_match() {
        let tn = taub_nut_transform(&EinsteinParams::taub_nut_default(), (0.05, 0.4)).unwrap();
        let r = tn.report(5, 1e-10);
        assert!(r.all_pass(), "{}", r.to_human());
    }

    #[test]
    fn components_match_with_mass() {
        let p = EinsteinParams::new(4, 0.0, 2.0, 0.3, 0.16).unwrap();
        let tn = taub_nut_transform(&p, (0.05, 0.3)).unwrap();
        assert!(tn.params.m != 0.0);
        let r = tn.report(4, 1e-10);
        assert!(r.get("taubnut.components").unwrap().pass, "{}", r.to_human());
        assert!(!r.get("taubnut.b_check_printed").unwrap().pass);
    }

    #[test]
    fn horizon_is_detected() {
        let e = taub_nut_transform(&EinsteinParams::taub_nut_default(), (0.05, 0.6)).unwrap_err();
        match e {
            GeoError::HorizonCrossing { t } => assert!((t - 1.0).abs() <= 2e-3, "{t}"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn rejects_wrong_dimension() {
        let p = EinsteinParams::new(6, 0.0, 1.0, 0.0, 0.25).unwrap();
        assert!(taub_nut_transform(&p, (0.05, 0.4)).is_err());
    }

    #[test]
    fn closed_form_b_check_reproduces_profile() {
        for (b, c, l0) in [(0.7, 0.3, 1.0), (-2.0, 1.1, 0.5), (3.0, 0.05, 2.0)] {
            let p = EinsteinParams::new(4, 0.0, l0, b, c).unwrap();
            let prof = beta_profile(&p);
            for t in [0.1, 0.9, 3.0] {
                let d = displayed_beta(b_check(b, c, l0), c, l0, t) - prof.eval(t);
                assert!(d.abs() <= 1e-12, "{d}");
            }
        }
    }

    #[test]
    fn printed_b_check_agrees_only_on_special_lines() {
        let same = |b: f64, c: f64| (b_check(b, c, 1.0) - b_check_printed(b, c, 1.0)).abs() <= 1e-15;
        assert!(same(0.0, 0.7));
        assert!(same(1.3, 0.25));
        assert!(!same(1.3, 0.5));
    }
}
