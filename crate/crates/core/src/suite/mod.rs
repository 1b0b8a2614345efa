//! Verification suites behind the command line: one section per command,
//! errors turned into failed records, records sorted by name.

mod config;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use config::{parse_config, parse_file_text, Command, ConfigError, RunConfig, KEYS};

use crate::bundle::lorentz::{build_lorentz_general, FirmMetric, FirmProfile, GeneralProfile, ScalarField};
use crate::bundle::{build_lorentz_firm, build_sasaki, frame_crosscheck, verify_sasaki, Variant};
use crate::einstein::{
    beta_at_origin, beta_profile, beta_rk4, einstein_grid, full_einstein_residual, max_einstein_residual,
    reduced_einstein_residuals, reduced_einstein_residuals_exact, reduced_residuals, sigma_discriminant, sigma_profile,
    taub_nut_transform, EinsteinParams,
};
use crate::error::{GeoError, Result};
use crate::kahler::{make_base, verify_kahler_einstein, BaseKind};
use crate::par;
use crate::report::{Check, Report, Sample};
use crate::structures::{geodesic_factor, shearfree_decompose};
use crate::tensor::lie::{lie_derivative_metric, CoordinateField};
use crate::tensor::linalg::singular_values;
use crate::tensor::metric::{MetricField, Scheme};
use crate::wave::{broken_wave_coclosure, build_wave, flag_and_lie_check, harmonicity_check, kernel_check};

/// Working `t` interval of the closed-form profiles.
pub const PROFILE_INTERVAL: (f64, f64) = (0.4, 2.1);
/// `ť` interval of the Taub-NUT comparison (open at the left end).
pub const TAUB_NUT_INTERVAL: (f64, f64) = (0.05, 0.4);
/// Sample values of `t` for the reduced equations.
pub const REDUCED_TS: [f64; 5] = [0.1, 0.5, 1.0, 2.0, 10.0];
/// Random points per frame cross-check.
pub const CROSSCHECK_POINTS: usize = 50;
/// Random `(h, ω)` pairs per dimension in the CR round trip.
pub const CR_PAIRS: usize = 200;

/// Runs the configured command and returns the sorted report.
pub fn run_suite(cfg: &RunConfig) -> Report {
    let mut r = Report::new(cfg.echo());
    match cfg.command {
        Command::VerifyBase => r.extend(verify_base(cfg)),
        Command::VerifySasaki => r.extend(sasaki_section(cfg)),
        Command::Einstein => r.extend(einstein_section(cfg)),
        Command::Taubnut => r.extend(taubnut_section(cfg)),
        Command::Wave => r.extend(wave_section(cfg)),
        Command::CrRoundtrip => r.extend(cr_section(cfg)),
        Command::All => {
            r.extend(verify_base(cfg));
            r.extend(sasaki_section(cfg));
            r.extend(einstein_section(cfg));
            if taubnut_applies(cfg) {
                r.extend(taubnut_section(cfg));
            }
            if wave_base(&cfg.base).is_some() {
                r.extend(wave_section(cfg));
            }
            r.extend(cr_section(cfg));
        }
    }
    apply_overrides(&mut r, &cfg.tolerances);
    r.sort();
    r
}

/// Resets the tolerance of every record named `prefix` or `prefix.…`; the
/// longest matching prefix wins.
pub fn apply_overrides(r: &mut Report, tolerances: &BTreeMap<String, f64>) {
    for c in &mut r.checks {
        let hit = tolerances
            .iter()
            .filter(|(k, _)| c.name == **k || c.name.starts_with(&format!("{k}.")))
            .max_by_key(|(k, _)| k.len());
        if let Some((_, &t)) = hit {
            c.tolerance = t;
            c.pass = c.max_residual.is_finite() && c.max_residual <= t;
        }
    }
}

fn failed(name: &str, anchor: &str, tolerance: f64, e: &GeoError) -> Report {
    let mut r = Report::default();
    r.push(Check::failed(name, anchor, tolerance, e));
    r
}

fn params(cfg: &RunConfig) -> Result<EinsteinParams> {
    EinsteinParams::new(cfg.n, cfg.lambda, cfg.lambda0, cfg.b, cfg.c)
}

fn firm_metric(kind: BaseKind, lambda0: f64, prof: &FirmProfile) -> Result<FirmMetric> {
    build_lorentz_firm(&build_sasaki(make_base(kind, lambda0)?)?, prof)
}

fn verify_base(cfg: &RunConfig) -> Report {
    match make_base(cfg.base.clone(), cfg.lambda0) {
        Ok(b) => verify_kahler_einstein(&b, cfg.grid),
        Err(e) => failed("base", "Kähler-Einstein base", 0.0, &e),
    }
}

fn sasaki_section(cfg: &RunConfig) -> Report {
    match make_base(cfg.base.clone(), cfg.lambda0).and_then(build_sasaki) {
        Ok(s) => verify_sasaki(&s, cfg.grid),
        Err(e) => failed("sasaki", "regular Sasaki structure", 0.0, &e),
    }
}

fn samples(points: impl IntoIterator<Item = (Vec<f64>, f64)>) -> Vec<Sample> {
    points
        .into_iter()
        .map(|(point, residual)| Sample { point, residual })
        .collect()
}

/// `0` for an exact zero, otherwise `|x|` (at least the smallest positive
/// double, so a tiny nonzero rational still fails a zero tolerance).
fn exact_residual(x: &BigRational) -> f64 {
    if x.is_zero() {
        0.0
    } else {
        x.abs().to_f64().unwrap_or(f64::INFINITY).max(f64::MIN_POSITIVE)
    }
}

fn einstein_section(cfg: &RunConfig) -> Report {
    let p = match params(cfg) {
        Ok(p) => p,
        Err(e) => return failed("einstein.params", "Einstein family parameters", 0.0, &e),
    };
    let mut r = Report::default();
    r.extend(reduced_checks(&p));
    r.extend(beta_checks(&p));
    let curvature_tol = if p.n == 4 { 1e-5 } else { 1e-4 };
    match firm_metric(
        cfg.base.clone(),
        p.lambda0,
        &crate::einstein::einstein_profile(&p, PROFILE_INTERVAL),
    ) {
        Ok(g) => {
            let grid = einstein_grid(&g, cfg.grid);
            r.extend(full_einstein_residual(
                "einstein.full",
                &g,
                p.lambda,
                &grid,
                curvature_tol,
            ));
            r.push(crosscheck(&g, "einstein.frame_crosscheck", Variant::Ansatz, cfg.seed));
            r.extend(shearfree_checks(
                "shearfree.einstein",
                &g,
                &einstein_grid(&g, cfg.grid.min(4)),
                false,
            ));
        }
        Err(e) => r.push(Check::failed("einstein.full", "Ric = Λ g", curvature_tol, &e)),
    }
    r.extend(constant_profile_checks(cfg));
    r.extend(general_metric_checks(cfg.seed));
    r.extend(einstein_controls());
    r
}

fn reduced_checks(p: &EinsteinParams) -> Report {
    let beta = beta_profile(p);
    let mut r = Report::default();
    let reduced: Vec<_> = REDUCED_TS
        .iter()
        .map(|&t| (t, reduced_einstein_residuals(p, &beta, t)))
        .collect();
    let desc = format!("t in {REDUCED_TS:?}");
    let rows: [(&str, &str, fn(&crate::einstein::Reduced<f64>) -> f64); 4] = [
        ("ode", "first-order equation for β̃", |x| x.ode.abs()),
        ("base", "reduced Einstein equation, base block", |x| x.r_base.abs()),
        ("pq", "reduced Einstein equation, (p_o, q_o) block", |x| x.r_pq.abs()),
        ("pp", "reduced Einstein equation, (p_o, p_o) block", |x| x.r_pp.abs()),
    ];
    for (tag, anchor, pick) in rows {
        let s = samples(reduced.iter().map(|(t, x)| (vec![*t], pick(x))));
        r.push(Check::from_samples(
            &format!("einstein.reduced.{tag}"),
            anchor,
            &desc,
            1e-9,
            s,
        ));
    }

    // exact arithmetic at rational sample points
    let ts: Vec<BigRational> = [(1, 10), (1, 2), (1, 1), (2, 1), (10, 1)]
        .iter()
        .map(|&(a, b)| BigRational::new(a.into(), b.into()))
        .collect();
    let exact: Vec<_> = ts
        .iter()
        .map(|t| {
            (
                t.to_f64().unwrap_or(f64::NAN),
                reduced_einstein_residuals_exact(p, &beta, t),
            )
        })
        .collect();
    let s = samples(exact.iter().map(|(t, x)| (vec![*t], exact_residual(&x.r_pp))));
    r.push(Check::from_samples(
        "einstein.exact.pp",
        "(p_o, p_o) block vanishes identically",
        "rational t in {1/10, 1/2, 1, 2, 10}",
        0.0,
        s,
    ));
    let s = samples(exact.iter().map(|(t, x)| {
        let worst = [&x.ode, &x.r_base, &x.r_pq, &x.r_pp]
            .into_iter()
            .map(exact_residual)
            .fold(0.0, f64::max);
        (vec![*t], worst)
    }));
    r.push(Check::from_samples(
        "einstein.exact.all",
        "all reduced equations vanish in rational arithmetic",
        "rational t in {1/10, 1/2, 1, 2, 10}",
        0.0,
        s,
    ));
    let disc = sigma_discriminant(p.c);
    let quarter = BigRational::new((-1).into(), 4.into());
    let mut d = Check::scalar(
        "einstein.exact.discriminant",
        "σ has discriminant −1/4",
        exact_residual(&(&disc - &quarter)),
        0.0,
    );
    d.grid = format!("discriminant = {disc}");
    r.push(d);
    r
}

fn beta_checks(p: &EinsteinParams) -> Report {
    let beta = beta_profile(p);
    let mut r = Report::default();

    let ts: Vec<f64> = par::linspace(0.1, 10.0, 100);
    let s = samples(
        ts.iter()
            .map(|&t| (vec![t], reduced_einstein_residuals(p, &beta, t).ode.abs())),
    );
    r.push(Check::from_samples(
        "einstein.beta.ode",
        "β̃ solves its first-order equation away from t = 0",
        "100 points in [0.1, 10]",
        1e-10,
        s,
    ));

    let want = beta_at_origin(p);
    let shifted = EinsteinParams { b: p.b + 1.0, ..*p };
    let s = samples([
        (vec![0.0, p.b], (beta.eval(0.0) - want).abs()),
        (vec![0.0, shifted.b], (beta_profile(&shifted).eval(0.0) - want).abs()),
    ]);
    r.push(Check::from_samples(
        "einstein.beta.origin",
        "β̃(0) = 4C(Λ₀ − CΛ), independent of B",
        "t = 0 at B and B + 1",
        1e-12,
        s,
    ));

    let b1 = beta.eval(1.0);
    let mut rk = Vec::new();
    for end in [0.1, 10.0] {
        match beta_rk4(p, b1, end, 1e-4) {
            Ok(path) => rk.extend(
                path.into_iter()
                    .step_by(100)
                    .map(|(t, y)| (vec![t], (y - beta.eval(t)).abs() / (1.0 + beta.eval(t).abs()))),
            ),
            Err(e) => {
                r.push(Check::failed("einstein.beta.rk4", "β̃ agrees with RK4", 1e-6, &e));
                return r;
            }
        }
    }
    r.push(Check::from_samples(
        "einstein.beta.rk4",
        "closed-form β̃ agrees with RK4 integration from t = 1",
        "step 1e-4 on [0.1, 10], relative",
        1e-6,
        samples(rk),
    ));

    let tn = EinsteinParams::taub_nut_default();
    if *p == tn {
        let s = samples(
            par::linspace(-10.0, 10.0, 201)
                .into_iter()
                .map(|t| (vec![t], (beta.eval(t) + (t * t - 1.0) / (t * t + 1.0)).abs())),
        );
        r.push(Check::from_samples(
            "einstein.beta.taub_nut_form",
            "β̃ = −(t² − 1)/(t² + 1) for the Taub-NUT parameters",
            "201 points in [−10, 10]",
            1e-12,
            s,
        ));
    }
    r
}

/// Uniform random points in the sample box of `g`.
fn random_points<M: MetricField + ?Sized>(g: &M, count: usize, seed: u64, stream: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let sb = g.chart().sample_box();
    (0..count)
        .map(|_| {
            sb.iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                .collect()
        })
        .collect()
}

fn crosscheck<M: crate::bundle::lorentz::BundleMetric + ?Sized>(
    g: &M,
    name: &str,
    variant: Variant,
    seed: u64,
) -> Check {
    let pts = random_points(g, CROSSCHECK_POINTS, seed, 100);
    let results = par::map(&pts, |p| (p.clone(), frame_crosscheck(g, p, variant, Scheme::Analytic)));
    Check::from_results(
        name,
        "closed-form frame connection = coordinate Levi-Civita connection",
        &format!("{CROSSCHECK_POINTS} random points, seed {seed}"),
        1e-6,
        results,
    )
}

/// Decomposition and geodesic residuals of `p_o = ∂_t`, plus the Killing
/// residual when `killing` is set.
fn shearfree_checks<M: MetricField + ?Sized>(prefix: &str, g: &M, grid: &[Vec<f64>], killing: bool) -> Report {
    let po = CoordinateField { n: g.dim(), k: 0 };
    let desc = format!("{} points", grid.len());
    let mut r = Report::default();
    let dec = par::map(grid, |p| {
        (
            p.clone(),
            shearfree_decompose(g, &po, p, Scheme::Analytic).map(|d| d.residual),
        )
    });
    r.push(Check::from_results(
        &format!("{prefix}.decomposition"),
        "ℒ_{p_o} g = f g + p_o♭ ∨ η",
        &desc,
        1e-8,
        dec,
    ));
    let geo = par::map(grid, |p| {
        (
            p.clone(),
            geodesic_factor(g, &po, p, Scheme::Analytic).map(|d| d.residual),
        )
    });
    r.push(Check::from_results(
        &format!("{prefix}.geodesic"),
        "∇_{p_o} p_o = (f + ½η(p_o)) p_o",
        &desc,
        1e-7,
        geo,
    ));
    if killing {
        let lie = par::map(grid, |p| {
            (
                p.clone(),
                lie_derivative_metric(g, &po, p, Scheme::Analytic).map(|l| l.amax()),
            )
        });
        r.push(Check::from_results(
            &format!("{prefix}.killing"),
            "p_o is Killing",
            &desc,
            1e-10,
            lie,
        ));
    }
    r
}

fn constant_profile_checks(cfg: &RunConfig) -> Report {
    let prof = FirmProfile::constant(1.3, 0.4, PROFILE_INTERVAL);
    match firm_metric(cfg.base.clone(), cfg.lambda0, &prof) {
        Ok(g) => shearfree_checks("shearfree.constant", &g, &einstein_grid(&g, cfg.grid.min(4)), true),
        Err(e) => failed("shearfree.constant", "constant profile", 1e-10, &e),
    }
}

/// A compatible metric with `t`- and base-dependent `σ`, `α`, `β` and a
/// nonzero `γ` over the torus.
pub fn general_test_profile() -> GeneralProfile {
    GeneralProfile {
        label: "general".into(),
        interval: (-1.0, 1.0),
        sigma: ScalarField::new(|p| 1.0 + 0.1 * p[0] * p[0] + 0.05 * p[2] * p[3])
            .with_gradient(|p| vec![0.2 * p[0], 0.0, 0.05 * p[3], 0.05 * p[2]]),
        alpha: ScalarField::new(|p| 0.5 + 0.1 * p[0].sin() + 0.03 * p[2] + 0.02 * p[1])
            .with_gradient(|p| vec![0.1 * p[0].cos(), 0.02, 0.03, 0.0]),
        beta: ScalarField::new(|p| 0.3 * p[0] + 0.1 * p[3] * p[3] + 0.05 * p[1] * p[2])
            .with_gradient(|p| vec![0.3, 0.05 * p[2], 0.05 * p[1], 0.2 * p[3]]),
        gamma: vec![
            ScalarField::new(|p| 0.2 * p[0] + 0.1 * p[3] + 0.03 * p[1]).with_gradient(|_| vec![0.2, 0.03, 0.0, 0.1]),
            ScalarField::constant(-0.15),
        ],
    }
}

fn general_metric_checks(seed: u64) -> Report {
    let g = match make_base(BaseKind::Torus, 0.0)
        .and_then(build_sasaki)
        .and_then(|s| build_lorentz_general(&s, &general_test_profile()))
    {
        Ok(g) => g,
        Err(e) => return failed("shearfree.general", "general compatible metric", 1e-8, &e),
    };
    let grid = random_points(&g, 27, seed, 101);
    let mut r = shearfree_checks("shearfree.general", &g, &grid, false);
    r.push(crosscheck(
        &g,
        "shearfree.general.frame_crosscheck",
        Variant::General,
        seed,
    ));
    r
}

/// Identities that must fail: a perturbed `σ` and a non-Einstein base.
fn einstein_controls() -> Report {
    let p = EinsteinParams::taub_nut_default();
    let beta = beta_profile(&p);
    let mut r = Report::default();
    let worst = REDUCED_TS
        .iter()
        .map(|&t| {
            let s = sigma_profile(p.c, t).map(|v| 1.5 * v);
            reduced_residuals(&p, t, s, beta.jet(t)).r_pp.abs()
        })
        .fold(0.0, f64::max);
    r.push(Check::control(
        "control.perturbed_sigma",
        "σ scaled by 3/2 violates the (p_o, p_o) block",
        worst,
        1e-1,
    ));
    let observed = firm_metric(
        BaseKind::PerturbedS2 { eps: 0.2 },
        p.lambda0,
        &crate::einstein::einstein_profile(&p, PROFILE_INTERVAL),
    )
    .and_then(|g| max_einstein_residual(&g, p.lambda, &einstein_grid(&g, 3)));
    match observed {
        Ok(v) => r.push(Check::control(
            "control.non_einstein_base",
            "no firmly compatible Einstein metric over a non-Einstein base",
            v,
            1e-2,
        )),
        Err(e) => r.push(Check::failed("control.non_einstein_base", "non-Einstein base", 1.0, &e)),
    }
    r
}

fn taubnut_applies(cfg: &RunConfig) -> bool {
    matches!(cfg.base, BaseKind::S2Spherical | BaseKind::S2Stereographic) && cfg.lambda == 0.0
}

fn taubnut_section(cfg: &RunConfig) -> Report {
    match params(cfg).and_then(|p| taub_nut_transform(&p, TAUB_NUT_INTERVAL)) {
        Ok(tn) => tn.report(cfg.grid, 1e-10),
        Err(e) => failed("taubnut.components", "Taub-NUT coordinates", 1e-10, &e),
    }
}

/// The base on which the wave is built: the spherical chart has no
/// holomorphic coordinates, so the stereographic one stands in for it.
fn wave_base(kind: &BaseKind) -> Option<BaseKind> {
    fn map(k: &BaseKind) -> Option<BaseKind> {
        match k {
            BaseKind::S2Spherical => Some(BaseKind::S2Stereographic),
            BaseKind::Product(a, b) => Some(BaseKind::Product(Box::new(map(a)?), Box::new(map(b)?))),
            k if k.has_holomorphic_chart() => Some(k.clone()),
            _ => None,
        }
    }
    map(kind)
}

fn wave_section(cfg: &RunConfig) -> Report {
    let anchor = "harmonic plane wave";
    let Some(kind) = wave_base(&cfg.base) else {
        return failed(
            "wave",
            anchor,
            1e-6,
            &GeoError::NoHolomorphicChart(cfg.base.to_string()),
        );
    };
    let tolerance = if kind == BaseKind::Torus { 1e-10 } else { 1e-6 };
    let w = match params(cfg)
        .and_then(|p| {
            firm_metric(
                kind,
                p.lambda0,
                &crate::einstein::einstein_profile(&p, PROFILE_INTERVAL),
            )
        })
        .and_then(|g| build_wave(&g))
    {
        Ok(w) => w,
        Err(e) => return failed("wave", anchor, tolerance, &e),
    };
    let grid = w.grid(cfg.grid);
    let mut r = harmonicity_check(&w, &grid, "wave", tolerance);
    r.extend(kernel_check(&w, &grid, "wave"));
    let mid = &grid[grid.len() / 2];
    let mut po = vec![0.0; w.dim()];
    po[0] = 1.0;
    match flag_and_lie_check(&w, mid, &po, "wave.flag") {
        Ok(f) => r.extend(f),
        Err(e) => r.push(Check::failed("wave.flag.kernel_axis", "flag structure", 1e-8, &e)),
    }
    match broken_wave_coclosure(&w, &w.grid(3), 0.1) {
        Ok(v) => r.push(Check::control(
            "control.broken_wave",
            "F + 0.1 du∧dx¹∧⋯ is not coclosed",
            v,
            1e-3,
        )),
        Err(e) => r.push(Check::failed("control.broken_wave", "broken wave", 1.0, &e)),
    }
    r
}

/// Random SPD `h` and well-conditioned skew `ω` of size `dim`.
fn random_pair(rng: &mut ChaCha8Rng, dim: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let mut entry = || rng.random_range(-1.0..1.0);
    let a = DMatrix::from_fn(dim, dim, |_, _| entry());
    let h = &a * a.transpose() + DMatrix::identity(dim, dim) * 0.5;
    loop {
        let b = DMatrix::from_fn(dim, dim, |_, _| entry());
        let omega = &b - b.transpose();
        let sv = singular_values(&omega);
        if sv[dim - 1] > 1e-2 * sv[0] {
            return (h, omega);
        }
    }
}

fn cr_section(cfg: &RunConfig) -> Report {
    let mut by_name: BTreeMap<&str, Vec<(Vec<f64>, Result<f64>)>> = BTreeMap::new();
    for dim in [2usize, 4, 6] {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(dim as u64);
        for i in 0..CR_PAIRS {
            let (h, omega) = random_pair(&mut rng, dim);
            let s = rng.random_range(0.1..10.0);
            let point = vec![dim as f64, i as f64];
            let cr = cr_from_pair(&h, &omega, s);
            let push = |m: &mut BTreeMap<&str, Vec<_>>, name, v: Result<f64>| {
                m.entry(name).or_default().push((point.clone(), v))
            };
            match cr {
                Ok(d) => {
                    push(&mut by_name, "cr.j_squared", Ok(d.j2));
                    push(&mut by_name, "cr.levi_spd", Ok(d.levi_spd));
                    push(&mut by_name, "cr.levi_b", Ok(d.levi_b));
                    push(&mut by_name, "cr.scale_invariance", Ok(d.scale));
                }
                Err(e) => {
                    for name in ["cr.j_squared", "cr.levi_spd", "cr.levi_b", "cr.scale_invariance"] {
                        push(&mut by_name, name, Err(e.clone()));
                    }
                }
            }
        }
    }
    let anchors = [
        ("cr.j_squared", "J² = −I"),
        ("cr.levi_spd", "Levi form symmetric positive definite"),
        ("cr.levi_b", "levi · B = h"),
        ("cr.scale_invariance", "J unchanged under h → s h"),
    ];
    let desc = format!("{CR_PAIRS} pairs in each of dims 2, 4, 6, seed {}", cfg.seed);
    let mut r = Report::default();
    for (name, anchor) in anchors {
        let results = by_name.remove(name).unwrap_or_default();
        r.push(Check::from_results(name, anchor, &desc, 1e-10, results));
    }
    r
}

struct CrDefects {
    j2: f64,
    levi_spd: f64,
    levi_b: f64,
    scale: f64,
}

fn cr_from_pair(h: &DMatrix<f64>, omega: &DMatrix<f64>, s: f64) -> Result<CrDefects> {
    use crate::structures::cr_from_subriemannian;
    let d = cr_from_subriemannian(h, omega)?;
    let (j2, levi_b, sym) = d.defects(h);
    let min_eig = d.levi.clone().symmetric_eigen().eigenvalues.min();
    let levi_spd = if min_eig > 0.0 { sym } else { f64::INFINITY };
    let scaled = cr_from_subriemannian(&(h * s), omega)?;
    Ok(CrDefects {
        j2,
        levi_spd,
        levi_b,
        scale: (&scaled.j - &d.j).amax(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(command: Command) -> RunConfig {
        let mut c = RunConfig::defaults(command);
        c.grid = 3;
        c
    }

    #[test]
    fn cr_roundtrip_passes_and_is_seeded() {
        let a = run_suite(&cfg(Command::CrRoundtrip));
        assert!(a.all_pass(), "{}", a.to_human());
        assert_eq!(a.to_json(), run_suite(&cfg(Command::CrRoundtrip)).to_json());
        let mut other = cfg(Command::CrRoundtrip);
        other.seed = 9;
        assert_ne!(a.to_csv(), run_suite(&other).to_csv());
    }

    #[test]
    fn taubnut_echoes_constants() {
        let r = run_suite(&cfg(Command::Taubnut));
        assert!(r.all_pass(), "{}", r.to_human());
        assert_eq!(r.get("taubnut.ell").unwrap().grid, "ell = 0.5");
        assert_eq!(r.get("taubnut.m").unwrap().grid, "m = 0");
    }

    #[test]
    fn overrides_pick_longest_prefix() {
        let mut r = run_suite(&cfg(Command::Taubnut));
        let mut t = BTreeMap::new();
        t.insert("taubnut".to_string(), 0.5);
        t.insert("taubnut.components".to_string(), -1.0);
        apply_overrides(&mut r, &t);
        assert_eq!(r.get("taubnut.ell").unwrap().tolerance, 0.5);
        assert!(!r.get("taubnut.components").unwrap().pass);
    }

    #[test]
    fn records_are_sorted() {
        let r = run_suite(&cfg(Command::Wave));
        let names: Vec<_> = r.checks.iter().map(|c| c.name.clone()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
    }

    #[test]
    fn wave_base_mapping() {
        assert_eq!(wave_base(&BaseKind::S2Spherical), Some(BaseKind::S2Stereographic));
        assert_eq!(wave_base(&BaseKind::PerturbedS2 { eps: 0.2 }), None);
        assert!(wave_base(&BaseKind::s2xs2()).unwrap().has_holomorphic_chart());
    }

    #[test]
    fn inapplicable_command_fails_cleanly() {
        let mut c = cfg(Command::Wave);
        c.base = BaseKind::PerturbedS2 { eps: 0.2 };
        let r = run_suite(&c);
        assert!(!r.all_pass());
        assert_eq!(r.checks.len(), 1);
    }
}
