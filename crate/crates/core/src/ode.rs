//! Fixed-step classical Runge-Kutta integration.

use crate::error::{GeoError, Result};

/// Integrates `y' = f(t, y)` from `(t0, y0)` to `t1` with the step closest to
/// `step` that divides the interval evenly. Returns every node, `t0` first.
pub fn rk4<F>(f: F, t0: f64, y0: &[f64], t1: f64, step: f64) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    if !(step > 0.0) || !t0.is_finite() || !t1.is_finite() {
        return Err(GeoError::OdeStep(format!("bad interval [{t0}, {t1}] or step {step}")));
    }
    let steps = ((t1 - t0).abs() / step).ceil().max(if t1 == t0 { 0.0 } else { 1.0 }) as usize;
    let mut out = Vec::with_capacity(steps + 1);
    out.push((t0, y0.to_vec()));
    if steps == 0 {
        return Ok(out);
    }
    let h = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    let axpy = |y: &[f64], k: &[f64], s: f64| -> Vec<f64> { y.iter().zip(k).map(|(a, b)| a + s * b).collect() };
    for i in 0..steps {
        let t = t0 + h * i as f64;
        let k1 = f(t, &y);
        let k2 = f(t + 0.5 * h, &axpy(&y, &k1, 0.5 * h));
        let k3 = f(t + 0.5 * h, &axpy(&y, &k2, 0.5 * h));
        let k4 = f(t + h, &axpy(&y, &k3, h));
        for j in 0..y.len() {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GeoError::OdeStep(format!("non-finite state after t = {}", t + h)));
        }
        let tn = if i + 1 == steps { t1 } else { t0 + h * (i + 1) as f64 };
        out.push((tn, y.clone()));
    }
    Ok(out)
}
