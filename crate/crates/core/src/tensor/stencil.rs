//! Fourth-order central difference stencils.
//!
//! All stencils act on vector-valued functions (`Vec<f64>` out) so the same
//! code differentiates scalars, matrices (column-major flattening) and form
//! components.

/// Largest offset, in units of `h`, touched by the stencils below.
pub const REACH: f64 = 2.0;

fn shifted(p: &[f64], k: usize, delta: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    q[k] += delta;
    q
}

/// `(c_a·(a⁺ − a⁻) + c_b·(b⁺ − b⁻)) · scale`, paired so constant inputs
/// cancel exactly.
fn odd(a: (Vec<f64>, Vec<f64>), b: (Vec<f64>, Vec<f64>), ca: f64, cb: f64, scale: f64) -> Vec<f64> {
    (0..a.0.len())
        .map(|i| (ca * (a.0[i] - a.1[i]) + cb * (b.0[i] - b.1[i])) * scale)
        .collect()
}

/// `∂_k f(p)` with the five-point stencil.
pub fn first<F>(f: &F, p: &[f64], k: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    odd(
        (f(&shifted(p, k, h)), f(&shifted(p, k, -h))),
        (f(&shifted(p, k, 2.0 * h)), f(&shifted(p, k, -2.0 * h))),
        8.0,
        -1.0,
        1.0 / (12.0 * h),
    )
}

/// `∂_k ∂_k f(p)`.
pub fn second_diag<F>(f: &F, p: &[f64], k: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let (m2, m1, c, p1, p2) = (
        f(&shifted(p, k, -2.0 * h)),
        f(&shifted(p, k, -h)),
        f(p),
        f(&shifted(p, k, h)),
        f(&shifted(p, k, 2.0 * h)),
    );
    let scale = 1.0 / (12.0 * h * h);
    (0..c.len())
        .map(|i| ((16.0 * (p1[i] + m1[i]) - (p2[i] + m2[i])) - 30.0 * c[i]) * scale)
        .collect()
}

/// `∂_k ∂_l f(p)` for `k != l`, as the tensor product of two first-derivative
/// stencils (16 evaluations).
pub fn second_mixed<F>(f: &F, p: &[f64], k: usize, l: usize, h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let inner = |q: &[f64]| first(f, q, l, h);
    first(&inner, p, k, h)
}

/// Directional derivative `d/ds f(p + s v)` at `s = 0`.
pub fn directional<F>(f: &F, p: &[f64], v: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> Vec<f64> + ?Sized,
{
    let at = |s: f64| -> Vec<f64> {
        let q: Vec<f64> = p.iter().zip(v).map(|(a, b)| a + s * b).collect();
        f(&q)
    };
    odd(
        (at(h), at(-h)),
        (at(2.0 * h), at(-2.0 * h)),
        8.0,
        -1.0,
        1.0 / (12.0 * h),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quartics() {
        let f = |p: &[f64]| vec![p[0].powi(4) + p[0] * p[1].powi(3)];
        let p = [0.7, -0.3];
        let h = 1e-2;
        let dx = first(&f, &p, 0, h)[0];
        assert!((dx - (4.0 * 0.7f64.powi(3) + (-0.3f64).powi(3))).abs() < 1e-11);
        let dxx = second_diag(&f, &p, 0, h)[0];
        assert!((dxx - 12.0 * 0.49).abs() < 1e-9);
        let dxy = second_mixed(&f, &p, 0, 1, h)[0];
        assert!((dxy - 3.0 * 0.09).abs() < 1e-9);
    }

    #[test]
    fn directional_matches_gradient() {
        let f = |p: &[f64]| vec![p[0].sin() * p[1].exp()];
        let p = [0.4, 0.2];
        let v = [0.3, -1.1];
        let d = directional(&f, &p, &v, 1e-3)[0];
        let expect = 0.3 * 0.4f64.cos() * 0.2f64.exp() - 1.1 * 0.4f64.sin() * 0.2f64.exp();
        assert!((d - expect).abs() < 1e-11);
    }

    #[test]
    fn constants_cancel_exactly() {
        let f = |_: &[f64]| vec![1.0907, -3.3];
        assert_eq!(first(&f, &[0.1], 0, 1e-5), vec![0.0, 0.0]);
        assert_eq!(second_diag(&f, &[0.1], 0, 1e-3), vec![0.0, 0.0]);
    }
}
