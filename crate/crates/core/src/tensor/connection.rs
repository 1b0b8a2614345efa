//! Levi-Civita connection and curvature in a coordinate basis.

use nalgebra::DMatrix;

use super::linalg::invert_metric;
use super::metric::{metric_partials, metric_second_partials, validated_components, MetricField, Scheme};
use crate::error::Result;

/// `Γ^λ_{μν}` stored densely, index `(λ, μ, ν)` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionCoeffs {
    n: usize,
    gamma: Vec<f64>,
}

impl ConnectionCoeffs {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            gamma: vec![0.0; n * n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, upper: usize, a: usize, b: usize) -> f64 {
        self.gamma[(upper * self.n + a) * self.n + b]
    }

    #[inline]
    pub fn set(&mut self, upper: usize, a: usize, b: usize, v: f64) {
        self.gamma[(upper * self.n + a) * self.n + b] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gamma
    }

    /// Largest `|Γ^λ_{μν} − Γ^λ_{νμ}|`.
    pub fn lower_asymmetry(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            for a in 0..n {
                for b in 0..n {
                    worst = worst.max((self.get(l, a, b) - self.get(l, b, a)).abs());
                }
            }
        }
        worst
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.gamma
            .iter()
            .zip(&other.gamma)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `∇_v w` at a point, given `v`, `w` and the directional derivative
    /// `dw = v(w)` of the components of `w`.
    pub fn covariant(&self, v: &[f64], w: &[f64], dw: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|l| {
                let mut s = dw[l];
                for a in 0..n {
                    for b in 0..n {
                        s += self.get(l, a, b) * v[a] * w[b];
                    }
                }
                s
            })
            .collect()
    }
}

/// `½ (∂_μ g_{νρ} + ∂_ν g_{μρ} − ∂_ρ g_{μν})`, indexed `[ρ][μ][ν]`.
fn first_kind(dg: &[DMatrix<f64>]) -> Vec<f64> {
    let n = dg.len();
    let mut out = vec![0.0; n * n * n];
    for r in 0..n {
        for m in 0..n {
            for v in 0..n {
                out[(r * n + m) * n + v] = 0.5 * (dg[m][(v, r)] + dg[v][(m, r)] - dg[r][(m, v)]);
            }
        }
    }
    out
}

fn raise(ginv: &DMatrix<f64>, first: &[f64]) -> ConnectionCoeffs {
    let n = ginv.nrows();
    let mut c = ConnectionCoeffs::zeros(n);
    for l in 0..n {
        for m in 0..n {
            for v in 0..n {
                let s: f64 = (0..n).map(|r| ginv[(l, r)] * first[(r * n + m) * n + v]).sum();
                c.set(l, m, v, s);
            }
        }
    }
    c
}

/// Christoffel symbols from `g⁻¹` and `∂g`.
pub fn christoffel_from_partials(ginv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> ConnectionCoeffs {
    raise(ginv, &first_kind(dg))
}

/// `Γ^λ_{μν}` of `g` at `p`.
pub fn christoffel_coordinate<M: MetricField + ?Sized>(g: &M, p: &[f64], scheme: Scheme) -> Result<ConnectionCoeffs> {
    let gp = validated_components(g, p)?;
    let ginv = invert_metric(&gp)?;
    let dg = metric_partials(g, p, scheme)?;
    Ok(christoffel_from_partials(&ginv, &dg))
}

/// Largest `|∇_λ g_{μν}|` for the given metric, partials and connection.
pub fn metric_compatibility_residual(g: &DMatrix<f64>, dg: &[DMatrix<f64>], gamma: &ConnectionCoeffs) -> f64 {
    let n = g.nrows();
    let mut worst: f64 = 0.0;
    for l in 0..n {
        for m in 0..n {
            for v in 0..n {
                let mut s = dg[l][(m, v)];
                for r in 0..n {
                    s -= gamma.get(r, l, m) * g[(r, v)] + gamma.get(r, l, v) * g[(m, r)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// Riemann, Ricci and scalar curvature at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorResult {
    n: usize,
    /// `R^λ_{μνρ}`, index `(λ, μ, ν, ρ)` row-major.
    riemann: Vec<f64>,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

impl TensorResult {
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn riemann(&self, l: usize, m: usize, v: usize, r: usize) -> f64 {
        let n = self.n;
        self.riemann[((l * n + m) * n + v) * n + r]
    }

    pub fn ricci_asymmetry(&self) -> f64 {
        (&self.ricci - self.ricci.transpose()).amax()
    }

    /// Largest `|R^λ_{μνρ} + R^λ_{μρν}|`.
    pub fn riemann_antisymmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst: f64 = 0.0;
        for l in 0..n {
            for m in 0..n {
                for v in 0..n {
                    for r in 0..n {
                        worst = worst.max((self.riemann(l, m, v, r) + self.riemann(l, m, r, v)).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Curvature from `g`, `∂g` and `∂∂g` at one point.
pub fn curvature_from_partials(
    g: &DMatrix<f64>,
    dg: &[DMatrix<f64>],
    ddg: &[Vec<DMatrix<f64>>],
) -> Result<TensorResult> {
    let n = g.nrows();
    let ginv = invert_metric(g)?;
    let first = first_kind(dg);
    let gamma = raise(&ginv, &first);

    // dgamma[s][(l, m, v)] = ∂_s Γ^l_{mv}
    let mut dgamma = vec![vec![0.0; n * n * n]; n];
    for (s, dgs) in dgamma.iter_mut().enumerate() {
        let dginv = -(&ginv * &dg[s] * &ginv);
        let mut dfirst = vec![0.0; n * n * n];
        for r in 0..n {
            for m in 0..n {
                for v in 0..n {
                    dfirst[(r * n + m) * n + v] = 0.5 * (ddg[s][m][(v, r)] + ddg[s][v][(m, r)] - ddg[s][r][(m, v)]);
                }
            }
        }
        for l in 0..n {
            for m in 0..n {
                for v in 0..n {
                    let mut acc = 0.0;
                    for r in 0..n {
                        let idx = (r * n + m) * n + v;
                        acc += dginv[(l, r)] * first[idx] + ginv[(l, r)] * dfirst[idx];
                    }
                    dgs[(l * n + m) * n + v] = acc;
                }
            }
        }
    }
    let dgam = |s: usize, l: usize, m: usize, v: usize| dgamma[s][(l * n + m) * n + v];

    let mut riemann = vec![0.0; n * n * n * n];
    for l in 0..n {
        for m in 0..n {
            for v in 0..n {
                for r in 0..n {
                    let mut val = dgam(v, l, r, m) - dgam(r, l, v, m);
                    for s in 0..n {
                        val += gamma.get(l, v, s) * gamma.get(s, r, m) - gamma.get(l, r, s) * gamma.get(s, v, m);
                    }
                    riemann[((l * n + m) * n + v) * n + r] = val;
                }
            }
        }
    }
    let ricci = DMatrix::from_fn(n, n, |m, r| {
        (0..n).map(|l| riemann[((l * n + m) * n + l) * n + r]).sum()
    });
    let scalar = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .map(|(a, b)| ginv[(a, b)] * ricci[(a, b)])
        .sum();
    Ok(TensorResult {
        n,
        riemann,
        ricci,
        scalar,
    })
}

/// Riemann, Ricci and scalar curvature of `g` at `p`.
pub fn curvature_coordinate<M: MetricField + ?Sized>(g: &M, p: &[f64], scheme: Scheme) -> Result<TensorResult> {
    let gp = validated_components(g, p)?;
    let dg = metric_partials(g, p, scheme)?;
    let ddg = metric_second_partials(g, p, scheme)?;
    curvature_from_partials(&gp, &dg, &ddg)
}
