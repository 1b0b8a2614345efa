//! Differential forms at a point and form fields on a chart.
//!
//! A `k`-form on an `n`-dimensional space is stored by its components on
//! increasing multi-indices `i_1 < ... < i_k`, in lexicographic order. The
//! wedge product uses the determinant convention, so `dx∧dy` has component 1
//! on `(x, y)` and `(dω)_{i_0..i_k} = Σ_a (−1)^a ∂_{i_a} ω_{i_0..î_a..i_k}`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::chart::Chart;
use super::metric::Scheme;
use super::stencil;
use crate::error::{GeoError, Result};
use crate::tolerance::SINGULAR_DET;

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All increasing `k`-subsets of `0..n` in lexicographic order.
pub fn combos(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(binomial(n, k));
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Lexicographic rank of an increasing multi-index.
pub fn rank(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut prev: isize = -1;
    for (pos, &c) in idx.iter().enumerate() {
        for j in ((prev + 1) as usize)..c {
            r += binomial(n - 1 - j, k - 1 - pos);
        }
        prev = c as isize;
    }
    r
}

/// Sorts `idx` in place; returns the permutation sign, or 0 on a repeat.
fn sort_sign(idx: &mut [usize]) -> f64 {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        0.0
    } else {
        sign
    }
}

/// Sign of the shuffle `(a, b)` of two disjoint increasing index lists.
fn shuffle_sign(a: &[usize], b: &[usize]) -> f64 {
    let inversions: usize = a.iter().map(|&x| b.iter().filter(|&&y| y < x).count()).sum();
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A `k`-form at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Form {
    n: usize,
    k: usize,
    comps: Vec<f64>,
}

impl Form {
    pub fn zero(n: usize, k: usize) -> Self {
        Self {
            n,
            k,
            comps: vec![0.0; binomial(n, k)],
        }
    }

    pub fn scalar(n: usize, value: f64) -> Self {
        Self {
            n,
            k: 0,
            comps: vec![value],
        }
    }

    pub fn one_form(comps: &[f64]) -> Self {
        Self {
            n: comps.len(),
            k: 1,
            comps: comps.to_vec(),
        }
    }

    /// Components on increasing multi-indices in lexicographic order.
    pub fn from_components(n: usize, k: usize, comps: Vec<f64>) -> Result<Self> {
        if comps.len() != binomial(n, k) {
            return Err(GeoError::Dimension(format!(
                "{}-form on {n} dimensions needs {} components, got {}",
                k,
                binomial(n, k),
                comps.len()
            )));
        }
        Ok(Self { n, k, comps })
    }

    /// Antisymmetrizes a dense `n^k` array (row-major) into a form.
    pub fn from_dense(n: usize, k: usize, dense: &[f64]) -> Result<Self> {
        if dense.len() != n.pow(k as u32) {
            return Err(GeoError::Dimension(format!(
                "dense {k}-tensor on {n} dimensions has wrong length"
            )));
        }
        let perms = permutations(k);
        let fact = perms.len() as f64;
        let comps = combos(n, k)
            .iter()
            .map(|idx| {
                perms
                    .iter()
                    .map(|(perm, sign)| {
                        let flat = perm.iter().fold(0, |acc, &p| acc * n + idx[p]);
                        sign * dense[flat]
                    })
                    .sum::<f64>()
                    / fact
            })
            .collect();
        Ok(Self { n, k, comps })
    }

    /// `dx^{i_1} ∧ ... ∧ dx^{i_k}` (indices in any order).
    pub fn basis(n: usize, indices: &[usize]) -> Self {
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        let mut f = Self::zero(n, indices.len());
        if sign != 0.0 {
            f.comps[rank(n, &idx)] = sign;
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn components(&self) -> &[f64] {
        &self.comps
    }

    /// Component on an arbitrary (not necessarily increasing) multi-index.
    pub fn get(&self, indices: &[usize]) -> f64 {
        debug_assert_eq!(indices.len(), self.k);
        let mut idx = indices.to_vec();
        let sign = sort_sign(&mut idx);
        if sign == 0.0 {
            0.0
        } else {
            sign * self.comps[rank(self.n, &idx)]
        }
    }

    /// Full antisymmetric `n^k` array, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let total = self.n.pow(self.k as u32);
        (0..total)
            .map(|mut flat| {
                let mut idx = vec![0; self.k];
                for slot in idx.iter_mut().rev() {
                    *slot = flat % self.n;
                    flat /= self.n;
                }
                self.get(&idx)
            })
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            k: self.k,
            comps: self.comps.iter().map(|x| x * s).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.n, self.k), (other.n, other.k), "form shape mismatch");
        Self {
            n: self.n,
            k: self.k,
            comps: self.comps.iter().zip(&other.comps).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "form dimension mismatch");
        let n = self.n;
        let k = self.k + other.k;
        if k > n {
            return Self::zero(n, k);
        }
        let left = combos(n, self.k);
        let comps = combos(n, k)
            .iter()
            .map(|target| {
                let mut acc = 0.0;
                for a in &left {
                    if !a.iter().all(|i| target.contains(i)) {
                        continue;
                    }
                    let b: Vec<usize> = target.iter().copied().filter(|i| !a.contains(i)).collect();
                    acc += shuffle_sign(a, &b) * self.comps[rank(n, a)] * other.comps[rank(n, &b)];
                }
                acc
            })
            .collect();
        Self { n, k, comps }
    }

    /// `ι_v ω`, contracting the first slot.
    pub fn interior(&self, v: &[f64]) -> Self {
        assert_eq!(v.len(), self.n, "vector dimension mismatch");
        if self.k == 0 {
            return Self::zero(self.n, 0);
        }
        let comps = combos(self.n, self.k - 1)
            .iter()
            .map(|rest| {
                (0..self.n)
                    .map(|j| {
                        if v[j] == 0.0 {
                            return 0.0;
                        }
                        let mut idx = Vec::with_capacity(self.k);
                        idx.push(j);
                        idx.extend_from_slice(rest);
                        v[j] * self.get(&idx)
                    })
                    .sum()
            })
            .collect();
        Self {
            n: self.n,
            k: self.k - 1,
            comps,
        }
    }

    /// Evaluates the form on `k` vectors.
    pub fn evaluate(&self, vectors: &[&[f64]]) -> f64 {
        assert_eq!(vectors.len(), self.k);
        let mut f = self.clone();
        for v in vectors {
            f = f.interior(v);
        }
        f.comps[0]
    }
}

/// All permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let mut q = p.clone();
            let s = sort_sign(&mut q);
            (p, s)
        })
        .collect()
}

fn minor(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    match rows.len() {
        0 => 1.0,
        1 => m[(rows[0], cols[0])],
        _ => DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])]).determinant(),
    }
}

/// Raises all indices of `α` with `g⁻¹`.
fn raise(alpha: &Form, ginv: &DMatrix<f64>) -> Vec<f64> {
    let idx = combos(alpha.n, alpha.k);
    idx.iter()
        .map(|i| {
            idx.iter()
                .zip(&alpha.comps)
                .filter(|(_, a)| **a != 0.0)
                .map(|(k, a)| minor(ginv, i, k) * a)
                .sum()
        })
        .collect()
}

/// `g(α, β)` induced on `k`-forms, from the inverse metric.
pub fn inner_product(alpha: &Form, beta: &Form, ginv: &DMatrix<f64>) -> f64 {
    assert_eq!((alpha.n, alpha.k), (beta.n, beta.k), "form shape mismatch");
    raise(alpha, ginv).iter().zip(&beta.comps).map(|(a, b)| a * b).sum()
}

/// `orientation · sqrt|det g| dx^0 ∧ ... ∧ dx^{n−1}`.
pub fn volume_form(g: &DMatrix<f64>, orientation: f64) -> Result<Form> {
    let det = g.determinant();
    if !(det.abs() > SINGULAR_DET) {
        return Err(GeoError::SingularMetric { det });
    }
    Ok(Form::scalar(g.nrows(), orientation * det.abs().sqrt())
        .wedge(&Form::basis(g.nrows(), &(0..g.nrows()).collect::<Vec<_>>())))
}

/// Hodge star at a point: `α ∧ ∗β = g(α, β) vol`.
pub fn hodge_star(alpha: &Form, g: &DMatrix<f64>, orientation: f64) -> Result<Form> {
    let n = alpha.n;
    if g.nrows() != n {
        return Err(GeoError::Dimension(format!(
            "{n}-dimensional form with {}x{} metric",
            g.nrows(),
            g.ncols()
        )));
    }
    let det = g.determinant();
    if !(det.abs() > SINGULAR_DET) {
        return Err(GeoError::SingularMetric { det });
    }
    let ginv = super::linalg::invert_metric(g)?;
    let up = raise(alpha, &ginv);
    let scale = orientation * det.abs().sqrt();
    let src = combos(n, alpha.k);
    let comps = combos(n, n - alpha.k)
        .iter()
        .map(|j| {
            src.iter()
                .zip(&up)
                .filter(|(i, a)| **a != 0.0 && i.iter().all(|x| !j.contains(x)))
                .map(|(i, a)| a * shuffle_sign(i, j))
                .sum::<f64>()
                * scale
        })
        .collect();
    Ok(Form {
        n,
        k: n - alpha.k,
        comps,
    })
}

/// The sign `(−1)^{k(n−k)} · sign(det g)` with `∗∗ = sign` on `k`-forms.
pub fn double_star_sign(n: usize, k: usize, det: f64) -> f64 {
    let parity = if (k * (n - k)) % 2 == 0 { 1.0 } else { -1.0 };
    parity * det.signum()
}

/// A form-valued field on a chart.
pub trait FormField: Send + Sync {
    fn chart(&self) -> &Chart;
    fn degree(&self) -> usize;
    fn eval(&self, p: &[f64]) -> Form;
    /// `dω(p)` in closed form, when known.
    fn analytic_derivative(&self, _p: &[f64]) -> Option<Form> {
        None
    }
}

type FormFn = dyn Fn(&[f64]) -> Form + Send + Sync;

/// A form field given by closures. Cheap to clone.
#[derive(Clone)]
pub struct ChartForm {
    chart: Chart,
    degree: usize,
    f: Arc<FormFn>,
    d: Option<Arc<FormFn>>,
}

impl ChartForm {
    pub fn new<F>(chart: Chart, degree: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Form + Send + Sync + 'static,
    {
        Self {
            chart,
            degree,
            f: Arc::new(f),
            d: None,
        }
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(&[f64]) -> Form + Send + Sync + 'static,
    {
        self.d = Some(Arc::new(d));
        self
    }
}

impl FormField for ChartForm {
    fn chart(&self) -> &Chart {
        &self.chart
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn eval(&self, p: &[f64]) -> Form {
        (self.f)(p)
    }
    fn analytic_derivative(&self, p: &[f64]) -> Option<Form> {
        self.d.as_ref().map(|d| d(p))
    }
}

/// `dω` from the partials `∂_j ω` (one form per coordinate).
pub fn d_from_partials(partials: &[Form]) -> Form {
    let n = partials.len();
    let k = partials[0].k;
    let comps = combos(n, k + 1)
        .iter()
        .map(|idx| {
            (0..idx.len())
                .map(|a| {
                    let rest: Vec<usize> = idx
                        .iter()
                        .enumerate()
                        .filter(|&(b, _)| b != a)
                        .map(|(_, &x)| x)
                        .collect();
                    let sign = if a % 2 == 0 { 1.0 } else { -1.0 };
                    sign * partials[idx[a]].comps[rank(n, &rest)]
                })
                .sum()
        })
        .collect();
    Form { n, k: k + 1, comps }
}

/// Central-difference `dω` of a closure, without chart checks.
pub fn d_central<F>(f: &F, p: &[f64], h: f64) -> Form
where
    F: Fn(&[f64]) -> Form + ?Sized,
{
    let sample = f(p);
    let (n, k) = (sample.n, sample.k);
    let flat = |q: &[f64]| f(q).comps;
    let partials: Vec<Form> = (0..n)
        .map(|j| Form {
            n,
            k,
            comps: stencil::first(&flat, p, j, h),
        })
        .collect();
    d_from_partials(&partials)
}

/// Exterior derivative of a form field at `p`.
pub fn exterior_derivative<F: FormField + ?Sized>(w: &F, p: &[f64], scheme: Scheme) -> Result<Form> {
    w.chart().check(p, scheme.reach_first())?;
    match scheme {
        Scheme::Analytic => w
            .analytic_derivative(p)
            .ok_or_else(|| GeoError::MissingDerivative(format!("exterior derivative on `{}`", w.chart().name))),
        Scheme::Central { h } => Ok(d_central(&|q: &[f64]| w.eval(q), p, h)),
    }
}

/// Largest component of `d(dω)(p)` under nested central differences.
pub fn dd_residual<F: FormField + ?Sized>(w: &F, p: &[f64], h: f64) -> Result<f64> {
    w.chart().check(p, 2.0 * stencil::REACH * h)?;
    let inner = |q: &[f64]| d_central(&|r: &[f64]| w.eval(r), q, h);
    Ok(d_central(&inner, p, h).max_abs())
}

/// Vector with components `v` as a column.
pub fn column(v: &[f64]) -> DVector<f64> {
    DVector::from_column_slice(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    #[test]
    fn ranks_match_enumeration() {
        for n in 1..=6 {
            for k in 0..=n {
                for (i, c) in combos(n, k).iter().enumerate() {
                    assert_eq!(rank(n, c), i);
                }
            }
        }
    }

    #[test]
    fn wedge_is_graded_commutative() {
        let a = Form::one_form(&[1.0, 2.0, 0.5]);
        let b = Form::one_form(&[-1.0, 0.3, 4.0]);
        assert!(a.wedge(&b).add(&b.wedge(&a)).max_abs() < 1e-15);
        assert_eq!(a.wedge(&a).max_abs(), 0.0);
        let dxdy = Form::basis(2, &[0, 1]);
        assert_eq!(dxdy.components(), &[1.0]);
        assert_eq!(Form::basis(2, &[1, 0]).components(), &[-1.0]);
    }

    #[test]
    fn dense_roundtrip() {
        let f = Form::from_components(4, 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        let back = Form::from_dense(4, 2, &f.to_dense()).unwrap();
        assert_eq!(f, back);
    }

    #[test]
    fn interior_and_evaluate() {
        let f = Form::basis(3, &[0, 1]);
        assert_eq!(f.evaluate(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]), 1.0);
        assert_eq!(f.evaluate(&[&[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]), -1.0);
        assert_eq!(f.interior(&[0.0, 1.0, 0.0]).components(), &[-1.0, 0.0, 0.0]);
    }

    #[test]
    fn star_in_the_plane() {
        let g = DMatrix::identity(2, 2);
        let dx = Form::one_form(&[1.0, 0.0]);
        assert_eq!(hodge_star(&dx, &g, 1.0).unwrap().components(), &[0.0, 1.0]);
        let one = Form::scalar(2, 1.0);
        assert_eq!(hodge_star(&one, &g, 1.0).unwrap(), volume_form(&g, 1.0).unwrap());
    }

    #[test]
    fn minkowski_star_solves_defining_identity() {
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]));
        let ginv = g.clone();
        let vol = volume_form(&g, 1.0).unwrap();
        let beta = Form::basis(4, &[1, 2]);
        // solve α∧X = g(α,β) vol over the 2-form basis for X
        let basis: Vec<Form> = combos(4, 2).iter().map(|c| Form::basis(4, c)).collect();
        let a = DMatrix::from_fn(6, 6, |i, j| basis[i].wedge(&basis[j]).components()[0]);
        let rhs = DVector::from_fn(6, |i, _| inner_product(&basis[i], &beta, &ginv) * vol.components()[0]);
        let x = a.lu().solve(&rhs).unwrap();
        let star = hodge_star(&beta, &g, 1.0).unwrap();
        for i in 0..6 {
            assert!((x[i] - star.components()[i]).abs() < 1e-14);
        }
        // ∗(dx∧dy) = dt∧dz in this orientation
        assert_eq!(star.get(&[0, 3]), 1.0);
    }

    #[test]
    fn polar_exterior_derivative() {
        let chart = Chart::new("plane", &["x", "y"], &[(-2.0, 2.0), (-2.0, 2.0)], 0.1).unwrap();
        let w = ChartForm::new(chart, 1, |p| Form::one_form(&[-p[1] * p[0], p[0] * p[0]]));
        let d = exterior_derivative(&w, &[0.5, 0.25], Scheme::first_derivative()).unwrap();
        // ∂_x(x²) − ∂_y(−xy) = 2x + x
        assert!((d.components()[0] - 1.5).abs() < 1e-10);
        assert!(dd_residual(&w, &[0.5, 0.25], 1e-3).unwrap() < 1e-6);
    }
}
