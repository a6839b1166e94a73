//! Scalar divided differences `f^[n-1](μ₁, …, μ_n)`.
//!
//! Four independent evaluations: the recurrence (with derivatives at
//! coincident points), the partial-fraction sum over distinct points, the
//! contour integral `(1/2πi)∮ f(z)/Ω(z) dz`, and, for the kernels
//! `exp₊`, `exp₋`, `g`, the nested convolution of one-point kernels.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;


use crate::conv::{chain_convolution, ConvSettings};
use crate::error::Error;
use crate::func::{AnalyticFn, Kernel, KernelKind};
use crate::linalg::{CMatrix, C64};
use crate::quadrature::{GaussLegendre, GL_POINTS};
use crate::spectral::{enclose_with, ContourSet, SpectralSplit, DEFAULT_NODES};

pub const DEFAULT_CONFLUENCE_TOL: f64 = 1e-9;
/// Tail tolerance of the scalar convolution and Laplace quadratures.
pub const SCALAR_TAIL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct InterpolationPoints {
    points: Vec<C64>,
    confluence_tol: f64,
}

impl InterpolationPoints {
    pub fn new(points: Vec<C64>) -> Result<Self, Error> {
        Self::with_tolerance(points, DEFAULT_CONFLUENCE_TOL)
    }

    pub fn with_tolerance(points: Vec<C64>, confluence_tol: f64) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::EmptyPoints);
        }
        Ok(Self { points, confluence_tol })
    }

    pub fn real(points: &[f64]) -> Result<Self, Error> {
        Self::new(points.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn points(&self) -> &[C64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn order(&self) -> usize {
        self.points.len() - 1
    }

    pub fn confluence_tol(&self) -> f64 {
        self.confluence_tol
    }

    /// `|μ_i - μ_j| ≤ tol · max(1, |μ_i|)`
    pub fn coincide(&self, i: usize, j: usize) -> bool {
        let (a, b) = (self.points[i], self.points[j]);
        (a - b).norm() <= self.confluence_tol * a.norm().max(1.0)
    }

    pub fn first_confluent_pair(&self) -> Option<(usize, usize)> {
        let n = self.points.len();
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).find(|&(i, j)| self.coincide(i, j))
    }

    pub fn is_confluent(&self) -> bool {
        self.first_confluent_pair().is_some()
    }

    /// Groups of coincident points in order of first appearance, as
    /// `(representative, multiplicity)`.
    pub fn groups(&self) -> Vec<(C64, usize)> {
        let n = self.points.len();
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut groups: Vec<(C64, usize)> = Vec::new();
        for i in 0..n {
            if owner[i].is_some() {
                continue;
            }
            let g = groups.len();
            groups.push((self.points[i], 0));
            let mut stack = vec![i];
            owner[i] = Some(g);
            while let Some(p) = stack.pop() {
                groups[g].1 += 1;
                for q in 0..n {
                    if owner[q].is_none() && self.coincide(p, q) {
                        owner[q] = Some(g);
                        stack.push(q);
                    }
                }
            }
        }
        groups
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DdMethod {
    Recurrence,
    DistinctFormula,
    Contour,
    Convolution,
    ClosedForm,
}

impl DdMethod {
    pub fn name(self) -> &'static str {
        match self {
            DdMethod::Recurrence => "recurrence",
            DdMethod::DistinctFormula => "distinct_formula",
            DdMethod::Contour => "contour",
            DdMethod::Convolution => "convolution",
            DdMethod::ClosedForm => "closed_form",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DividedDiffResult {
    pub value: C64,
    pub order: usize,
    pub method: DdMethod,
    pub confluent: bool,
}

fn result(value: C64, pts: &InterpolationPoints, method: DdMethod) -> DividedDiffResult {
    DividedDiffResult { value, order: pts.order(), method, confluent: pts.is_confluent() }
}

/// The divided-difference table. Coincident points are placed next to each
/// other and the quotient over a run of `k + 1` equal points is replaced by
/// `f^{(k)}/k!`.
pub fn dd_recurrence<F: AnalyticFn + ?Sized>(f: &F, pts: &InterpolationPoints) -> Result<DividedDiffResult, Error> {
    let z: Vec<C64> = pts.groups().into_iter().flat_map(|(v, mult)| core::iter::repeat_n(v, mult)).collect();
    let n = z.len();
    let mut table: Vec<C64> = z.iter().map(|&x| f.eval(x)).collect();
    let mut factorial = 1.0;
    for k in 1..n {
        factorial *= k as f64;
        for i in 0..(n - k) {
            table[i] = if z[i] == z[i + k] {
                taylor_coefficient(f, z[i], k, factorial)
            } else {
                (table[i + 1] - table[i]) / (z[i + k] - z[i])
            };
        }
    }
    Ok(result(table[0], pts, DdMethod::Recurrence))
}

/// `f^{(k)}(z)/k!`, from the closed form when available and otherwise from a
/// Cauchy integral on a small circle.
fn taylor_coefficient<F: AnalyticFn + ?Sized>(f: &F, z: C64, k: usize, factorial: f64) -> C64 {
    if let Some(d) = f.derivative(z, k) {
        return d / factorial;
    }
    let r = (0.5 * f.singular_distance(z)).min(0.5);
    let n = 128;
    let mut s = C64::new(0.0, 0.0);
    for j in 0..n {
        let e = C64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64);
        s += f.eval(z + e * r) * e.powi(-(k as i32));
    }
    s / (n as f64 * r.powi(k as i32))
}

/// `Σ_j f(μ_j) / ∏_{k≠j} (μ_j - μ_k)` for pairwise distinct points.
pub fn dd_distinct<F: AnalyticFn + ?Sized>(f: &F, pts: &InterpolationPoints) -> Result<DividedDiffResult, Error> {
    if let Some((i, j)) = pts.first_confluent_pair() {
        return Err(Error::ConfluentPoints { i, j });
    }
    let p = pts.points();
    let mut sum = C64::new(0.0, 0.0);
    for (j, &mj) in p.iter().enumerate() {
        let mut denom = C64::new(1.0, 0.0);
        for (k, &mk) in p.iter().enumerate() {
            if k != j {
                denom *= mj - mk;
            }
        }
        sum += f.eval(mj) / denom;
    }
    Ok(result(sum, pts, DdMethod::DistinctFormula))
}

/// `(1/2πi)∮_Γ f(z) / ∏(z - μ_k) dz` by the trapezoidal rule on `Γ`.
pub fn dd_contour<F: AnalyticFn + ?Sized>(
    f: &F,
    pts: &InterpolationPoints,
    gamma: &ContourSet,
) -> Result<DividedDiffResult, Error> {
    for (index, &p) in pts.points().iter().enumerate() {
        let inside = gamma.circles().iter().any(|c| c.contains(p) && c.distance_to(p) > 1e-6 * (1.0 + c.radius));
        if !inside {
            return Err(Error::PointNotEnclosed { index });
        }
    }
    let mut sum = C64::new(0.0, 0.0);
    for (z, w, _) in gamma.nodes() {
        let omega: C64 = pts.points().iter().map(|&m| z - m).product();
        sum += f.eval(z) * w / omega;
    }
    Ok(result(sum, pts, DdMethod::Contour))
}

/// [`dd_contour`] on circles built around the points, respecting the
/// function's singularities.
pub fn dd_contour_auto<F: AnalyticFn + ?Sized>(f: &F, pts: &InterpolationPoints) -> Result<DividedDiffResult, Error> {
    let reps: Vec<C64> = pts.groups().into_iter().map(|(v, _)| v).collect();
    let gamma = enclose_with(&reps, &[], None, DEFAULT_NODES, &|z| f.singular_distance(z))?;
    dd_contour(f, pts, &gamma)
}

/// The kernel divided difference as the convolution of one-point kernels
/// `kernel(μ₁) * ⋯ * kernel(μ_n)` evaluated at `t`.
pub fn dd_exp_conv(kind: KernelKind, t: f64, pts: &InterpolationPoints) -> Result<DividedDiffResult, Error> {
    if t == 0.0 || !t.is_finite() {
        return Err(Error::UndefinedAtZero);
    }
    if kind == KernelKind::Green {
        if let Some(index) = pts.points().iter().position(|z| z.re == 0.0) {
            return Err(Error::RateOnImaginaryAxis { index });
        }
    }
    let blocks: Vec<CMatrix> = pts.points().iter().map(|&z| CMatrix::from_diagonal(&[z])).collect();
    let one = CMatrix::identity(1);
    let splits: Vec<SpectralSplit> = pts
        .points()
        .iter()
        .map(|z| {
            let left = if z.re < 0.0 { 1.0 } else { 0.0 };
            SpectralSplit {
                projector_left: CMatrix::from_real_rows(&[&[left]]),
                projector_right: CMatrix::from_real_rows(&[&[1.0 - left]]),
            }
        })
        .collect();
    let block_refs: Vec<&CMatrix> = blocks.iter().collect();
    let couplings: Vec<&CMatrix> = vec![&one; blocks.len() - 1];
    let settings = ConvSettings { tol: SCALAR_TAIL_TOL, ..ConvSettings::default() };
    let out = chain_convolution(kind, &block_refs, &couplings, Some(&splits), &[t], &settings)?;
    Ok(result(out.values[0][(0, 0)], pts, DdMethod::Convolution))
}

/// Bilateral Laplace transform `∫ e^{-λt} kernel_t(λ₀) dt`, which equals
/// `1/(λ - λ₀)` in the region of convergence:
/// `exp₊` needs `Re λ > Re λ₀`, `exp₋` needs `Re λ < Re λ₀`, and `g` is
/// checked on the strip `|Re λ| < |Re λ₀|`.
pub fn laplace_check(kind: KernelKind, lambda0: C64, lambda: C64) -> Result<C64, Error> {
    let (ok, condition) = match kind {
        KernelKind::Plus => (lambda.re > lambda0.re, "Re λ > Re λ₀"),
        KernelKind::Minus => (lambda.re < lambda0.re, "Re λ < Re λ₀"),
        KernelKind::Green => (
            lambda0.re != 0.0 && lambda.re.abs() < lambda0.re.abs(),
            "|Re λ| < |Re λ₀| with Re λ₀ ≠ 0",
        ),
    };
    if !ok {
        return Err(Error::LaplaceRegion { condition });
    }
    let forward = match kind {
        KernelKind::Plus => true,
        KernelKind::Minus => false,
        KernelKind::Green => lambda0.re < 0.0,
    };
    let decay = (lambda.re - lambda0.re).abs();
    let tail = (1.0 / SCALAR_TAIL_TOL).ln() / decay + 1.0;
    let rate = (lambda0 - lambda).norm();
    let max_panel = if rate > 0.0 { (2.0 / rate).min(1.0) } else { 1.0 };
    let panels = (tail / max_panel).ceil() as usize;
    const MAX_PANELS: usize = 1_000_000;
    if panels > MAX_PANELS {
        return Err(Error::TooManyPanels { panels, max: MAX_PANELS });
    }
    let gl = GaussLegendre::new(GL_POINTS);
    let value = if forward {
        gl.integrate_composite(0.0, tail, max_panel, |t| (-lambda * t).exp() * Kernel::at_time(KernelKind::Plus, t, lambda0))
    } else {
        gl.integrate_composite(-tail, 0.0, max_panel, |t| {
            (-lambda * t).exp() * Kernel::at_time(KernelKind::Minus, t, lambda0)
        })
    };
    Ok(value)
}

/// Divided difference of `r_λ(ν) = 1/(λ - ν)`, which is `1/∏(λ - μ_j)`.
pub fn dd_r_lambda(lambda: C64, pts: &InterpolationPoints) -> Result<C64, Error> {
    let mut prod = C64::new(1.0, 0.0);
    for (index, &m) in pts.points().iter().enumerate() {
        if (lambda - m).norm() <= pts.confluence_tol() * m.norm().max(1.0) {
            return Err(Error::Pole { index });
        }
        prod *= lambda - m;
    }
    Ok(prod.inv())
}
