//! `exp±,t(A)` and `g_t(A)` on time grids, the initial value problem on a
//! half-line, the bounded solution on the whole line, and a finite-difference
//! residual check for `x' = Ax + f`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;


use crate::blockmat::{causal_spectrum, BlockLowerTriangular};
use crate::chaincalc::{block_function_with, convolution_route, FunctionOptions, Route};
use crate::error::Error;
use crate::func::{Kernel, KernelKind};
use crate::linalg::{CMatrix, C64};
use crate::quadrature::{GaussLegendre, GL_POINTS};

/// Strictly increasing, finite, nonzero times.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self, Error> {
        if points.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if points.contains(&0.0) {
            return Err(Error::GridContainsZero);
        }
        if points.iter().any(|t| !t.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::GridNotIncreasing);
        }
        Ok(Self { points })
    }

    /// `count` equispaced points from `start` to `stop` inclusive.
    pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Self, Error> {
        let points = match count {
            0 => Vec::new(),
            1 => vec![start],
            _ => {
                let h = (stop - start) / (count - 1) as f64;
                (0..count).map(|k| if k + 1 == count { stop } else { start + h * k as f64 }).collect()
            }
        };
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One evaluated `exp₊,t(A)`, `exp₋,t(A)` or `g_t(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenSample {
    pub t: f64,
    pub matrix: BlockLowerTriangular,
    pub kind: KernelKind,
    pub route: Route,
    pub est_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn kind(self) -> KernelKind {
        match self {
            Sign::Plus => KernelKind::Plus,
            Sign::Minus => KernelKind::Minus,
        }
    }
}

/// Samples of `kind` at each time along one route.
pub fn evaluate_many(
    a: &BlockLowerTriangular,
    kind: KernelKind,
    times: &[f64],
    route: Route,
    opts: &FunctionOptions,
) -> Result<Vec<GreenSample>, Error> {
    if times.iter().any(|&t| t == 0.0 || !t.is_finite()) {
        return Err(Error::UndefinedAtZero);
    }
    let results = match route {
        Route::Convolution => convolution_route(a, kind, times, opts)?,
        _ => times
            .iter()
            .map(|&t| block_function_with(a, &Kernel::new(kind, t)?, route, opts))
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(results
        .into_iter()
        .zip(times)
        .map(|(r, &t)| GreenSample { t, matrix: r.matrix, kind, route, est_error: r.est_error })
        .collect())
}

pub fn evaluate(a: &BlockLowerTriangular, kind: KernelKind, t: f64, route: Route) -> Result<GreenSample, Error> {
    Ok(evaluate_many(a, kind, &[t], route, &FunctionOptions::default())?.remove(0))
}

/// `exp₊,t(A)` or `exp₋,t(A)` by nested convolutions.
pub fn exp_blocks(a: &BlockLowerTriangular, t: f64, sign: Sign) -> Result<GreenSample, Error> {
    evaluate(a, sign.kind(), t, Route::Convolution)
}

/// `g_t(A)` by full-line convolutions.
pub fn green_blocks(a: &BlockLowerTriangular, t: f64) -> Result<GreenSample, Error> {
    evaluate(a, KernelKind::Green, t, Route::Convolution)
}

/// A bounded continuous forcing term `t ↦ f(t) ∈ ℂⁿ`.
pub struct ForcingFunction<'a> {
    dim: usize,
    bound: f64,
    eval: Box<dyn Fn(f64) -> Vec<C64> + 'a>,
}

impl<'a> ForcingFunction<'a> {
    /// `bound` is a sup-norm estimate for `‖f(t)‖₂`.
    pub fn new(dim: usize, bound: f64, eval: impl Fn(f64) -> Vec<C64> + 'a) -> Self {
        Self { dim, bound, eval: Box::new(eval) }
    }

    pub fn constant(value: Vec<C64>) -> Self {
        let bound = norm(&value);
        let dim = value.len();
        Self::new(dim, bound, move |_| value.clone())
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(vec![C64::new(0.0, 0.0); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn eval(&self, t: f64) -> Vec<C64> {
        (self.eval)(t)
    }
}

impl core::fmt::Debug for ForcingFunction<'_> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ForcingFunction").field("dim", &self.dim).field("bound", &self.bound).finish()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C64], s: f64, x: &[C64]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a += b * s;
    }
}

/// Kernel tables for one step length `ℓ`: the propagator and the kernel at the
/// Gauss nodes of the step.
struct StepTable {
    len: f64,
    propagator: CMatrix,
    offsets: Vec<f64>,
    weights: Vec<f64>,
    kernels: Vec<CMatrix>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Direction {
    /// `x(b) = K(ℓ) x(a) + ∫_a^b K(b - u) f(u) du`
    Forward,
    /// `x(a) = -K(-ℓ) x(b) + ∫_a^b K(a - u) f(u) du`
    Backward,
}

struct Stepper<'a> {
    a: &'a BlockLowerTriangular,
    kind: KernelKind,
    direction: Direction,
    opts: &'a FunctionOptions,
    gl: GaussLegendre,
    tables: Vec<StepTable>,
}

impl<'a> Stepper<'a> {
    fn new(a: &'a BlockLowerTriangular, kind: KernelKind, direction: Direction, opts: &'a FunctionOptions) -> Self {
        Self { a, kind, direction, opts, gl: GaussLegendre::new(GL_POINTS), tables: Vec::new() }
    }

    fn table(&mut self, len: f64) -> Result<&StepTable, Error> {
        if let Some(i) = self.tables.iter().position(|t| (t.len - len).abs() <= 1e-14 * len) {
            return Ok(&self.tables[i]);
        }
        let half = 0.5 * len;
        let offsets: Vec<f64> = self.gl.nodes.iter().map(|x| half * (1.0 + x)).collect();
        let weights: Vec<f64> = self.gl.weights.iter().map(|w| half * w).collect();
        let mut times = vec![match self.direction {
            Direction::Forward => len,
            Direction::Backward => -len,
        }];
        times.extend(offsets.iter().map(|&tau| match self.direction {
            Direction::Forward => len - tau,
            Direction::Backward => -tau,
        }));
        let mut mats: Vec<CMatrix> = evaluate_many(self.a, self.kind, &times, Route::Convolution, self.opts)?
            .into_iter()
            .map(|s| s.matrix.assemble())
            .collect();
        let kernels = mats.split_off(1);
        let mut propagator = mats.pop().expect("propagator");
        if self.direction == Direction::Backward {
            propagator = propagator.scale(C64::new(-1.0, 0.0));
        }
        self.tables.push(StepTable { len, propagator, offsets, weights, kernels });
        Ok(self.tables.last().expect("just pushed"))
    }

    /// Advances `x` across `[from, to]` in equal steps no longer than `max_step`.
    /// Forward steps run from `from` up to `to`, backward steps from `to` down to `from`.
    fn advance(
        &mut self,
        x: &mut Vec<C64>,
        from: f64,
        to: f64,
        max_step: f64,
        f: &ForcingFunction,
    ) -> Result<(), Error> {
        let steps = (((to - from) / max_step).ceil() as usize).max(1);
        let len = (to - from) / steps as f64;
        let direction = self.direction;
        let table = self.table(len)?;
        for s in 0..steps {
            let left = match direction {
                Direction::Forward => from + len * s as f64,
                Direction::Backward => to - len * (s + 1) as f64,
            };
            let mut next = table.propagator.mul_vec(x);
            for ((&tau, &w), k) in table.offsets.iter().zip(&table.weights).zip(&table.kernels) {
                let fv = f.eval(left + tau);
                axpy(&mut next, w, &k.mul_vec(&fv));
            }
            *x = next;
        }
        Ok(())
    }
}

fn max_step(a: &BlockLowerTriangular) -> f64 {
    let rho = a.assemble().norm_one();
    if rho > 0.0 {
        (1.0 / rho).min(1.0)
    } else {
        1.0
    }
}

/// Solution of `x' = Ax + f`, `x(0) = 0` on a grid lying entirely on one side
/// of zero: `x(t) = ∫₀ᵗ e^{(t-u)A} f(u) du`, marched with `exp₊` tables for
/// `t > 0` and `exp₋` tables for `t < 0`.
pub fn solve_ivp(a: &BlockLowerTriangular, f: &ForcingFunction, grid: &TimeGrid) -> Result<Vec<Vec<C64>>, Error> {
    solve_ivp_with(a, f, grid, &FunctionOptions::default())
}

pub fn solve_ivp_with(
    a: &BlockLowerTriangular,
    f: &ForcingFunction,
    grid: &TimeGrid,
    opts: &FunctionOptions,
) -> Result<Vec<Vec<C64>>, Error> {
    let n = a.partition().total();
    if f.dim() != n {
        return Err(Error::ForcingDimension { expected: n, found: f.dim() });
    }
    let pts = grid.points();
    let positive = pts[0] > 0.0;
    if !positive && pts[pts.len() - 1] > 0.0 {
        return Err(Error::GridMixedSign);
    }
    let h = max_step(a);
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut out = vec![Vec::new(); pts.len()];
    if positive {
        let mut stepper = Stepper::new(a, KernelKind::Plus, Direction::Forward, opts);
        let mut t = 0.0;
        for (k, &next) in pts.iter().enumerate() {
            stepper.advance(&mut x, t, next, h, f)?;
            out[k] = x.clone();
            t = next;
        }
    } else {
        let mut stepper = Stepper::new(a, KernelKind::Minus, Direction::Backward, opts);
        let mut t = 0.0;
        for (k, &prev) in pts.iter().enumerate().rev() {
            stepper.advance(&mut x, prev, t, h, f)?;
            out[k] = x.clone();
            t = prev;
        }
    }
    Ok(out)
}

/// Bounded solution on a grid with the reported bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundedSolution {
    pub values: Vec<Vec<C64>>,
    /// `(∫‖G‖) · sup‖f‖`, a bound on `sup ‖x‖`.
    pub sup_bound: f64,
    /// Estimate of what the truncated tails leave out.
    pub truncation_bound: f64,
    pub warnings: Vec<String>,
}

/// Warn when the tail estimate exceeds this.
pub const TRUNCATION_WARN: f64 = 1e-8;

/// `x(t) = ∫ G(t - u) f(u) du` split as `x⁺ + x⁻`: `x⁺` collects `u < t` and
/// is marched forward from `t₀ - T`, `x⁻` collects `u > t` and is marched
/// backward from `t_last + T`, with `T = ln(1/tol)/(gap/2)`.
pub fn solve_bounded(a: &BlockLowerTriangular, f: &ForcingFunction, grid: &TimeGrid) -> Result<BoundedSolution, Error> {
    solve_bounded_with(a, f, grid, &FunctionOptions::default())
}

pub fn solve_bounded_with(
    a: &BlockLowerTriangular,
    f: &ForcingFunction,
    grid: &TimeGrid,
    opts: &FunctionOptions,
) -> Result<BoundedSolution, Error> {
    let n = a.partition().total();
    if f.dim() != n {
        return Err(Error::ForcingDimension { expected: n, found: f.dim() });
    }
    let gap = causal_spectrum(a)?.gap_to_imaginary_axis();
    if gap < opts.gap_tol {
        return Err(Error::SpectrumTouchesAxis { gap, tol: opts.gap_tol });
    }
    let tail = (1.0 / opts.conv.tol).ln() / (0.5 * gap);
    let pts = grid.points();
    let h = max_step(a);

    let mut fwd = Stepper::new(a, KernelKind::Green, Direction::Forward, opts);
    let mut plus = vec![vec![C64::new(0.0, 0.0); n]; pts.len()];
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut t = pts[0] - tail;
    for (k, &next) in pts.iter().enumerate() {
        fwd.advance(&mut x, t, next, h, f)?;
        plus[k] = x.clone();
        t = next;
    }

    let mut bwd = Stepper::new(a, KernelKind::Green, Direction::Backward, opts);
    let mut minus = vec![vec![C64::new(0.0, 0.0); n]; pts.len()];
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut t = pts[pts.len() - 1] + tail;
    for (k, &prev) in pts.iter().enumerate().rev() {
        bwd.advance(&mut x, prev, t, h, f)?;
        minus[k] = x.clone();
        t = prev;
    }

    let values: Vec<Vec<C64>> = plus
        .into_iter()
        .zip(minus)
        .map(|(mut p, m)| {
            axpy(&mut p, 1.0, &m);
            p
        })
        .collect();

    // ∫‖G‖ by a Riemann sum over powers of the one-step propagators.
    let steps = ((tail / h).ceil() as usize).max(1);
    let len = tail / steps as f64;
    let gp = fwd.table(len)?.propagator.clone();
    let gm = bwd.table(len)?.propagator.clone();
    let mut integral = 0.0;
    let mut tails = 0.0;
    for prop in [gp, gm] {
        let mut power = prop.clone();
        for _ in 0..steps {
            integral += len * power.frobenius_norm();
            power = power.matmul(&prop);
        }
        tails += power.frobenius_norm() / (0.5 * gap);
    }
    let sup_bound = integral * f.bound();
    let truncation_bound = tails * f.bound();
    let mut warnings = Vec::new();
    if truncation_bound > TRUNCATION_WARN {
        warnings.push(format!(
            "truncation estimate {truncation_bound:.3e} exceeds {TRUNCATION_WARN:.0e}; the forcing bound or the spectral gap is too large for the window"
        ));
    }
    Ok(BoundedSolution { values, sup_bound, truncation_bound, warnings })
}

/// `max_k ‖(x_{k+1} - x_{k-1})/(t_{k+1} - t_{k-1}) - A x_k - f(t_k)‖₂` over
/// interior grid points.
pub fn verify_residual(
    a: &BlockLowerTriangular,
    xs: &[Vec<C64>],
    f: &ForcingFunction,
    grid: &TimeGrid,
) -> Result<f64, Error> {
    let pts = grid.points();
    if xs.len() != pts.len() {
        return Err(Error::SampleCount { expected: pts.len(), found: xs.len() });
    }
    let n = a.partition().total();
    if f.dim() != n {
        return Err(Error::ForcingDimension { expected: n, found: f.dim() });
    }
    let dense = a.assemble();
    let mut worst: f64 = 0.0;
    for k in 1..pts.len().saturating_sub(1) {
        let dt = pts[k + 1] - pts[k - 1];
        let ax = dense.mul_vec(&xs[k]);
        let fv = f.eval(pts[k]);
        let r: Vec<C64> = (0..n).map(|i| (xs[k + 1][i] - xs[k - 1][i]) / dt - ax[i] - fv[i]).collect();
        worst = worst.max(norm(&r));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::BlockPartition;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn scalar_blocks(diag: &[f64], lower: &[((usize, usize), f64)]) -> BlockLowerTriangular {
        let mut a = BlockLowerTriangular::zeros(BlockPartition::scalar(diag.len()).unwrap());
        for (i, &d) in diag.iter().enumerate() {
            a.insert(i, i, CMatrix::from_real_rows(&[&[d]])).unwrap();
        }
        for &((i, j), v) in lower {
            a.insert(i, j, CMatrix::from_real_rows(&[&[v]])).unwrap();
        }
        a
    }

    #[test]
    fn grid_validation() {
        assert_eq!(TimeGrid::new(vec![]), Err(Error::EmptyGrid));
        assert_eq!(TimeGrid::new(vec![-1.0, 0.0, 1.0]), Err(Error::GridContainsZero));
        assert_eq!(TimeGrid::new(vec![1.0, 0.5]), Err(Error::GridNotIncreasing));
        assert_eq!(TimeGrid::linspace(-1.0, 1.0, 3), Err(Error::GridContainsZero));
        assert_eq!(TimeGrid::linspace(0.5, 1.0, 2).unwrap().points(), &[0.5, 1.0]);
    }

    #[test]
    fn exp_examples() {
        let a = scalar_blocks(&[0.0, 1.0], &[((1, 0), 1.0)]);
        let e = core::f64::consts::E;
        let s = exp_blocks(&a, 1.0, Sign::Plus).unwrap();
        let expected = CMatrix::from_real_rows(&[&[1.0, 0.0], &[e - 1.0, e]]);
        assert!(s.matrix.assemble().distance(&expected) < 1e-12);
        let z = exp_blocks(&a, -1.0, Sign::Plus).unwrap();
        assert_eq!(z.matrix.assemble().max_abs(), 0.0);
        assert!(matches!(exp_blocks(&a, 0.0, Sign::Plus), Err(Error::UndefinedAtZero)));
    }

    #[test]
    fn green_examples() {
        let d = scalar_blocks(&[-1.0, 1.0], &[]);
        for &t in &[-1.5, 0.5, 2.0] {
            let g = green_blocks(&d, t).unwrap().matrix.assemble();
            let (g11, g22) = if t > 0.0 { ((-t).exp(), 0.0) } else { (0.0, -(t.exp())) };
            assert!((g[(0, 0)] - c(g11)).norm() < 1e-12);
            assert!((g[(1, 1)] - c(g22)).norm() < 1e-12);
        }
        let a = scalar_blocks(&[-1.0, 1.0], &[((1, 0), 1.0)]);
        let g = green_blocks(&a, 1.0).unwrap().matrix.assemble();
        assert!((g[(1, 0)].re + (-1f64).exp() / 2.0).abs() < 1e-9);
        let singular = scalar_blocks(&[0.0, 1.0], &[]);
        assert!(matches!(green_blocks(&singular, 1.0), Err(Error::SpectrumTouchesAxis { .. })));
    }

    #[test]
    fn ivp_examples() {
        let zero = scalar_blocks(&[0.0], &[]);
        let grid = TimeGrid::new(vec![0.5, 1.0]).unwrap();
        let x = solve_ivp(&zero, &ForcingFunction::constant(vec![c(1.0)]), &grid).unwrap();
        assert!((x[1][0] - c(1.0)).norm() < 1e-13);
        let x = solve_ivp(&zero, &ForcingFunction::zero(1), &grid).unwrap();
        assert_eq!(x[1][0], c(0.0));

        let decay = scalar_blocks(&[-1.0], &[]);
        let f = ForcingFunction::new(1, 1.0, |t| vec![c((-t).exp())]);
        let grid = TimeGrid::new(vec![1.0, 3.0]).unwrap();
        let x = solve_ivp(&decay, &f, &grid).unwrap();
        assert!((x[0][0] - c((-1f64).exp())).norm() < 1e-13);
        assert!((x[1][0] - c(3.0 * (-3f64).exp())).norm() < 1e-13);

        let back = TimeGrid::new(vec![-2.0, -1.0]).unwrap();
        let x = solve_ivp(&decay, &f, &back).unwrap();
        assert!((x[0][0] - c(-2.0 * 2f64.exp())).norm() < 1e-12);
        let mixed = TimeGrid::new(vec![-1.0, 1.0]).unwrap();
        assert!(matches!(solve_ivp(&decay, &f, &mixed), Err(Error::GridMixedSign)));
    }

    #[test]
    fn bounded_constant_solutions() {
        let d = scalar_blocks(&[-1.0, 1.0], &[]);
        let grid = TimeGrid::linspace(0.1, 0.3, 3).unwrap();
        let f = ForcingFunction::constant(vec![c(1.0), c(1.0)]);
        let sol = solve_bounded(&d, &f, &grid).unwrap();
        for x in &sol.values {
            assert!((x[0] - c(1.0)).norm() < 1e-9);
            assert!((x[1] - c(-1.0)).norm() < 1e-9);
        }
        assert!(sol.warnings.is_empty());

        let a = scalar_blocks(&[-1.0, 1.0], &[((1, 0), 1.0)]);
        let f = ForcingFunction::constant(vec![c(1.0), c(0.0)]);
        let sol = solve_bounded(&a, &f, &grid).unwrap();
        for x in &sol.values {
            assert!((x[0] - c(1.0)).norm() < 1e-9);
            assert!((x[1] - c(-1.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn residual_catches_perturbation() {
        let d = scalar_blocks(&[-1.0, 1.0], &[]);
        let grid = TimeGrid::linspace(1.0, 1.004, 5).unwrap();
        let f = ForcingFunction::constant(vec![c(1.0), c(1.0)]);
        let exact = vec![vec![c(1.0), c(-1.0)]; 5];
        assert!(verify_residual(&d, &exact, &f, &grid).unwrap() < 1e-8);
        let mut bad = exact.clone();
        bad[2][0] += 1.0;
        assert!(verify_residual(&d, &bad, &f, &grid).unwrap() >= 1.0);
    }
}
