//! Nested convolutions of matrix kernels,
//!
//! `H₁ = K₁`, `H_l(s) = ∫ H_{l-1}(u) C_{l-1} K_l(s - u) du`,
//!
//! where `K_l(τ) = e^{τB_l} P_l⁺` for `τ > 0` and `-e^{τB_l} P_l⁻` for `τ < 0`.
//! The three kernels differ only in the projectors: `exp₊` has `P⁺ = I, P⁻ = 0`,
//! `exp₋` the reverse, and `g` the Riesz projectors onto the left and right
//! half-plane spectrum.
//!
//! Each level is split into a forward part `F(s) = ∫_{u<s}` and a backward part
//! `B(s) = -∫_{u>s}`, swept panel by panel across a composite Gauss-Legendre
//! grid. Within a panel `[x₀, x₁]`
//!
//! `F(x_j) = (F(x₀) + ∫_{x₀}^{x_j} H C e^{(x₀-u)B} P⁺ du) e^{(x_j-x₀)B}`,
//!
//! and the running integral comes from the spectral integration matrix, so
//! every exponential that appears has argument at most one panel long.

use alloc::vec;
use alloc::vec::Vec;


use crate::error::Error;
use crate::func::KernelKind;
use crate::linalg::{self, expm, CMatrix, C64};
use crate::quadrature::{GaussLegendre, GL_POINTS};
use crate::spectral::{self, SpectralSplit, DEFAULT_GAP_TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct ConvSettings {
    /// Tail tolerance for the full-line `g` convolutions.
    pub tol: f64,
    pub max_panels: usize,
}

impl Default for ConvSettings {
    fn default() -> Self {
        Self { tol: 1e-10, max_panels: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvOutput {
    /// `H_m(t)` for each requested `t`.
    pub values: Vec<CMatrix>,
    /// Rough bound on what the truncated tails leave out.
    pub truncation: f64,
}

struct Factor {
    b: CMatrix,
    fwd: Option<CMatrix>,
    bwd: Option<CMatrix>,
}

/// Per-panel-length exponentials. With `ξ` the Gauss nodes on `[-1, 1]` and
/// `h = L/2`: `x[j] = e^{h(1+ξ_j)B}`, `y[j] = e^{-h(1+ξ_j)B}`. Every factor
/// carries the projector of its half so that rounding never feeds the
/// growing part of the spectrum.
struct Tables {
    x_fwd: Vec<CMatrix>,
    y_fwd: Vec<CMatrix>,
    e_fwd: CMatrix,
    x_bwd: Vec<CMatrix>,
    y_bwd: Vec<CMatrix>,
    e_bwd: CMatrix,
}

impl Tables {
    fn new(f: &Factor, len: f64, gl: &GaussLegendre) -> Self {
        let h = 0.5 * len;
        let n = gl.len();
        let exp_at = |s: f64| expm(&f.b.scale(C64::new(s, 0.0)));
        let x: Vec<CMatrix> = gl.nodes.iter().map(|xi| exp_at(h * (1.0 + xi))).collect();
        let y: Vec<CMatrix> = gl.nodes.iter().map(|xi| exp_at(-h * (1.0 + xi))).collect();
        let project = |ms: &[CMatrix], p: &CMatrix| ms.iter().map(|m| m.matmul(p)).collect::<Vec<_>>();
        let empty = CMatrix::zeros(0, 0);
        let (x_fwd, y_fwd, e_fwd) = match &f.fwd {
            Some(p) => (project(&x, p), project(&y, p), exp_at(len).matmul(p)),
            None => (Vec::new(), Vec::new(), empty.clone()),
        };
        let (x_bwd, y_bwd, e_bwd) = match &f.bwd {
            Some(p) => {
                let rev: Vec<CMatrix> = (0..n).map(|k| x[n - 1 - k].clone()).collect();
                (project(&rev, p), project(&y, p), exp_at(-len).matmul(p))
            }
            None => (Vec::new(), Vec::new(), empty),
        };
        Self { x_fwd, y_fwd, e_fwd, x_bwd, y_bwd, e_bwd }
    }
}

struct Grid {
    /// `(x₀, length, table index)`
    panels: Vec<(f64, f64, usize)>,
    lengths: Vec<f64>,
    /// Panel-boundary index of each breakpoint.
    breakpoint_at: Vec<(f64, usize)>,
    /// Index of the boundary sitting at `s = 0`.
    zero: usize,
}

impl Grid {
    fn new(breakpoints: &[f64], max_len: f64, max_panels: usize) -> Result<Self, Error> {
        let mut panels = Vec::new();
        let mut lengths = Vec::new();
        let mut breakpoint_at = vec![(breakpoints[0], 0)];
        let mut zero = 0;
        for w in breakpoints.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let count = (((hi - lo) / max_len).ceil() as usize).max(1);
            if panels.len() + count > max_panels {
                return Err(Error::TooManyPanels { panels: panels.len() + count, max: max_panels });
            }
            let len = (hi - lo) / count as f64;
            lengths.push(len);
            let table = lengths.len() - 1;
            for p in 0..count {
                panels.push((lo + len * p as f64, len, table));
            }
            breakpoint_at.push((hi, panels.len()));
            if hi == 0.0 {
                zero = panels.len();
            }
        }
        Ok(Self { panels, lengths, breakpoint_at, zero })
    }

    fn boundary_of(&self, t: f64) -> usize {
        self.breakpoint_at.iter().find(|(x, _)| *x == t).map(|&(_, i)| i).expect("time is a breakpoint")
    }
}

/// Evaluates the chain convolution `(K₁ C₁ * K₂ C₂ * ⋯ * K_m)(t)` at each of `times`.
///
/// `blocks` are the diagonal blocks `B_l` along the chain and `couplings` the
/// `m - 1` off-diagonal blocks between them. For `g`, `splits` may carry the
/// Riesz projectors of each block; they are computed when absent.
pub fn chain_convolution(
    kind: KernelKind,
    blocks: &[&CMatrix],
    couplings: &[&CMatrix],
    splits: Option<&[SpectralSplit]>,
    times: &[f64],
    settings: &ConvSettings,
) -> Result<ConvOutput, Error> {
    let m = blocks.len();
    assert!(m >= 1 && couplings.len() + 1 == m, "need m blocks and m - 1 couplings");
    if times.iter().any(|&t| t == 0.0 || !t.is_finite()) {
        return Err(Error::UndefinedAtZero);
    }
    let rows = blocks[0].nrows();
    let cols = blocks[m - 1].ncols();

    let mut gap = f64::INFINITY;
    let mut factors = Vec::with_capacity(m);
    for (l, b) in blocks.iter().enumerate() {
        let n = b.nrows();
        let (fwd, bwd) = match kind {
            KernelKind::Plus => (Some(CMatrix::identity(n)), None),
            KernelKind::Minus => (None, Some(CMatrix::identity(n))),
            KernelKind::Green => {
                let eigs = linalg::eigenvalues(b)?;
                gap = eigs.iter().map(|z| z.re.abs()).fold(gap, f64::min);
                if gap < DEFAULT_GAP_TOL {
                    return Err(Error::SpectrumTouchesAxis { gap, tol: DEFAULT_GAP_TOL });
                }
                let split = match splits {
                    Some(s) => s[l].clone(),
                    None => spectral::riesz_split(b)?,
                };
                let nonzero = |p: CMatrix| if p.max_abs() == 0.0 { None } else { Some(p) };
                (nonzero(split.projector_left), nonzero(split.projector_right))
            }
        };
        factors.push(Factor { b: (*b).clone(), fwd, bwd });
    }

    let active: Vec<f64> = times
        .iter()
        .copied()
        .filter(|&t| match kind {
            KernelKind::Plus => t > 0.0,
            KernelKind::Minus => t < 0.0,
            KernelKind::Green => true,
        })
        .collect();
    let zero_out = || CMatrix::zeros(rows, cols);
    if active.is_empty() {
        return Ok(ConvOutput { values: times.iter().map(|_| zero_out()).collect(), truncation: 0.0 });
    }

    if m == 1 {
        let f = &factors[0];
        let values = times
            .iter()
            .map(|&t| {
                let e = expm(&f.b.scale(C64::new(t, 0.0)));
                match (t > 0.0, &f.fwd, &f.bwd) {
                    (true, Some(p), _) => e.matmul(p),
                    (false, _, Some(p)) => e.matmul(p).scale(C64::new(-1.0, 0.0)),
                    _ => zero_out(),
                }
            })
            .collect();
        return Ok(ConvOutput { values, truncation: 0.0 });
    }

    let tmin = active.iter().copied().fold(0.0, f64::min);
    let tmax = active.iter().copied().fold(0.0, f64::max);
    let tail = match kind {
        KernelKind::Green => (1.0 / settings.tol).ln() / (0.5 * gap),
        _ => 0.0,
    };
    let mut breakpoints = vec![tmin - tail, 0.0, tmax + tail];
    breakpoints.extend_from_slice(&active);
    breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite breakpoints"));
    breakpoints.dedup();

    let rho = factors.iter().map(|f| f.b.norm_one()).fold(0.0, f64::max);
    let max_len = if rho > 0.0 { (2.0 / rho).min(1.0) } else { 1.0 };
    let grid = Grid::new(&breakpoints, max_len, settings.max_panels)?;

    let gl = GaussLegendre::new(GL_POINTS);
    let smat = gl.integration_matrix();

    let mut h = level_one(&factors[0], &grid, &gl);
    let mut truncation = 0.0;
    let mut bounds = (Vec::new(), Vec::new());
    for l in 1..m {
        if kind == KernelKind::Green {
            let edge = h.first().map_or(0.0, CMatrix::frobenius_norm) + h.last().map_or(0.0, CMatrix::frobenius_norm);
            truncation += edge * couplings[l - 1].frobenius_norm() / gap;
        }
        let source: Vec<CMatrix> = h.iter().map(|v| v.matmul(couplings[l - 1])).collect();
        let (nodes, fb, bb) = next_level(&factors[l], &source, &grid, &gl, &smat, l + 1 == m);
        h = nodes;
        bounds = (fb, bb);
    }

    let values = times
        .iter()
        .map(|&t| {
            if !active.contains(&t) {
                return zero_out();
            }
            let i = grid.boundary_of(t);
            let mut v = zero_out();
            if let Some(f) = bounds.0.get(i) {
                v.axpy(C64::new(1.0, 0.0), f);
            }
            if let Some(b) = bounds.1.get(i) {
                v.axpy(C64::new(1.0, 0.0), b);
            }
            v
        })
        .collect();
    Ok(ConvOutput { values, truncation })
}

/// `K₁` sampled on every node: the forward state starts at `P⁺` at `0⁺` and the
/// backward state at `-P⁻` at `0⁻`.
fn level_one(f: &Factor, grid: &Grid, gl: &GaussLegendre) -> Vec<CMatrix> {
    let n = gl.len();
    let dim = f.b.nrows();
    let tables: Vec<Tables> = grid.lengths.iter().map(|&len| Tables::new(f, len, gl)).collect();
    let mut out = vec![CMatrix::zeros(dim, dim); grid.panels.len() * n];
    if let Some(p) = &f.fwd {
        let mut state = p.clone();
        for (pi, &(_, _, ti)) in grid.panels.iter().enumerate().skip(grid.zero) {
            let t = &tables[ti];
            for j in 0..n {
                out[pi * n + j] = state.matmul(&t.x_fwd[j]);
            }
            state = state.matmul(&t.e_fwd);
        }
    }
    if let Some(p) = &f.bwd {
        let mut state = p.scale(C64::new(-1.0, 0.0));
        for pi in (0..grid.zero).rev() {
            let t = &tables[grid.panels[pi].2];
            for j in 0..n {
                out[pi * n + j] = state.matmul(&t.y_bwd[n - 1 - j]);
            }
            state = state.matmul(&t.e_bwd);
        }
    }
    out
}

/// One convolution level. Returns node values and the forward / backward
/// states at panel boundaries (empty when that part vanishes).
fn next_level(
    f: &Factor,
    source: &[CMatrix],
    grid: &Grid,
    gl: &GaussLegendre,
    smat: &[Vec<f64>],
    last: bool,
) -> (Vec<CMatrix>, Vec<CMatrix>, Vec<CMatrix>) {
    let n = gl.len();
    let rows = source[0].nrows();
    let dim = f.b.nrows();
    let tables: Vec<Tables> = grid.lengths.iter().map(|&len| Tables::new(f, len, gl)).collect();
    let panels = grid.panels.len();
    let mut out = if last { Vec::new() } else { vec![CMatrix::zeros(rows, dim); panels * n] };
    let mut fwd_bounds = Vec::new();
    let mut bwd_bounds = Vec::new();
    let one = C64::new(1.0, 0.0);

    if f.fwd.is_some() {
        let mut state = CMatrix::zeros(rows, dim);
        fwd_bounds.reserve(panels + 1);
        fwd_bounds.push(state.clone());
        for (pi, &(_, len, ti)) in grid.panels.iter().enumerate() {
            let t = &tables[ti];
            let half = 0.5 * len;
            let q: Vec<CMatrix> = (0..n).map(|k| source[pi * n + k].matmul(&t.y_fwd[k])).collect();
            if !last {
                for j in 0..n {
                    let mut acc = state.clone();
                    for k in 0..n {
                        acc.axpy(C64::new(half * smat[j][k], 0.0), &q[k]);
                    }
                    out[pi * n + j].axpy(one, &acc.matmul(&t.x_fwd[j]));
                }
            }
            let mut acc = state;
            for k in 0..n {
                acc.axpy(C64::new(half * gl.weights[k], 0.0), &q[k]);
            }
            state = acc.matmul(&t.e_fwd);
            fwd_bounds.push(state.clone());
        }
    }

    if f.bwd.is_some() {
        let mut state = CMatrix::zeros(rows, dim);
        bwd_bounds = vec![CMatrix::zeros(rows, dim); panels + 1];
        for pi in (0..panels).rev() {
            let (_, len, ti) = grid.panels[pi];
            let t = &tables[ti];
            let half = 0.5 * len;
            let q: Vec<CMatrix> = (0..n).map(|k| source[pi * n + k].matmul(&t.x_bwd[k])).collect();
            let mut total = CMatrix::zeros(rows, dim);
            for k in 0..n {
                total.axpy(C64::new(gl.weights[k], 0.0), &q[k]);
            }
            if !last {
                for j in 0..n {
                    // ∫_{x_j}^{x₁} = W·q - (S q)_j
                    let mut acc = state.clone();
                    acc.axpy(C64::new(-half, 0.0), &total);
                    for k in 0..n {
                        acc.axpy(C64::new(half * smat[j][k], 0.0), &q[k]);
                    }
                    out[pi * n + j].axpy(one, &acc.matmul(&t.y_bwd[n - 1 - j]));
                }
            }
            let mut acc = state;
            acc.axpy(C64::new(-half, 0.0), &total);
            state = acc.matmul(&t.e_bwd);
            bwd_bounds[pi] = state.clone();
        }
    }
    (out, fwd_bounds, bwd_bounds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> CMatrix {
        CMatrix::from_real_rows(&[&[v]])
    }

    #[test]
    fn two_level_forward_matches_closed_form() {
        // ∫₀ᵗ e^{0·s} e^{1·(t-s)} ds = e^t - 1
        let (b1, b2, c) = (scalar(0.0), scalar(1.0), scalar(1.0));
        let out = chain_convolution(KernelKind::Plus, &[&b1, &b2], &[&c], None, &[1.0, 2.0, -1.0], &ConvSettings::default())
            .unwrap();
        assert!((out.values[0][(0, 0)].re - (1f64.exp() - 1.0)).abs() < 1e-13);
        assert!((out.values[1][(0, 0)].re - (2f64.exp() - 1.0)).abs() < 1e-13);
        assert_eq!(out.values[2][(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn two_level_backward_matches_closed_form() {
        // (exp₋(μ₁) * exp₋(μ₂))(t) = (e^{μ₂t} - e^{μ₁t}) / (μ₁ - μ₂)
        let (m1, m2, t) = (0.3, -0.8, -1.5);
        let (b1, b2, c) = (scalar(m1), scalar(m2), scalar(1.0));
        let out = chain_convolution(KernelKind::Minus, &[&b1, &b2], &[&c], None, &[t], &ConvSettings::default()).unwrap();
        let expected = ((m2 * t).exp() - (m1 * t).exp()) / (m1 - m2);
        assert!((out.values[0][(0, 0)].re - expected).abs() < 1e-13);
    }

    #[test]
    fn green_mixed_half_planes() {
        // rates 1 and -1 at t = 1: -e^{-1}/2
        let (b1, b2, c) = (scalar(1.0), scalar(-1.0), scalar(1.0));
        let out = chain_convolution(KernelKind::Green, &[&b1, &b2], &[&c], None, &[1.0, -1.0], &ConvSettings::default())
            .unwrap();
        assert!((out.values[0][(0, 0)].re + (-1f64).exp() / 2.0).abs() < 1e-12);
        assert!((out.values[1][(0, 0)].re + (-1f64).exp() / 2.0).abs() < 1e-12);
    }
}
