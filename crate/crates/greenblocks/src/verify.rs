//! The `verify` suite: route agreement for all three kernels, causal
//! inverse, Green's jump and decay, and ODE residuals of the solvers.

use std::fmt::Write;

use greenblocks_core::chaincalc::FunctionOptions;
use greenblocks_core::greensolve::{evaluate_many, solve_bounded_with, solve_ivp_with};
use greenblocks_core::linalg::inverse;
use greenblocks_core::{
    causal_inverse, causal_spectrum, verify_residual, BlockLowerTriangular, CMatrix, Error, ForcingFunction,
    KernelKind, Route, TimeGrid, C64,
};

pub const CHECK_TIMES: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
pub const ROUTE_TOL: f64 = 1e-7;
pub const INVERSE_TOL: f64 = 1e-8;
pub const JUMP_EPS: f64 = 1e-3;
pub const JUMP_TOL: f64 = 1e-2;
pub const RESIDUAL_TOL: f64 = 1e-4;
pub const RESIDUAL_STEP: f64 = 1e-3;
pub const DECAY_SLACK: f64 = 1.5;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self { name: name.into(), value, tolerance, passed: value <= tolerance }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub sizes: Vec<usize>,
    pub gap: f64,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let sizes: Vec<String> = self.sizes.iter().map(usize::to_string).collect();
        writeln!(s, "partition: [{}]", sizes.join(", ")).unwrap();
        writeln!(s, "spectral gap: {:.6e}", self.gap).unwrap();
        writeln!(s, "{:<34} {:>12} {:>12}  status", "check", "max_error", "tolerance").unwrap();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            writeln!(s, "{:<34} {:>12.3e} {:>12.1e}  {status}", c.name, c.value, c.tolerance).unwrap();
        }
        let ok = self.checks.iter().filter(|c| c.passed).count();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(s, "overall: {verdict} ({ok}/{})", self.checks.len()).unwrap();
        s
    }
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    a.distance(b) / a.frobenius_norm().max(b.frobenius_norm()).max(1e-3)
}

/// Runs every check; fails early only when the spectrum touches the axis.
pub fn run_checks(a: &BlockLowerTriangular, opts: &FunctionOptions) -> Result<Report, Error> {
    let gap = causal_spectrum(a)?.gap_to_imaginary_axis();
    if gap < opts.gap_tol {
        return Err(Error::SpectrumTouchesAxis { gap, tol: opts.gap_tol });
    }
    let n = a.partition().total();
    let dense = a.assemble();
    let mut checks = Vec::new();

    for kind in [KernelKind::Plus, KernelKind::Minus, KernelKind::Green] {
        let per_route: Vec<Vec<CMatrix>> = Route::ALL
            .iter()
            .map(|&r| {
                evaluate_many(a, kind, &CHECK_TIMES, r, opts).map(|v| v.into_iter().map(|s| s.matrix.assemble()).collect())
            })
            .collect::<Result<_, _>>()?;
        let mut worst: f64 = 0.0;
        for k in 0..CHECK_TIMES.len() {
            for p in 0..per_route.len() {
                for q in (p + 1)..per_route.len() {
                    worst = worst.max(rel(&per_route[p][k], &per_route[q][k]));
                }
            }
        }
        checks.push(Check::at_most(format!("route agreement {}", kind.name()), worst, ROUTE_TOL));
    }

    let inv = causal_inverse(a)?.assemble();
    let mut prod = inv.matmul(&dense);
    prod.add_identity(C64::new(-1.0, 0.0));
    checks.push(Check::at_most("causal inverse", prod.frobenius_norm(), INVERSE_TOL));

    let g = evaluate_many(a, KernelKind::Green, &[-JUMP_EPS, JUMP_EPS], Route::Convolution, opts)?;
    let mut jump = g[1].matrix.assemble();
    jump.axpy(C64::new(-1.0, 0.0), &g[0].matrix.assemble());
    jump.add_identity(C64::new(-1.0, 0.0));
    checks.push(Check::at_most("green jump at 0", jump.frobenius_norm(), JUMP_TOL));

    let times = [-8.0, -4.0, -2.0, 2.0, 4.0, 8.0];
    let norms: Vec<f64> = evaluate_many(a, KernelKind::Green, &times, Route::Convolution, opts)?
        .iter()
        .map(|s| s.matrix.assemble().frobenius_norm())
        .collect();
    let mut excess: f64 = 0.0;
    for (near, far, t) in [(2, 1, 2.0), (1, 0, 4.0), (3, 4, 2.0), (4, 5, 4.0)] {
        if norms[near] > 0.0 {
            let bound = (-(0.5 * gap) * t).exp() * DECAY_SLACK;
            excess = excess.max(norms[far] / norms[near] / bound);
        } else {
            excess = excess.max(if norms[far] == 0.0 { 0.0 } else { f64::INFINITY });
        }
    }
    checks.push(Check::at_most("green decay ratio / bound", excess, 1.0));

    let ones = vec![C64::new(1.0, 0.0); n];
    let f = ForcingFunction::constant(ones.clone());
    let grid = TimeGrid::linspace(1.0, 1.0 + 100.0 * RESIDUAL_STEP, 101)?;
    let bounded = solve_bounded_with(a, &f, &grid, opts)?;
    checks.push(Check::at_most(
        "bounded residual (constant f)",
        verify_residual(a, &bounded.values, &f, &grid)?,
        RESIDUAL_TOL,
    ));
    let constant = inverse(&dense)?.mul_vec(&ones);
    let off: f64 = bounded
        .values
        .iter()
        .map(|x| x.iter().zip(&constant).map(|(u, v)| (u + v).norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("bounded vs -A^-1 f", off, RESIDUAL_TOL));
    let ivp = solve_ivp_with(a, &f, &grid, opts)?;
    checks.push(Check::at_most("ivp residual (constant f)", verify_residual(a, &ivp, &f, &grid)?, RESIDUAL_TOL));

    Ok(Report { sizes: a.partition().sizes().to_vec(), gap, checks })
}
