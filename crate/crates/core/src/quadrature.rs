//! Gauss-Legendre rules and the spectral indefinite-integration matrix used by
//! the panel convolution machinery.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;


use crate::linalg::C64;

/// Default number of Gauss-Legendre points per panel.
pub const GL_POINTS: usize = 32;

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "need at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = -(PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_derivative(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(n, x);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f` by this rule on a single panel.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> C64) -> C64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut s = C64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += f(mid + half * x) * *w;
        }
        s * half
    }

    /// `∫_a^b f` over equal panels no longer than `max_panel`.
    pub fn integrate_composite(
        &self,
        a: f64,
        b: f64,
        max_panel: f64,
        mut f: impl FnMut(f64) -> C64,
    ) -> C64 {
        let panels = (((b - a).abs() / max_panel).ceil() as usize).max(1);
        let h = (b - a) / panels as f64;
        let mut s = C64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = a + h * p as f64;
            s += self.integrate(lo, lo + h, &mut f);
        }
        s
    }

    /// `S[j][k] = ∫_{-1}^{x_j} ℓ_k(x) dx` for the Lagrange basis on the nodes,
    /// so that `Σ_k S[j][k] q(x_k)` is the running integral of the interpolant.
    pub fn integration_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        // Legendre coefficients of ℓ_k: c_{m,k} = (2m+1)/2 · w_k P_m(x_k)
        let mut coef = vec![vec![0.0; n]; n];
        for k in 0..n {
            let p = legendre_all(n, self.nodes[k]);
            for m in 0..n {
                coef[m][k] = 0.5 * (2 * m + 1) as f64 * self.weights[k] * p[m];
            }
        }
        let mut s = vec![vec![0.0; n]; n];
        for j in 0..n {
            let x = self.nodes[j];
            let p = legendre_all(n + 1, x);
            // ∫_{-1}^x P_0 = x + 1, ∫_{-1}^x P_m = (P_{m+1} - P_{m-1}) / (2m+1)
            let mut integral = vec![0.0; n];
            integral[0] = x + 1.0;
            for m in 1..n {
                integral[m] = (p[m + 1] - p[m - 1]) / (2 * m + 1) as f64;
            }
            for k in 0..n {
                s[j][k] = (0..n).map(|m| coef[m][k] * integral[m]).sum();
            }
        }
        s
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `P_0(x) .. P_{n}(x)`
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
    }
    for k in 2..=n {
        p[k] = ((2 * k - 1) as f64 * x * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64;
    }
    p
}
