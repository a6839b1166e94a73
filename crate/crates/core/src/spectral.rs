//! Circle contours around spectra, trapezoidal Cauchy integrals, and Riesz
//! projectors for the left/right half-plane split.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;


use crate::error::Error;
use crate::func::AnalyticFn;
use crate::linalg::{self, CMatrix, Lu, C64};

pub const DEFAULT_NODES: usize = 64;
pub const MAX_NODES: usize = 2048;
/// Smallest `min |Re λ|` accepted by the half-plane split.
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

const MARGIN_CAP: f64 = 0.5;
const TARGET_ACCURACY: f64 = 1e-16;

/// Counterclockwise circle with `nodes` equispaced trapezoidal nodes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub center: C64,
    pub radius: f64,
    pub nodes: usize,
}

impl Circle {
    pub fn contains(&self, z: C64) -> bool {
        (z - self.center).norm() < self.radius
    }

    /// Distance from `z` to the circle itself.
    pub fn distance_to(&self, z: C64) -> f64 {
        ((z - self.center).norm() - self.radius).abs()
    }

    /// `(z_k, w_k)` with `(1/2πi)∮ f(z) dz ≈ Σ f(z_k) w_k`.
    pub fn quadrature(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.nodes;
        (0..n).map(move |k| {
            let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            (self.center + e * self.radius, e * (self.radius / n as f64))
        })
    }

    fn disk_meets(&self, other: &Circle) -> bool {
        (self.center - other.center).norm() <= self.radius + other.radius
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContourSet {
    circles: Vec<Circle>,
    margin: f64,
}

impl ContourSet {
    pub fn from_circles(circles: Vec<Circle>) -> Self {
        Self { circles, margin: 0.0 }
    }

    pub fn circles(&self) -> &[Circle] {
        &self.circles
    }

    /// Margin the contour was built with.
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn total_nodes(&self) -> usize {
        self.circles.iter().map(|c| c.nodes).sum()
    }

    /// Same circles, each with exactly `nodes` nodes.
    pub fn with_nodes(&self, nodes: usize) -> Self {
        let circles = self.circles.iter().map(|c| Circle { nodes, ..*c }).collect();
        Self { circles, margin: self.margin }
    }

    /// Number of circles whose interior holds `z`.
    pub fn winding(&self, z: C64) -> usize {
        self.circles.iter().filter(|c| c.contains(z)).count()
    }

    /// Smallest distance from any of `points` to any circle.
    pub fn min_distance(&self, points: &[C64]) -> f64 {
        points
            .iter()
            .flat_map(|&z| self.circles.iter().map(move |c| c.distance_to(z)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Closed disks pairwise disjoint.
    pub fn is_disjoint(&self) -> bool {
        let c = &self.circles;
        (0..c.len()).all(|i| ((i + 1)..c.len()).all(|j| !c[i].disk_meets(&c[j])))
    }

    /// All `(node, weight, in_half_rule)` triples.
    pub fn nodes(&self) -> impl Iterator<Item = (C64, C64, bool)> + '_ {
        self.circles
            .iter()
            .flat_map(|c| c.quadrature().enumerate().map(|(k, (z, w))| (z, w, k % 2 == 0)))
    }
}

/// `0.25 · max(min pairwise distance, 0.05)`, at most half the distance from
/// the points to the nearest singularity and at most 0.5.
pub fn default_margin(points: &[C64], singular: &dyn Fn(C64) -> f64) -> f64 {
    let mut min_gap = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            let d = (points[i] - points[j]).norm();
            if d > 0.0 {
                min_gap = min_gap.min(d);
            }
        }
    }
    if !min_gap.is_finite() {
        min_gap = 1.0;
    }
    let sing = points.iter().map(|&z| singular(z)).fold(f64::INFINITY, f64::min);
    (0.25 * min_gap.max(0.05)).min(0.5 * sing).min(MARGIN_CAP)
}

/// Circles around `eigs` with the given margin, no singularity constraint.
pub fn enclose(eigs: &[C64], margin: f64, nodes: usize) -> Result<ContourSet, Error> {
    enclose_with(eigs, &[], Some(margin), nodes, &|_| f64::INFINITY)
}

/// Circles around `eigs` that stay clear of the imaginary axis.
pub fn enclose_avoiding_axis(eigs: &[C64], margin: Option<f64>, nodes: usize) -> Result<ContourSet, Error> {
    enclose_with(eigs, &[], margin, nodes, &|z: C64| z.re.abs())
}

/// Circles around `targets` that keep every point of `obstacles` outside and
/// stay within `singular(center)` of their centers. With `margin = None` the
/// default margin is used and halved until the constraints hold; an explicit
/// margin that violates them is an error.
pub fn enclose_with(
    targets: &[C64],
    obstacles: &[C64],
    margin: Option<f64>,
    nodes: usize,
    singular: &dyn Fn(C64) -> f64,
) -> Result<ContourSet, Error> {
    if targets.is_empty() {
        return Err(Error::EmptyEigenvalues);
    }
    if let Some(m) = margin {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidMargin { margin: m });
        }
    }
    let mut all: Vec<C64> = targets.to_vec();
    all.extend_from_slice(obstacles);
    let sing_gap = targets.iter().map(|&z| singular(z)).fold(f64::INFINITY, f64::min);
    if sing_gap <= 0.0 {
        return Err(Error::NoAdmissibleContour);
    }
    let mut m = match margin {
        Some(m) => m,
        None => default_margin(&all, singular),
    };
    for _ in 0..60 {
        let clusters = cluster(targets, m);
        let mut circles = Vec::with_capacity(clusters.len());
        let mut ok = true;
        let mut hit_singularity = false;
        for members in &clusters {
            let (center, extent) = centroid_extent(targets, members);
            let radius = extent + m;
            if radius >= singular(center) {
                ok = false;
                hit_singularity = true;
                break;
            }
            if obstacles.iter().any(|&o| (o - center).norm() <= radius + 0.5 * m) {
                ok = false;
                break;
            }
            let outer = all
                .iter()
                .enumerate()
                .filter(|(i, _)| !members.contains(i))
                .map(|(_, &z)| (z - center).norm())
                .fold(singular(center), f64::min);
            circles.push(Circle { center, radius, nodes: node_count(extent, radius, outer, nodes) });
        }
        if ok {
            return Ok(ContourSet { circles, margin: m });
        }
        if margin.is_some() {
            return Err(if hit_singularity {
                Error::MarginExceedsAxisGap { margin: m, gap: sing_gap }
            } else {
                Error::NoAdmissibleContour
            });
        }
        m *= 0.5;
    }
    Err(Error::NoAdmissibleContour)
}

/// Single-linkage clusters at distance `2·margin`, then merged until the
/// enclosing disks are pairwise disjoint.
fn cluster(points: &[C64], margin: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (points[i] - points[j]).norm() <= 2.0 * margin {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    loop {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..n {
            let r = find(&mut label, i);
            match roots.iter().position(|&x| x == r) {
                Some(p) => groups[p].push(i),
                None => {
                    roots.push(r);
                    groups.push(vec![i]);
                }
            }
        }
        let disks: Vec<Circle> = groups
            .iter()
            .map(|g| {
                let (center, extent) = centroid_extent(points, g);
                Circle { center, radius: extent + margin, nodes: 0 }
            })
            .collect();
        let mut merged = false;
        'outer: for a in 0..disks.len() {
            for b in (a + 1)..disks.len() {
                if disks[a].disk_meets(&disks[b]) {
                    let (ra, rb) = (roots[a], roots[b]);
                    label[ra.max(rb)] = ra.min(rb);
                    merged = true;
                    break 'outer;
                }
            }
        }
        if !merged {
            return groups;
        }
    }
}

fn centroid_extent(points: &[C64], members: &[usize]) -> (C64, f64) {
    let sum: C64 = members.iter().map(|&i| points[i]).sum();
    let center = sum / members.len() as f64;
    let extent = members.iter().map(|&i| (points[i] - center).norm()).fold(0.0, f64::max);
    (center, extent)
}

/// Trapezoidal error on a circle decays like `q^N` with `q` the larger of
/// `inner/radius` and `radius/outer`.
fn node_count(inner: f64, radius: f64, outer: f64, requested: usize) -> usize {
    let q = (inner / radius).max(radius / outer);
    let geometric = if q <= 0.0 {
        0
    } else if q >= 1.0 {
        MAX_NODES
    } else {
        (TARGET_ACCURACY.ln() / q.ln()).ceil() as usize
    };
    let n = requested.max(geometric).clamp(4, MAX_NODES);
    n + n % 2
}

/// `(1/2πi)∮_Γ f(λ)(λI - M)⁻¹ dλ` by the trapezoidal rule on each circle.
pub fn cauchy_function<F: AnalyticFn + ?Sized>(m: &CMatrix, f: &F, gamma: &ContourSet) -> Result<CMatrix, Error> {
    Ok(cauchy_function_with_error(m, f, gamma)?.0)
}

/// Like [`cauchy_function`], also returning `‖full - half‖_F`, where the half
/// rule uses every other node of each circle.
pub fn cauchy_function_with_error<F: AnalyticFn + ?Sized>(
    m: &CMatrix,
    f: &F,
    gamma: &ContourSet,
) -> Result<(CMatrix, f64), Error> {
    if !m.is_square() {
        return Err(crate::error::LinalgError::NotSquare { rows: m.nrows(), cols: m.ncols() }.into());
    }
    let n = m.nrows();
    let mut full = CMatrix::zeros(n, n);
    let mut half = CMatrix::zeros(n, n);
    for (z, w, even) in gamma.nodes() {
        let fz = f.eval(z);
        if fz == C64::new(0.0, 0.0) {
            continue;
        }
        let r = resolvent(m, z)?;
        full.axpy(fz * w, &r);
        if even {
            half.axpy(fz * w * 2.0, &r);
        }
    }
    let est = full.distance(&half);
    Ok((full, est))
}

/// `(zI - M)⁻¹`
pub fn resolvent(m: &CMatrix, z: C64) -> Result<CMatrix, Error> {
    let mut shifted = m.scale(C64::new(-1.0, 0.0));
    shifted.add_identity(z);
    let lu = Lu::new(&shifted).map_err(|_| Error::ResolventFailure { node: z })?;
    let inv = lu.inverse();
    if !inv.is_finite() {
        return Err(Error::ResolventFailure { node: z });
    }
    Ok(inv)
}

/// Riesz projectors onto the spectrum in the open left / right half-planes.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSplit {
    pub projector_left: CMatrix,
    pub projector_right: CMatrix,
}

pub fn riesz_split(m: &CMatrix) -> Result<SpectralSplit, Error> {
    riesz_split_with(m, DEFAULT_GAP_TOL, DEFAULT_NODES)
}

pub fn riesz_split_with(m: &CMatrix, gap_tol: f64, nodes: usize) -> Result<SpectralSplit, Error> {
    let eigs = linalg::eigenvalues(m)?;
    let gap = eigs.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
    if gap < gap_tol {
        return Err(Error::SpectrumTouchesAxis { gap, tol: gap_tol });
    }
    let (left, right): (Vec<C64>, Vec<C64>) = eigs.iter().partition(|z| z.re < 0.0);
    let one = |_: C64| C64::new(1.0, 0.0);
    let project = |targets: &[C64], others: &[C64]| -> Result<CMatrix, Error> {
        if targets.is_empty() {
            return Ok(CMatrix::zeros(m.nrows(), m.ncols()));
        }
        let gamma = enclose_with(targets, others, None, nodes, &|z: C64| z.re.abs())?;
        cauchy_function(m, &one, &gamma)
    };
    Ok(SpectralSplit { projector_left: project(&left, &right)?, projector_right: project(&right, &left)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{Exp, Kernel, KernelKind};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn two_separated_points() {
        let g = enclose(&[c(-1.0, 0.0), c(1.0, 0.0)], 0.5, 64).unwrap();
        assert_eq!(g.circles().len(), 2);
        assert!(g.is_disjoint());
        for circ in g.circles() {
            assert!(circ.radius <= 0.5);
            assert!(circ.center.re.abs() - circ.radius > 0.0);
        }
        let one = enclose(&[c(2.0, 0.0)], 0.1, 64).unwrap();
        assert_eq!(one.circles().len(), 1);
        assert_eq!(one.circles()[0].center, c(2.0, 0.0));
    }

    #[test]
    fn close_points_share_a_circle() {
        let pts = [c(-1.0, 0.0), c(-1.0, 0.01)];
        let g = enclose_avoiding_axis(&pts, None, 64).unwrap();
        assert_eq!(g.circles().len(), 1);
        for &p in &pts {
            assert!((p - g.circles()[0].center).norm() < g.circles()[0].radius);
        }
    }

    #[test]
    fn explicit_margin_crossing_the_axis_is_rejected() {
        let err = enclose_avoiding_axis(&[c(-0.1, 0.0)], Some(0.5), 64).unwrap_err();
        assert!(matches!(err, Error::MarginExceedsAxisGap { .. }));
        assert!(matches!(enclose(&[], 0.1, 64), Err(Error::EmptyEigenvalues)));
        assert!(matches!(enclose(&[c(0.0, 0.0)], -1.0, 64), Err(Error::InvalidMargin { .. })));
    }

    #[test]
    fn identity_function_and_green_kernel() {
        let m = CMatrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        let gamma = enclose_avoiding_axis(&[c(-1.0, 0.0), c(1.0, 0.0)], None, 64).unwrap();
        let id = cauchy_function(&m, &|z: C64| z, &gamma).unwrap();
        assert!(id.distance(&m) < 1e-13);
        let g = Kernel::new(KernelKind::Green, 1.0).unwrap();
        let gm = cauchy_function(&m, &g, &gamma).unwrap();
        let expected = CMatrix::from_real_rows(&[&[(-1f64).exp(), 0.0], &[0.0, 0.0]]);
        assert!(gm.distance(&expected) < 1e-13);
    }

    #[test]
    fn nilpotent_exponential() {
        let m = CMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let gamma = enclose(&[c(0.0, 0.0)], 0.5, 64).unwrap();
        let e = cauchy_function(&m, &Exp { t: 1.0 }, &gamma).unwrap();
        let expected = CMatrix::from_real_rows(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert!(e.distance(&expected) < 1e-13);
    }

    #[test]
    fn half_plane_projectors() {
        let m = CMatrix::from_real_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]);
        let s = riesz_split(&m).unwrap();
        assert!(s.projector_left.distance(&CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]])) < 1e-13);
        assert!(s.projector_right.distance(&CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]])) < 1e-13);
        let stable = CMatrix::from_real_rows(&[&[-1.0, 2.0], &[0.0, -3.0]]);
        let s = riesz_split(&stable).unwrap();
        assert!(s.projector_left.distance(&CMatrix::identity(2)) < 1e-12);
        let touching = CMatrix::from_real_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert!(matches!(riesz_split(&touching), Err(Error::SpectrumTouchesAxis { .. })));
    }
}
