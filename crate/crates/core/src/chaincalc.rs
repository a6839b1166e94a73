//! Chain sums for functions of block lower-triangular matrices.
//!
//! `F_ij = Σ f^[m-1](A; i₁, …, i_m)` over strictly decreasing chains
//! `i = i₁ > ⋯ > i_m = j` that follow stored blocks, with three independent
//! evaluations of `f(A)`:
//!
//! * `ContourChain`: each chain term is `(1/2πi)∮ f(λ) R₁(λ) A₁₂ R₂(λ) ⋯ R_m(λ) dλ`
//!   with `R_l = (λ - A_{i_l i_l})⁻¹`;
//! * `Convolution`: for the kernels only, each chain term is a nested
//!   convolution of diagonal-block kernels;
//! * `Oracle`: `f` applied to the eigendecomposition of the assembled matrix.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::blockmat::{causal_spectrum, BlockLowerTriangular, MAX_BLOCKS};
use crate::conv::{chain_convolution, ConvSettings};
use crate::error::Error;
use crate::func::{AnalyticFn, KernelKind};
use crate::linalg::{self, expm, CMatrix, Lu, C64};
use crate::spectral::{self, enclose_with, ContourSet, SpectralSplit, DEFAULT_GAP_TOL, DEFAULT_NODES};

/// Strictly decreasing block indices `i₁ > i₂ > ⋯ > i_m`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Chain {
    indices: Vec<usize>,
}

impl Chain {
    pub fn new(indices: Vec<usize>) -> Result<Self, Error> {
        if indices.is_empty() {
            return Err(Error::EmptyPoints);
        }
        for w in indices.windows(2) {
            if w[0] <= w[1] {
                return Err(Error::ChainOrder { i: w[0], j: w[1] });
            }
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `m - 1`
    pub fn order(&self) -> usize {
        self.indices.len() - 1
    }

    pub fn start(&self) -> usize {
        self.indices[0]
    }

    pub fn end(&self) -> usize {
        self.indices[self.indices.len() - 1]
    }
}

/// Chains ending at `j`, grouped by start index `l ≥ j`. The order within each
/// group is the order in which [`chain_products`] produces their products.
fn chain_table(a: &BlockLowerTriangular, j: usize) -> Vec<Vec<Chain>> {
    let k = a.num_blocks();
    let mut table: Vec<Vec<Chain>> = vec![Vec::new(); k];
    table[j].push(Chain { indices: vec![j] });
    for l in (j + 1)..k {
        let mut chains = Vec::new();
        for next in j..l {
            if a.block(l, next).is_none() {
                continue;
            }
            for tail in &table[next] {
                let mut indices = Vec::with_capacity(tail.len() + 1);
                indices.push(l);
                indices.extend_from_slice(&tail.indices);
                chains.push(Chain { indices });
            }
        }
        table[l] = chains;
    }
    table
}

/// Products `D_{i₁} A_{i₁i₂} D_{i₂} ⋯ D_{i_m}` for every chain in
/// `chain_table(a, j)`, in the same order.
fn chain_products(a: &BlockLowerTriangular, j: usize, diag: &[CMatrix]) -> Vec<Vec<CMatrix>> {
    let k = a.num_blocks();
    let mut table: Vec<Vec<CMatrix>> = vec![Vec::new(); k];
    table[j].push(diag[j].clone());
    for l in (j + 1)..k {
        let mut prods = Vec::new();
        for next in j..l {
            let Some(link) = a.block(l, next) else { continue };
            let head = diag[l].matmul(link);
            for tail in &table[next] {
                prods.push(head.matmul(tail));
            }
        }
        table[l] = prods;
    }
    table
}

fn check_blocks(a: &BlockLowerTriangular) -> Result<(), Error> {
    if a.num_blocks() > MAX_BLOCKS {
        return Err(Error::TooManyBlocks { blocks: a.num_blocks(), max: MAX_BLOCKS });
    }
    Ok(())
}

/// All chains from `i` down to `j` that only pass through stored blocks.
pub fn enumerate_chains(a: &BlockLowerTriangular, i: usize, j: usize) -> Result<Vec<Chain>, Error> {
    if i < j {
        return Err(Error::ChainOrder { i, j });
    }
    let k = a.num_blocks();
    if i >= k {
        return Err(Error::BlockOutOfRange { i, j, blocks: k });
    }
    check_blocks(a)?;
    Ok(chain_table(a, j).swap_remove(i))
}

/// Chains for every pair `i ≥ j`.
pub fn all_chains(a: &BlockLowerTriangular) -> Result<BTreeMap<(usize, usize), Vec<Chain>>, Error> {
    check_blocks(a)?;
    let mut out = BTreeMap::new();
    for j in 0..a.num_blocks() {
        for (i, chains) in chain_table(a, j).into_iter().enumerate().skip(j) {
            out.insert((i, j), chains);
        }
    }
    Ok(out)
}

/// Distance below which `λ` counts as an eigenvalue of a diagonal block.
pub const NEAR_POLE: f64 = 1e-10;

/// Causal resolvent `(λ - A)⁻¹` as chain sums of diagonal-block resolvents.
pub fn block_resolvent(a: &BlockLowerTriangular, lambda: C64) -> Result<BlockLowerTriangular, Error> {
    check_blocks(a)?;
    let spectrum = causal_spectrum(a)?;
    for &(index, z) in spectrum.tagged() {
        let distance = (z - lambda).norm();
        if distance < NEAR_POLE {
            return Err(Error::NearPole { lambda, index, distance });
        }
    }
    let k = a.num_blocks();
    let diag: Vec<CMatrix> = (0..k)
        .map(|i| spectral::resolvent(a.diag(i), lambda))
        .collect::<Result<_, _>>()?;
    let mut r = BlockLowerTriangular::zeros(a.partition().clone());
    for j in 0..k {
        for (i, prods) in chain_products(a, j, &diag).into_iter().enumerate().skip(j) {
            if let Some(sum) = sum_all(&prods) {
                r.insert(i, j, sum)?;
            }
        }
    }
    Ok(r)
}

fn sum_all(ms: &[CMatrix]) -> Option<CMatrix> {
    let mut it = ms.iter();
    let mut acc = it.next()?.clone();
    for m in it {
        acc.axpy(C64::new(1.0, 0.0), m);
    }
    Some(acc)
}

/// One chain term `(1/2πi)∮_Γ f(λ) R_{i₁}(λ) A_{i₁i₂} ⋯ R_{i_m}(λ) dλ`.
pub fn op_dd_contour<F: AnalyticFn + ?Sized>(
    a: &BlockLowerTriangular,
    f: &F,
    chain: &Chain,
    gamma: &ContourSet,
) -> Result<CMatrix, Error> {
    let idx = chain.indices();
    let k = a.num_blocks();
    if idx.iter().any(|&i| i >= k) {
        return Err(Error::BlockOutOfRange { i: chain.start(), j: chain.end(), blocks: k });
    }
    let links: Vec<&CMatrix> = idx
        .windows(2)
        .map(|w| a.block(w[0], w[1]).ok_or(Error::ChainOrder { i: w[0], j: w[1] }))
        .collect::<Result<_, _>>()?;
    let mut sum = CMatrix::zeros(a.partition().size(chain.start()), a.partition().size(chain.end()));
    for (z, w, _) in gamma.nodes() {
        let fz = f.eval(z);
        if fz == C64::new(0.0, 0.0) {
            continue;
        }
        let mut prod = spectral::resolvent(a.diag(idx[0]), z)?;
        for (l, link) in links.iter().enumerate() {
            prod = prod.matmul(link).matmul(&spectral::resolvent(a.diag(idx[l + 1]), z)?);
        }
        sum.axpy(fz * w, &prod);
    }
    Ok(sum)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    ContourChain,
    Convolution,
    Oracle,
}

impl Route {
    pub const ALL: [Route; 3] = [Route::Convolution, Route::ContourChain, Route::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Route::ContourChain => "contour_chain",
            Route::Convolution => "convolution",
            Route::Oracle => "oracle",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionOptions {
    /// Minimum trapezoidal nodes per circle.
    pub nodes: usize,
    /// Contour margin; `None` picks the default and shrinks it as needed.
    pub margin: Option<f64>,
    pub conv: ConvSettings,
    /// Smallest admissible `min |Re λ|` for `g`.
    pub gap_tol: f64,
}

impl Default for FunctionOptions {
    fn default() -> Self {
        Self { nodes: DEFAULT_NODES, margin: None, conv: ConvSettings::default(), gap_tol: DEFAULT_GAP_TOL }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockFunctionResult {
    pub matrix: BlockLowerTriangular,
    /// Chain contributions per block; empty for the oracle route.
    pub per_block_terms: BTreeMap<(usize, usize), Vec<(Chain, CMatrix)>>,
    pub route: Route,
    pub est_error: f64,
}

pub fn block_function<F: AnalyticFn + ?Sized>(
    a: &BlockLowerTriangular,
    f: &F,
    route: Route,
) -> Result<BlockFunctionResult, Error> {
    block_function_with(a, f, route, &FunctionOptions::default())
}

pub fn block_function_with<F: AnalyticFn + ?Sized>(
    a: &BlockLowerTriangular,
    f: &F,
    route: Route,
    opts: &FunctionOptions,
) -> Result<BlockFunctionResult, Error> {
    if let Some(k) = f.kernel() {
        if k.kind() == KernelKind::Green {
            let gap = causal_spectrum(a)?.gap_to_imaginary_axis();
            if gap < opts.gap_tol {
                return Err(Error::SpectrumTouchesAxis { gap, tol: opts.gap_tol });
            }
        }
    }
    match route {
        Route::ContourChain => contour_route(a, f, opts),
        Route::Convolution => {
            let k = f.kernel().ok_or(Error::RouteUnsupported { route: "convolution" })?;
            Ok(convolution_route(a, k.kind(), &[k.t()], opts)?.pop().expect("one time"))
        }
        Route::Oracle => oracle_route(a, f),
    }
}

fn contour_route<F: AnalyticFn + ?Sized>(
    a: &BlockLowerTriangular,
    f: &F,
    opts: &FunctionOptions,
) -> Result<BlockFunctionResult, Error> {
    check_blocks(a)?;
    let k = a.num_blocks();
    let eigs = causal_spectrum(a)?.values();
    let gamma = enclose_with(&eigs, &[], opts.margin, opts.nodes, &|z| f.singular_distance(z))?;
    let chains: Vec<Vec<Vec<Chain>>> = (0..k).map(|j| chain_table(a, j)).collect();
    // acc[j][i][c]: running sum for chain c from i to j
    let mut acc: Vec<Vec<Vec<CMatrix>>> = chains
        .iter()
        .enumerate()
        .map(|(j, tab)| {
            tab.iter()
                .enumerate()
                .map(|(i, cs)| {
                    let shape = (a.partition().size(i), a.partition().size(j));
                    vec![CMatrix::zeros(shape.0, shape.1); cs.len()]
                })
                .collect()
        })
        .collect();
    let mut half = acc.clone();
    for (z, w, even) in gamma.nodes() {
        let fz = f.eval(z);
        if fz == C64::new(0.0, 0.0) {
            continue;
        }
        let diag: Vec<CMatrix> = (0..k)
            .map(|i| spectral::resolvent(a.diag(i), z))
            .collect::<Result<_, _>>()?;
        for j in 0..k {
            let prods = chain_products(a, j, &diag);
            for i in j..k {
                for (c, p) in prods[i].iter().enumerate() {
                    acc[j][i][c].axpy(fz * w, p);
                    if even {
                        half[j][i][c].axpy(fz * w * 2.0, p);
                    }
                }
            }
        }
    }
    let mut matrix = BlockLowerTriangular::zeros(a.partition().clone());
    let mut full_half = BlockLowerTriangular::zeros(a.partition().clone());
    let mut per_block_terms = BTreeMap::new();
    for j in 0..k {
        for i in j..k {
            if chains[j][i].is_empty() {
                continue;
            }
            let sum = sum_all(&acc[j][i]).expect("nonempty");
            matrix.insert(i, j, sum)?;
            full_half.insert(i, j, sum_all(&half[j][i]).expect("nonempty"))?;
            let terms: Vec<(Chain, CMatrix)> = chains[j][i].iter().cloned().zip(acc[j][i].iter().cloned()).collect();
            per_block_terms.insert((i, j), terms);
        }
    }
    let est_error = matrix.assemble().distance(&full_half.assemble());
    Ok(BlockFunctionResult { matrix, per_block_terms, route: Route::ContourChain, est_error })
}

/// Kernel values at several times through the convolution route, sharing the
/// Riesz projectors and one convolution sweep per chain.
pub fn convolution_route(
    a: &BlockLowerTriangular,
    kind: KernelKind,
    times: &[f64],
    opts: &FunctionOptions,
) -> Result<Vec<BlockFunctionResult>, Error> {
    check_blocks(a)?;
    if times.iter().any(|&t| t == 0.0 || !t.is_finite()) {
        return Err(Error::UndefinedAtZero);
    }
    let k = a.num_blocks();
    let splits: Option<Vec<SpectralSplit>> = if kind == KernelKind::Green {
        let gap = causal_spectrum(a)?.gap_to_imaginary_axis();
        if gap < opts.gap_tol {
            return Err(Error::SpectrumTouchesAxis { gap, tol: opts.gap_tol });
        }
        Some((0..k).map(|i| spectral::riesz_split(a.diag(i))).collect::<Result<_, _>>()?)
    } else {
        None
    };

    let mut results: Vec<BlockFunctionResult> = times
        .iter()
        .map(|_| BlockFunctionResult {
            matrix: BlockLowerTriangular::zeros(a.partition().clone()),
            per_block_terms: BTreeMap::new(),
            route: Route::Convolution,
            est_error: 0.0,
        })
        .collect();

    for i in 0..k {
        let d = a.diag(i);
        for (r, &t) in results.iter_mut().zip(times) {
            let e = || expm(&d.scale(C64::new(t, 0.0)));
            let v = match (kind, t > 0.0) {
                (KernelKind::Plus, true) => e(),
                (KernelKind::Minus, false) => e().scale(C64::new(-1.0, 0.0)),
                (KernelKind::Green, true) => e().matmul(&splits.as_ref().expect("splits")[i].projector_left),
                (KernelKind::Green, false) => {
                    e().matmul(&splits.as_ref().expect("splits")[i].projector_right).scale(C64::new(-1.0, 0.0))
                }
                _ => CMatrix::zeros(d.nrows(), d.ncols()),
            };
            r.matrix.insert(i, i, v.clone())?;
            r.per_block_terms.insert((i, i), vec![(Chain { indices: vec![i] }, v)]);
        }
    }

    for j in 0..k {
        let table = chain_table(a, j);
        for (i, chains) in table.iter().enumerate().skip(j + 1) {
            if chains.is_empty() {
                continue;
            }
            let mut sums: Vec<CMatrix> = times.iter().map(|_| CMatrix::zeros(a.partition().size(i), a.partition().size(j))).collect();
            let mut terms: Vec<Vec<(Chain, CMatrix)>> = times.iter().map(|_| Vec::new()).collect();
            for chain in chains {
                let idx = chain.indices();
                let blocks: Vec<&CMatrix> = idx.iter().map(|&l| a.diag(l)).collect();
                let links: Vec<&CMatrix> = idx.windows(2).map(|w| a.block(w[0], w[1]).expect("stored")).collect();
                let chain_splits: Option<Vec<SpectralSplit>> =
                    splits.as_ref().map(|s| idx.iter().map(|&l| s[l].clone()).collect());
                let out = chain_convolution(kind, &blocks, &links, chain_splits.as_deref(), times, &opts.conv)?;
                for (q, v) in out.values.into_iter().enumerate() {
                    sums[q].axpy(C64::new(1.0, 0.0), &v);
                    terms[q].push((chain.clone(), v));
                    results[q].est_error += out.truncation;
                }
            }
            for (q, (s, t)) in sums.into_iter().zip(terms).enumerate() {
                results[q].matrix.insert(i, j, s)?;
                results[q].per_block_terms.insert((i, j), t);
            }
        }
    }
    Ok(results)
}

/// Below this eigenvector-matrix reciprocal condition the oracle leaves the
/// eigendecomposition.
pub const ORACLE_RCOND: f64 = 1e-8;

/// `f(M)` from the eigendecomposition `M = V Λ V⁻¹`. Exponentials of
/// defective matrices fall back to a shifted Taylor series.
pub fn oracle_function<F: AnalyticFn + ?Sized>(m: &CMatrix, f: &F) -> Result<(CMatrix, f64), Error> {
    let eig = linalg::eig(m)?;
    let lu = Lu::new(&eig.vectors).ok();
    let rcond = lu.as_ref().map_or(0.0, Lu::rcond);
    if rcond < ORACLE_RCOND {
        if let Some(v) = exp_fallback(m, f) {
            return Ok((v, f64::EPSILON * 1e3));
        }
        return Err(Error::NonDiagonalizable { rcond });
    }
    let vinv = lu.expect("factored").inverse();
    let n = m.nrows();
    let mut scaled = eig.vectors.clone();
    for (k, &lambda) in eig.values.iter().enumerate() {
        let fl = f.eval(lambda);
        for i in 0..n {
            scaled[(i, k)] *= fl;
        }
    }
    let out = scaled.matmul(&vinv);
    let est = f64::EPSILON / rcond * out.frobenius_norm().max(1.0);
    Ok((out, est))
}

/// `exp(tM) = e^{tμ} exp(t(M - μI))` with `μ` the mean eigenvalue, the second
/// factor summed as a Taylor series.
fn exp_fallback<F: AnalyticFn + ?Sized>(m: &CMatrix, f: &F) -> Option<CMatrix> {
    let (t, sign) = match f.kernel() {
        Some(k) => match (k.kind(), k.t() > 0.0) {
            (KernelKind::Plus, true) => (k.t(), 1.0),
            (KernelKind::Minus, false) => (k.t(), -1.0),
            (KernelKind::Green, _) => return None,
            _ => return Some(CMatrix::zeros(m.nrows(), m.ncols())),
        },
        None => (f.exp_time()?, 1.0),
    };
    let n = m.nrows();
    let mu = m.trace() / n as f64;
    let mut shifted = m.clone();
    shifted.add_identity(-mu);
    let x = shifted.scale(C64::new(t, 0.0));
    let mut squarings = 0;
    let mut scale = 1.0;
    while x.norm_one() * scale > 1.0 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = x.scale(C64::new(scale, 0.0));
    let mut sum = CMatrix::identity(n);
    let mut term = CMatrix::identity(n);
    for k in 1..60 {
        term = term.matmul(&x).scale(C64::new(1.0 / k as f64, 0.0));
        sum.axpy(C64::new(1.0, 0.0), &term);
        if term.max_abs() < 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    Some(sum.scale((mu * t).exp() * sign))
}

fn oracle_route<F: AnalyticFn + ?Sized>(a: &BlockLowerTriangular, f: &F) -> Result<BlockFunctionResult, Error> {
    let (dense, est_error) = oracle_function(&a.assemble(), f)?;
    let matrix = BlockLowerTriangular::from_dense_lower(a.partition().clone(), &dense)?;
    Ok(BlockFunctionResult { matrix, per_block_terms: BTreeMap::new(), route: Route::Oracle, est_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::BlockPartition;
    use crate::func::{Exp, Kernel};

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
    fn chains_for_three_blocks() {
        let full = scalar_blocks(&[0.0, 1.0, 2.0], &[((1, 0), 1.0), ((2, 0), 1.0), ((2, 1), 1.0)]);
        let chains = enumerate_chains(&full, 2, 0).unwrap();
        let idx: Vec<&[usize]> = chains.iter().map(Chain::indices).collect();
        assert_eq!(idx, vec![&[2, 0][..], &[2, 1, 0][..]]);
        assert_eq!(enumerate_chains(&full, 1, 1).unwrap()[0].indices(), &[1]);
        let bidiag = scalar_blocks(&[0.0, 1.0, 2.0], &[((1, 0), 1.0), ((2, 1), 1.0)]);
        let chains = enumerate_chains(&bidiag, 2, 0).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].indices(), &[2, 1, 0]);
        assert!(matches!(enumerate_chains(&full, 0, 2), Err(Error::ChainOrder { .. })));
    }

    #[test]
    fn resolvent_of_two_scalar_blocks() {
        let a = scalar_blocks(&[0.0, 1.0], &[((1, 0), 1.0)]);
        let r = block_resolvent(&a, C64::new(2.0, 0.0)).unwrap();
        let expected = CMatrix::from_real_rows(&[&[0.5, 0.0], &[0.5, 1.0]]);
        assert!(r.assemble().distance(&expected) < 1e-15);
        assert!(matches!(block_resolvent(&a, C64::new(1.0, 0.0)), Err(Error::NearPole { index: 1, .. })));
    }

    #[test]
    fn chain_integrals_on_scalar_blocks() {
        let a = scalar_blocks(&[0.0, 1.0], &[((1, 0), 1.0)]);
        let eigs = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let gamma = enclose_with(&eigs, &[], None, 64, &|_| f64::INFINITY).unwrap();
        let chain = Chain::new(vec![1, 0]).unwrap();
        let v = op_dd_contour(&a, &Exp { t: 1.0 }, &chain, &gamma).unwrap();
        assert!((v[(0, 0)].re - (core::f64::consts::E - 1.0)).abs() < 1e-12);

        let n = scalar_blocks(&[0.0, 0.0], &[((1, 0), 1.0)]);
        let gamma = enclose_with(&[C64::new(0.0, 0.0)], &[], Some(0.5), 64, &|_| f64::INFINITY).unwrap();
        let v = op_dd_contour(&n, &Exp { t: 0.7 }, &chain, &gamma).unwrap();
        assert!((v[(0, 0)].re - 0.7).abs() < 1e-13);
    }

    #[test]
    fn exp_anchor_every_route() {
        let a = scalar_blocks(&[0.0, 1.0], &[((1, 0), 1.0)]);
        let k = Kernel::new(KernelKind::Plus, 1.0).unwrap();
        let e = core::f64::consts::E;
        for route in Route::ALL {
            let r = block_function(&a, &k, route).unwrap();
            let expected = CMatrix::from_real_rows(&[&[1.0, 0.0], &[e - 1.0, e]]);
            assert!(r.matrix.assemble().distance(&expected) < 1e-10, "{route:?}");
        }
    }

    #[test]
    fn green_anchor_every_route() {
        let a = scalar_blocks(&[-1.0, 1.0], &[((1, 0), 1.0)]);
        let g = Kernel::new(KernelKind::Green, 1.0).unwrap();
        let em1 = (-1f64).exp();
        for route in Route::ALL {
            let r = block_function(&a, &g, route).unwrap();
            let m = r.matrix.assemble();
            assert!((m[(0, 0)].re - em1).abs() < 1e-9, "{route:?}");
            assert!(m[(1, 1)].norm() < 1e-9, "{route:?}");
            assert!((m[(1, 0)].re + em1 / 2.0).abs() < 1e-9, "{route:?}");
        }
    }

    #[test]
    fn defective_exponential_uses_series() {
        let j = CMatrix::from_real_rows(&[&[0.5, 1.0], &[0.0, 0.5]]);
        let (v, _) = oracle_function(&j, &Exp { t: 2.0 }).unwrap();
        let e = 1f64.exp();
        let expected = CMatrix::from_real_rows(&[&[e, 2.0 * e], &[0.0, e]]);
        assert!(v.distance(&expected) < 1e-12);
        assert!(matches!(oracle_function(&j, &|z: C64| z * z), Err(Error::NonDiagonalizable { .. })));
    }
}
