//! Block lower-triangular matrices over a fixed partition `X = X₁ ⊕ … ⊕ X_k`.
//!
//! Off-diagonal blocks are stored sparsely; a block that was never inserted
//! is zero and is skipped by chain enumeration. Diagonal blocks are always
//! present. Indices are 0-based.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::ops::Range;

use crate::chaincalc::enumerate_chains;
use crate::error::{Error, LinalgError};
use crate::linalg::{self, CMatrix, Lu, C64};

/// Largest number of blocks accepted by chain enumeration.
pub const MAX_BLOCKS: usize = 8;

/// Diagonal blocks with reciprocal condition below this are treated as singular.
pub const SINGULAR_RCOND: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self, Error> {
        if sizes.is_empty() {
            return Err(Error::EmptyPartition);
        }
        if let Some(index) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::ZeroBlockSize { index });
        }
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &s in &sizes {
            offsets.push(total);
            total += s;
        }
        Ok(Self { sizes, offsets, total })
    }

    /// `k` blocks of size one.
    pub fn scalar(k: usize) -> Result<Self, Error> {
        Self::new(alloc::vec![1; k])
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn size(&self, i: usize) -> usize {
        self.sizes[i]
    }

    pub fn range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.sizes[i]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockLowerTriangular {
    partition: BlockPartition,
    blocks: BTreeMap<(usize, usize), CMatrix>,
}

impl BlockLowerTriangular {
    /// The zero matrix: zero diagonal blocks, no off-diagonal blocks.
    pub fn zeros(partition: BlockPartition) -> Self {
        let mut blocks = BTreeMap::new();
        for i in 0..partition.len() {
            let n = partition.size(i);
            blocks.insert((i, i), CMatrix::zeros(n, n));
        }
        Self { partition, blocks }
    }

    /// Builds from a list of `((i, j), block)` entries.
    pub fn from_blocks(
        partition: BlockPartition,
        entries: impl IntoIterator<Item = ((usize, usize), CMatrix)>,
    ) -> Result<Self, Error> {
        let mut a = Self::zeros(partition);
        for ((i, j), m) in entries {
            a.insert(i, j, m)?;
        }
        Ok(a)
    }

    /// Cuts the lower block triangle out of a dense matrix; everything above
    /// the block diagonal is dropped.
    pub fn from_dense_lower(partition: BlockPartition, m: &CMatrix) -> Result<Self, Error> {
        if m.nrows() != partition.total() || m.ncols() != partition.total() {
            return Err(Error::DimensionMismatch { expected: partition.total(), found: m.nrows() });
        }
        let mut blocks = BTreeMap::new();
        for i in 0..partition.len() {
            for j in 0..=i {
                let (ri, rj) = (partition.range(i), partition.range(j));
                blocks.insert((i, j), m.submatrix(ri.start, rj.start, ri.len(), rj.len()));
            }
        }
        Ok(Self { partition, blocks })
    }

    /// Like [`from_dense_lower`](Self::from_dense_lower) but rejects a matrix
    /// with a nonzero entry above the block diagonal.
    pub fn from_dense(partition: BlockPartition, m: &CMatrix) -> Result<Self, Error> {
        let a = Self::from_dense_lower(partition, m)?;
        let p = &a.partition;
        for i in 0..p.len() {
            for j in (i + 1)..p.len() {
                let (ri, rj) = (p.range(i), p.range(j));
                if m.submatrix(ri.start, rj.start, ri.len(), rj.len()).max_abs() != 0.0 {
                    return Err(Error::BlockAboveDiagonal { i, j });
                }
            }
        }
        Ok(a)
    }

    pub fn insert(&mut self, i: usize, j: usize, m: CMatrix) -> Result<(), Error> {
        let k = self.partition.len();
        if i >= k || j >= k {
            return Err(Error::BlockOutOfRange { i, j, blocks: k });
        }
        if i < j {
            return Err(Error::BlockAboveDiagonal { i, j });
        }
        let expected = (self.partition.size(i), self.partition.size(j));
        if (m.nrows(), m.ncols()) != expected {
            return Err(Error::BlockShape { i, j, expected, found: (m.nrows(), m.ncols()) });
        }
        self.blocks.insert((i, j), m);
        Ok(())
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    pub fn num_blocks(&self) -> usize {
        self.partition.len()
    }

    /// Stored block `(i, j)`; `None` means zero.
    pub fn block(&self, i: usize, j: usize) -> Option<&CMatrix> {
        self.blocks.get(&(i, j))
    }

    pub fn diag(&self, i: usize) -> &CMatrix {
        &self.blocks[&(i, i)]
    }

    /// Block `(i, j)` with absent blocks materialized as zeros.
    pub fn block_or_zero(&self, i: usize, j: usize) -> CMatrix {
        match self.block(i, j) {
            Some(m) => m.clone(),
            None => CMatrix::zeros(self.partition.size(i), self.partition.size(j)),
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = (&(usize, usize), &CMatrix)> {
        self.blocks.iter()
    }

    /// True when only the diagonal and the first sub-diagonal carry blocks.
    pub fn is_bidiagonal(&self) -> bool {
        self.blocks.keys().all(|&(i, j)| i - j <= 1)
    }

    pub fn assemble(&self) -> CMatrix {
        let n = self.partition.total();
        let mut out = CMatrix::zeros(n, n);
        for (&(i, j), m) in &self.blocks {
            out.set_submatrix(self.partition.range(i).start, self.partition.range(j).start, m);
        }
        out
    }

    /// Spectral norm of the assembled matrix.
    pub fn spectral_norm(&self) -> Result<f64, Error> {
        Ok(linalg::spectral_norm(&self.assemble())?)
    }

    pub fn is_finite(&self) -> bool {
        self.blocks.values().all(CMatrix::is_finite)
    }
}

/// Eigenvalues of the diagonal blocks, each tagged with its block index.
#[derive(Clone, Debug, PartialEq)]
pub struct CausalSpectrum {
    eigenvalues: Vec<(usize, C64)>,
    gap: f64,
}

impl CausalSpectrum {
    pub fn tagged(&self) -> &[(usize, C64)] {
        &self.eigenvalues
    }

    pub fn values(&self) -> Vec<C64> {
        self.eigenvalues.iter().map(|&(_, z)| z).collect()
    }

    pub fn of_block(&self, index: usize) -> impl Iterator<Item = C64> + '_ {
        self.eigenvalues.iter().filter(move |(i, _)| *i == index).map(|&(_, z)| z)
    }

    /// `min |Re λ|`
    pub fn gap_to_imaginary_axis(&self) -> f64 {
        self.gap
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

pub fn causal_spectrum(a: &BlockLowerTriangular) -> Result<CausalSpectrum, Error> {
    let mut eigenvalues = Vec::with_capacity(a.partition.total());
    for i in 0..a.num_blocks() {
        let vals = linalg::eigenvalues(a.diag(i)).map_err(|source| Error::BlockEigen { index: i, source })?;
        eigenvalues.extend(vals.into_iter().map(|z| (i, z)));
    }
    let gap = eigenvalues.iter().map(|(_, z)| z.re.abs()).fold(f64::INFINITY, f64::min);
    Ok(CausalSpectrum { eigenvalues, gap })
}

fn factor_diagonal(t: &BlockLowerTriangular) -> Result<Vec<CMatrix>, Error> {
    (0..t.num_blocks())
        .map(|i| {
            let lu = match Lu::new(t.diag(i)) {
                Ok(lu) => lu,
                Err(LinalgError::Singular { .. }) => {
                    return Err(Error::SingularDiagonalBlock { index: i, rcond: 0.0 })
                }
                Err(e) => return Err(e.into()),
            };
            let rcond = lu.rcond();
            if rcond < SINGULAR_RCOND {
                return Err(Error::SingularDiagonalBlock { index: i, rcond });
            }
            Ok(lu.inverse())
        })
        .collect()
}

/// Inverse by block forward substitution,
/// `B_ij = -T_ii⁻¹ Σ_{j ≤ l < i} T_il B_lj`.
pub fn causal_inverse(t: &BlockLowerTriangular) -> Result<BlockLowerTriangular, Error> {
    let inv = factor_diagonal(t)?;
    let k = t.num_blocks();
    let mut b = BlockLowerTriangular::zeros(t.partition.clone());
    for j in 0..k {
        b.blocks.insert((j, j), inv[j].clone());
        for i in (j + 1)..k {
            let mut acc: Option<CMatrix> = None;
            for l in j..i {
                if let (Some(til), Some(blj)) = (t.block(i, l), b.block(l, j)) {
                    let term = til.matmul(blj);
                    match acc.as_mut() {
                        Some(s) => s.axpy(C64::new(1.0, 0.0), &term),
                        None => acc = Some(term),
                    }
                }
            }
            if let Some(s) = acc {
                b.blocks.insert((i, j), inv[i].matmul(&s).scale(C64::new(-1.0, 0.0)));
            }
        }
    }
    Ok(b)
}

/// Inverse as explicit chain sums
/// `B_ij = Σ (-1)^{m+1} T_{i₁i₁}⁻¹ T_{i₁i₂} T_{i₂i₂}⁻¹ ⋯ T_{i_m i_m}⁻¹`.
pub fn causal_inverse_chains(t: &BlockLowerTriangular) -> Result<BlockLowerTriangular, Error> {
    let k = t.num_blocks();
    if k > MAX_BLOCKS {
        return Err(Error::TooManyBlocks { blocks: k, max: MAX_BLOCKS });
    }
    let inv = factor_diagonal(t)?;
    let mut b = BlockLowerTriangular::zeros(t.partition.clone());
    for i in 0..k {
        for j in 0..=i {
            let chains = enumerate_chains(t, i, j)?;
            if chains.is_empty() {
                continue;
            }
            let mut sum = CMatrix::zeros(t.partition.size(i), t.partition.size(j));
            for chain in &chains {
                let idx = chain.indices();
                let mut prod = inv[idx[0]].clone();
                for w in idx.windows(2) {
                    prod = prod.matmul(t.block(w[0], w[1]).expect("chain follows stored blocks"));
                    prod = prod.matmul(&inv[w[1]]);
                }
                let sign = if idx.len() % 2 == 1 { 1.0 } else { -1.0 };
                sum.axpy(C64::new(sign, 0.0), &prod);
            }
            b.blocks.insert((i, j), sum);
        }
    }
    Ok(b)
}
