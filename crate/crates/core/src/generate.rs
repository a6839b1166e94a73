//! Seeded random block lower-triangular test instances with controlled spectra.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blockmat::{BlockLowerTriangular, BlockPartition};
use crate::error::Error;
use crate::linalg::{inverse, CMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceSpec {
    pub sizes: Vec<usize>,
    /// Minimum distance between any two eigenvalues of the whole matrix.
    pub separation: f64,
    /// Eigenvalues are drawn from the disk of this radius.
    pub radius: f64,
    /// Minimum `|Re λ|`; zero for no constraint.
    pub axis_gap: f64,
    /// Minimum `|λ|`; keeps diagonal blocks invertible.
    pub min_modulus: f64,
    /// Off-diagonal entries are uniform in the unit square times `coupling/√n`.
    pub coupling: f64,
    /// Keep only the first sub-diagonal of blocks.
    pub bidiagonal: bool,
    /// Real eigenvalues and real entries.
    pub real: bool,
}

impl InstanceSpec {
    pub fn new(sizes: Vec<usize>) -> Self {
        Self {
            sizes,
            separation: 0.3,
            radius: 1.2,
            axis_gap: 0.0,
            min_modulus: 0.0,
            coupling: 0.5,
            bidiagonal: false,
            real: false,
        }
    }

    pub fn axis_gap(mut self, gap: f64) -> Self {
        self.axis_gap = gap;
        self
    }

    pub fn min_modulus(mut self, m: f64) -> Self {
        self.min_modulus = m;
        self
    }

    pub fn bidiagonal(mut self, yes: bool) -> Self {
        self.bidiagonal = yes;
        self
    }

    pub fn real(mut self, yes: bool) -> Self {
        self.real = yes;
        self
    }
}

/// `count` points with pairwise distance at least `separation`, drawn by
/// rejection from a disk that grows when it gets crowded.
pub fn random_eigenvalues<R: Rng>(rng: &mut R, count: usize, spec: &InstanceSpec) -> Vec<C64> {
    let mut radius = spec.radius;
    let mut out: Vec<C64> = Vec::with_capacity(count);
    let mut misses = 0;
    while out.len() < count {
        let z = if spec.real {
            C64::new(rng.gen_range(-radius..radius), 0.0)
        } else {
            loop {
                let z = C64::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius));
                if z.norm() <= radius {
                    break z;
                }
            }
        };
        let ok = z.re.abs() >= spec.axis_gap
            && z.norm() >= spec.min_modulus
            && out.iter().all(|w| (w - z).norm() >= spec.separation);
        if ok {
            out.push(z);
            misses = 0;
        } else {
            misses += 1;
            if misses > 2000 {
                radius *= 1.1;
                misses = 0;
            }
        }
    }
    out
}

fn random_entry<R: Rng>(rng: &mut R, real: bool) -> C64 {
    let re = rng.gen_range(-1.0..1.0);
    let im = if real { 0.0 } else { rng.gen_range(-1.0..1.0) };
    C64::new(re, im)
}

/// `S D S⁻¹` with `D = diag(eigs)` and `S = I + 0.3·(random)`.
fn similar_block<R: Rng>(rng: &mut R, eigs: &[C64], real: bool) -> CMatrix {
    let n = eigs.len();
    loop {
        let mut s = CMatrix::from_fn(n, n, |_, _| random_entry(rng, real) * 0.3);
        s.add_identity(C64::new(1.0, 0.0));
        if let Ok(sinv) = inverse(&s) {
            if sinv.norm_one() * s.norm_one() < 20.0 {
                return s.matmul(&CMatrix::from_diagonal(eigs)).matmul(&sinv);
            }
        }
    }
}

pub fn random_instance<R: Rng>(rng: &mut R, spec: &InstanceSpec) -> Result<BlockLowerTriangular, Error> {
    let partition = BlockPartition::new(spec.sizes.clone())?;
    let eigs = random_eigenvalues(rng, partition.total(), spec);
    let mut a = BlockLowerTriangular::zeros(partition.clone());
    for i in 0..partition.len() {
        let r = partition.range(i);
        a.insert(i, i, similar_block(rng, &eigs[r], spec.real))?;
    }
    let scale = spec.coupling / (partition.total() as f64).sqrt();
    for i in 0..partition.len() {
        for j in 0..i {
            if spec.bidiagonal && i - j > 1 {
                continue;
            }
            let m = CMatrix::from_fn(partition.size(i), partition.size(j), |_, _| random_entry(rng, spec.real) * scale);
            a.insert(i, j, m)?;
        }
    }
    Ok(a)
}

/// Random block sizes in `1..=max_size`.
pub fn random_sizes<R: Rng>(rng: &mut R, blocks: usize, max_size: usize) -> Vec<usize> {
    (0..blocks).map(|_| rng.gen_range(1..=max_size)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockmat::causal_spectrum;
    use alloc::vec;

    #[test]
    fn spectra_respect_the_spec() {
        let mut r = rng(7);
        for _ in 0..10 {
            let spec = InstanceSpec::new(vec![2, 3, 2]).axis_gap(0.3);
            let a = random_instance(&mut r, &spec).unwrap();
            let s = causal_spectrum(&a).unwrap();
            assert!(s.gap_to_imaginary_axis() >= 0.3 - 1e-9);
            let v = s.values();
            for i in 0..v.len() {
                for j in (i + 1)..v.len() {
                    assert!((v[i] - v[j]).norm() >= 0.3 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = InstanceSpec::new(vec![2, 2]);
        let a = random_instance(&mut rng(3), &spec).unwrap();
        let b = random_instance(&mut rng(3), &spec).unwrap();
        assert_eq!(a, b);
    }
}
