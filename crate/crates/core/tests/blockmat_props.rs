mod common;

use common::*;
use greenblocks_core::blockmat::SINGULAR_RCOND;
use greenblocks_core::generate::InstanceSpec;
use greenblocks_core::linalg::eigenvalues;
use greenblocks_core::{causal_inverse, causal_inverse_chains, causal_spectrum, BlockPartition, Error};
use proptest::prelude::*;

fn invertible(seed: u64, sizes: Vec<usize>) -> greenblocks_core::BlockLowerTriangular {
    instance(seed, &InstanceSpec::new(sizes).min_modulus(0.4))
}

fn sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 2..=4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_matches_gauss_jordan(seed in any::<u64>(), sizes in sizes()) {
        let t = invertible(seed, sizes);
        let b = causal_inverse(&t).unwrap();
        prop_assert!(rel(&b.assemble(), &gj_inverse(&t.assemble())) < 1e-8);
        for i in 0..t.num_blocks() {
            prop_assert!(rel(b.diag(i), &gj_inverse(t.diag(i))) < 1e-10);
            for j in (i + 1)..t.num_blocks() {
                prop_assert!(b.block(i, j).is_none());
            }
        }
    }

    #[test]
    fn inverse_round_trip(seed in any::<u64>(), sizes in sizes()) {
        let t = invertible(seed, sizes);
        let back = causal_inverse(&causal_inverse(&t).unwrap()).unwrap();
        prop_assert!(rel(&back.assemble(), &t.assemble()) < 1e-9);
    }

    #[test]
    fn chain_sums_match_back_substitution(seed in any::<u64>(), sizes in sizes()) {
        let t = invertible(seed, sizes);
        let a = causal_inverse(&t).unwrap().assemble();
        let b = causal_inverse_chains(&t).unwrap().assemble();
        prop_assert!(rel(&a, &b) < 1e-10);
    }

    #[test]
    fn spectrum_is_union_of_block_spectra(seed in any::<u64>(), sizes in sizes()) {
        let a = instance(seed, &InstanceSpec::new(sizes));
        let got = causal_spectrum(&a).unwrap().values();
        let mut want = eigenvalues(&a.assemble()).unwrap();
        prop_assert_eq!(got.len(), want.len());
        for z in &got {
            let k = (0..want.len()).min_by(|&x, &y| (want[x] - z).norm().total_cmp(&(want[y] - z).norm())).unwrap();
            prop_assert!((want[k] - z).norm() < 1e-8);
            want.remove(k);
        }
        let gap = got.iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min);
        prop_assert_eq!(gap, causal_spectrum(&a).unwrap().gap_to_imaginary_axis());
    }
}

#[test]
fn singular_block_is_reported_by_index() {
    let t = scalar_blocks(&[2.0, 0.0, 1.0], &[((1, 0), 1.0), ((2, 1), 1.0)]);
    assert!(causal_spectrum(&t).unwrap().values().iter().any(|z| z.norm() == 0.0));
    match causal_inverse(&t) {
        Err(Error::SingularDiagonalBlock { index, rcond }) => {
            assert_eq!(index, 1);
            assert!(rcond < SINGULAR_RCOND);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn partition_rejects_empty_and_zero() {
    assert!(matches!(BlockPartition::new(vec![]), Err(Error::EmptyPartition)));
    assert!(matches!(BlockPartition::new(vec![1, 0]), Err(Error::ZeroBlockSize { index: 1 })));
}
