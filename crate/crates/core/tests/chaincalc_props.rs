mod common;

use common::*;
use greenblocks_core::chaincalc::all_chains;
use greenblocks_core::func::{Exp, Power, Resolvent};
use greenblocks_core::generate::InstanceSpec;
use greenblocks_core::{
    block_function, block_resolvent, dd_distinct, BlockLowerTriangular, CMatrix, InterpolationPoints, Route, C64,
};
use proptest::prelude::*;

fn spec(sizes: Vec<usize>) -> InstanceSpec {
    InstanceSpec::new(sizes)
}

fn sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=2, 2..=4)
}

fn contour(a: &BlockLowerTriangular, f: impl Fn(C64) -> C64) -> CMatrix {
    block_function(a, &f, Route::ContourChain).unwrap().matrix.assemble()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn contour_chain_matches_dense_oracles(seed in any::<u64>(), sizes in sizes()) {
        let a = instance(seed, &spec(sizes));
        let m = a.assemble();
        for t in [0.5, 1.0] {
            let got = block_function(&a, &Exp { t }, Route::ContourChain).unwrap().matrix.assemble();
            prop_assert!(rel(&got, &taylor_expm(&m, t)) < 1e-8);
        }
        let sq = block_function(&a, &Power(2), Route::ContourChain).unwrap().matrix.assemble();
        prop_assert!(rel(&sq, &mul(&m, &m)) < 1e-8);
        let cube = block_function(&a, &Power(3), Route::ContourChain).unwrap().matrix.assemble();
        prop_assert!(rel(&cube, &mul(&m, &mul(&m, &m))) < 1e-8);
        let at = C64::new(3.0, 0.0);
        let r = block_function(&a, &Resolvent { at }, Route::ContourChain).unwrap().matrix.assemble();
        let mut shifted = scaled(&m, c(-1.0));
        shifted.add_identity(at);
        prop_assert!(rel(&r, &gj_inverse(&shifted)) < 1e-8);
    }

    #[test]
    fn resolvent_function_equals_causal_resolvent(seed in any::<u64>(), sizes in sizes(), re in 2.5..4.0f64, im in -1.0..1.0f64) {
        let a = instance(seed, &spec(sizes));
        let at = C64::new(re, im);
        let via_f = block_function(&a, &Resolvent { at }, Route::ContourChain).unwrap().matrix.assemble();
        let via_chains = block_resolvent(&a, at).unwrap().assemble();
        prop_assert!(rel(&via_f, &via_chains) < 1e-9);
    }

    #[test]
    fn multiplicative_on_powers(seed in any::<u64>(), sizes in sizes()) {
        let a = instance(seed, &spec(sizes));
        let f = contour(&a, |z| z);
        let g = contour(&a, |z| z * z);
        let fg = contour(&a, |z| z * z * z);
        prop_assert!(rel(&fg, &mul(&f, &g)) < 1e-9);
    }

    #[test]
    fn bidiagonal_blocks_have_one_chain(seed in any::<u64>(), sizes in sizes()) {
        let a = instance(seed, &spec(sizes).bidiagonal(true));
        let r = block_function(&a, &Exp { t: 1.0 }, Route::ContourChain).unwrap();
        for (&(i, j), terms) in &r.per_block_terms {
            prop_assert_eq!(terms.len(), 1);
            prop_assert_eq!(terms[0].0.len(), i - j + 1);
        }
        prop_assert!(rel(&r.matrix.assemble(), &taylor_expm(&a.assemble(), 1.0)) < 1e-8);
    }

    #[test]
    fn scalar_chain_terms_are_divided_differences(seed in any::<u64>(), k in 2usize..=5) {
        let a = instance(seed, &spec(vec![1; k]));
        let f = Exp { t: 0.8 };
        let r = block_function(&a, &f, Route::ContourChain).unwrap();
        let entry = |i: usize, j: usize| a.block(i, j).map(|m| m[(0, 0)]).unwrap_or_default();
        for (_, terms) in &r.per_block_terms {
            for (chain, value) in terms {
                let idx = chain.indices();
                let pts = InterpolationPoints::new(idx.iter().map(|&i| entry(i, i)).collect()).unwrap();
                let coupling: C64 = idx.windows(2).map(|w| entry(w[0], w[1])).product();
                let want = dd_distinct(&f, &pts).unwrap().value * coupling;
                prop_assert!((value[(0, 0)] - want).norm() <= 1e-9 * want.norm().max(1.0));
            }
        }
    }

    #[test]
    fn chain_counts_follow_powers_of_two(seed in any::<u64>(), k in 1usize..=6) {
        let a = instance(seed, &spec(vec![1; k]));
        for ((i, j), chains) in all_chains(&a).unwrap() {
            let expected = if i == j { 1 } else { 1usize << (i - j - 1) };
            prop_assert_eq!(chains.len(), expected);
        }
    }
}
