mod common;

use common::*;
use greenblocks_core::chaincalc::FunctionOptions;
use greenblocks_core::generate::InstanceSpec;
use greenblocks_core::greensolve::{evaluate_many, Sign};
use greenblocks_core::{
    exp_blocks, green_blocks, solve_bounded, solve_ivp, verify_residual, BlockLowerTriangular, ForcingFunction,
    KernelKind, Route, TimeGrid, C64,
};
use proptest::prelude::*;

const TIMES: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];

fn gapped(seed: u64, sizes: Vec<usize>) -> BlockLowerTriangular {
    instance(seed, &InstanceSpec::new(sizes).axis_gap(0.3))
}

fn sizes() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..=3, 2..=3)
}

fn oracle(kind: KernelKind, m: &greenblocks_core::CMatrix, t: f64) -> greenblocks_core::CMatrix {
    let n = m.nrows();
    match kind {
        KernelKind::Plus if t > 0.0 => taylor_expm(m, t),
        KernelKind::Minus if t < 0.0 => scaled(&taylor_expm(m, t), c(-1.0)),
        KernelKind::Green => green_oracle(m, t),
        _ => greenblocks_core::CMatrix::zeros(n, n),
    }
}

fn agree(a: &greenblocks_core::CMatrix, b: &greenblocks_core::CMatrix, tol: f64) -> bool {
    frob(&add(a, b, -1.0)) <= tol * frob(a).max(frob(b)).max(1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn routes_agree_with_independent_oracle(seed in any::<u64>(), sizes in sizes()) {
        let a = gapped(seed, sizes);
        let m = a.assemble();
        let opts = FunctionOptions::default();
        for kind in [KernelKind::Plus, KernelKind::Minus, KernelKind::Green] {
            let per_route: Vec<_> = Route::ALL
                .iter()
                .map(|&r| evaluate_many(&a, kind, &TIMES, r, &opts).unwrap())
                .collect();
            for (k, &t) in TIMES.iter().enumerate() {
                let want = oracle(kind, &m, t);
                for samples in &per_route {
                    let got = samples[k].matrix.assemble();
                    prop_assert!(agree(&got, &want, 1e-7), "{:?} {:?} t={}: {:e}", kind, samples[k].route, t, rel(&got, &want));
                }
            }
        }
    }

    #[test]
    fn semigroup_on_block_diagonal(seed in any::<u64>(), s in 0.1..1.5f64, t in 0.1..1.5f64) {
        let full = gapped(seed, vec![2, 2]);
        let diag_only = BlockLowerTriangular::from_blocks(
            full.partition().clone(),
            (0..2).map(|i| ((i, i), full.diag(i).clone())),
        ).unwrap();
        let es = exp_blocks(&diag_only, s, Sign::Plus).unwrap().matrix.assemble();
        let et = exp_blocks(&diag_only, t, Sign::Plus).unwrap().matrix.assemble();
        let est = exp_blocks(&diag_only, s + t, Sign::Plus).unwrap().matrix.assemble();
        prop_assert!(rel(&mul(&es, &et), &est) < 1e-9);
    }

    #[test]
    fn green_jump_is_identity(seed in any::<u64>(), sizes in sizes()) {
        let a = gapped(seed, sizes);
        let n = a.partition().total();
        let plus = green_blocks(&a, 1e-3).unwrap().matrix.assemble();
        let minus = green_blocks(&a, -1e-3).unwrap().matrix.assemble();
        prop_assert!(frob(&add(&add(&plus, &minus, -1.0), &eye(n), -1.0)) < 1e-2);
    }

    #[test]
    fn outputs_are_lower_block_triangular(seed in any::<u64>(), sizes in sizes(), t in prop::sample::select(TIMES.to_vec())) {
        let a = gapped(seed, sizes);
        let g = green_blocks(&a, t).unwrap().matrix;
        let k = a.num_blocks();
        for (&(i, j), _) in g.blocks() {
            prop_assert!(i >= j && i < k);
        }
    }

    #[test]
    fn bounded_solution_satisfies_the_equation(seed in any::<u64>(), sizes in sizes()) {
        let a = gapped(seed, sizes);
        let n = a.partition().total();
        let f = ForcingFunction::new(n, (n as f64).sqrt(), move |t| (0..n).map(|i| C64::new((t + i as f64).sin(), 0.0)).collect());
        let grid = TimeGrid::linspace(0.5, 0.6, 101).unwrap();
        let sol = solve_bounded(&a, &f, &grid).unwrap();
        prop_assert!(verify_residual(&a, &sol.values, &f, &grid).unwrap() <= 1e-4);
        let sup = sol.values.iter().map(|x| x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).fold(0.0, f64::max);
        prop_assert!(sup <= sol.sup_bound * (1.0 + 1e-6));
    }

    #[test]
    fn ivp_satisfies_the_equation(seed in any::<u64>(), sizes in sizes(), negative in any::<bool>()) {
        let a = gapped(seed, sizes);
        let n = a.partition().total();
        let f = ForcingFunction::new(n, (n as f64).sqrt(), move |t| (0..n).map(|i| C64::new(0.0, (2.0 * t - i as f64).cos())).collect());
        let grid = if negative { TimeGrid::linspace(-1.0, -0.9, 101) } else { TimeGrid::linspace(0.9, 1.0, 101) }.unwrap();
        let xs = solve_ivp(&a, &f, &grid).unwrap();
        prop_assert!(verify_residual(&a, &xs, &f, &grid).unwrap() <= 1e-4);
    }
}

#[test]
fn green_decays_at_half_the_gap() {
    for seed in 0..10 {
        let a = gapped(seed, vec![2, 2, 1]);
        let gap = greenblocks_core::causal_spectrum(&a).unwrap().gap_to_imaginary_axis();
        let norm = |t: f64| frob(&green_blocks(&a, t).unwrap().matrix.assemble());
        for t in [2.0f64, 4.0] {
            for s in [1.0, -1.0] {
                let (num, den) = (norm(2.0 * s * t), norm(s * t));
                if den == 0.0 {
                    assert_eq!(num, 0.0);
                    continue;
                }
                let ratio = num / den;
                assert!(ratio <= (-(gap / 2.0) * t).exp() * 1.5, "seed {seed} t {} ratio {ratio}", s * t);
            }
        }
    }
}
