mod common;

use common::*;
use greenblocks_core::func::{Exp, Power, Resolvent};
use greenblocks_core::generate::{random_instance, rng, InstanceSpec};
use greenblocks_core::spectral::{enclose_avoiding_axis, DEFAULT_NODES};
use greenblocks_core::{cauchy_function, enclose, riesz_split, CMatrix, Circle, ContourSet, C64};
use proptest::prelude::*;

fn dense(seed: u64, n: usize, gap: f64) -> CMatrix {
    let spec = InstanceSpec::new(vec![n]).axis_gap(gap);
    random_instance(&mut rng(seed), &spec).unwrap().diag(0).clone()
}

fn fitted(m: &CMatrix) -> ContourSet {
    let eigs = greenblocks_core::linalg::eigenvalues(m).unwrap();
    enclose(&eigs, 0.25, DEFAULT_NODES).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn node_doubling_converges(seed in any::<u64>()) {
        let m = dense(seed, 3, 0.0);
        let oracle = taylor_expm(&m, 1.0);
        let radius = 1.0 + greenblocks_core::linalg::eigenvalues(&m).unwrap().iter().map(|z| z.norm()).fold(0.0, f64::max);
        let mut prev = f64::INFINITY;
        for nodes in [8, 16, 32, 64, 128] {
            let gamma = ContourSet::from_circles(vec![Circle { center: C64::new(0.0, 0.0), radius, nodes }]);
            let err = rel(&cauchy_function(&m, &Exp { t: 1.0 }, &gamma).unwrap(), &oracle);
            if prev > 1e-11 {
                prop_assert!(err <= prev / 10.0 || err < 1e-12, "nodes {} err {} prev {}", nodes, err, prev);
            }
            prev = err;
        }
        prop_assert!(prev < 1e-12);
    }

    #[test]
    fn power_functions_are_multiplicative(seed in any::<u64>()) {
        let m = dense(seed, 4, 0.0);
        let gamma = fitted(&m);
        let f1 = cauchy_function(&m, &Power(1), &gamma).unwrap();
        let f2 = cauchy_function(&m, &Power(2), &gamma).unwrap();
        let f3 = cauchy_function(&m, &Power(3), &gamma).unwrap();
        prop_assert!(rel(&f1, &m) < 1e-10);
        prop_assert!(rel(&f3, &mul(&f1, &f2)) < 1e-10);
        prop_assert!(rel(&f2, &mul(&m, &m)) < 1e-10);
    }

    #[test]
    fn resolvent_is_reproduced(seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let m = dense(seed, 3, 0.0);
        let gamma = fitted(&m);
        let at = C64::new(re, im);
        prop_assume!(gamma.circles().iter().all(|c| (c.center - at).norm() > c.radius + 0.2));
        let got = cauchy_function(&m, &Resolvent { at }, &gamma).unwrap();
        let mut shifted = scaled(&m, c(-1.0));
        shifted.add_identity(at);
        prop_assert!(rel(&got, &gj_inverse(&shifted)) < 1e-9);
    }

    #[test]
    fn riesz_projectors_are_complementary_idempotents(seed in any::<u64>()) {
        let m = dense(seed, 4, 0.3);
        let s = riesz_split(&m).unwrap();
        let (l, r) = (&s.projector_left, &s.projector_right);
        let n = m.nrows();
        prop_assert!(frob(&add(&add(l, r, 1.0), &eye(n), -1.0)) < 1e-8);
        for p in [l, r] {
            prop_assert!(frob(&add(&mul(p, p), p, -1.0)) < 1e-8);
            prop_assert!(frob(&add(&mul(&m, p), &mul(p, &m), -1.0)) < 1e-8);
        }
        let (ol, or) = half_plane_projectors(&m);
        prop_assert!(frob(&add(l, &ol, -1.0)) < 1e-8);
        prop_assert!(frob(&add(r, &or, -1.0)) < 1e-8);
    }

    #[test]
    fn axis_avoiding_contours_enclose_each_point(seed in any::<u64>()) {
        let spec = InstanceSpec::new(vec![6]).axis_gap(0.1);
        let eigs = greenblocks_core::generate::random_eigenvalues(&mut rng(seed), 6, &spec);
        let gamma = enclose_avoiding_axis(&eigs, None, DEFAULT_NODES).unwrap();
        prop_assert!(gamma.is_disjoint());
        for &z in &eigs {
            prop_assert_eq!(gamma.winding(z), 1);
        }
        prop_assert!(gamma.min_distance(&eigs) >= gamma.margin() * (1.0 - 1e-12));
        for circle in gamma.circles() {
            prop_assert!(circle.center.re.abs() > circle.radius);
        }
    }
}
