//! Dense reference computations written independently of the library:
//! Gauss-Jordan inversion, Taylor exponential with scaling and squaring,
//! and half-plane projectors from the Newton iteration for the matrix sign.

#![allow(dead_code)]

use greenblocks_core::generate::{random_instance, rng, InstanceSpec};
use greenblocks_core::{BlockLowerTriangular, CMatrix, C64};

pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows());
    CMatrix::from_fn(a.nrows(), b.ncols(), |i, j| (0..a.ncols()).map(|k| a[(i, k)] * b[(k, j)]).sum())
}

pub fn add(a: &CMatrix, b: &CMatrix, s: f64) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] + b[(i, j)] * s)
}

pub fn scaled(a: &CMatrix, s: C64) -> CMatrix {
    CMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

pub fn eye(n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |i, j| if i == j { c(1.0) } else { c(0.0) })
}

pub fn frob(a: &CMatrix) -> f64 {
    a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    frob(&add(a, b, -1.0)) / frob(a).max(frob(b)).max(1e-12)
}

pub fn gj_inverse(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let mut m: Vec<Vec<C64>> = (0..n)
        .map(|i| (0..2 * n).map(|j| if j < n { a[(i, j)] } else if j - n == i { c(1.0) } else { c(0.0) }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).max_by(|&x, &y| m[x][col].norm().total_cmp(&m[y][col].norm())).unwrap();
        m.swap(col, p);
        let d = m[col][col];
        assert!(d.norm() > 0.0, "singular matrix");
        for v in m[col].iter_mut() {
            *v /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                if f.norm() != 0.0 {
                    for k in 0..2 * n {
                        let s = m[col][k];
                        m[r][k] -= f * s;
                    }
                }
            }
        }
    }
    CMatrix::from_fn(n, n, |i, j| m[i][j + n])
}

/// `e^{tM}`
pub fn taylor_expm(m: &CMatrix, t: f64) -> CMatrix {
    let a = scaled(m, c(t));
    let norm = frob(&a);
    let mut s = 0u32;
    while norm / 2f64.powi(s as i32) > 0.25 {
        s += 1;
    }
    let a = scaled(&a, c(0.5f64.powi(s as i32)));
    let n = m.nrows();
    let mut term = eye(n);
    let mut sum = eye(n);
    for k in 1..30 {
        term = scaled(&mul(&term, &a), c(1.0 / k as f64));
        sum = add(&sum, &term, 1.0);
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

/// `(P_left, P_right)` from `sign(M) = lim X_{k+1} = (X_k + X_k⁻¹)/2`.
pub fn half_plane_projectors(m: &CMatrix) -> (CMatrix, CMatrix) {
    let n = m.nrows();
    let mut x = m.clone();
    for _ in 0..100 {
        let next = scaled(&add(&x, &gj_inverse(&x), 1.0), c(0.5));
        let done = rel(&next, &x) < 1e-15;
        x = next;
        if done {
            break;
        }
    }
    let left = scaled(&add(&eye(n), &x, -1.0), c(0.5));
    let right = scaled(&add(&eye(n), &x, 1.0), c(0.5));
    (left, right)
}

/// `g_t(M)`
pub fn green_oracle(m: &CMatrix, t: f64) -> CMatrix {
    let (left, right) = half_plane_projectors(m);
    if t > 0.0 {
        mul(&taylor_expm(m, t), &left)
    } else {
        scaled(&mul(&taylor_expm(m, t), &right), c(-1.0))
    }
}

pub fn instance(seed: u64, spec: &InstanceSpec) -> BlockLowerTriangular {
    random_instance(&mut rng(seed), spec).unwrap()
}

pub fn scalar_blocks(diag: &[f64], lower: &[((usize, usize), f64)]) -> BlockLowerTriangular {
    use greenblocks_core::BlockPartition;
    let p = BlockPartition::scalar(diag.len()).unwrap();
    let mut entries: Vec<((usize, usize), CMatrix)> =
        diag.iter().enumerate().map(|(i, &d)| ((i, i), CMatrix::from_real_rows(&[&[d]]))).collect();
    for &((i, j), v) in lower {
        entries.push(((i, j), CMatrix::from_real_rows(&[&[v]])));
    }
    BlockLowerTriangular::from_blocks(p, entries).unwrap()
}
