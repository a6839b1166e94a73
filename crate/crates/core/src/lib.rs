//! Fundamental solutions `exp±,t(A)` and the Green's function `g_t(A)` of
//! `x' = Ax + f` for block lower-triangular `A`, computed by chain sums of
//! operator divided differences, by nested convolutions, and by a dense
//! eigendecomposition oracle.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod blockmat;
pub mod chaincalc;
pub mod conv;
pub mod divdiff;
pub mod error;
pub mod func;
pub mod generate;
pub mod greensolve;
pub mod linalg;
pub mod quadrature;
pub mod spectral;

pub use blockmat::{
    causal_inverse, causal_inverse_chains, causal_spectrum, BlockLowerTriangular, BlockPartition,
    CausalSpectrum,
};
pub use chaincalc::{
    block_function, block_resolvent, enumerate_chains, op_dd_contour, BlockFunctionResult, Chain,
    Route,
};
pub use divdiff::{
    dd_contour, dd_distinct, dd_exp_conv, dd_r_lambda, dd_recurrence, laplace_check, DdMethod,
    DividedDiffResult, InterpolationPoints,
};
pub use error::{Error, LinalgError};
pub use func::{AnalyticFn, Kernel, KernelKind};
pub use greensolve::{
    evaluate, exp_blocks, green_blocks, solve_bounded, solve_ivp, verify_residual, ForcingFunction,
    GreenSample, TimeGrid,
};
pub use linalg::{CMatrix, C64};
pub use spectral::{cauchy_function, enclose, riesz_split, Circle, ContourSet, SpectralSplit};
