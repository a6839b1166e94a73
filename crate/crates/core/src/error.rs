use crate::linalg::C64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular (zero pivot in column {pivot})")]
    Singular { pivot: usize },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("matrix has non-finite entries")]
    NonFinite,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    // block structure
    #[error("a block partition needs at least one block")]
    EmptyPartition,
    #[error("block {index} has size zero")]
    ZeroBlockSize { index: usize },
    #[error("block ({i},{j}) lies above the block diagonal")]
    BlockAboveDiagonal { i: usize, j: usize },
    #[error("block ({i},{j}) is outside a partition of {blocks} blocks")]
    BlockOutOfRange { i: usize, j: usize, blocks: usize },
    #[error("block ({i},{j}) has shape {found:?}, expected {expected:?}")]
    BlockShape { i: usize, j: usize, expected: (usize, usize), found: (usize, usize) },
    #[error("matrix of size {found} does not match partition total {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("diagonal block {index} is singular or ill-conditioned (rcond {rcond:e})")]
    SingularDiagonalBlock { index: usize, rcond: f64 },
    #[error("eigenvalue computation failed for diagonal block {index}: {source}")]
    BlockEigen { index: usize, source: LinalgError },
    #[error("{blocks} blocks exceed the chain-enumeration limit of {max}")]
    TooManyBlocks { blocks: usize, max: usize },
    #[error("chains run from a higher to a lower block index, got ({i},{j})")]
    ChainOrder { i: usize, j: usize },
    #[error("lambda = {lambda} is within {distance:e} of an eigenvalue of diagonal block {index}")]
    NearPole { lambda: C64, index: usize, distance: f64 },

    // contours
    #[error("cannot build a contour around an empty eigenvalue list")]
    EmptyEigenvalues,
    #[error("contour margin must be positive and finite, got {margin}")]
    InvalidMargin { margin: f64 },
    #[error(
        "contour margin {margin:e} does not fit below the distance {gap:e} from the eigenvalues to \
         the nearest singularity of the function (the imaginary axis for g_t)"
    )]
    MarginExceedsAxisGap { margin: f64, gap: f64 },
    #[error("no admissible contour: circles keep meeting a singularity of the function")]
    NoAdmissibleContour,
    #[error("resolvent solve failed at contour node {node}; increase the contour margin")]
    ResolventFailure { node: C64 },
    #[error(
        "spectrum intersects the imaginary axis (min |Re λ| = {gap:e} < {tol:e}): the bounded-solution \
         hypothesis fails, the spectrum must be disjoint from the imaginary axis"
    )]
    SpectrumTouchesAxis { gap: f64, tol: f64 },

    // divided differences
    #[error("at least one interpolation point is required")]
    EmptyPoints,
    #[error("points {i} and {j} coincide; use the recurrence or contour form")]
    ConfluentPoints { i: usize, j: usize },
    #[error("interpolation point {index} is not strictly inside the contour")]
    PointNotEnclosed { index: usize },
    #[error("the kernels are undefined at t = 0")]
    UndefinedAtZero,
    #[error("rate {index} lies on the imaginary axis, where g_t is undefined")]
    RateOnImaginaryAxis { index: usize },
    #[error("Laplace transform region violated: {condition}")]
    LaplaceRegion { condition: &'static str },
    #[error("lambda coincides with interpolation point {index}")]
    Pole { index: usize },
    #[error("convolution needs {panels} panels, above the limit {max}")]
    TooManyPanels { panels: usize, max: usize },

    // block functions and solutions
    #[error("route {route} is not available for this function")]
    RouteUnsupported { route: &'static str },
    #[error("matrix is not (numerically) diagonalizable; eigenvector rcond {rcond:e}")]
    NonDiagonalizable { rcond: f64 },
    #[error("time grid contains t = 0, where the kernels are undefined")]
    GridContainsZero,
    #[error("time grid must be strictly increasing")]
    GridNotIncreasing,
    #[error("time grid is empty")]
    EmptyGrid,
    #[error("initial value problems need a grid entirely on one side of t = 0")]
    GridMixedSign,
    #[error("forcing has dimension {found}, expected {expected}")]
    ForcingDimension { expected: usize, found: usize },
    #[error("sample count {found} does not match grid length {expected}")]
    SampleCount { expected: usize, found: usize },
}
