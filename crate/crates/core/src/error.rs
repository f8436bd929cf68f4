use thiserror::Error;

/// Errors produced by the protocol-design library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("structural ratio must be finite, got {0}")]
    NonFiniteRatio(f64),

    #[error("structural vector ({a}, {b}) is not normalized: |a^2 + b^2 - 1| = {defect:.3e}")]
    NotNormalized { a: f64, b: f64, defect: f64 },

    #[error("pulse sequence is empty")]
    EmptySequence,

    #[error("propagator diagonal has non-real entry (|Im| = {0:.3e}); fidelity is defined for real diagonals")]
    NonRealDiagonal(f64),

    #[error("numeric propagation failed step-halving check: |dU| = {0:.3e}")]
    NumericNonConvergence(f64),

    #[error("numeric propagation needs at least {min} steps per pulse, got {got}")]
    TooFewSteps { min: usize, got: usize },

    #[error("candidate indices must satisfy l >= l' >= l'' >= 0, got ({l}, {l_prime}, {l_dprime})")]
    CandidateOrdering { l: i64, l_prime: i64, l_dprime: i64 },

    #[error("enumeration bound must exceed 2*pi, got {0} rad")]
    AreaBoundTooSmall(f64),

    #[error("search bound {0} exceeds the supported maximum {1}")]
    BoundTooLarge(u64, u64),

    #[error("amplitude ratio has a pole at theta*x = 1 (theta = {theta}, x = {x})")]
    RatioPole { theta: f64, x: f64 },

    #[error("overlap {theta} for qubit pair ({i}, {j}) is outside (-1, 1)")]
    InvalidOverlap { i: usize, j: usize, theta: f64 },

    #[error("qubits {i} and {j} coincide (overlap would be 1)")]
    CoincidentQubits { i: usize, j: usize },

    #[error("overlap matrix is singular or ill-conditioned (cond >= {cond:.3e}), dominated by qubit pair ({i}, {j})")]
    IllConditioned { cond: f64, i: usize, j: usize },

    #[error("beam geometry needs at least 2 qubits, got {0}")]
    TooFewQubits(usize),

    #[error("target vector has {got} components, geometry has {expected} qubits")]
    TargetLengthMismatch { expected: usize, got: usize },

    #[error("target vector norm {0} differs from 1 by more than 1e-6")]
    NonUnitTarget(f64),

    #[error("ratio noise has a pole at x = 0")]
    ZeroRatioNoise,

    #[error("position-noise magnitude underdetermined: give delta_position, temperature, or (diffusion, gate_time, distance)")]
    MissingNoiseAnchor,

    #[error("noise sampling needs at least 1 sample")]
    NoSamples,

    #[error("noise std must be non-negative, got {0}")]
    NegativeNoise(f64),

    #[error("resampling of non-positive perturbed ratios did not terminate after {0} attempts")]
    ResampleExhausted(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("malformed record: {0}")]
    MalformedRecord(String),
}

pub type Result<T> = std::result::Result<T, Error>;
