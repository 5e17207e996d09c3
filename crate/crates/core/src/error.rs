use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// `c_α = Γ(α−1)/Γ(α/2)²` has a pole at `α = 1`.
    #[error("c_alpha diverges for alpha = {0} (pole at 1)")]
    CAlphaPole(f64),

    #[error("moment of order {lambda} diverges for alpha = {alpha}")]
    MomentDivergence { alpha: f64, lambda: f64 },

    /// A single update produced a non-finite state.
    #[error("non-finite state after update")]
    NonFinite { state: Vec<f64> },

    /// A replica left the finite range; carries where it happened.
    #[error("replica {replica} diverged at step {step}")]
    Divergence {
        replica: usize,
        step: usize,
        state: Vec<f64>,
    },

    #[error("objective `{0}` has no finite-sum components")]
    MissingComponents(String),

    #[error("minimizer of objective `{0}` is unknown")]
    MissingMinimizer(String),

    #[error("unknown benchmark `{0}`")]
    UnknownBenchmark(String),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("grid does not cover the support: tail mass proxy {tail_mass:e}")]
    Coverage { tail_mass: f64 },

    #[error("infeasible exponent plan: {0}")]
    InfeasiblePlan(String),

    #[error("step size {eta} exceeds m/M^2 = {limit}")]
    StepSize { eta: f64, limit: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
