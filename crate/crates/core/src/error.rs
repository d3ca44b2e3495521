use thiserror::Error;

/// Failures raised by the kinematics, pre-potential and field routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("observer lies on the world-line (a = 0)")]
    ObserverOnWorldLine,

    #[error("no retarded intersection: {0}")]
    NoRetardedIntersection(String),

    #[error("invalid world-line: {0}")]
    InvalidWorldLine(String),

    #[error("point lies on the singular axis a1 = a2 = 0 where zeta is 0 or infinite")]
    SingularAxis,

    #[error("vector is not null: |a.a| = {residual:e} exceeds tolerance")]
    NotNull { residual: f64 },

    #[error("axis index {0} out of range (expected 1..=3)")]
    AxisOutOfRange(usize),

    #[error("finite-difference step too large: |arg(zeta ratio)| = {arg} >= pi/2")]
    StepTooLarge { arg: f64 },

    #[error("stencil touches the singular set at offset {offset:?}")]
    SingularStencil { offset: [f64; 4] },

    #[error("path sample {index} lies on the singular axis")]
    PathThroughSingularAxis { index: usize },

    #[error("adaptive refinement exceeded depth limit on segment {segment}")]
    RefinementLimitExceeded { segment: usize },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("degenerate denominator: |a.u| = {0:e}")]
    DegenerateDenominator(f64),

    #[error("invalid charge: {0}")]
    InvalidCharge(String),

    #[error("charge system is empty")]
    EmptySystem,

    #[error("charge {index}: {source}")]
    Charge {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Strips `Charge` wrappers to expose the underlying failure.
    pub fn root(&self) -> &Error {
        match self {
            Error::Charge { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
