use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Scenario data violates a structural invariant.
    InvalidScenario(&'static str),
    /// A decision that must be feasible is not. Violations are in watts.
    Infeasible { uav_violation_w: f64, bs_violation_w: f64 },
    /// A surrogate was evaluated outside the domain of its linearized logs.
    OutOfDomain,
    /// The AGP step-size parameter exceeded its safety cap.
    StepSizeCap { tau: f64, iteration: usize },
    /// Vector lengths do not match the number of UEs.
    DimensionMismatch { expected: usize, found: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidScenario(why) => write!(f, "invalid scenario: {why}"),
            Error::Infeasible { uav_violation_w, bs_violation_w } => write!(
                f,
                "decision is infeasible (UAV budget exceeded by {uav_violation_w:.3e} W, BS budget by {bs_violation_w:.3e} W)"
            ),
            Error::OutOfDomain => write!(f, "point lies outside the surrogate domain"),
            Error::StepSizeCap { tau, iteration } => write!(
                f,
                "step-size parameter tau = {tau:.3e} exceeded its cap at iteration {iteration}"
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
        }
    }
}

impl core::error::Error for Error {}
