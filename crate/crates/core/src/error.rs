use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A density or other state value outside its admissible domain.
    #[error("{name} = {value} is outside the admissible domain ({reason})")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: String,
    },

    #[error("{0}")]
    Undefined(String),

    /// Coexistence condition `Gamma - 2 mu > 2 gamma mu / nu` is violated.
    #[error("no coexistence equilibrium: Gamma - 2 mu = {lhs} is not > 2 gamma mu / nu = {rhs}")]
    NoCoexistence { lhs: f64, rhs: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("field length {got} does not match grid with {expected} cells")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("stiff solve did not converge in cell {cell} at t = {t} (substep {substep:e} below floor)")]
    NewtonFailure { cell: usize, t: f64, substep: f64 },

    #[error("step size {h:e} fell below the floor at t = {t}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("negative {field} = {value:e} in cell {cell} at t = {t}")]
    Negativity {
        field: &'static str,
        cell: usize,
        value: f64,
        t: f64,
    },

    #[error("non-finite {field} in cell {cell} at t = {t}")]
    NonFinite {
        field: &'static str,
        cell: usize,
        t: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A sweep member failed; `completed` runs finished before the failure.
    #[error("epsilon sweep incomplete after {completed} runs: {source}")]
    IncompleteSweep {
        completed: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of the numerical machinery rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NewtonFailure { .. }
            | Error::StepUnderflow { .. }
            | Error::Negativity { .. }
            | Error::NonFinite { .. } => true,
            Error::IncompleteSweep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_density(name: &'static str, value: f64) -> Result<()> {
    if value.is_nan() || value < 0.0 {
        return Err(Error::Domain {
            name,
            value,
            reason: "densities must be nonnegative",
        });
    }
    Ok(())
}
