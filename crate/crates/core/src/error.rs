use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every solver in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// A problem or configuration parameter violates its invariant.
    InvalidParameter(&'static str),
    /// The piecewise description of a source is malformed.
    InvalidSource(&'static str),
    /// Operation requires `p > 2`.
    UnsupportedExponent { p: f64 },
    /// A sufficient condition required by the operation does not hold.
    ConditionViolated(&'static str),
    /// The shooting endpoint never changed sign over the expanded bracket.
    NoBracket { lo: f64, hi: f64 },
    /// Every trial slope drove the thickness below the guard.
    Infeasible,
    /// Root iteration finished without meeting the tolerance.
    Tolerance { residual: f64 },
    /// Damped Newton failed to reduce the residual.
    NewtonDiverged { level: usize, iterations: usize, residual: f64 },
    /// Tridiagonal elimination met a vanishing pivot.
    JacobianSingular { level: usize },
    /// Requested time step exceeds the stability limit.
    CflViolation { requested: f64, suggested: f64 },
    /// Two profiles do not share a domain.
    IncompatibleDomains,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(what) => write!(f, "argument out of domain: {what}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::InvalidSource(what) => write!(f, "invalid source function: {what}"),
            Error::UnsupportedExponent { p } => write!(
                f,
                "p = {p} is not supported: the linearization is only available for p > 2 \
                 (the case 1 < p < 2 is an open problem)"
            ),
            Error::ConditionViolated(what) => write!(f, "condition violated: {what}"),
            Error::NoBracket { lo, hi } => {
                write!(f, "shooting endpoint does not change sign on [{lo}, {hi}]")
            }
            Error::Infeasible => write!(f, "every trial trajectory touched the bed"),
            Error::Tolerance { residual } => {
                write!(f, "root iteration stalled with endpoint residual {residual:e}")
            }
            Error::NewtonDiverged { level, iterations, residual } => write!(
                f,
                "Newton diverged at continuation level {level} after {iterations} iterations \
                 (residual {residual:e})"
            ),
            Error::JacobianSingular { level } => {
                write!(f, "singular Jacobian at continuation level {level}")
            }
            Error::CflViolation { requested, suggested } => write!(
                f,
                "time step {requested:e} exceeds the stability limit; use dt <= {suggested:e}"
            ),
            Error::IncompatibleDomains => write!(f, "profiles do not share a domain"),
        }
    }
}

impl core::error::Error for Error {}
