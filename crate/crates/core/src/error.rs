use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the admissible range of an operation.
    Domain { what: &'static str, value: f64 },
    /// Profile vanishes or turns negative at an interior point.
    DegenerateProfile { s: f64 },
    /// Dimension too small for the requested construction.
    UnsupportedDimension { m: usize, min: usize },
    /// Operation not available for this center / model combination.
    Capability(&'static str),
    /// Iterative solver gave up; `best` is the best value seen and `bracket` the last bracket.
    Convergence { what: &'static str, best: f64, bracket: (f64, f64) },
    /// Integral of u² against the volume measure differs from one.
    Normalization { integral: f64 },
    /// Net too coarse: discretization slack exceeds its allowance.
    Resolution { slack: f64, allowance: f64 },
    /// Integration left its valid range (e.g. beyond injectivity or t → 1 in the flow).
    Range { what: &'static str, value: f64 },
    /// Caller broke a documented contract (malformed correspondence, bad matrix, ...).
    Contract(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, value } => write!(f, "{what}: value {value} outside domain"),
            Error::DegenerateProfile { s } => write!(f, "profile is not positive at s = {s}"),
            Error::UnsupportedDimension { m, min } => {
                write!(f, "dimension {m} unsupported (need m >= {min})")
            }
            Error::Capability(msg) => write!(f, "unsupported: {msg}"),
            Error::Convergence { what, best, bracket } => write!(
                f,
                "{what} did not converge (best {best}, bracket [{}, {}])",
                bracket.0, bracket.1
            ),
            Error::Normalization { integral } => {
                write!(f, "u is not normalized: integral of u^2 is {integral}")
            }
            Error::Resolution { slack, allowance } => {
                write!(f, "net resolution slack {slack} exceeds allowance {allowance}")
            }
            Error::Range { what, value } => write!(f, "{what} out of range at {value}"),
            Error::Contract(msg) => write!(f, "contract violation: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
