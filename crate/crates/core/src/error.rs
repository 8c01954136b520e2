use core::fmt;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid parameters violate the layout rules.
    InvalidGrid(&'static str),
    /// Two fields or operators live on different grids.
    GridMismatch,
    /// An object has the wrong number of dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// A buffer does not have the length its grid requires.
    ShapeMismatch { expected: usize, found: usize },
    /// A NaN or infinite value was produced or supplied.
    NonFinite,
    /// The Weyl correspondence needs `L² = N/4` so that position and
    /// frequency axes share one spacing.
    NotSelfDual { points_per_axis: usize, half_extent: f64 },
    InvalidParameter(&'static str),
    /// A strip evaluation exceeded the representable range.
    StripOverflow { log_magnitude: f64 },
    /// The requested integral or bound does not exist for this input.
    Divergent(&'static str),
    /// Derivative or moment order above the supported range.
    OrderOverflow { order: usize, max: usize },
    /// A least-squares fit has no usable data.
    DegenerateFit(&'static str),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGrid(msg) => write!(f, "invalid grid: {msg}"),
            Error::GridMismatch => f.write_str("grid mismatch"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(f, "shape mismatch: expected {expected} values, found {found}")
            }
            Error::NonFinite => f.write_str("non-finite value"),
            Error::NotSelfDual {
                points_per_axis,
                half_extent,
            } => write!(
                f,
                "phase grid with N = {points_per_axis}, L = {half_extent} is not self-dual (need L^2 = N/4)"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::StripOverflow { log_magnitude } => write!(
                f,
                "strip evaluation overflow: log-magnitude {log_magnitude:.1} above guard"
            ),
            Error::Divergent(msg) => write!(f, "divergent: {msg}"),
            Error::OrderOverflow { order, max } => {
                write!(f, "order {order} exceeds supported maximum {max}")
            }
            Error::DegenerateFit(msg) => write!(f, "degenerate fit: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
