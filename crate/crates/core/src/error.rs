use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants split into precondition violations (bad input) and numerical
/// failures (the input was fine but an iteration did not behave); see
/// [`Error::is_precondition`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("composition requires inner(0)=0")]
    CompositionOffOrigin,
    #[error("non-invertible jet")]
    NonInvertibleJet,
    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("coefficient ({0},{1}) outside total degree {2}")]
    IndexOutOfRange(usize, usize, usize),
    #[error("resolution too coarse")]
    ResolutionTooCoarse,
    #[error("resonance too close")]
    ResonanceTooClose,
    #[error("degenerate Jacobian")]
    DegenerateJacobian,
    #[error("image left D_r")]
    ImageLeftDisk,
    #[error("Newton did not converge at s={s}, z={z}")]
    NewtonFailed { s: f64, z: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// True for errors caused by invalid input rather than by the numerics.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::CompositionOffOrigin
                | Error::OrderMismatch(..)
                | Error::IndexOutOfRange(..)
                | Error::Precondition(_)
                | Error::DegenerateJacobian
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
