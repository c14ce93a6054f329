//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Errors produced by lattice, series, stability and wall-crossing
/// operations.
///
/// Configuration problems (ill-formed windows, undefined bound tables,
/// invalid charges) are reported through [`Error::Config`]; enumeration
/// budgets are enforced with [`Error::Budget`] rather than silently
/// truncating a sum.
#[derive(Debug, Error)]
pub enum Error {
    /// The zero lattice class has no filtration level, phase or charge.
    #[error("the zero class is not admissible here")]
    ZeroClass,

    /// Invalid configuration data.
    #[error("configuration error: {0}")]
    Config(String),

    /// Binary series operation on distinct windows.
    #[error("series windows differ")]
    WindowMismatch,

    /// Projection target is not contained in the source window.
    #[error("projection window is not nested in the source window")]
    NonNestedWindows,

    /// An index or product violates the declared support set.
    #[error("support violation: {0}")]
    SupportViolation(String),

    /// exp requires vanishing constant term.
    #[error("exponential of a series with nonzero constant term")]
    NonZeroConstant,

    /// log requires constant term one; division requires a unit.
    #[error("series is not a unit for this operation: {0}")]
    NonUnit(String),

    /// A charge value fell outside the admissible phase domain.
    #[error("phase domain error: {0}")]
    PhaseDomain(String),

    /// The phase window is too wide for the requested operation.
    #[error("phase tolerance too large: {0}")]
    EpsTooLarge(String),

    /// A path of charges fails the transversality requirements.
    #[error("path is not good: {0}")]
    NotGoodPath(String),

    /// An enumeration would exceed its configured budget.
    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    /// Invariant-table mode differs from the requested formula mode.
    #[error("invariant table mode does not match the requested mode")]
    ModeMismatch,

    /// A class handed to a ray operation is not on the declared ray.
    #[error("class is not a positive multiple of the declared ray class")]
    OffRay,

    /// A structural guarantee failed; indicates a bug, not bad input.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
