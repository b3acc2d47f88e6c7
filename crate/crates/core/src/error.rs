use thiserror::Error;

/// Failures raised by state construction and the diagnostics built on it.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("null state: normalization bracket {bracket:e} is below the null threshold")]
    NullState { bracket: f64 },

    #[error("Fock truncation inadequate: tail mass {tail_mass:e} at cutoff {cutoff}")]
    TruncationInadequate { tail_mass: f64, cutoff: usize },

    #[error("integration domain too small: boundary |W| reaches {boundary_max:e}")]
    DomainTooSmall { boundary_max: f64 },

    #[error("no sign change found within radius {radius}")]
    RootNotFound { radius: f64 },

    #[error("quantity undefined for the vacuum (mean photon number {mean_n:e})")]
    UndefinedForVacuum { mean_n: f64 },

    #[error("degenerate Agarwal-Tara denominator {denominator:e}")]
    DegenerateDenominator { denominator: f64 },

    #[error("unsupported moment order {0}")]
    UnsupportedOrder(u32),

    #[error("invalid subtraction index {0} (expected 0..=3)")]
    InvalidSubtraction(u8),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid truncation budget: {0}")]
    InvalidBudget(String),

    #[error("invalid sweep spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Stable snake_case tag, used for flagged rows and reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "non_finite",
            Error::NullState { .. } => "null_state",
            Error::TruncationInadequate { .. } => "truncation_inadequate",
            Error::DomainTooSmall { .. } => "domain_too_small",
            Error::RootNotFound { .. } => "root_not_found",
            Error::UndefinedForVacuum { .. } => "undefined_for_vacuum",
            Error::DegenerateDenominator { .. } => "degenerate_denominator",
            Error::UnsupportedOrder(_) => "unsupported_order",
            Error::InvalidSubtraction(_) => "invalid_subtraction",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidBudget(_) => "invalid_budget",
            Error::InvalidSpec(_) => "invalid_spec",
        }
    }
}
