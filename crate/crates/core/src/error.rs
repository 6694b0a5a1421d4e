use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Invalid parameters or preconditions.
    Config,
    /// A numerical guard tripped: truncation, boundary wrap, stability bound,
    /// unresolved lattice or inconclusive scattering.
    NumericalGuard,
    /// Monte-Carlo statistics are insufficient.
    Statistics,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "packet does not fit the grid: normalized edge density {edge_density:e} exceeds {limit:e}"
    )]
    DomainTooSmall { edge_density: f64, limit: f64 },

    #[error("ill-conditioned positive-energy packet: weight {excluded_weight:e} in the complex band |p| <= mc exceeds {limit:e}")]
    IllConditionedPacket { excluded_weight: f64, limit: f64 },

    #[error("degenerate state: squared norm {norm_sq:e} is not positive")]
    DegenerateState { norm_sq: f64 },

    #[error("exceptional point at p = {p}: Hamiltonian is not diagonalizable")]
    ExceptionalPoint { p: f64 },

    #[error("momentum p = {p} lies inside the complex band |p| <= mc = {mass}")]
    ComplexBand { p: f64, mass: f64 },

    #[error("stability bound violated: {0}")]
    Stability(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("scattering inconclusive: lobes did not separate by t = {t_final} (current ratio {current_ratio:e})")]
    InconclusiveScattering { t_final: f64, current_ratio: f64 },

    #[error("Fock truncation breached at t = {time}: top-two level population {population:e} exceeds {limit:e}")]
    Truncation {
        time: f64,
        population: f64,
        limit: f64,
    },

    #[error("statistics error: {0}")]
    Statistics(String),

    #[error(
        "measurement protocol outside its linear regime: max|k|·x_rms = {value} exceeds {limit}"
    )]
    ProtocolRegime { value: f64, limit: f64 },

    #[error("lattice not resolved: {0}")]
    Resolution(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_)
            | Error::DomainTooSmall { .. }
            | Error::IllConditionedPacket { .. }
            | Error::ExceptionalPoint { .. }
            | Error::ComplexBand { .. }
            | Error::InsufficientData(_)
            | Error::ProtocolRegime { .. } => ErrorKind::Config,
            Error::DegenerateState { .. }
            | Error::Stability(_)
            | Error::InconclusiveScattering { .. }
            | Error::Truncation { .. }
            | Error::Resolution(_) => ErrorKind::NumericalGuard,
            Error::Statistics(_) => ErrorKind::Statistics,
        }
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
