use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DickeError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid sector 2j = {twice_j} for N = {n_atoms}")]
    InvalidSector { twice_j: u64, n_atoms: u64 },

    #[error("semiclassical formulas require omega = omega0 = 1 (got omega = {omega}, omega0 = {omega0})")]
    NonUnitFrequencies { omega: f64, omega0: f64 },

    #[error("sector j = 0 has no ESQPT (critical coupling diverges)")]
    NoEsqpt,

    #[error("energy below classical ground state: E/j = {energy_over_j}, minimum E/j = {minimum_over_j}")]
    BelowGroundState { energy_over_j: f64, minimum_over_j: f64 },

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("no thermal phase transition: lambda = {lambda} < lambda_c = {lambda_c}")]
    NoThermalTransition { lambda: f64, lambda_c: f64 },

    #[error("lambda = lambda_c = {lambda_c}: the transition is a QPT at beta -> infinity")]
    QptAtZeroTemperature { lambda_c: f64 },

    #[error("normal phase only: lambda = {lambda} <= lambda_c = {lambda_c}")]
    NormalPhaseOnly { lambda: f64, lambda_c: f64 },

    #[error("no nontrivial gap-equation solution for beta = {beta} <= beta_c = {beta_c}")]
    NoNontrivialSolution { beta: f64, beta_c: f64 },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate}, error {error}")]
    QuadratureNotConverged {
        a: f64,
        b: f64,
        estimate: f64,
        error: f64,
    },

    #[error("finite-difference derivative unstable under step halving: {coarse} vs {fine}")]
    UnstableDerivative { coarse: f64, fine: f64 },

    #[error("eigensolver failed for sector 2j = {twice_j}: {reason}")]
    Eigensolver { twice_j: u64, reason: String },

    #[error("{0}")]
    Analysis(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("malformed file {path}: {reason}")]
    Format { path: String, reason: String },
}

impl DickeError {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            DickeError::InvalidParameter { .. }
                | DickeError::InvalidSector { .. }
                | DickeError::NonUnitFrequencies { .. }
                | DickeError::Domain(_)
        )
    }
}

impl From<std::io::Error> for DickeError {
    fn from(e: std::io::Error) -> Self {
        DickeError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, DickeError>;
