use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cutoff K = {0} is below 2*pi, the lattice ball is empty")]
    CutoffTooSmall(f64),
    #[error("beta = {0} is outside (0, 1)")]
    BetaOutOfRange(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("scattering iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("|G_p| >= F_p at n = {n:?} (G/F = {ratio}), N = {big_n}, kappa = {kappa}")]
    DiagonalizationFailure {
        n: [i32; 3],
        ratio: f64,
        big_n: f64,
        kappa: f64,
    },
    #[error("momentum argument is zero")]
    ZeroMomentumArgument,
    #[error("component cutoffs disagree: {0}")]
    InconsistentLattice(String),
    #[error("Fock basis dimension {dim} exceeds the limit {limit}")]
    BasisTooLarge { dim: usize, limit: usize },
    #[error("mode set invalid: {0}")]
    InvalidModeSet(String),
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNonConvergence { iterations: usize, residual: f64 },
    #[error("linear solve did not converge after {iterations} iterations (residual {residual:e})")]
    LinearSolveNonConvergence { iterations: usize, residual: f64 },
    #[error("rejected config: {0}")]
    RejectedConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
