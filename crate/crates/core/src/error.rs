use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Cr3bpError {
    #[error("collision: distance {dist:.3e} to primary at {primary:?} is inside the guard radius")]
    Collision { dist: f64, primary: [f64; 2] },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("shooting failed: {0}")]
    Shooting(String),

    #[error(
        "Newton iteration did not converge after {iterations} steps (residual {residual:.3e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("degenerate crossing at t = {t} (smallest |eigenvalue| {min_eig:.3e})")]
    DegenerateCrossing { t: f64, min_eig: f64 },

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("point outside the Hill region (V - h = {excess:.3e})")]
    OutsideHillRegion { excess: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Cr3bpError>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Cr3bpError {
    Cr3bpError::InvalidParameter {
        name,
        value,
        reason,
    }
}
