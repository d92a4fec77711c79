//! Error types shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Dirac8Error {
    #[error("degenerate index pair: A = B = {0}")]
    DegenerateIndexPair(usize),
    #[error("lightlike degenerate point: E = 0 at p = 0, m = 0")]
    LightlikeDegeneratePoint,
    #[error("grid mismatch: operator expects {expected}, field has {found}")]
    GridMismatch { expected: String, found: String },
    #[error("momentum off the mass shell: |p0^2 - p^2 - m^2| = {residual:.3e}")]
    OffShell { residual: f64 },
    #[error("transformed sector straddles two sectors: leakage {leakage:.3e} exceeds {tolerance:.3e}")]
    NotSectorCovariant { leakage: f64, tolerance: f64 },
    #[error(
        "degeneracy-resolution failure: ‖[H, 2S56]‖ = {commutator:.3e} exceeds 1e-12 \
         (the gamma set does not commute H with the internal rotation)"
    )]
    DegeneracyResolutionFailure { commutator: f64 },
    #[error("packet resolution precondition violated: {0}")]
    ResolutionPrecondition(String),
    #[error("mass must be > 0 (got {0}); the equations are built for particles with positive mass")]
    NonPositiveMass(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<U> = std::result::Result<U, Dirac8Error>;
