//! Riemann extensions of affine connections built from first-order
//! polynomial ODE systems: symbolic connection construction, extension
//! metrics and curvature, geodesic flows, limit-cycle conditions for
//! quadratic planar systems and a Chern-Simons density check.

pub mod chern_simons;
pub mod connection;
pub mod extension;
pub mod geodesic;
pub mod linsolve;
pub mod petrovsky_landis;
pub mod report;
pub mod symexpr;
pub mod sysdef;

/// Errors shared across the pipeline modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Sym(#[from] symexpr::SymError),
    #[error("component {0} is identically zero")]
    ZeroComponent(usize),
    #[error("degenerate denominator: {0}")]
    Degenerate(String),
    #[error("expected dimension {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("connection solve underdetermined: rank {rank}, {free} free unknowns")]
    Underdetermined { rank: usize, free: usize },
    #[error("connection solve inconsistent at equation {0}")]
    Inconsistent(usize),
    #[error("pole of order {0} not supported by the residue formula")]
    PoleOrder(u32),
    #[error("singularity approach at s = {s}: |denominator| = {den:e}")]
    Singularity { s: f64, den: f64 },
    #[error("step size underflow at s = {0}")]
    StepUnderflow(f64),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
