use thiserror::Error;

/// Failure modes of the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    /// Outward integration overflowed before reaching the grid edge.
    #[error("integration diverged at x = {x_reached:.4}")]
    Truncated { x_reached: f64 },

    #[error("slope search failed: {0}")]
    SlopeConvergence(String),

    #[error("resonance bracket [{lo}, {hi}] contains {count} minima")]
    Bracket { lo: f64, hi: f64, count: usize },

    #[error("parity alternation broken near W = {w:.6}; W scan too coarse")]
    MissedAlternation { w: f64 },

    #[error("no tail extremum found below x = {x:.4}")]
    NoExtremum { x: f64 },

    #[error("degenerate tail fit at x = {x:.4}")]
    DegenerateFit { x: f64 },

    #[error("x_k = {x_k:.4} lies beyond the grid half-range {x_max:.4}")]
    GridTooSmall { x_k: f64, x_max: f64 },

    #[error("no classical turning point: W = {w} <= V = {v}")]
    NoTurningPoint { w: f64, v: f64 },

    #[error("phase branch jump near W = {w:.9}; energy grid undersampled")]
    Undersampled { w: f64 },

    #[error("resonance step unresolved: {0}")]
    Unresolved(String),

    #[error("initial state preparation failed: {0}")]
    Preparation(String),

    #[error("norm grew by {excess:.3e} at t = {t:.4}")]
    Instability { t: f64, excess: f64 },

    #[error("decay is not exponential: fit residual {residual:.3e}")]
    FitQuality { residual: f64 },

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("matrix element not converged: {0}")]
    Precision(String),

    #[error("ordering error: {0}")]
    Ordering(String),
}

pub type Result<T> = std::result::Result<T, Error>;
