//! Stationary two-channel shooting and resonance location.

mod resonance;
mod shoot;
mod slope;

pub use resonance::{
    assign_indices, bound_norm, decoupled_levels, level_overlap, outgoing_potential, refine_resonance,
    resonance_objective, scan_parity, scan_resonances, tail_diagnostics, transfer_resonances, ResonanceRecord,
    SolverOptions, TailDiagnostics, XmaxPolicy,
};
pub use shoot::{BasisPair, HalfSolution, Shooter, DIVERGENCE_GUARD};
pub use slope::{forbidden_norm, slope_from_basis, solve_slope, SlopeSolution, SLOPE_WINDOW};

use crate::error::Result;
use crate::grid::Grid;
use crate::wave::{Parity, Representation, TwoComponentWave};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingProblem {
    pub representation: Representation,
    pub parity: Parity,
    pub v: f64,
    pub w: f64,
    pub grid: Grid,
}

/// Outward solution for an explicit initial slope `s`, reflected to `x < 0`.
pub fn integrate(problem: &ShootingProblem, s: f64) -> Result<TwoComponentWave<f64>> {
    let shooter = Shooter::new(problem.v, problem.representation, problem.grid.x_max(), problem.grid.dx())?;
    let pair = shooter.basis(problem.w, problem.parity)?;
    Ok(pair.combine(1.0, s).to_wave())
}
