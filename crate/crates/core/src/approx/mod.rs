//! Perturbative and semiclassical lifetime estimates.

mod bound;
mod fgr;
mod lz;

pub use bound::{fgr_bound_state, upper_curve, BoundState};
pub use fgr::{
    fgr_continuum_state, fgr_lifetime, full_densities, half_densities, matrix_element, ContinuumState, FgrDensities,
    FgrOptions, FgrResult, HalfDensities, MATCH_LENGTH,
};
pub use lz::{lz_ladder, lz_lifetime, reflected_level, LzResult, VelocityRule};

/// Quality factor `tau * omega` with the harmonic frequency `1 / (2 sqrt(V))`.
pub fn q_factor(tau: f64, v: f64) -> f64 {
    tau / (2.0 * v.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_factor_is_one_for_one_radian() {
        let v: f64 = 1.7;
        assert!((q_factor(2.0 * v.sqrt(), v) - 1.0).abs() < 1e-15);
    }
}
