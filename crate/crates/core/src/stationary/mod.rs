//! Lifetimes from stationary resonance solutions.

mod breit_wigner;
mod flux;
mod tailfit;

pub use breit_wigner::{
    background_phase, lifetime_bw, phase_curve, phase_step, unwrap_mod_pi, BwLifetime, BwOptions, PhaseCurve,
};
pub use flux::{bound_region_norm, lifetime_flux, FluxLifetime, DEFAULT_ACTION_BOUNDARY};
pub use tailfit::{fit_three, find_extremum, tail_fit, Component, TailFit};
