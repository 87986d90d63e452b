//! Semi-classical Landau-Zener estimate.
//!
//! Each pass through the crossing tunnels to the lower curve with probability
//! `exp(-2 pi V^2 / (s v))`, where the diabatic slope difference `s` is one
//! in scaled units, and the crossing is passed twice per vibration.

use crate::error::{Error, Result};

/// Rule for the particle velocity at the crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VelocityRule {
    /// `sqrt(2 W)`, which tracks the quantum results best.
    #[default]
    TotalEnergy,
    /// `sqrt(W - V)`, the virial estimate for a harmonic well.
    Virial,
    /// `sqrt(2 (W - V))`, the classical speed at the crossing.
    Classical,
}

impl VelocityRule {
    pub fn velocity(self, v: f64, w: f64) -> f64 {
        match self {
            VelocityRule::TotalEnergy => (2.0 * w).sqrt(),
            VelocityRule::Virial => (w - v).sqrt(),
            VelocityRule::Classical => (2.0 * (w - v)).sqrt(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VelocityRule::TotalEnergy => "total-energy",
            VelocityRule::Virial => "virial",
            VelocityRule::Classical => "classical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "total-energy" => Some(VelocityRule::TotalEnergy),
            "virial" => Some(VelocityRule::Virial),
            "classical" => Some(VelocityRule::Classical),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LzResult {
    /// Crossing attempts per unit time.
    pub rate: f64,
    pub velocity: f64,
    pub probability: f64,
    pub tau: f64,
}

/// `tau = 1 / (R P)` with `R = (W_next - W_prev) / pi`.
pub fn lz_lifetime(v: f64, w_prev: f64, w_nu: f64, w_next: f64, rule: VelocityRule) -> Result<LzResult> {
    if !(w_next > w_prev) {
        return Err(Error::Ordering(format!("neighbouring levels {w_prev} and {w_next} are not increasing")));
    }
    let velocity = rule.velocity(v, w_nu);
    if !(velocity > 0.0) {
        return Err(Error::Domain(format!("velocity rule {} gives no motion at W = {w_nu}", rule.name())));
    }
    let rate = (w_next - w_prev) / std::f64::consts::PI;
    let probability = (-2.0 * std::f64::consts::PI * v * v / velocity).exp();
    Ok(LzResult { rate, velocity, probability, tau: (rate * probability).recip() })
}

/// Level below the ground state, reflected through `W_0`: `2 W_0 - W_1`.
pub fn reflected_level(w0: f64, w1: f64) -> f64 {
    2.0 * w0 - w1
}

/// Landau-Zener lifetimes for a full ladder of resonance energies. The
/// ground state uses [`reflected_level`]; the top state, whose upper
/// neighbour is unknown, reflects through itself in the same way.
pub fn lz_ladder(v: f64, energies: &[f64], rule: VelocityRule) -> Result<Vec<LzResult>> {
    if energies.len() < 2 {
        return Err(Error::Range("at least two levels are needed for an attempt rate".into()));
    }
    let n = energies.len();
    (0..n)
        .map(|i| {
            let prev = if i == 0 { reflected_level(energies[0], energies[1]) } else { energies[i - 1] };
            let next = if i + 1 == n { reflected_level(energies[n - 1], energies[n - 2]) } else { energies[i + 1] };
            lz_lifetime(v, prev, energies[i], next, rule)
        })
        .collect()
}
