//! Lifetimes from the outgoing flux of a stationary resonance.
//!
//! `tau = P0 / (2 (k_1 a_1^2 + k_2 a_2^2))`, with the tail amplitudes of
//! both diabatic channels and the bound-region norm `P0` inside `|x| < x_k`.

use super::tailfit::{find_extremum, fit_three, TailFit};
use crate::error::{Error, Result};
use crate::model::{basis_transform, turning_point, BasisDirection};
use crate::quad::simpson;
use crate::semiclassical::action_point;
use crate::tidse::ResonanceRecord;
use crate::wave::{Representation, TwoComponentWave};

pub const DEFAULT_ACTION_BOUNDARY: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxLifetime {
    pub tau: f64,
    pub p0: f64,
    pub x_l: f64,
    pub x_k: f64,
    /// Diabatic tail fits `(psi_1, psi_2)` at the same `x_p`.
    pub fits: (TailFit, TailFit),
}

/// Norm inside `|x| <= x_k`.
pub fn bound_region_norm(wave: &TwoComponentWave<f64>, x_k: f64) -> Result<f64> {
    let x_max = wave.grid.x_max();
    if x_k >= x_max {
        return Err(Error::GridTooSmall { x_k, x_max });
    }
    let (lo, hi) = (wave.grid.index_of(-x_k), wave.grid.index_of(x_k));
    let density: Vec<f64> = (lo..=hi).map(|i| wave.first[i].powi(2) + wave.second[i].powi(2)).collect();
    Ok(simpson(&density, wave.grid.dx()))
}

/// Flux lifetime of a converged resonance wave on `x_p <= x_max - 1`.
pub fn lifetime_flux(record: &ResonanceRecord, wave: &TwoComponentWave<f64>, r_k: f64) -> Result<FluxLifetime> {
    let (v, w) = (record.v, record.w_nu);
    let x_l = turning_point(v, w).ok_or(Error::NoTurningPoint { w, v })?;
    let x_k = action_point(v, w, r_k)?;
    let p0 = bound_region_norm(wave, x_k)?;
    let near = wave.grid.x_max() - 1.0;
    let i = find_extremum(wave.allowed(), wave.grid.index_of(near)).ok_or(Error::NoExtremum { x: near })?;
    if wave.x(i) <= x_k {
        return Err(Error::NoExtremum { x: near });
    }
    let dx = wave.grid.dx();
    let mut first = [0.0; 3];
    let mut second = [0.0; 3];
    for (slot, j) in (i - 1..=i + 1).enumerate() {
        let pair = wave.pair(j);
        let (a, b) = match wave.representation {
            Representation::Diabatic => pair,
            Representation::Adiabatic => basis_transform(pair, BasisDirection::ToDiabatic, wave.x(j), v),
        };
        first[slot] = a;
        second[slot] = b;
    }
    let x_p = wave.x(i);
    let fit1 = fit_three(first, x_p, dx)?;
    let fit2 = fit_three(second, x_p, dx)?;
    let flux = fit1.k * fit1.amplitude.powi(2) + fit2.k * fit2.amplitude.powi(2);
    Ok(FluxLifetime { tau: p0 / (2.0 * flux), p0, x_l, x_k, fits: (fit1, fit2) })
}
