//! Golden-rule decay of a decoupled upper-well level into the lower continuum.
//!
//! The bound state lives on `Vt_u` and the continuum on `Vt_d`. Continuum
//! states of either parity are energy normalized, which for a state spread
//! over both sides means a WKB envelope `1 / sqrt(pi k)` at large `|x|`. The
//! coupling `B_du + A_du d/dx` is odd under reflection, so only opposite
//! parities couple.

use super::bound::{fgr_bound_state, parity_start, BoundState, ScalarShooter};
use crate::error::{Error, Result};
use crate::model::adiabatic_point;
use crate::quad::simpson;
use crate::wave::Parity;

/// Distance over which the continuum envelope is matched at the grid edge.
pub const MATCH_LENGTH: f64 = 2.0;

/// An energy-normalized scattering state of `Vt_d` on `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumState {
    pub v: f64,
    pub energy: f64,
    pub parity: Parity,
    pub dx: f64,
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl ContinuumState {
    pub fn x_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dx
    }

    /// Local wave number on the lower curve.
    pub fn wave_number(&self, x: f64) -> f64 {
        (2.0 * (self.energy - adiabatic_point(x, self.v).vt_d)).sqrt()
    }

    /// WKB envelope `sqrt(psi^2 + (psi'/k)^2)` at node `i`.
    pub fn envelope(&self, i: usize) -> f64 {
        let k = self.wave_number(i as f64 * self.dx);
        (self.values[i].powi(2) + (self.slopes[i] / k).powi(2)).sqrt()
    }
}

/// Lower curve including its diagonal second-order term.
fn lower_curve(v: f64) -> impl Fn(f64) -> f64 {
    move |x| adiabatic_point(x, v).vt_d
}

/// Scattering state at `energy` with the given parity, integrated out to
/// `x_max` and scaled so that `sqrt(pi k) * envelope` averages to one over
/// the last [`MATCH_LENGTH`] units.
pub fn fgr_continuum_state(v: f64, energy: f64, parity: Parity, x_max: f64, dx: f64) -> Result<ContinuumState> {
    if !(x_max > MATCH_LENGTH + 1.0) {
        return Err(Error::Range(format!("continuum grid {x_max} too short to match the envelope")));
    }
    let shooter = ScalarShooter::new(lower_curve(v), x_max, dx);
    let mut values = Vec::with_capacity(shooter.steps() + 1);
    let mut slopes = Vec::with_capacity(shooter.steps() + 1);
    shooter.run(energy, parity_start(parity), |_, y, dy| {
        values.push(y);
        slopes.push(dy);
    });
    let mut state = ContinuumState { v, energy, parity, dx, values, slopes };
    let last = state.values.len() - 1;
    let first = last - (MATCH_LENGTH / dx).round() as usize;
    let pi = std::f64::consts::PI;
    let samples: Vec<f64> = (first..=last)
        .map(|i| state.envelope(i) * (pi * state.wave_number(i as f64 * dx)).sqrt())
        .collect();
    let mean = simpson(&samples, dx) / MATCH_LENGTH;
    let spread = samples.iter().map(|s| (s / mean - 1.0).abs()).fold(0.0, f64::max);
    if !(mean > 0.0) || spread > 1e-2 {
        return Err(Error::Range(format!("envelope not asymptotic near x = {x_max:.2} (spread {spread:.1e})")));
    }
    state.values.iter_mut().for_each(|y| *y /= mean);
    state.slopes.iter_mut().for_each(|y| *y /= mean);
    Ok(state)
}

/// Matrix-element densities at `x_i = i dx >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfDensities {
    pub m_a: Vec<f64>,
    pub m_b: Vec<f64>,
}

pub fn half_densities(bound: &BoundState, continuum: &ContinuumState) -> HalfDensities {
    assert!((bound.dx - continuum.dx).abs() < 1e-15 * bound.dx);
    let n = bound.values.len().min(continuum.values.len());
    let (m_a, m_b) = (0..n)
        .map(|i| {
            let p = adiabatic_point(i as f64 * bound.dx, bound.v);
            let d = continuum.values[i];
            (d * p.a_du * bound.slopes[i], d * p.b_du * bound.values[i])
        })
        .unzip();
    HalfDensities { m_a, m_b }
}

/// Full-line densities on `x_i = (i - n) dx` and the running integral from
/// the left edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FgrDensities {
    pub x: Vec<f64>,
    pub psi_u: Vec<f64>,
    pub psi_d: Vec<f64>,
    pub m_a: Vec<f64>,
    pub m_b: Vec<f64>,
    pub m_sigma: Vec<f64>,
    pub m_cum: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FgrOptions {
    /// Starting step.
    pub dx: f64,
    /// Relative change in `M` between halvings that counts as converged.
    pub tolerance: f64,
    /// Largest ratio between the starting and the final step.
    pub max_refinement: f64,
}

impl Default for FgrOptions {
    fn default() -> Self {
        Self { dx: 1e-3, tolerance: 5e-3, max_refinement: 128.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FgrResult {
    pub v: f64,
    pub nu: usize,
    pub w_fgr: f64,
    /// Transition matrix element, per square root of energy.
    pub m: f64,
    pub gamma: f64,
    pub tau: f64,
    /// Step at which `M` was accepted.
    pub dx: f64,
    /// Matrix elements at each step tried, coarsest first.
    pub history: Vec<(f64, f64)>,
    pub bound: BoundState,
    pub continuum: ContinuumState,
}

/// `M = int psi_d (B_du + A_du d/dx) psi_u dx` over the whole line.
///
/// When the parities differ the integrand is even and `M` is twice the
/// half-line integral; otherwise it is odd and `M` vanishes identically.
pub fn matrix_element(bound: &BoundState, continuum: &ContinuumState) -> f64 {
    if bound.parity == continuum.parity {
        let d = full_densities(bound, continuum);
        return simpson(&d.m_sigma, bound.dx);
    }
    let h = half_densities(bound, continuum);
    let sum: Vec<f64> = h.m_a.iter().zip(&h.m_b).map(|(a, b)| a + b).collect();
    2.0 * simpson(&sum, bound.dx)
}

/// Mirrors the half-line states onto the full symmetric grid.
pub fn full_densities(bound: &BoundState, continuum: &ContinuumState) -> FgrDensities {
    let h = half_densities(bound, continuum);
    let n = h.m_a.len() - 1;
    let dx = bound.dx;
    let pu = bound.parity.sign();
    let pd = continuum.parity.sign();
    // psi_u' has the opposite parity of psi_u; A is even and B is odd
    let (sa, sb) = (-pu * pd, -pu * pd);
    let mirror = |half: &[f64], sign: f64| -> Vec<f64> {
        half[1..=n].iter().rev().map(|v| sign * v).chain(half[..=n].iter().copied()).collect()
    };
    let x = (0..=2 * n).map(|i| (i as f64 - n as f64) * dx).collect();
    let psi_u = mirror(&bound.values[..=n], pu);
    let psi_d = mirror(&continuum.values[..=n], pd);
    let m_a = mirror(&h.m_a, sa);
    let m_b = mirror(&h.m_b, sb);
    let m_sigma: Vec<f64> = m_a.iter().zip(&m_b).map(|(a, b)| a + b).collect();
    let m_cum = crate::quad::cumulative(&m_sigma, dx);
    FgrDensities { x, psi_u, psi_d, m_a, m_b, m_sigma, m_cum }
}

fn evaluate(v: f64, nu: usize, dx: f64) -> Result<(BoundState, ContinuumState, f64)> {
    let bound = fgr_bound_state(v, nu, dx)?;
    let continuum = fgr_continuum_state(v, bound.energy, bound.parity.flip(), bound.x_max(), dx)?;
    let m = matrix_element(&bound, &continuum);
    Ok((bound, continuum, m))
}

/// Golden-rule lifetime `1 / (2 pi M^2)` of level `nu`, halving the step
/// until `M` is stable.
pub fn fgr_lifetime(v: f64, nu: usize, opts: &FgrOptions) -> Result<FgrResult> {
    let mut dx = opts.dx;
    let (_, _, mut m) = evaluate(v, nu, dx)?;
    let mut history = vec![(dx, m)];
    loop {
        if opts.dx / dx >= opts.max_refinement {
            return Err(Error::Precision(format!(
                "M did not settle to {:.1e} down to dx = {dx:.2e}: {history:?}",
                opts.tolerance
            )));
        }
        dx *= 0.5;
        let (bound, continuum, m_fine) = evaluate(v, nu, dx)?;
        history.push((dx, m_fine));
        if ((m_fine - m) / m_fine).abs() < opts.tolerance {
            let gamma = 2.0 * std::f64::consts::PI * m_fine * m_fine;
            return Ok(FgrResult {
                v,
                nu,
                w_fgr: bound.energy,
                m: m_fine,
                gamma,
                tau: gamma.recip(),
                dx,
                history,
                bound,
                continuum,
            });
        }
        m = m_fine;
    }
}
