//! Lifetimes from the energy derivative of the scattering phase.
//!
//! The outgoing channel at `x_B` behaves like `a cos(theta)` with local wave
//! number `k`, so `theta = atan(-psi'/(k psi))` modulo `pi`. Subtracting the
//! semiclassical background `phi0 = int_0^{x_B} sqrt(2 (W - V_out))` leaves a
//! curve that rises by `pi` across each resonance, with slope `2/Gamma` at
//! its center. The lifetime is `tau = (1/2) d(phi - phi0)/dW`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quad::simpson_fn;
use crate::tidse::{outgoing_potential, solve_slope, ResonanceRecord, Shooter};
use crate::wave::{Parity, Representation};

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCurve {
    pub representation: Representation,
    pub parity: Parity,
    pub x_b: f64,
    pub w: Vec<f64>,
    /// Unwrapped phase at `x_B`.
    pub phi: Vec<f64>,
    pub phi0: Vec<f64>,
}

impl PhaseCurve {
    /// Background-subtracted phase `phi - phi0`.
    pub fn relative(&self) -> Vec<f64> {
        self.phi.iter().zip(&self.phi0).map(|(a, b)| a - b).collect()
    }
}

/// Semiclassical background phase from the origin to `x_b`.
pub fn background_phase(representation: Representation, v: f64, w: f64, x_b: f64) -> f64 {
    let panels = ((x_b * 50.0).ceil() as usize).max(16);
    simpson_fn(|x| (2.0 * (w - outgoing_potential(representation, v, x))).max(0.0).sqrt(), 0.0, x_b, panels)
}

/// Phase modulo `pi` in `(-pi/2, pi/2]` at node `x_b` of the solution at energy `w`.
fn raw_phase(shooter: &Shooter, w: f64, parity: Parity, x_b: f64) -> Result<f64> {
    let sol = solve_slope(shooter, w, parity)?.solution;
    let i = sol.index_of(x_b);
    let x = sol.x(i);
    // the lower adiabatic curve is the outgoing channel's effective potential
    // in both pictures; the bare diabat misses the -V^2/x shift
    let k = (2.0 * (w - outgoing_potential(Representation::Adiabatic, sol.v, x))).sqrt();
    let (psi, dpsi) = sol.allowed(i);
    let theta = (-dpsi / k).atan2(psi);
    Ok(if theta > FRAC_PI_2 {
        theta - PI
    } else if theta <= -FRAC_PI_2 {
        theta + PI
    } else {
        theta
    })
}

/// Unwraps phases known modulo `pi` by choosing the nearest branch.
///
/// Fails when consecutive samples differ by more than `max_step` after unwrapping.
pub fn unwrap_mod_pi(raw: &[f64], w: &[f64], max_step: f64) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(raw.len());
    let mut offset = 0.0;
    for (j, &r) in raw.iter().enumerate() {
        if let Some(&prev) = out.last() {
            let prev: f64 = prev;
            let mut cur: f64 = r + offset;
            while cur - prev > FRAC_PI_2 {
                cur -= PI;
                offset -= PI;
            }
            while prev - cur > FRAC_PI_2 {
                cur += PI;
                offset += PI;
            }
            if (cur - prev).abs() > max_step {
                return Err(Error::Undersampled { w: w[j] });
            }
            out.push(cur);
        } else {
            out.push(r);
        }
    }
    Ok(out)
}

/// Phase curve over an explicit energy grid with a shared `x_max`.
pub fn phase_curve(
    v: f64,
    representation: Representation,
    parity: Parity,
    energies: &[f64],
    x_b: f64,
    x_max: f64,
    dx: f64,
) -> Result<PhaseCurve> {
    phase_curve_with(v, representation, parity, energies, x_b, x_max, dx, FRAC_PI_2)
}

#[allow(clippy::too_many_arguments)]
fn phase_curve_with(
    v: f64,
    representation: Representation,
    parity: Parity,
    energies: &[f64],
    x_b: f64,
    x_max: f64,
    dx: f64,
    max_step: f64,
) -> Result<PhaseCurve> {
    let shooter = Shooter::new(v, representation, x_max, dx)?;
    let raw = energies
        .par_iter()
        .map(|&w| raw_phase(&shooter, w, parity, x_b))
        .collect::<Result<Vec<_>>>()?;
    let phi = unwrap_mod_pi(&raw, energies, max_step)?;
    let phi0 = energies.iter().map(|&w| background_phase(representation, v, w, x_b)).collect();
    Ok(PhaseCurve { representation, parity, x_b, w: energies.to_vec(), phi, phi0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BwOptions {
    /// `x_B = x_max - x_b_offset`.
    pub x_b_offset: f64,
    /// Samples on each side of the center.
    pub half_points: usize,
    /// Samples per resonance width.
    pub per_width: f64,
    /// Background slope is read this many widths from the center.
    pub background_widths: f64,
    /// Flag when background over peak slope exceeds this.
    pub background_limit: f64,
    /// Largest phase change allowed between neighbouring samples.
    pub max_step: f64,
}

impl Default for BwOptions {
    fn default() -> Self {
        Self {
            x_b_offset: 1.0,
            half_points: 20,
            per_width: 20.0,
            background_widths: 6.0,
            background_limit: 0.1,
            max_step: FRAC_PI_4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BwLifetime {
    pub tau: f64,
    pub gamma: f64,
    /// Energy at the steepest point of the step.
    pub w_center: f64,
    pub peak_slope: f64,
    pub background_slope: f64,
    /// Background slope large compared to the resonance slope.
    pub background_flag: bool,
    pub curve: PhaseCurve,
}

fn five_point(f: &[f64], j: usize, h: f64) -> f64 {
    (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) / (12.0 * h)
}

/// Breit-Wigner lifetime on an adaptively placed uniform grid.
///
/// The grid starts from the flux width estimate of `record`, shrinks while
/// the step is undersampled, and recenters on the steepest sample.
pub fn lifetime_bw(record: &ResonanceRecord, opts: &BwOptions) -> Result<BwLifetime> {
    let (v, rep, parity) = (record.v, record.representation, record.parity);
    let x_b = record.x_max - opts.x_b_offset;
    let mut width = if record.flux_rate > 0.0 { 2.0 * record.flux_rate } else { 1e-3 };
    let mut center = record.w_nu;
    let n = opts.half_points.max(4);
    for _ in 0..12 {
        let h = width / opts.per_width;
        let energies: Vec<f64> = (0..=2 * n).map(|j| center + (j as f64 - n as f64) * h).collect();
        let curve = match phase_curve_with(v, rep, parity, &energies, x_b, record.x_max, record.dx, opts.max_step) {
            Ok(c) => c,
            Err(Error::Undersampled { .. }) => {
                width /= 8.0;
                continue;
            }
            Err(e) => return Err(e),
        };
        let rel = curve.relative();
        let slopes: Vec<f64> = (2..rel.len() - 2).map(|j| five_point(&rel, j, h)).collect();
        let (jmax, &peak) = slopes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .ok_or_else(|| Error::Unresolved("empty phase curve".into()))?;
        let jmax = jmax + 2;
        if peak <= 0.0 {
            return Err(Error::Unresolved(format!("no rising phase step near W = {center}")));
        }
        let gamma = 2.0 / peak;
        // the step must be covered by the grid and sampled finely enough
        if gamma < 0.5 * opts.per_width * h || jmax.abs_diff(n) > n / 4 {
            center = energies[jmax];
            width = gamma;
            continue;
        }
        let slope = five_point(&rel, n, h);
        let tau = 0.5 * slope;
        let background_slope = background_slope(record, gamma, opts)?;
        return Ok(BwLifetime {
            tau,
            gamma: 1.0 / tau,
            w_center: energies[jmax],
            peak_slope: peak,
            background_slope,
            background_flag: background_slope.abs() > opts.background_limit * peak,
            curve,
        });
    }
    Err(Error::Unresolved(format!("phase step at W = {} not resolved", record.w_nu)))
}

fn background_slope(record: &ResonanceRecord, gamma: f64, opts: &BwOptions) -> Result<f64> {
    let x_b = record.x_max - opts.x_b_offset;
    let offset = opts.background_widths * gamma;
    let h = gamma / opts.per_width;
    let mut slopes = Vec::new();
    for side in [-1.0, 1.0] {
        let c = record.w_nu + side * offset;
        let energies: Vec<f64> = (0..5).map(|j| c + (j as f64 - 2.0) * h).collect();
        let curve = phase_curve_with(
            record.v,
            record.representation,
            record.parity,
            &energies,
            x_b,
            record.x_max,
            record.dx,
            FRAC_PI_2,
        )?;
        slopes.push(five_point(&curve.relative(), 2, h));
    }
    Ok(0.5 * (slopes[0] + slopes[1]))
}

/// Rise of `phi - phi0` from `W_nu - span` to `W_nu + span`, on a grid
/// that is geometric in the distance from the center so narrow steps unwrap.
pub fn phase_step(record: &ResonanceRecord, gamma: f64, span: f64, x_b_offset: f64) -> Result<f64> {
    let mut offsets = vec![0.0];
    let mut d = gamma / 16.0;
    while d < span {
        offsets.push(d);
        d *= 1.5;
    }
    offsets.push(span);
    let mut energies: Vec<f64> = offsets.iter().rev().map(|o| record.w_nu - o).collect();
    energies.extend(offsets.iter().skip(1).map(|o| record.w_nu + o));
    let curve = phase_curve(
        record.v,
        record.representation,
        record.parity,
        &energies,
        record.x_max - x_b_offset,
        record.x_max,
        record.dx,
    )?;
    let rel = curve.relative();
    Ok(rel[rel.len() - 1] - rel[0])
}
