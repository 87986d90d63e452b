//! Locating metastable resonances.
//!
//! At each energy the slope solve fixes the decaying solution. A resonance
//! is where the outgoing tail is smallest relative to the bound part of the
//! upper channel. Measuring the bound part by the overlap with the matching
//! level of the decoupled upper well (rather than by the total norm, which
//! is dominated by the continuum away from narrow resonances) turns the
//! objective into a parabola `c ((W - W_nu)^2 + Gamma^2 / 4)` across the
//! level spacing. Minima are bracketed on a coarse scan and refined with
//! Brent's method.

use rayon::prelude::*;

use super::shoot::{HalfSolution, Shooter};
use super::slope::{solve_slope, SlopeSolution};
use crate::error::{Error, Result};
use crate::grid::DEFAULT_DX;
use crate::approx::{fgr_bound_state, BoundState};
use crate::model::{basis_transform, upper_potential, BasisDirection};
use crate::optim::brent;
use crate::quad::simpson;
use crate::semiclassical::action_point;
use crate::wave::{Parity, Representation};

/// How far the outward integration runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum XmaxPolicy {
    Fixed(f64),
    /// 13 at the weakest coupling and lowest states up to 19 at the strongest.
    Linear,
    /// Point where the under-barrier action from `x_l` reaches `target`, plus `margin`.
    Action { target: f64, margin: f64 },
}

impl Default for XmaxPolicy {
    fn default() -> Self {
        XmaxPolicy::Action { target: 24.0, margin: 0.0 }
    }
}

impl XmaxPolicy {
    pub fn x_max(&self, v: f64, w: f64) -> Result<f64> {
        match *self {
            XmaxPolicy::Fixed(x) => Ok(x),
            XmaxPolicy::Linear => {
                let f = 0.5 * ((v - 0.306) / (2.75 - 0.306) + (w - v) / 3.8);
                Ok(13.0 + 6.0 * f.clamp(0.0, 1.0))
            }
            XmaxPolicy::Action { target, margin } => Ok(action_point(v, w, target)? + margin),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Step for refined solutions.
    pub dx: f64,
    /// Step for the coarse energy scan.
    pub scan_dx: f64,
    pub x_max: XmaxPolicy,
    /// Scan covers `V < W <= V + window`.
    pub window: f64,
    /// Scan points per unit energy.
    pub scan_density: f64,
    /// Densification factor used to check that a bracket holds a single minimum.
    pub densify: usize,
    /// Absolute tolerance on `W_nu`.
    pub w_tol: f64,
    /// `x_B = x_max - x_b_offset`.
    pub x_b_offset: f64,
    /// Action defining the bound-region boundary `x_k`.
    pub r_k: f64,
    /// Energy width sharing one `x_max` during the scan.
    pub segment: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dx: DEFAULT_DX,
            scan_dx: 4e-3,
            x_max: XmaxPolicy::default(),
            window: 3.65,
            scan_density: 400.0,
            densify: 10,
            w_tol: 1e-12,
            x_b_offset: 1.0,
            r_k: 3.0,
            segment: 0.25,
        }
    }
}

/// Potential seen by the outgoing channel far out.
pub fn outgoing_potential(representation: Representation, v: f64, x: f64) -> f64 {
    match representation {
        Representation::Diabatic => -0.5 * x,
        Representation::Adiabatic => -upper_potential(x, v),
    }
}

/// `P0 = int_{-x_k}^{x_k} (|psi_1|^2 + |psi_2|^2) dx` from the half solution.
pub fn bound_norm(solution: &HalfSolution, x_k: f64) -> Result<f64> {
    let i_k = (x_k / solution.dx).round() as usize;
    if i_k > solution.last_index() {
        return Err(Error::GridTooSmall { x_k, x_max: solution.x(solution.last_index()) });
    }
    let density: Vec<f64> = (0..=i_k).map(|i| solution.density(i)).collect();
    Ok(2.0 * simpson(&density, solution.dx))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailDiagnostics {
    /// Outgoing flux over bound norm, `k a^2 / P0`.
    pub flux_rate: f64,
    pub p0: f64,
    pub x_k: f64,
    pub x_b: f64,
    /// WKB amplitude of the outgoing channel at `x_B`.
    pub allowed_amp: f64,
}

pub fn tail_diagnostics(solution: &HalfSolution, x_b_offset: f64, r_k: f64) -> Result<TailDiagnostics> {
    let (v, w) = (solution.v, solution.w);
    let x_k = action_point(v, w, r_k)?;
    let p0 = bound_norm(solution, x_k)?;
    let i_b = solution.index_of(solution.x(solution.last_index()) - x_b_offset);
    let x_b = solution.x(i_b);
    if x_b <= x_k {
        return Err(Error::GridTooSmall { x_k, x_max: x_b });
    }
    let k = (2.0 * (w - outgoing_potential(solution.representation, v, x_b))).sqrt();
    let (psi, dpsi) = solution.allowed(i_b);
    let amp2 = psi * psi + (dpsi / k) * (dpsi / k);
    Ok(TailDiagnostics { flux_rate: k * amp2 / p0, p0, x_k, x_b, allowed_amp: amp2.sqrt() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceRecord {
    pub v: f64,
    pub nu: usize,
    pub parity: Parity,
    pub w_nu: f64,
    pub s_star: f64,
    pub tail_amp: f64,
    pub x_max: f64,
    pub dx: f64,
    pub representation: Representation,
    /// Objective at the minimum; approximates the flux decay rate.
    pub flux_rate: f64,
}

impl ResonanceRecord {
    /// Re-solves the stationary wave at the recorded energy and grid.
    pub fn solve(&self) -> Result<SlopeSolution> {
        let shooter = Shooter::new(self.v, self.representation, self.x_max, self.dx)?;
        solve_slope(&shooter, self.w_nu, self.parity)
    }
}

/// Projection of the upper-channel component onto a decoupled level, over `x >= 0`.
pub fn level_overlap(solution: &HalfSolution, level: &BoundState) -> f64 {
    debug_assert!((solution.dx - level.dx).abs() < 1e-15);
    let n = solution.states.len().min(level.values.len());
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let y = &solution.states[i];
            let upper = match solution.representation {
                Representation::Adiabatic => y[0],
                Representation::Diabatic => basis_transform((y[0], y[2]), BasisDirection::ToAdiabatic, solution.x(i), solution.v).0,
            };
            level.values[i] * upper
        })
        .collect();
    simpson(&samples, solution.dx)
}

/// Outgoing flux over the squared weight of `level` in the upper channel.
///
/// Off resonance that weight falls like `1/(W - W_nu)^2` across the level
/// spacing, so the objective is a parabola with vertex at `W_nu` however
/// narrow the resonance.
pub fn resonance_objective(solution: &HalfSolution, level: &BoundState, x_b_offset: f64) -> f64 {
    let i_b = solution.index_of(solution.x(solution.last_index()) - x_b_offset);
    let x_b = solution.x(i_b);
    let k = (2.0 * (solution.w - outgoing_potential(solution.representation, solution.v, x_b))).sqrt();
    let (psi, dpsi) = solution.allowed(i_b);
    let weight = 2.0 * level_overlap(solution, level);
    k * (psi * psi + (dpsi / k) * (dpsi / k)) / (weight * weight)
}

fn objective(shooter: &Shooter, w: f64, level: &BoundState, opts: &SolverOptions) -> f64 {
    solve_slope(shooter, w, level.parity)
        .map(|s| resonance_objective(&s.solution, level, opts.x_b_offset))
        .ok()
        .filter(|f| f.is_finite())
        .unwrap_or(f64::NAN)
}

fn local_minima(values: &[f64]) -> Vec<usize> {
    (1..values.len().saturating_sub(1))
        .filter(|&j| {
            let (a, b, c) = (values[j - 1], values[j], values[j + 1]);
            a.is_finite() && b.is_finite() && c.is_finite() && b < a && b <= c
        })
        .collect()
}

/// Decoupled upper-well levels with energy below `w_top`.
pub fn decoupled_levels(v: f64, w_top: f64, dx: f64) -> Result<Vec<BoundState>> {
    let mut levels = Vec::new();
    loop {
        let level = fgr_bound_state(v, levels.len(), dx)?;
        if level.energy > w_top {
            return Ok(levels);
        }
        levels.push(level);
    }
}

/// Energies searched for the resonance tied to a decoupled level at `e`.
fn search_window(e: f64, v: f64) -> (f64, f64) {
    ((e - RESONANCE_SEARCH_BELOW).max(v), e + RESONANCE_SEARCH_ABOVE)
}

/// Coupling shifts resonances by less than this below or above their decoupled level.
const RESONANCE_SEARCH_BELOW: f64 = 0.05;
const RESONANCE_SEARCH_ABOVE: f64 = 0.12;

/// Scan brackets `(W_lo, W_hi)` around the resonance minimum for each level of one parity.
pub fn scan_parity(
    v: f64,
    representation: Representation,
    parity: Parity,
    levels: &[BoundState],
    opts: &SolverOptions,
) -> Result<Vec<(usize, (f64, f64))>> {
    let levels: Vec<&BoundState> = levels.iter().filter(|l| l.parity == parity).collect();
    let Some(top_level) = levels.last() else { return Ok(Vec::new()) };
    let step = 1.0 / opts.scan_density;
    let lo = v;
    let hi = top_level.energy + RESONANCE_SEARCH_ABOVE;
    let count = ((hi - lo) / step).ceil() as usize;
    let energies: Vec<f64> = (0..=count).map(|j| lo + (j as f64 + 0.5) * step).collect();
    let mut values = vec![vec![f64::NAN; energies.len()]; levels.len()];
    let per_segment = ((opts.segment / step).round() as usize).max(1);
    let mut first = 0;
    while first < energies.len() {
        let last = (first + per_segment).min(energies.len()) - 1;
        let x_max = opts.x_max.x_max(v, energies[last])?;
        let shooter = Shooter::new(v, representation, x_max, opts.scan_dx)?;
        let rows: Vec<Vec<f64>> = energies[first..=last]
            .par_iter()
            .map(|&w| match solve_slope(&shooter, w, parity) {
                Ok(s) => levels.iter().map(|l| resonance_objective(&s.solution, l, opts.x_b_offset)).collect(),
                Err(_) => vec![f64::NAN; levels.len()],
            })
            .collect();
        for (j, row) in rows.into_iter().enumerate() {
            for (k, f) in row.into_iter().enumerate() {
                values[k][first + j] = f;
            }
        }
        first = last + 1;
    }
    levels
        .iter()
        .zip(&values)
        .map(|(level, f)| {
            let (a, b) = search_window(level.energy, v);
            let best = local_minima(f)
                .into_iter()
                .filter(|&j| energies[j] >= a && energies[j] <= b)
                .min_by(|&p, &q| f[p].total_cmp(&f[q]))
                .ok_or(Error::Bracket { lo: a, hi: b, count: 0 })?;
            Ok((level.nu, (energies[best - 1], energies[best + 1])))
        })
        .collect()
}

/// Locates resonance `nu` inside `bracket`, which must hold a single objective minimum.
pub fn refine_resonance(
    v: f64,
    nu: usize,
    bracket: (f64, f64),
    representation: Representation,
    opts: &SolverOptions,
) -> Result<ResonanceRecord> {
    let parity = Parity::of_index(nu);
    let (lo, hi) = bracket;
    let x_max = opts.x_max.x_max(v, hi)?;
    let coarse = Shooter::new(v, representation, x_max, opts.scan_dx)?;
    let coarse_level = fgr_bound_state(v, nu, opts.scan_dx)?;
    let n = 2 * opts.densify.max(2);
    let energies: Vec<f64> = (0..=n).map(|j| lo + (hi - lo) * j as f64 / n as f64).collect();
    let values: Vec<f64> = energies.par_iter().map(|&w| objective(&coarse, w, &coarse_level, opts)).collect();
    let minima = local_minima(&values);
    if minima.len() != 1 {
        return Err(Error::Bracket { lo, hi, count: minima.len() });
    }
    let j = minima[0];
    let (a, b) = (energies[j - 1], energies[j + 1]);
    let fine = Shooter::new(v, representation, x_max, opts.dx)?;
    let level = fgr_bound_state(v, nu, opts.dx)?;
    let found = brent(
        |w| {
            let f = objective(&fine, w, &level, opts);
            if f.is_nan() { f64::MAX } else { f }
        },
        a,
        b,
        opts.w_tol,
        200,
    );
    if !(found.x > a && found.x < b) || found.f == f64::MAX {
        return Err(Error::Convergence(format!("resonance {nu} refinement left [{a}, {b}]")));
    }
    let sol = solve_slope(&fine, found.x, parity)?;
    let diag = tail_diagnostics(&sol.solution, opts.x_b_offset, opts.r_k)?;
    Ok(ResonanceRecord {
        v,
        nu,
        parity,
        w_nu: found.x,
        s_star: sol.s_star,
        tail_amp: sol.tail_amp,
        x_max: fine.x_max(),
        dx: opts.dx,
        representation,
        flux_rate: diag.flux_rate,
    })
}

/// Assigns vibrational indices and checks that parities alternate from even.
pub fn assign_indices(mut records: Vec<ResonanceRecord>) -> Result<Vec<ResonanceRecord>> {
    records.sort_by(|a, b| a.w_nu.total_cmp(&b.w_nu));
    for (nu, r) in records.iter_mut().enumerate() {
        if r.parity != Parity::of_index(nu) {
            return Err(Error::MissedAlternation { w: r.w_nu });
        }
        r.nu = nu;
    }
    Ok(records)
}

/// All resonances with `V < W <= V + window`, both parities.
pub fn scan_resonances(v: f64, representation: Representation, opts: &SolverOptions) -> Result<Vec<ResonanceRecord>> {
    let levels = decoupled_levels(v, v + opts.window + RESONANCE_SEARCH_BELOW, opts.scan_dx)?;
    let mut brackets = Vec::new();
    for parity in [Parity::Even, Parity::Odd] {
        brackets.extend(scan_parity(v, representation, parity, &levels, opts)?);
    }
    let records = brackets
        .into_iter()
        .map(|(nu, bracket)| refine_resonance(v, nu, bracket, representation, opts))
        .collect::<Result<Vec<_>>>()?;
    let inside = records.into_iter().filter(|r| r.w_nu > v && r.w_nu <= v + opts.window).collect();
    assign_indices(inside)
}

/// Refines resonances in `representation` starting from energies found in another one.
pub fn transfer_resonances(
    seeds: &[ResonanceRecord],
    representation: Representation,
    opts: &SolverOptions,
) -> Result<Vec<ResonanceRecord>> {
    let half = 1.0 / opts.scan_density;
    let records = seeds
        .iter()
        .map(|s| refine_resonance(s.v, s.nu, (s.w_nu - half, s.w_nu + half), representation, opts))
        .collect::<Result<Vec<_>>>()?;
    assign_indices(records)
}
