use num_complex::Complex64;

use super::absorber::Absorber;
use super::operator::{hamiltonian, shifted};
use crate::error::{Error, Result};
use crate::wave::TwoComponentWave;

/// Allowed relative norm growth between two recorded samples.
pub const NORM_GROWTH_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationOptions {
    pub dt: f64,
    pub t_end: f64,
    /// Norm is sampled every this many steps.
    pub record_every: usize,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { dt: 1e-2, t_end: 60.0, record_every: 10 }
    }
}

/// Norm history of one propagation.
///
/// `loss_rate[k]` is the discrete `-dP/dt` over the step ending at
/// `times[k]`; `absorbed_rate[k]` is `2 sum W_abs |psi|^2 dx` evaluated at
/// that step's midpoint. Both are zero for the initial sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NormTrace {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    pub loss_rate: Vec<f64>,
    pub absorbed_rate: Vec<f64>,
}

fn norm(psi: &[Complex64], dx: f64) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * dx
}

fn interleave(wave: &TwoComponentWave<Complex64>) -> Vec<Complex64> {
    wave.first.iter().zip(&wave.second).flat_map(|(&a, &b)| [a, b]).collect()
}

/// Cuts each channel at its outermost node on either side and renormalizes.
///
/// The outgoing tail of the allowed channel and the growing residual of the
/// forbidden one both live beyond those nodes, so what remains is the bound
/// part of the resonance.
pub fn prepare_initial_state(wave: &TwoComponentWave<f64>) -> Result<TwoComponentWave<Complex64>> {
    let dx = wave.grid.dx();
    let center = wave.grid.center();
    let mut cut = wave.clone();
    for channel in [&mut cut.first, &mut cut.second] {
        let crosses = |i: usize, j: usize| channel[i] == 0.0 || channel[i] * channel[j] < 0.0;
        let right = (center..channel.len() - 1).rev().find(|&i| crosses(i + 1, i));
        let left = (1..=center).find(|&i| crosses(i - 1, i));
        let (Some(right), Some(left)) = (right, left) else {
            return Err(Error::Preparation("a channel has no node on one side".into()));
        };
        channel[right + 1..].iter_mut().for_each(|v| *v = 0.0);
        channel[..left].iter_mut().for_each(|v| *v = 0.0);
    }
    let total = cut.density().iter().sum::<f64>() * dx;
    if !(total > 0.0) {
        return Err(Error::Preparation("nothing left after cutting tails".into()));
    }
    Ok(cut.scaled(total.sqrt().recip()).to_complex())
}

/// Crank-Nicolson propagation of `state` with an absorbing layer.
///
/// The coupled two-channel system is solved implicitly as one band system per
/// step. The factorization is done once since the Hamiltonian is static, and
/// `(1 - isH)(1 + isH)^-1 = 2 (1 + isH)^-1 - 1` saves the explicit product.
pub fn propagate(
    state: &TwoComponentWave<Complex64>,
    v: f64,
    absorber: &Absorber,
    opts: &PropagationOptions,
) -> Result<NormTrace> {
    if !(opts.dt > 0.0) || !(opts.t_end > 0.0) || opts.record_every == 0 {
        return Err(Error::Domain(format!("invalid propagation options {opts:?}")));
    }
    let grid = state.grid;
    let dx = grid.dx();
    let h = hamiltonian(&grid, v, state.representation, absorber);
    let implicit = shifted(&h, 0.5 * opts.dt)
        .factor()
        .ok_or_else(|| Error::Domain("Crank-Nicolson matrix is singular".into()))?;
    let damping: Vec<f64> = grid.points().flat_map(|x| [absorber.rate(x); 2]).collect();

    let mut psi = interleave(state);
    let mut next = vec![Complex64::new(0.0, 0.0); psi.len()];
    let steps = (opts.t_end / opts.dt).round() as usize;
    let capacity = steps / opts.record_every + 1;
    let mut trace = NormTrace {
        times: Vec::with_capacity(capacity),
        norms: Vec::with_capacity(capacity),
        loss_rate: Vec::with_capacity(capacity),
        absorbed_rate: Vec::with_capacity(capacity),
    };
    let mut last = norm(&psi, dx);
    trace.times.push(0.0);
    trace.norms.push(last);
    trace.loss_rate.push(0.0);
    trace.absorbed_rate.push(0.0);

    for step in 1..=steps {
        next.iter_mut().zip(&psi).for_each(|(n, p)| *n = 2.0 * p);
        implicit.solve_in_place(&mut next);
        next.iter_mut().zip(&psi).for_each(|(n, p)| *n -= p);
        if step % opts.record_every == 0 || step == steps {
            let t = step as f64 * opts.dt;
            let before = norm(&psi, dx);
            let after = norm(&next, dx);
            let absorbed = 2.0
                * dx
                * psi.iter().zip(&next).zip(&damping).map(|((a, b), g)| g * (0.5 * (a + b)).norm_sqr()).sum::<f64>();
            if after > last * (1.0 + NORM_GROWTH_LIMIT) {
                return Err(Error::Instability { t, excess: after / last - 1.0 });
            }
            last = after;
            trace.times.push(t);
            trace.norms.push(after);
            trace.loss_rate.push((before - after) / opts.dt);
            trace.absorbed_rate.push(absorbed);
        }
        std::mem::swap(&mut psi, &mut next);
    }
    Ok(trace)
}
