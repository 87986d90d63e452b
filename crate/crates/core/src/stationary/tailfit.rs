//! Local sinusoid fits to oscillating tails.

use crate::error::{Error, Result};
use crate::wave::TwoComponentWave;

/// `psi(x) ~ amplitude * cos(k x + phase)` around `x_p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailFit {
    pub x_p: f64,
    pub k: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl TailFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.amplitude * (self.k * x + self.phase).cos()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    First,
    Second,
    /// The channel carrying the outgoing wave.
    Allowed,
    Forbidden,
}

/// Three-point fit from samples at `x_p - dx`, `x_p`, `x_p + dx`.
///
/// `k = sqrt(|psi''/psi|)` and `a = sqrt(psi^2 + (psi'/k)^2)` with central differences.
pub fn fit_three(samples: [f64; 3], x_p: f64, dx: f64) -> Result<TailFit> {
    let [m, c, p] = samples;
    let scale = m.abs().max(c.abs()).max(p.abs());
    if !(c.abs() > 1e-12 * scale) || !c.is_finite() {
        return Err(Error::DegenerateFit { x: x_p });
    }
    let second = (p - 2.0 * c + m) / (dx * dx);
    let first = (p - m) / (2.0 * dx);
    let k = (second / c).abs().sqrt();
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::DegenerateFit { x: x_p });
    }
    let amplitude = (c * c + (first / k) * (first / k)).sqrt();
    let phase = (-first / k).atan2(c) - k * x_p;
    Ok(TailFit { x_p, k, amplitude, phase })
}

/// Nearest extremum at or below index `from`, searching toward smaller indices.
pub fn find_extremum(samples: &[f64], from: usize) -> Option<usize> {
    let top = from.min(samples.len().checked_sub(2)?);
    (1..=top).rev().find(|&i| {
        let (a, b, c) = (samples[i - 1], samples[i], samples[i + 1]);
        (b - a) * (c - b) <= 0.0 && b != 0.0
    })
}

/// Fits `component` at its last extremum before `near`.
pub fn tail_fit(wave: &TwoComponentWave<f64>, component: Component, near: f64) -> Result<TailFit> {
    let samples = match component {
        Component::First => &wave.first[..],
        Component::Second => &wave.second[..],
        Component::Allowed => wave.allowed(),
        Component::Forbidden => wave.forbidden(),
    };
    let from = wave.grid.index_of(near);
    let i = find_extremum(samples, from).ok_or(Error::NoExtremum { x: near })?;
    fit_three([samples[i - 1], samples[i], samples[i + 1]], wave.x(i), wave.grid.dx())
}
