//! Choosing the free initial slope so the forbidden channel decays.
//!
//! For fixed energy the outward solutions of one parity sector form a
//! two-dimensional space spanned by the base and slope-part solutions. The
//! physical member has the smallest forbidden-channel amplitude across a
//! short window ending at `x_max`. Minimizing `|c_a A + c_b B|` over unit
//! `(c_a, c_b)` is the smallest-eigenvector problem of a 2x2 Gram matrix,
//! which, unlike a search over `s = c_b / c_a`, has no pole at `c_a = 0`.

use super::shoot::{BasisPair, HalfSolution, Shooter};
use crate::error::{Error, Result};
use crate::wave::Parity;

/// Width of the forbidden-tail window ending at `x_max`.
pub const SLOPE_WINDOW: f64 = 0.4;

#[derive(Debug, Clone)]
pub struct SlopeSolution {
    /// Converged slope `c_b / c_a`; infinite when the base solution drops out.
    pub s_star: f64,
    pub coefficients: (f64, f64),
    /// Root-mean-square forbidden amplitude in the window relative to the peak amplitude.
    pub tail_amp: f64,
    pub solution: HalfSolution,
}

fn window_start(pair: &BasisPair, window: f64) -> usize {
    let n = pair.states.len() - 1;
    n.saturating_sub((window / pair.dx).round() as usize)
}

/// Gram matrix `[[AA, AB], [AB, BB]]` of the forbidden channel in the window.
fn gram(pair: &BasisPair, window: f64) -> (f64, f64, f64) {
    let k = pair.forbidden_index();
    pair.states[window_start(pair, window)..]
        .iter()
        .fold((0.0, 0.0, 0.0), |(aa, ab, bb), (a, b)| (aa + a[k] * a[k], ab + a[k] * b[k], bb + b[k] * b[k]))
}

/// Unit minimizer of the quadratic form, with `c_a >= 0`.
fn min_eigenvector(aa: f64, ab: f64, bb: f64) -> (f64, f64) {
    let mean = 0.5 * (aa + bb);
    let half_gap = (0.25 * (aa - bb) * (aa - bb) + ab * ab).sqrt();
    let lam = mean - half_gap;
    // two candidate null vectors of (G - lam I); take the better-conditioned one
    let (u1, u2) = (ab, lam - aa);
    let (w1, w2) = (lam - bb, ab);
    let (mut ca, mut cb) = if u1.hypot(u2) >= w1.hypot(w2) { (u1, u2) } else { (w1, w2) };
    let norm = ca.hypot(cb);
    if norm == 0.0 {
        // G is a multiple of the identity; any direction is minimal
        return (1.0, 0.0);
    }
    ca /= norm;
    cb /= norm;
    if ca < 0.0 || (ca == 0.0 && cb < 0.0) {
        ca = -ca;
        cb = -cb;
    }
    (ca, cb)
}

pub fn slope_from_basis(pair: &BasisPair, window: f64) -> Result<SlopeSolution> {
    let (aa, ab, bb) = gram(pair, window);
    if !(aa.is_finite() && ab.is_finite() && bb.is_finite()) || aa + bb == 0.0 {
        return Err(Error::SlopeConvergence(format!("degenerate forbidden window at W = {}", pair.w)));
    }
    let (ca, cb) = min_eigenvector(aa, ab, bb);
    let solution = pair.combine(ca, cb);
    let k = pair.forbidden_index();
    let start = window_start(pair, window);
    let count = (solution.states.len() - start) as f64;
    let rms = (solution.states[start..].iter().map(|y| y[k] * y[k]).sum::<f64>() / count).sqrt();
    let peak = solution.states.iter().fold(0.0f64, |m, y| m.max(y[0].abs()).max(y[2].abs()));
    let s_star = if ca == 0.0 { f64::INFINITY } else { cb / ca };
    Ok(SlopeSolution { s_star, coefficients: (ca, cb), tail_amp: rms / peak, solution })
}

/// Integrates both basis solutions at energy `w` and picks the decaying member.
pub fn solve_slope(shooter: &Shooter, w: f64, parity: Parity) -> Result<SlopeSolution> {
    let pair = shooter.basis(w, parity)?;
    slope_from_basis(&pair, SLOPE_WINDOW)
}

/// Forbidden-window amplitude `|A + s B|` for an explicit slope.
pub fn forbidden_norm(pair: &BasisPair, s: f64, window: f64) -> f64 {
    let (aa, ab, bb) = gram(pair, window);
    (aa + 2.0 * s * ab + s * s * bb).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_eigenvector_of_diagonal() {
        let (ca, cb) = min_eigenvector(4.0, 0.0, 1.0);
        assert!(ca.abs() < 1e-15 && (cb.abs() - 1.0).abs() < 1e-15);
        let (ca, cb) = min_eigenvector(1.0, 0.0, 4.0);
        assert!((ca - 1.0).abs() < 1e-15 && cb.abs() < 1e-15);
    }

    #[test]
    fn min_eigenvector_of_rank_one() {
        // G = v v^T with v = (3, 4): null direction is (4, -3)/5
        let (ca, cb) = min_eigenvector(9.0, 12.0, 16.0);
        assert!((ca - 0.8).abs() < 1e-12 && (cb + 0.6).abs() < 1e-12);
    }
}
