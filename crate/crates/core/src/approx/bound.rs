//! Bound states of the upper potential curve alone.
//!
//! Dropping the off-diagonal couplings leaves `-1/2 psi'' + Vt_u psi = E psi`
//! on a confining well. Its levels seed the resonance search and its states
//! enter the golden-rule matrix element.

use crate::error::{Error, Result};
use crate::model::adiabatic_point;
use crate::optim::bisect;
use crate::semiclassical::action_point;
use crate::wave::Parity;

/// Under-barrier action at the outer end of the bound-state grid.
const EDGE_ACTION: f64 = 24.0;

/// A unit-normalized level of the decoupled upper well on `x >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundState {
    pub v: f64,
    pub nu: usize,
    pub parity: Parity,
    pub energy: f64,
    pub dx: f64,
    /// Samples at `x_i = i dx`; the divergent tail is zeroed.
    pub values: Vec<f64>,
    pub slopes: Vec<f64>,
}

impl BoundState {
    pub fn x_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.dx
    }

    /// Value at `|x|`, with the parity applied for `x < 0`.
    pub fn at_index(&self, i: usize) -> f64 {
        self.values.get(i).copied().unwrap_or(0.0)
    }
}

/// Scalar RK4 on a single potential curve sampled at half steps.
pub(crate) struct ScalarShooter {
    pub dx: f64,
    /// `2 * potential` at `x = j dx / 2`.
    pub table: Vec<f64>,
}

impl ScalarShooter {
    pub fn new(potential: impl Fn(f64) -> f64, x_max: f64, dx: f64) -> Self {
        let steps = (x_max / dx).ceil() as usize;
        let table = (0..=2 * steps).map(|j| 2.0 * potential(0.5 * dx * j as f64)).collect();
        Self { dx, table }
    }

    pub fn steps(&self) -> usize {
        (self.table.len() - 1) / 2
    }

    /// Outward solution from `(psi, psi')` at `x = 0`.
    pub fn run(&self, e: f64, start: (f64, f64), mut visit: impl FnMut(usize, f64, f64)) {
        let two_e = 2.0 * e;
        let h = self.dx;
        let (mut y, mut dy) = start;
        visit(0, y, dy);
        for i in 0..self.steps() {
            let (p0, p1, p2) = (self.table[2 * i] - two_e, self.table[2 * i + 1] - two_e, self.table[2 * i + 2] - two_e);
            let k1 = (dy, p0 * y);
            let k2 = (dy + 0.5 * h * k1.1, p1 * (y + 0.5 * h * k1.0));
            let k3 = (dy + 0.5 * h * k2.1, p1 * (y + 0.5 * h * k2.0));
            let k4 = (dy + h * k3.1, p2 * (y + h * k3.0));
            y += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            dy += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            visit(i + 1, y, dy);
        }
    }

    /// Sign changes on `0 < x <= x_max`.
    pub fn nodes(&self, e: f64, start: (f64, f64)) -> usize {
        let mut count = 0;
        let mut prev = 0.0f64;
        self.run(e, start, |i, y, _| {
            if i > 0 && y != 0.0 {
                if prev != 0.0 && (y > 0.0) != (prev > 0.0) {
                    count += 1;
                }
                prev = y;
            }
        });
        count
    }
}

pub(crate) fn parity_start(parity: Parity) -> (f64, f64) {
    match parity {
        Parity::Even => (1.0, 0.0),
        Parity::Odd => (0.0, 1.0),
    }
}

/// Upper curve including its diagonal second-order term.
pub fn upper_curve(v: f64) -> impl Fn(f64) -> f64 {
    move |x| adiabatic_point(x, v).vt_u
}

/// Level `nu` of `-1/2 d^2/dx^2 + Vt_u` by node-count bisection.
pub fn fgr_bound_state(v: f64, nu: usize, dx: f64) -> Result<BoundState> {
    if !(v > 0.0) {
        return Err(Error::Domain(format!("coupling must be positive, got {v}")));
    }
    let parity = Parity::of_index(nu);
    let target_nodes = nu / 2;
    let start = parity_start(parity);
    // harmonic-ladder overestimate for the top of the search bracket
    let mut hi = v + (nu as f64 + 1.0) * 0.5 / v.sqrt() + 1.0;
    let x_max_for = |e: f64| action_point(v, e, EDGE_ACTION);
    let mut shooter = ScalarShooter::new(upper_curve(v), x_max_for(hi)?, dx);
    let mut expansions = 0;
    while shooter.nodes(hi, start) <= target_nodes {
        hi = v + 2.0 * (hi - v);
        shooter = ScalarShooter::new(upper_curve(v), x_max_for(hi)?, dx);
        expansions += 1;
        if expansions > 20 {
            return Err(Error::Convergence(format!("no level {nu} found below W = {hi}")));
        }
    }
    let lo = v;
    let energy = bisect(
        |e| if shooter.nodes(e, start) > target_nodes { 1.0 } else { -1.0 },
        lo,
        hi,
        1e-14 * hi.max(1.0),
    )
    .ok_or_else(|| Error::Convergence(format!("level {nu} bracket lost")))?;

    // regrid to this level's own range so the tail cut is well placed
    let shooter = ScalarShooter::new(upper_curve(v), x_max_for(energy)?, dx);
    let mut values = Vec::with_capacity(shooter.steps() + 1);
    let mut slopes = Vec::with_capacity(shooter.steps() + 1);
    shooter.run(energy, start, |_, y, dy| {
        values.push(y);
        slopes.push(dy);
    });
    // beyond the turning point the computed solution dips to its smallest
    // magnitude and then follows the growing branch; cut there
    let x_l = crate::model::turning_point(v, energy).unwrap_or(0.0);
    let i_l = ((x_l / dx).ceil() as usize).min(values.len() - 1);
    let cut = (i_l..values.len())
        .min_by(|&a, &b| values[a].abs().total_cmp(&values[b].abs()))
        .unwrap_or(values.len() - 1);
    for i in cut..values.len() {
        values[i] = 0.0;
        slopes[i] = 0.0;
    }
    let half: Vec<f64> = values.iter().map(|y| y * y).collect();
    let norm = (2.0 * crate::quad::simpson(&half, dx)).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Convergence(format!("level {nu} has degenerate norm")));
    }
    values.iter_mut().for_each(|y| *y /= norm);
    slopes.iter_mut().for_each(|y| *y /= norm);
    Ok(BoundState { v, nu, parity, energy, dx, values, slopes })
}
