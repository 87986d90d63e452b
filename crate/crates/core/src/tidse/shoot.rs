//! Outward RK4 integration of the coupled second-order channel equations.
//!
//! Both representations share one first-order form. With `y = (f, f', g, g')`
//! for the channel pair `(first, second)`:
//!
//! ```text
//! f'' = p_f f + q_f g + r_f g'
//! g'' = p_g g + q_g f + r_g f'
//! ```
//!
//! Diabatic: `p = 2(-/+ x/2 - W)`, `q = 2V`, `r = 0`.
//! Adiabatic: `p = 2(Vt - W)`, `q_f = -2B_du`, `r_f = -2A_du`, `q_g = 2B_du`, `r_g = 2A_du`.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::adiabatic_point;
use crate::wave::{Parity, Representation, TwoComponentWave};

/// Amplitudes beyond this trigger a joint rescale of both basis solutions.
pub const DIVERGENCE_GUARD: f64 = 1e12;

type State = [f64; 4];

/// W-independent coefficients `[p_f + 2W, q_f, r_f, p_g + 2W, q_g, r_g]`.
type Coef = [f64; 6];

#[inline(always)]
fn rhs(c: &Coef, two_w: f64, y: &State) -> State {
    [
        y[1],
        (c[0] - two_w) * y[0] + c[1] * y[2] + c[2] * y[3],
        y[3],
        (c[3] - two_w) * y[2] + c[4] * y[0] + c[5] * y[1],
    ]
}

#[inline(always)]
fn axpy(y: &State, h: f64, k: &State) -> State {
    [y[0] + h * k[0], y[1] + h * k[1], y[2] + h * k[2], y[3] + h * k[3]]
}

/// Precomputed coefficients for one `(V, representation, x_max, dx)`.
///
/// Holds the half-step table on `x >= 0`; reuse it for every energy.
#[derive(Debug, Clone)]
pub struct Shooter {
    v: f64,
    representation: Representation,
    dx: f64,
    steps: usize,
    table: Vec<Coef>,
}

impl Shooter {
    pub fn new(v: f64, representation: Representation, x_max: f64, dx: f64) -> Result<Self> {
        if !(v >= 0.0) {
            return Err(Error::Domain(format!("coupling must be non-negative, got {v}")));
        }
        let grid = Grid::new(x_max, dx)?;
        let steps = grid.half_steps();
        let h = 0.5 * dx;
        let table = (0..=2 * steps)
            .map(|j| {
                let x = j as f64 * h;
                match representation {
                    Representation::Diabatic => [-x, 2.0 * v, 0.0, x, 2.0 * v, 0.0],
                    Representation::Adiabatic => {
                        if v == 0.0 {
                            // decoupled limit: the adiabatic basis is discontinuous at x = 0
                            return [x.abs(), 0.0, 0.0, -x.abs(), 0.0, 0.0];
                        }
                        let p = adiabatic_point(x, v);
                        [2.0 * p.vt_u, -2.0 * p.b_du, -2.0 * p.a_du, 2.0 * p.vt_d, 2.0 * p.b_du, 2.0 * p.a_du]
                    }
                }
            })
            .collect();
        Ok(Self { v, representation, dx, steps, table })
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn x_max(&self) -> f64 {
        self.steps as f64 * self.dx
    }

    pub fn grid(&self) -> Grid {
        Grid::from_steps(self.steps, self.dx)
    }

    /// Initial vectors `(base, slope part)` at `x = 0`; the physical start is `base + s * part`.
    pub fn initial_conditions(&self, parity: Parity) -> (State, State) {
        match (self.representation, parity) {
            (Representation::Diabatic, Parity::Even) => ([1.0, 0.0, 1.0, 0.0], [0.0, -1.0, 0.0, 1.0]),
            (Representation::Diabatic, Parity::Odd) => ([1.0, 0.0, -1.0, 0.0], [0.0, 1.0, 0.0, 1.0]),
            (Representation::Adiabatic, Parity::Even) => ([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]),
            (Representation::Adiabatic, Parity::Odd) => ([0.0, 0.0, 1.0, 0.0], [0.0, 1.0, 0.0, 0.0]),
        }
    }

    /// Integrates the two independent solutions that span each parity sector.
    pub fn basis(&self, w: f64, parity: Parity) -> Result<BasisPair> {
        let (a0, b0) = self.initial_conditions(parity);
        let two_w = 2.0 * w;
        let h = self.dx;
        let mut a = a0;
        let mut b = b0;
        let mut states = Vec::with_capacity(self.steps + 1);
        states.push((a, b));
        for i in 0..self.steps {
            let (c0, c1, c2) = (&self.table[2 * i], &self.table[2 * i + 1], &self.table[2 * i + 2]);
            a = rk4_step(c0, c1, c2, two_w, h, &a);
            b = rk4_step(c0, c1, c2, two_w, h, &b);
            let peak = a.iter().chain(b.iter()).fold(0.0f64, |m, v| m.max(v.abs()));
            if !peak.is_finite() {
                return Err(Error::Truncated { x_reached: i as f64 * h });
            }
            if peak > DIVERGENCE_GUARD {
                // A common factor leaves every ratio of the two solutions intact.
                let scale = peak.recip();
                for (sa, sb) in states.iter_mut() {
                    sa.iter_mut().chain(sb.iter_mut()).for_each(|v| *v *= scale);
                }
                a.iter_mut().chain(b.iter_mut()).for_each(|v| *v *= scale);
            }
            states.push((a, b));
        }
        Ok(BasisPair { v: self.v, w, representation: self.representation, parity, dx: self.dx, states })
    }
}

#[inline(always)]
fn rk4_step(c0: &Coef, c1: &Coef, c2: &Coef, two_w: f64, h: f64, y: &State) -> State {
    let k1 = rhs(c0, two_w, y);
    let k2 = rhs(c1, two_w, &axpy(y, 0.5 * h, &k1));
    let k3 = rhs(c1, two_w, &axpy(y, 0.5 * h, &k2));
    let k4 = rhs(c2, two_w, &axpy(y, h, &k3));
    let s = h / 6.0;
    [
        y[0] + s * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        y[1] + s * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        y[2] + s * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        y[3] + s * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
    ]
}

/// Two linearly independent solutions of one parity sector on `x >= 0`.
#[derive(Debug, Clone)]
pub struct BasisPair {
    pub v: f64,
    pub w: f64,
    pub representation: Representation,
    pub parity: Parity,
    pub dx: f64,
    /// `(base, slope part)` states at nodes `x_i = i dx`.
    pub states: Vec<(State, State)>,
}

impl BasisPair {
    /// Index of `y` holding the channel that must decay at large `x`.
    pub fn forbidden_index(&self) -> usize {
        match self.representation {
            Representation::Diabatic => 2,
            Representation::Adiabatic => 0,
        }
    }

    pub fn combine(&self, ca: f64, cb: f64) -> HalfSolution {
        HalfSolution {
            v: self.v,
            w: self.w,
            representation: self.representation,
            parity: self.parity,
            dx: self.dx,
            states: self.states.iter().map(|(a, b)| axpy(&a.map(|e| e * ca), cb, b)).collect(),
        }
    }
}

/// A single solution on `x >= 0` including first derivatives.
#[derive(Debug, Clone)]
pub struct HalfSolution {
    pub v: f64,
    pub w: f64,
    pub representation: Representation,
    pub parity: Parity,
    pub dx: f64,
    /// `(first, first', second, second')` at nodes `x_i = i dx`.
    pub states: Vec<State>,
}

impl HalfSolution {
    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn last_index(&self) -> usize {
        self.states.len() - 1
    }

    pub fn index_of(&self, x: f64) -> usize {
        ((x / self.dx).round().max(0.0) as usize).min(self.last_index())
    }

    /// Value and slope of the outgoing channel at node `i`.
    pub fn allowed(&self, i: usize) -> (f64, f64) {
        let y = &self.states[i];
        match self.representation {
            Representation::Diabatic => (y[0], y[1]),
            Representation::Adiabatic => (y[2], y[3]),
        }
    }

    pub fn forbidden(&self, i: usize) -> (f64, f64) {
        let y = &self.states[i];
        match self.representation {
            Representation::Diabatic => (y[2], y[3]),
            Representation::Adiabatic => (y[0], y[1]),
        }
    }

    pub fn density(&self, i: usize) -> f64 {
        let y = &self.states[i];
        y[0] * y[0] + y[2] * y[2]
    }

    pub fn scale(&mut self, c: f64) {
        for y in &mut self.states {
            *y = y.map(|e| e * c);
        }
    }

    /// Full symmetric-grid wave from the parity relations.
    ///
    /// Diabatic: `psi_2(-x) = +-psi_1(x)`. Adiabatic: `psi_u` carries the
    /// sector parity and `psi_d` the opposite one.
    pub fn to_wave(&self) -> TwoComponentWave<f64> {
        let n = self.last_index();
        let p = self.parity.sign();
        let mut first = vec![0.0; 2 * n + 1];
        let mut second = vec![0.0; 2 * n + 1];
        for (i, y) in self.states.iter().enumerate() {
            first[n + i] = y[0];
            second[n + i] = y[2];
            match self.representation {
                Representation::Diabatic => {
                    first[n - i] = p * y[2];
                    second[n - i] = p * y[0];
                }
                Representation::Adiabatic => {
                    first[n - i] = p * y[0];
                    second[n - i] = -p * y[2];
                }
            }
        }
        TwoComponentWave {
            grid: Grid::from_steps(n.max(1), self.dx),
            first,
            second,
            representation: self.representation,
            parity: self.parity,
        }
    }
}
