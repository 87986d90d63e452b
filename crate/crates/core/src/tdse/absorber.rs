use crate::error::{Error, Result};
use crate::model::turning_point;
use crate::semiclassical::action_point;

/// Where the absorbing layer starts on each side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Onset {
    /// Fixed distance beyond the outer turning point on the upper curve.
    BeyondTurningPoint(f64),
    /// Point where the under-barrier action on the upper curve reaches this value.
    Action(f64),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberSpec {
    pub onset: Onset,
    /// Peak imaginary potential, reached at the grid edge.
    pub strength: f64,
}

impl Default for AbsorberSpec {
    fn default() -> Self {
        Self { onset: Onset::Action(8.0), strength: 10.0 }
    }
}

impl AbsorberSpec {
    pub fn place(&self, v: f64, w: f64, x_max: f64) -> Result<Absorber> {
        let onset = match self.onset {
            Onset::BeyondTurningPoint(d) => turning_point(v, w).ok_or(Error::NoTurningPoint { w, v })? + d,
            Onset::Action(target) => action_point(v, w, target)?,
            Onset::Fixed(x) => x,
        };
        let x_l = turning_point(v, w).ok_or(Error::NoTurningPoint { w, v })?;
        if !(onset > x_l && onset < x_max) {
            return Err(Error::Domain(format!(
                "absorber onset {onset:.3} must lie between the turning point {x_l:.3} and the grid edge {x_max:.3}"
            )));
        }
        if !(self.strength >= 0.0) {
            return Err(Error::Domain(format!("absorber strength must be non-negative, got {}", self.strength)));
        }
        Ok(Absorber { onset, strength: self.strength, x_max })
    }
}

/// Imaginary potential `-i strength cos^2(pi/2 (x_max - |x|) / (x_max - onset))`
/// for `|x| > onset`, zero inside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorber {
    pub onset: f64,
    pub strength: f64,
    pub x_max: f64,
}

impl Absorber {
    pub const NONE: Absorber = Absorber { onset: f64::INFINITY, strength: 0.0, x_max: f64::INFINITY };

    /// Magnitude of the (negative) imaginary potential at `x`.
    pub fn rate(&self, x: f64) -> f64 {
        let r = x.abs();
        if r <= self.onset {
            return 0.0;
        }
        let c = (std::f64::consts::FRAC_PI_2 * (self.x_max - r).max(0.0) / (self.x_max - self.onset)).cos();
        self.strength * c * c
    }
}
