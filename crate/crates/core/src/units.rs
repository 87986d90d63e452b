//! Scaled units.
//!
//! With particle mass `M`, differential slope `alpha` of the two diabats and
//! reduced Planck constant `hbar`, the natural scales are
//!
//! ```text
//! l0 = (hbar^2 / (M alpha))^(1/3)    w0 = hbar^2 / (M l0^2)
//! t0 = hbar / w0                     f0 = w0 / hbar
//! ```
//!
//! and the whole problem depends on the single number `V = V_p / w0`.

use crate::error::{Error, Result};

/// Length, energy, time and frequency units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScales {
    pub l0: f64,
    pub w0: f64,
    pub t0: f64,
    pub f0: f64,
}

impl UnitScales {
    pub const IDENTITY: UnitScales = UnitScales { l0: 1.0, w0: 1.0, t0: 1.0, f0: 1.0 };
}

/// Physical inputs in any consistent unit system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalInputs {
    pub mass: f64,
    pub alpha: f64,
    pub coupling: f64,
    pub hbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledParams {
    /// Dimensionless coupling, the adiabaticity parameter.
    pub v: f64,
    pub scales: UnitScales,
    pub physical: Option<PhysicalInputs>,
}

impl ScaledParams {
    /// Parameters given directly in scaled units.
    pub fn new(v: f64) -> Result<Self> {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("coupling V must be positive, got {v}")));
        }
        Ok(Self { v, scales: UnitScales::IDENTITY, physical: None })
    }

    pub fn time_to_physical(&self, t: f64) -> f64 {
        t * self.scales.t0
    }

    pub fn time_to_scaled(&self, t: f64) -> f64 {
        t / self.scales.t0
    }

    pub fn energy_to_physical(&self, w: f64) -> f64 {
        w * self.scales.w0
    }

    pub fn energy_to_scaled(&self, w: f64) -> f64 {
        w / self.scales.w0
    }

    pub fn length_to_physical(&self, x: f64) -> f64 {
        x * self.scales.l0
    }

    pub fn length_to_scaled(&self, x: f64) -> f64 {
        x / self.scales.l0
    }
}

/// Builds the scaled description from physical inputs.
pub fn scale_physical(mass: f64, alpha: f64, coupling: f64, hbar: f64) -> Result<ScaledParams> {
    for (name, value) in [("mass", mass), ("alpha", alpha), ("coupling", coupling), ("hbar", hbar)] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!("{name} must be positive and finite, got {value}")));
        }
    }
    let l0 = (hbar * hbar / (mass * alpha)).cbrt();
    let w0 = hbar * hbar / (mass * l0 * l0);
    let t0 = hbar / w0;
    let f0 = w0 / hbar;
    Ok(ScaledParams {
        v: coupling / w0,
        scales: UnitScales { l0, w0, t0, f0 },
        physical: Some(PhysicalInputs { mass, alpha, coupling, hbar }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn unit_inputs_collapse_scales() {
        let p = scale_physical(1.0, 1.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(p.scales.l0, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.scales.w0, 1.0, epsilon = 1e-15);
        assert_relative_eq!(p.v, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn steeper_slope() {
        let p = scale_physical(1.0, 8.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(p.scales.l0, 0.5, epsilon = 1e-14);
        assert_relative_eq!(p.scales.w0, 4.0, epsilon = 1e-13);
        assert_relative_eq!(p.v, 0.25, epsilon = 1e-14);
        assert_relative_eq!(p.scales.t0, 0.25, epsilon = 1e-14);
        assert_relative_eq!(p.scales.f0, 4.0, epsilon = 1e-13);
    }

    #[test]
    fn doubling_alpha_shrinks_length() {
        let a = scale_physical(2.3, 1.7, 0.4, 0.9).unwrap();
        let b = scale_physical(2.3, 3.4, 0.4, 0.9).unwrap();
        assert_relative_eq!(b.scales.l0 / a.scales.l0, 2f64.powf(-1.0 / 3.0), epsilon = 1e-14);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(matches!(scale_physical(0.0, 1.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(scale_physical(1.0, -1.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(ScaledParams::new(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn round_trip_is_identity() {
        let p = scale_physical(1.44e-25, 3.2e-30, 6.6e-30, 1.054_571_817e-34).unwrap();
        let back = p.energy_to_physical(p.v);
        assert_relative_eq!(back, 6.6e-30, max_relative = 1e-12);
        let tau = 1234.5;
        assert_relative_eq!(p.time_to_scaled(p.time_to_physical(tau)), tau, max_relative = 1e-12);
        assert_relative_eq!(p.length_to_scaled(p.length_to_physical(3.0)), 3.0, max_relative = 1e-12);
    }
}
