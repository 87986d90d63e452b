//! Under-barrier actions on the upper adiabatic potential.
//!
//! `I(x) = int_{x_l}^{x} sqrt(2 (V_u(y) - W)) dy` measures how far a point sits
//! inside the classically forbidden region. It sets the norm boundary `x_k`
//! and the shooting range, since roundoff in outward shooting grows like
//! `eps * exp(I)`.

use crate::error::{Error, Result};
use crate::model::{turning_point, upper_potential};
use crate::optim::bisect;
use crate::quad::simpson_fn;

/// Action from the turning point `x_l` out to `x >= x_l`.
pub fn upper_action(v: f64, w: f64, x: f64) -> Result<f64> {
    let x_l = turning_point(v, w).ok_or(Error::NoTurningPoint { w, v })?;
    if x <= x_l {
        return Ok(0.0);
    }
    // x = x_l + t^2 removes the square-root endpoint singularity.
    let t_max = (x - x_l).sqrt();
    let integrand = |t: f64| {
        let y = x_l + t * t;
        2.0 * t * (2.0 * (upper_potential(y, v) - w)).max(0.0).sqrt()
    };
    let panels = ((t_max * 40.0).ceil() as usize).max(16);
    Ok(simpson_fn(integrand, 0.0, t_max, panels))
}

/// Position beyond `x_l` where the action reaches `target`.
pub fn action_point(v: f64, w: f64, target: f64) -> Result<f64> {
    let x_l = turning_point(v, w).ok_or(Error::NoTurningPoint { w, v })?;
    if target <= 0.0 {
        return Ok(x_l);
    }
    let mut hi = x_l + 1.0;
    while upper_action(v, w, hi)? < target {
        hi = x_l + 2.0 * (hi - x_l);
        if hi > 1e6 {
            return Err(Error::Range(format!("action {target} not reached")));
        }
    }
    bisect(|x| upper_action(v, w, x).unwrap_or(0.0) - target, x_l, hi, 1e-10)
        .ok_or_else(|| Error::Range("action bracket lost".into()))
}
