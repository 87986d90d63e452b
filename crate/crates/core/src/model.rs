//! Diabatic and adiabatic pictures of the two-level crossing.
//!
//! The diabatic potential matrix is `[[-x/2, V], [V, x/2]]`. Its eigenvectors
//! are `|u> = (cos t, sin t)` and `|d> = (-sin t, cos t)` with the mixing angle
//! `t(x) = atan2(V, -x/2) / 2`, which rises smoothly from 0 at `x -> -inf`
//! through `pi/4` at the crossing to `pi/2` at `x -> +inf`. All couplings
//! follow from derivatives of `t`.

/// Adiabatic energies and nonadiabatic couplings at one position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticPoint {
    pub x: f64,
    pub v_u: f64,
    pub v_d: f64,
    pub theta: f64,
    /// First-order coupling `A_du = -<d|d/dx|u>`.
    pub a_du: f64,
    /// Second-order coupling `B_du = -1/2 <d|d2/dx2|u>`.
    pub b_du: f64,
    pub b_uu: f64,
    pub b_dd: f64,
    /// Potential energy curves including the diagonal second-order terms.
    pub vt_u: f64,
    pub vt_d: f64,
}

impl AdiabaticPoint {
    pub fn a_ud(&self) -> f64 {
        -self.a_du
    }

    pub fn b_ud(&self) -> f64 {
        -self.b_du
    }
}

pub fn mixing_angle(x: f64, v: f64) -> f64 {
    0.5 * v.atan2(-0.5 * x)
}

/// `V_u = sqrt(x^2/4 + V^2)`.
pub fn upper_potential(x: f64, v: f64) -> f64 {
    (0.25 * x * x + v * v).sqrt()
}

pub fn adiabatic_point(x: f64, v: f64) -> AdiabaticPoint {
    let v_u = upper_potential(x, v);
    let denom = x * x + 4.0 * v * v;
    let dtheta = v / denom;
    let d2theta = -2.0 * x * v / (denom * denom);
    let b_diag = 0.5 * dtheta * dtheta;
    AdiabaticPoint {
        x,
        v_u,
        v_d: -v_u,
        theta: mixing_angle(x, v),
        a_du: -dtheta,
        b_du: -0.5 * d2theta,
        b_uu: b_diag,
        b_dd: b_diag,
        vt_u: v_u + b_diag,
        vt_d: -v_u + b_diag,
    }
}

/// Harmonic angular frequency of `V_u` about its minimum, `1 / (2 sqrt(V))`.
pub fn harmonic_frequency(v: f64) -> f64 {
    0.5 / v.sqrt()
}

/// Positive classical turning point on `V_u` at energy `w`, if `w > V`.
pub fn turning_point(v: f64, w: f64) -> Option<f64> {
    (w > v).then(|| 2.0 * (w * w - v * v).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisDirection {
    ToDiabatic,
    ToAdiabatic,
}

/// Rotates a component pair between `(psi_u, psi_d)` and `(psi_1, psi_2)`.
pub fn basis_transform<T>(pair: (T, T), direction: BasisDirection, x: f64, v: f64) -> (T, T)
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let (s, c) = mixing_angle(x, v).sin_cos();
    let (a, b) = pair;
    match direction {
        BasisDirection::ToDiabatic => (a * c - b * s, a * s + b * c),
        BasisDirection::ToAdiabatic => (a * c + b * s, b * c - a * s),
    }
}
