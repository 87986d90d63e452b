//! Finite-difference Hamiltonian on the interleaved layout
//! `[c1(x_0), c2(x_0), c1(x_1), c2(x_1), ...]`, which keeps every coupling
//! within three diagonals of the main one.

use num_complex::Complex64;

use super::absorber::Absorber;
use super::banded::BandMatrix;
use crate::grid::Grid;
use crate::model::adiabatic_point;
use crate::wave::Representation;

pub const BANDWIDTH: usize = 3;

/// Real symmetric Hamiltonian minus `i` times the absorber on both channels.
///
/// In the adiabatic picture the derivative coupling `B_du + A_du d/dx` equals
/// `(A d/dx + d/dx A) / 2` because `A' = 2 B`. Centred differencing of that
/// symmetric form gives an exactly antisymmetric real block, so the discrete
/// Hamiltonian stays Hermitian.
pub fn hamiltonian(grid: &Grid, v: f64, representation: Representation, absorber: &Absorber) -> BandMatrix {
    let n = grid.len();
    let dx = grid.dx();
    let kinetic_diag = 1.0 / (dx * dx);
    let kinetic_off = -0.5 / (dx * dx);
    let re = |a: f64| Complex64::new(a, 0.0);
    let mut h = BandMatrix::zeros(2 * n, BANDWIDTH, BANDWIDTH);

    let derivative_coupling: Vec<f64> = match representation {
        Representation::Adiabatic => grid.points().map(|x| adiabatic_point(x, v).a_du).collect(),
        Representation::Diabatic => Vec::new(),
    };

    for i in 0..n {
        let x = grid.x(i);
        let (p1, p2, local) = match representation {
            Representation::Diabatic => (-0.5 * x, 0.5 * x, v),
            Representation::Adiabatic => {
                let p = adiabatic_point(x, v);
                (p.vt_u, p.vt_d, 0.0)
            }
        };
        let damp = Complex64::new(0.0, -absorber.rate(x));
        let (a, b) = (2 * i, 2 * i + 1);
        h.set(a, a, re(kinetic_diag + p1) + damp);
        h.set(b, b, re(kinetic_diag + p2) + damp);
        if local != 0.0 {
            h.set(a, b, re(local));
            h.set(b, a, re(local));
        }
        if i + 1 < n {
            h.set(a, a + 2, re(kinetic_off));
            h.set(a + 2, a, re(kinetic_off));
            h.set(b, b + 2, re(kinetic_off));
            h.set(b + 2, b, re(kinetic_off));
            if representation == Representation::Adiabatic {
                // second-channel row, first-channel column, one node apart
                let k = (derivative_coupling[i] + derivative_coupling[i + 1]) / (4.0 * dx);
                h.set(b, a + 2, re(k));
                h.set(a + 2, b, re(k));
                h.set(b + 2, a, re(-k));
                h.set(a, b + 2, re(-k));
            }
        }
    }
    h
}

/// `1 + i s H` for a complex band matrix `H`.
pub fn shifted(h: &BandMatrix, s: f64) -> BandMatrix {
    let n = h.size();
    let mut m = BandMatrix::zeros(n, BANDWIDTH, BANDWIDTH);
    let is = Complex64::new(0.0, s);
    for i in 0..n {
        for j in i.saturating_sub(BANDWIDTH)..(i + BANDWIDTH + 1).min(n) {
            let one = if i == j { 1.0 } else { 0.0 };
            m.set(i, j, Complex64::new(one, 0.0) + is * h.get(i, j));
        }
    }
    m
}
