//! Derivative-free one-dimensional minimizers.

const GOLDEN: f64 = 0.381_966_011_250_105_1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub f: f64,
    pub evaluations: usize,
}

/// Golden-section search on `[a, b]`; stops once the bracket is below `tol`.
pub fn golden_section(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, tol: f64) -> Minimum {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut c = a + GOLDEN * (b - a);
    let mut d = b - GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut evaluations = 2;
    while b - a > tol && evaluations < 500 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = a + GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = b - GOLDEN * (b - a);
            fd = f(d);
        }
        evaluations += 1;
    }
    if fc <= fd {
        Minimum { x: c, f: fc, evaluations }
    } else {
        Minimum { x: d, f: fd, evaluations }
    }
}

/// Brent's parabolic-interpolation minimizer on `[a, b]`.
///
/// `x_tol` is absolute; the loop also stops after `max_iter` evaluations.
pub fn brent(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, x_tol: f64, max_iter: usize) -> Minimum {
    let (mut a, mut b) = if a <= b { (a, b) } else { (b, a) };
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut evaluations = 1;
    while evaluations < max_iter {
        let m = 0.5 * (a + b);
        let tol1 = x_tol + 1e-15 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let e_prev = e;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x < m { b - x } else { a - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = f(u);
        evaluations += 1;
        if fu <= fx {
            if u < x {
                b = x;
            } else {
                a = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }
    Minimum { x, f: fx, evaluations }
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (b - a).abs() < tol {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}
