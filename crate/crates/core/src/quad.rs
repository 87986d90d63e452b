//! Composite quadrature on uniform samples.

/// Composite Simpson over uniformly spaced samples.
///
/// An odd number of intervals is closed with a 3/8 panel on the last three.
pub fn simpson(samples: &[f64], h: f64) -> f64 {
    let n = samples.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (samples[0] + samples[1]),
        3 => h / 3.0 * (samples[0] + 4.0 * samples[1] + samples[2]),
        _ => {
            let intervals = n - 1;
            let (even_end, tail) = if intervals.is_multiple_of(2) { (n - 1, 0.0) } else {
                let s = &samples[n - 4..];
                (n - 4, 3.0 * h / 8.0 * (s[0] + 3.0 * s[1] + 3.0 * s[2] + s[3]))
            };
            if even_end == 0 {
                return tail;
            }
            let mut acc = samples[0] + samples[even_end];
            for (k, &y) in samples[1..even_end].iter().enumerate() {
                acc += if k % 2 == 0 { 4.0 * y } else { 2.0 * y };
            }
            acc * h / 3.0 + tail
        }
    }
}

/// Composite Simpson of `f` on `[a, b]` with `panels` double intervals.
pub fn simpson_fn(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 2 * panels.max(1);
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Running Simpson-consistent integral: entry `i` integrates samples `0..=i`.
///
/// Even nodes use pure Simpson panels; odd nodes add a three-point partial panel.
pub fn cumulative(samples: &[f64], h: f64) -> Vec<f64> {
    let n = samples.len();
    let mut out = vec![0.0; n];
    let mut i = 2;
    while i < n {
        let (a, b, c) = (samples[i - 2], samples[i - 1], samples[i]);
        out[i] = out[i - 2] + h / 3.0 * (a + 4.0 * b + c);
        // integral over the first half of the panel [x_{i-2}, x_{i-1}]
        out[i - 1] = out[i - 2] + h / 12.0 * (5.0 * a + 8.0 * b - c);
        i += 2;
    }
    if n >= 2 && n.is_multiple_of(2) {
        let (a, b, c) = (samples[n - 3], samples[n - 2], samples[n - 1]);
        out[n - 1] = out[n - 2] + h / 12.0 * (-a + 8.0 * b + 5.0 * c);
    }
    out
}
