use super::propagate::NormTrace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Window opens at this time, after the preparation transient. Fast
    /// decays lose their norm in steps, one per pass through the crossing,
    /// so the window must span several vibrations rather than start early.
    pub settle_time: f64,
    /// Window closes when the norm reaches this value or the trace ends.
    pub end_norm: f64,
    /// Largest rms residual of `ln P` accepted, relative to the fitted drop.
    pub max_residual: f64,
    /// Relative disagreement between the decay rates of the two window halves
    /// above which the fit is flagged as suspect of absorber reflections.
    pub reflection_tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { settle_time: 20.0, end_norm: 1e-4, max_residual: 0.05, reflection_tolerance: 0.05 }
    }
}

/// Exponential fit of a norm trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormFit {
    pub t_start: f64,
    pub t_end: f64,
    pub gamma: f64,
    pub tau: f64,
    /// rms of the `ln P` residual divided by the total fitted drop.
    pub residual: f64,
    /// Decay rates of the two halves of the window disagree.
    pub reflection_warning: bool,
}

/// Least-squares slope and intercept of `y` against `x`.
fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Fits `ln P(t)` by a straight line over the post-transient window.
pub fn lifetime_from_norm(trace: &NormTrace, opts: &FitOptions) -> Result<NormFit> {
    let first = trace
        .times
        .iter()
        .position(|&t| t >= opts.settle_time)
        .ok_or_else(|| Error::Range("norm trace ends before the fit window opens".into()))?;
    let last = trace.norms.iter().position(|&p| p <= opts.end_norm).unwrap_or(trace.norms.len() - 1);
    if last < first + 4 {
        return Err(Error::Range(format!("fit window holds only {} samples", last.saturating_sub(first) + 1)));
    }
    let t = &trace.times[first..=last];
    let log_p: Vec<f64> = trace.norms[first..=last].iter().map(|p| p.ln()).collect();
    let (slope, intercept) = line_fit(t, &log_p);
    if !(slope < 0.0) {
        return Err(Error::FitQuality { residual: f64::INFINITY });
    }
    let rms = (t.iter().zip(&log_p).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum::<f64>() / t.len() as f64)
        .sqrt();
    let drop = -slope * (t[t.len() - 1] - t[0]);
    let residual = rms / drop;
    if residual > opts.max_residual {
        return Err(Error::FitQuality { residual });
    }
    let mid = t.len() / 2;
    let (early, _) = line_fit(&t[..=mid], &log_p[..=mid]);
    let (late, _) = line_fit(&t[mid..], &log_p[mid..]);
    let reflection_warning = ((early - late) / slope).abs() > opts.reflection_tolerance;
    Ok(NormFit {
        t_start: t[0],
        t_end: t[t.len() - 1],
        gamma: -slope,
        tau: -1.0 / slope,
        residual,
        reflection_warning,
    })
}
