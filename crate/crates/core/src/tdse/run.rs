use super::absorber::{Absorber, AbsorberSpec};
use super::fit::{lifetime_from_norm, FitOptions, NormFit};
use super::propagate::{prepare_initial_state, propagate, NormTrace, PropagationOptions};
use crate::error::{Error, Result};
use crate::tidse::ResonanceRecord;
use crate::wave::Representation;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TdseOptions {
    pub propagation: PropagationOptions,
    pub absorber: AbsorberSpec,
    /// Grid is cut this far beyond the absorber onset when shorter than the
    /// stationary grid; `None` keeps the stationary grid.
    pub absorber_width: Option<f64>,
    pub fit: FitOptions,
    /// Propagation is skipped when the expected norm loss over the fit window
    /// is below this, since it would drown in round-off.
    pub min_drop: f64,
}

impl Default for TdseOptions {
    fn default() -> Self {
        Self {
            propagation: PropagationOptions::default(),
            absorber: AbsorberSpec::default(),
            absorber_width: Some(5.0),
            fit: FitOptions::default(),
            min_drop: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TdseLifetime {
    pub representation: Representation,
    pub tau: f64,
    pub fit: NormFit,
    pub absorber: Absorber,
    pub trace: NormTrace,
}

/// Propagates the prepared resonance of `record` and fits its norm decay.
pub fn lifetime_tdse(record: &ResonanceRecord, opts: &TdseOptions) -> Result<TdseLifetime> {
    let window = opts.propagation.t_end - opts.fit.settle_time.min(opts.propagation.t_end);
    let expected_drop = 2.0 * record.flux_rate * window;
    if !(expected_drop >= opts.min_drop) {
        return Err(Error::Range(format!(
            "expected norm loss {expected_drop:.1e} over the propagation window is below {:.1e}",
            opts.min_drop
        )));
    }
    let wave = record.solve()?.solution.to_wave();
    let absorber = opts.absorber.place(record.v, record.w_nu, wave.grid.x_max())?;
    let wave = match opts.absorber_width {
        Some(width) => {
            let edge = absorber.onset + width;
            wave.cropped((edge / wave.grid.dx()).ceil() as usize)
        }
        None => wave,
    };
    let absorber = Absorber { x_max: wave.grid.x_max(), ..absorber };
    let state = prepare_initial_state(&wave)?;
    let trace = propagate(&state, record.v, &absorber, &opts.propagation)?;
    let fit = lifetime_from_norm(&trace, &opts.fit)?;
    Ok(TdseLifetime { representation: record.representation, tau: fit.tau, fit, absorber, trace })
}
