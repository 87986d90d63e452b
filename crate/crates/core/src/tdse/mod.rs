//! Time propagation of prepared resonance states with absorbing layers, and
//! lifetimes from the exponential decay of the norm.

mod absorber;
mod banded;
mod fit;
mod operator;
mod propagate;
mod run;

pub use absorber::{Absorber, AbsorberSpec, Onset};
pub use banded::{BandLu, BandMatrix};
pub use fit::{lifetime_from_norm, FitOptions, NormFit};
pub use operator::hamiltonian;
pub use propagate::{prepare_initial_state, propagate, NormTrace, PropagationOptions, NORM_GROWTH_LIMIT};
pub use run::{lifetime_tdse, TdseLifetime, TdseOptions};
