//! Lifetimes of metastable states on an avoided crossing of two linear
//! potentials, by stationary shooting, time propagation and approximations.
//!
//! Everything works in scaled units in which the model depends only on the
//! coupling `V`; see [`units`] for the conversion.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod approx;
pub mod error;
pub mod grid;
pub mod model;
pub mod optim;
pub mod quad;
pub mod report;
pub mod semiclassical;
pub mod stationary;
pub mod tdse;
pub mod tidse;
pub mod units;
pub mod wave;

pub use error::{Error, Result};
pub use grid::Grid;
pub use model::{adiabatic_point, basis_transform, AdiabaticPoint, BasisDirection};
pub use units::{scale_physical, ScaledParams, UnitScales};
pub use wave::{Parity, Representation, TwoComponentWave};
pub use analysis::{analyze_coupling, AnalysisOptions, CouplingAnalysis};
pub use report::{Flag, LifetimeEntry, LifetimeReport, Method};
