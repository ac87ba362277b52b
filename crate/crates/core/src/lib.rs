//! Finite-state Markov chain primitives for filter stability experiments:
//! validated generators and probability vectors, energy/variance quadratic
//! forms, and the Poincare-type constants that certify exponential decay.

pub mod constants;
pub mod error;
pub mod functionals;
pub mod generator;
pub mod model;
pub mod probability;
pub mod stats;
pub mod tolerances;

pub use constants::{
    conditional_pi_constants, doeblin_constant, geometric_mean_min, min_column_sum,
    min_row_average, rayleigh_constant, standard_pi_constant, PiConstants,
};
pub use error::{CoreError, Result};
pub use functionals::{
    carre_du_champ, chi_square_divergence, energy, energy_slices, variance, variance_slices,
};
pub use generator::Generator;
pub use model::{Model, ObservationModel};
pub use probability::{density_ratio, min_density_ratio, ProbabilityVector, StateFunction};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
