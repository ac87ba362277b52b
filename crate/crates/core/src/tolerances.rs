//! Central numeric tolerances, each with the contract it enforces.

/// Generator row sums must vanish to this absolute tolerance. Row sums are
/// computed from O(dim) additions of O(1) rates, so anything beyond a few
/// ulps indicates a genuinely broken input rather than rounding.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Probability vectors must sum to one within this absolute tolerance.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Residual bound for the invariant measure: after solving, the transposed
/// balance equations must hold with infinity norm at most this value.
pub const INVARIANT_RESIDUAL_TOL: f64 = 1e-10;

/// Below this threshold a computed spectral gap is treated as zero, i.e. the
/// generator is flagged as not certifying a standard Poincare inequality.
/// Symmetric eigensolves are backward stable, so a genuine positive gap of a
/// well-scaled generator sits far above this level.
pub const SPECTRAL_GAP_DEGENERACY_TOL: f64 = 1e-9;

/// Default positivity floor applied to filter distributions after each step.
pub const DEFAULT_POSITIVITY_FLOOR: f64 = 1e-14;
