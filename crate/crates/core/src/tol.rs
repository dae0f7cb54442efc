//! Numerical tolerances used across the crate.
//!
//! Desk-scale networks (a handful of species, tens of edges) keep every
//! computation far from the edge of f64 precision, so these thresholds are
//! deliberately conservative.

/// Relative threshold on singular values when deciding numerical rank.
///
/// A singular value below `RANK_REL_TOL * sigma_max` counts as zero. Used for
/// the stoichiometric subspace, the balance-matrix kernel, and least-squares
/// cutoffs.
pub const RANK_REL_TOL: f64 = 1e-10;

/// A tree-constant minor whose determinant falls below this fraction of its
/// natural scale is treated as exactly zero, which flags a linkage class that
/// is not strongly connected.
pub const DET_VANISH_REL: f64 = 1e-12;

/// Default tolerance for toric-locus membership: the maximum symmetric
/// relative gap allowed in the binomial conditions.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Default tolerance for pointwise complex-balance checks.
pub const COMPLEX_BALANCE_TOL: f64 = 1e-8;

/// The matrix form and the edge-sum form of the vector field must agree to
/// this relative tolerance (checked in debug builds).
pub const RHS_AGREEMENT_REL: f64 = 1e-12;

/// Convergence scale for the Newton iteration of the equilibrium projection:
/// stop when |F| <= NEWTON_TOL * (1 + |log x_star|).
pub const NEWTON_TOL: f64 = 1e-12;

/// Iteration cap for the equilibrium projection.
pub const NEWTON_MAX_ITERS: usize = 200;

/// A projected equilibrium must lie in its affine polyhedron to this residual.
pub const PROJECTION_RESIDUAL: f64 = 1e-9;

/// Balance residual asserted on flux vectors produced by the crate itself
/// (cone interior points, cone samples, equilibrium fluxes).
pub const FLUX_BALANCE_ASSERT: f64 = 1e-10;

/// Balance residual accepted on flux vectors supplied by callers.
pub const FLUX_BALANCE_ACCEPT: f64 = 1e-8;

/// Trajectories must conserve the projection onto the orthogonal complement
/// of the stoichiometric subspace to this absolute drift.
pub const SIMULATION_CONSERVATION: f64 = 1e-7;

/// Floor applied when shrinking flux-cone samples back into the positive
/// orthant, as a fraction of the largest interior-point component.
pub const FLUX_SAMPLE_FLOOR_REL: f64 = 1e-9;

/// Tree constants computed from minors and from explicit tree enumeration
/// must agree to this relative tolerance.
pub const TREE_CONSTANT_AGREEMENT: f64 = 1e-9;
