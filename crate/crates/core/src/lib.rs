//! Analysis of mass-action reaction networks and their toric locus.
//!
//! A reaction network is a directed graph embedded in species space; a rate
//! vector turns it into a polynomial dynamical system. This crate decides
//! whether a rate vector admits a complex balanced equilibrium (membership
//! in the toric locus), computes that equilibrium inside a prescribed
//! compatibility class, realizes the product structure of the locus through
//! the flux-cone homeomorphism, and constructs explicit paths between any
//! two points of the locus.
//!
//! Start with [`ReactionNetwork`] and [`MassActionSystem`], then
//! [`toric_membership`], [`q_map`], and the flux-cone tools in [`flux`].
//! The `book/` directory of the repository holds a guide whose code
//! snippets compile as doc-tests (see [`guide`]).

pub mod error;
pub mod fixtures;
pub mod flux;
pub mod guide;
mod linalg;
pub mod mass_action;
pub mod network;
pub mod tol;
pub mod toric;
pub mod trees;

pub use error::{Error, Result};
pub use flux::{
    affine_invariance_check, balance_matrix, connect_path, dimensions, flux_balance_gap, flux_cone,
    flux_imbalance, phi, phi_inverse, q_hat, sample_flux, sample_toric_rates, AffineCheckReport,
    ConnectPath, Dimensions, FluxConeBasis, FluxVector, ProductPoint, SampledFlux,
};
pub use mass_action::{LaplacianMatrix, MassActionSystem, RateVector, StateVector, Trajectory};
pub use network::{Complex, LinkageDecomposition, ReactionNetwork, StoichiometricSpace};
pub use toric::{
    birch_projection, equilibrium_set, log_linear_system, q_map, toric_membership,
    EquilibriumPoint, EquilibriumSetDescription, MembershipReason, MembershipReport,
};
pub use trees::{enumerate_in_trees, tree_constants_enum, tree_constants_minor, TreeConstants};
