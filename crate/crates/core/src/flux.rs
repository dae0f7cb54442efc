//! The product structure of the toric locus: complex balanced flux vectors,
//! the homeomorphism between (equilibrium, flux) pairs and rate vectors, the
//! dimension bookkeeping, and constructive connectivity paths.
//!
//! A flux vector assigns a positive flow to every edge; it is complex
//! balanced when the flows entering and leaving each vertex agree. The set
//! of balanced fluxes is a relatively open convex cone, and pairing a point
//! of an affine compatibility class with a balanced flux produces exactly
//! one toric rate vector via `k = beta / x^{y_src}`. Both factors are
//! convex, so interpolating them yields paths that stay inside the locus.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mass_action::{MassActionSystem, RateVector, StateVector};
use crate::network::ReactionNetwork;
use crate::tol;
use crate::toric::{q_map, toric_membership, EquilibriumPoint};
use crate::trees::tree_constants_minor;

/// One strictly positive flow per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxVector(Vec<f64>);

impl FluxVector {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        for (index, &value) in beta.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveFlux { index, value });
            }
        }
        Ok(FluxVector(beta))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Serialize for FluxVector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// The balanced flux cone of a network: a strictly positive interior point
/// and an orthonormal basis of the balance-matrix kernel.
#[derive(Debug, Clone)]
pub struct FluxConeBasis {
    interior: FluxVector,
    kernel: DMatrix<f64>,
}

impl FluxConeBasis {
    pub fn interior_point(&self) -> &FluxVector {
        &self.interior
    }

    /// |E| x d matrix with orthonormal columns, d = |E| - m + l.
    pub fn kernel_basis(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    /// Dimension of the cone.
    pub fn dim(&self) -> usize {
        self.kernel.ncols()
    }
}

/// A cone sample together with the shrink factor that kept it positive.
#[derive(Debug, Clone)]
pub struct SampledFlux {
    pub flux: FluxVector,
    /// 1 when the requested combination was already strictly positive.
    pub shrink: f64,
}

/// A point of the product space: an equilibrium in the compatibility class
/// and a complex balanced flux vector.
#[derive(Debug, Clone)]
pub struct ProductPoint {
    pub equilibrium: EquilibriumPoint,
    pub flux: FluxVector,
}

/// Dimension record of the toric locus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dimensions {
    /// Dimension s of the affine compatibility class.
    pub polyhedron: usize,
    /// Dimension |E| - m + l of the balanced flux cone.
    pub flux_cone: usize,
    /// Dimension s + |E| - m + l of the toric locus.
    pub toric_locus: usize,
    /// Codimension |E| - dim = m - s - l, the deficiency.
    pub codimension: usize,
}

/// A constructive path between two rate vectors of the toric locus.
#[derive(Debug, Clone, Serialize)]
pub struct ConnectPath {
    pub t: Vec<f64>,
    pub k: Vec<RateVector>,
    /// Membership residual of each sample.
    pub residuals: Vec<f64>,
}

impl ConnectPath {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("path serialization is infallible")
    }
}

/// One membership comparison between a network and its affine image.
#[derive(Debug, Clone, Serialize)]
pub struct AffineTrial {
    pub member_original: bool,
    pub member_transformed: bool,
    pub residual_original: f64,
    pub residual_transformed: f64,
}

/// Outcome of an affine-invariance check.
#[derive(Debug, Clone, Serialize)]
pub struct AffineCheckReport {
    pub agree: bool,
    pub trials: Vec<AffineTrial>,
}

/// The m x |E| vertex/edge balance matrix: +1 where the edge leaves the
/// vertex, -1 where it enters. A flux is complex balanced exactly when the
/// product with this matrix vanishes.
pub fn balance_matrix(net: &ReactionNetwork) -> DMatrix<f64> {
    let mut matrix = DMatrix::zeros(net.complex_count(), net.edge_count());
    for (e, &(src, dst)) in net.edges().iter().enumerate() {
        matrix[(src, e)] += 1.0;
        matrix[(dst, e)] -= 1.0;
    }
    matrix
}

/// Largest per-vertex relative imbalance of `beta`: |out - in| / (out + in),
/// together with the offending vertex.
pub fn flux_balance_gap(net: &ReactionNetwork, beta: &[f64]) -> (f64, usize) {
    let m = net.complex_count();
    let mut outflow = vec![0.0; m];
    let mut inflow = vec![0.0; m];
    for (e, &(src, dst)) in net.edges().iter().enumerate() {
        outflow[src] += beta[e];
        inflow[dst] += beta[e];
    }
    let mut worst = (0.0, 0);
    for v in 0..m {
        let total = outflow[v] + inflow[v];
        if total > 0.0 {
            let gap = (outflow[v] - inflow[v]).abs() / total;
            if gap > worst.0 {
                worst = (gap, v);
            }
        }
    }
    worst
}

/// Largest vertex imbalance of `beta` normalized by the largest vertex
/// throughput, with the offending vertex. Scale-free in `beta` and, unlike
/// the per-vertex gap, insensitive to vertices whose entire throughput sits
/// at the sampling floor, where rounding noise dominates any local ratio.
pub fn flux_imbalance(net: &ReactionNetwork, beta: &[f64]) -> (f64, usize) {
    let m = net.complex_count();
    let mut outflow = vec![0.0; m];
    let mut inflow = vec![0.0; m];
    for (e, &(src, dst)) in net.edges().iter().enumerate() {
        outflow[src] += beta[e];
        inflow[dst] += beta[e];
    }
    let scale = (0..m)
        .map(|v| outflow[v] + inflow[v])
        .fold(0.0_f64, f64::max);
    if scale == 0.0 {
        return (0.0, 0);
    }
    let mut worst = (0.0, 0);
    for v in 0..m {
        let gap = (outflow[v] - inflow[v]).abs() / scale;
        if gap > worst.0 {
            worst = (gap, v);
        }
    }
    worst
}

/// The balanced flux cone of a weakly reversible network. The interior
/// point is `beta_e = k_e * K_src(e)` built from the supplied rates (all
/// ones when `sys` is `None`); the tree-constant kernel identity makes it
/// balanced, and weak reversibility makes it strictly positive.
pub fn flux_cone(net: &ReactionNetwork, sys: Option<&MassActionSystem>) -> Result<FluxConeBasis> {
    if !net.is_weakly_reversible() {
        return Err(Error::NotWeaklyReversible);
    }
    if let Some(sys) = sys {
        if sys.net() != net {
            return Err(Error::NetworkMismatch);
        }
    }
    let owned;
    let sys = match sys {
        Some(sys) => sys,
        None => {
            owned =
                MassActionSystem::new(net.clone(), RateVector::new(vec![1.0; net.edge_count()])?)?;
            &owned
        }
    };
    let constants = tree_constants_minor(sys)?;
    let beta: Vec<f64> = net
        .edges()
        .iter()
        .zip(sys.rates().as_slice())
        .map(|(&(src, _), k)| k * constants.as_slice()[src])
        .collect();
    let interior = FluxVector::new(beta)?;
    let (gap, vertex) = flux_balance_gap(net, interior.as_slice());
    assert!(
        gap <= tol::FLUX_BALANCE_ASSERT,
        "interior flux point is unbalanced at vertex {vertex} (gap {gap:.3e})"
    );
    let kernel = linalg::nullspace(&balance_matrix(net));
    let expected = net.edge_count() + net.linkage_classes().count() - net.complex_count();
    if kernel.ncols() != expected {
        return Err(Error::FluxConeRankMismatch {
            expected,
            found: kernel.ncols(),
        });
    }
    Ok(FluxConeBasis { interior, kernel })
}

/// `interior + kernel * coeffs`, shrunk toward the interior point by the
/// largest factor that keeps every component safely positive. Never fails:
/// the interior point itself is the factor-zero fallback.
pub fn sample_flux(basis: &FluxConeBasis, coeffs: &[f64]) -> SampledFlux {
    let interior = basis.interior.as_slice();
    let offset = if basis.kernel.ncols() == 0 {
        DVector::zeros(interior.len())
    } else {
        &basis.kernel * DVector::from_column_slice(coeffs)
    };
    let max_interior = interior.iter().fold(0.0_f64, |a, &b| a.max(b));
    let mut shrink = 1.0_f64;
    for (e, &w) in offset.iter().enumerate() {
        let floor = (tol::FLUX_SAMPLE_FLOOR_REL * max_interior).min(interior[e]);
        if w < 0.0 {
            shrink = shrink.min((interior[e] - floor) / -w);
        }
    }
    shrink = shrink.clamp(0.0, 1.0);
    let beta: Vec<f64> = interior
        .iter()
        .zip(offset.iter())
        .map(|(&b, &w)| b + shrink * w)
        .collect();
    SampledFlux {
        flux: FluxVector::new(beta).expect("shrunk sample stays positive"),
        shrink,
    }
}

/// The rate vector `k_e = beta_e / x^{y_src(e)}`. Guaranteed to lie in the
/// toric locus with equilibrium `x`; refuses an unbalanced `beta` because
/// the output would not be complex balanced.
pub fn phi(net: &ReactionNetwork, x: &EquilibriumPoint, beta: &FluxVector) -> Result<RateVector> {
    if beta.len() != net.edge_count() {
        return Err(Error::FluxCountMismatch {
            found: beta.len(),
            expected: net.edge_count(),
        });
    }
    let (gap, vertex) = flux_imbalance(net, beta.as_slice());
    if gap > tol::FLUX_BALANCE_ACCEPT {
        return Err(Error::UnbalancedFlux { vertex, gap });
    }
    let log_x = x.as_vector().map(f64::ln);
    let rates: Vec<f64> = net
        .edges()
        .iter()
        .zip(beta.as_slice())
        .map(|(&(src, _), b)| (b.ln() - net.complexes()[src].coords().dot(&log_x)).exp())
        .collect();
    RateVector::new(rates)
}

/// The balanced flux vector carried by a toric rate vector at its
/// equilibrium: `beta_e = k_e * Q(k)^{y_src(e)}`.
pub fn q_hat(sys: &MassActionSystem, x0: &StateVector) -> Result<FluxVector> {
    phi_inverse(sys, x0).map(|point| point.flux)
}

/// Inverse of the homeomorphism: the pair (equilibrium in the class of x0,
/// balanced flux). Applying [`phi`] to the result reproduces the rates.
pub fn phi_inverse(sys: &MassActionSystem, x0: &StateVector) -> Result<ProductPoint> {
    let equilibrium = q_map(sys, x0)?;
    let log_x = equilibrium.as_vector().map(f64::ln);
    let net = sys.net();
    let beta: Vec<f64> = net
        .edges()
        .iter()
        .zip(sys.rates().as_slice())
        .map(|(&(src, _), k)| k * net.complexes()[src].coords().dot(&log_x).exp())
        .collect();
    let flux = FluxVector::new(beta)?;
    debug_assert!(
        flux_imbalance(net, flux.as_slice()).0 <= tol::FLUX_BALANCE_ACCEPT,
        "equilibrium flux of a member must be balanced"
    );
    Ok(ProductPoint { equilibrium, flux })
}

/// A path of rate vectors from `sys_a` to `sys_b` inside the toric locus:
/// both endpoints are pulled back through [`phi_inverse`], the equilibrium
/// and flux factors are interpolated linearly (both factors are convex),
/// and each interpolant is pushed forward through [`phi`]. Every sample is
/// re-checked for membership and its residual reported.
pub fn connect_path(
    sys_a: &MassActionSystem,
    sys_b: &MassActionSystem,
    x0: &StateVector,
    steps: usize,
) -> Result<ConnectPath> {
    if sys_a.net() != sys_b.net() {
        return Err(Error::NetworkMismatch);
    }
    if steps < 2 {
        return Err(Error::TooFewSteps(steps));
    }
    let net = sys_a.net();
    let a = phi_inverse(sys_a, x0)?;
    let b = phi_inverse(sys_b, x0)?;
    let mut t_grid = Vec::with_capacity(steps);
    let mut samples = Vec::with_capacity(steps);
    let mut residuals = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = i as f64 / (steps - 1) as f64;
        let x: Vec<f64> = a
            .equilibrium
            .as_slice()
            .iter()
            .zip(b.equilibrium.as_slice())
            .map(|(xa, xb)| (1.0 - t) * xa + t * xb)
            .collect();
        let beta: Vec<f64> = a
            .flux
            .as_slice()
            .iter()
            .zip(b.flux.as_slice())
            .map(|(ba, bb)| (1.0 - t) * ba + t * bb)
            .collect();
        let k = phi(net, &EquilibriumPoint::new(x)?, &FluxVector::new(beta)?)?;
        let sys = MassActionSystem::new(net.clone(), k.clone())?;
        residuals.push(toric_membership(&sys, tol::MEMBERSHIP_TOL).residual);
        t_grid.push(t);
        samples.push(k);
    }
    Ok(ConnectPath {
        t: t_grid,
        k: samples,
        residuals,
    })
}

/// Dimension record of the toric locus of a weakly reversible network,
/// cross-checked against the numeric kernel of the balance matrix.
pub fn dimensions(net: &ReactionNetwork) -> Result<Dimensions> {
    if !net.is_weakly_reversible() {
        return Err(Error::NotWeaklyReversible);
    }
    let s = net.stoichiometric_space().dim();
    let l = net.linkage_classes().count();
    let m = net.complex_count();
    let e = net.edge_count();
    let nullity = linalg::nullspace(&balance_matrix(net)).ncols();
    let expected = e + l - m;
    if nullity != expected {
        return Err(Error::FluxConeRankMismatch {
            expected,
            found: nullity,
        });
    }
    let deficiency = net.deficiency();
    debug_assert_eq!(s + nullity + deficiency, e);
    Ok(Dimensions {
        polyhedron: s,
        flux_cone: nullity,
        toric_locus: s + nullity,
        codimension: deficiency,
    })
}

/// A cone sample comfortably away from the boundary: when the requested
/// combination had to be clipped, retreat to half the clipped range. A
/// component sitting exactly on the sampling floor carries rounding error
/// comparable to the floor itself, which would blur every relative
/// tolerance downstream.
fn sample_flux_interior(basis: &FluxConeBasis, coeffs: &[f64]) -> FluxVector {
    let first = sample_flux(basis, coeffs);
    if first.shrink >= 1.0 {
        return first.flux;
    }
    let retreated: Vec<f64> = coeffs.iter().map(|c| 0.5 * first.shrink * c).collect();
    sample_flux(basis, &retreated).flux
}

/// Random rate vectors drawn from the toric locus: random positive
/// equilibria paired with random cone samples, pushed through [`phi`].
pub fn sample_toric_rates<R: Rng>(
    net: &ReactionNetwork,
    count: usize,
    rng: &mut R,
) -> Result<Vec<RateVector>> {
    let cone = flux_cone(net, None)?;
    let spread = cone
        .interior_point()
        .as_slice()
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let x = EquilibriumPoint::new(
            (0..net.species_count())
                .map(|_| rng.gen_range(-1.0..1.0_f64).exp())
                .collect(),
        )?;
        let coeffs: Vec<f64> = (0..cone.dim())
            .map(|_| rng.gen_range(-spread..spread.max(1e-9)))
            .collect();
        let beta = sample_flux_interior(&cone, &coeffs);
        out.push(phi(net, &x, &beta)?);
    }
    Ok(out)
}

/// Membership must agree between a network and its bijective affine image.
/// Half of the trial rate vectors are constructed inside the locus of
/// `original` via [`phi`], half are drawn log-uniformly; all are tested on
/// both networks at `tolerance`.
pub fn affine_invariance_check<R: Rng>(
    original: &ReactionNetwork,
    transformed: &ReactionNetwork,
    trials: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<AffineCheckReport> {
    if original.edges() != transformed.edges()
        || original.species_count() != transformed.species_count()
    {
        return Err(Error::NetworkMismatch);
    }
    let members = if original.is_weakly_reversible() {
        sample_toric_rates(original, trials / 2, rng)?
    } else {
        Vec::new()
    };
    let mut trial_reports = Vec::with_capacity(trials);
    let mut agree = true;
    for i in 0..trials {
        let rates = match members.get(i) {
            Some(k) => k.clone(),
            None => crate::fixtures::random_rates(rng, original.edge_count(), 1e-2, 1e2),
        };
        let on_original = toric_membership(
            &MassActionSystem::new(original.clone(), rates.clone())?,
            tolerance,
        );
        let on_transformed = toric_membership(
            &MassActionSystem::new(transformed.clone(), rates)?,
            tolerance,
        );
        agree &= on_original.member == on_transformed.member;
        trial_reports.push(AffineTrial {
            member_original: on_original.member,
            member_transformed: on_transformed.member,
            residual_original: on_original.residual,
            residual_transformed: on_transformed.residual,
        });
    }
    Ok(AffineCheckReport {
        agree,
        trials: trial_reports,
    })
}
