//! Membership in the toric locus and complex balanced equilibria.
//!
//! A rate vector belongs to the toric locus of a network exactly when the
//! binomial conditions `K_i * x^{y_j} = K_j * x^{y_i}` (over all vertex pairs
//! of each linkage class, with K the tree constants) admit a positive
//! solution. Taking logs turns them into a linear system in `log x`, which is
//! solved in least squares; the full set of pairwise conditions is then
//! re-checked on the solution. The equilibrium picked inside a prescribed
//! compatibility class is found by a Newton iteration on the log-space
//! optimality conditions.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::mass_action::{MassActionSystem, StateVector};
use crate::network::{ReactionNetwork, StoichiometricSpace};
use crate::tol;
use crate::trees::{tree_constants_minor, TreeConstants};

/// A strictly positive state satisfying the complex-balance condition.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumPoint(DVector<f64>);

impl EquilibriumPoint {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        StateVector::new(x).map(|state| EquilibriumPoint(state.as_vector().clone()))
    }

    pub fn from_vector(x: DVector<f64>) -> Result<Self> {
        StateVector::from_vector(x).map(|state| EquilibriumPoint(state.as_vector().clone()))
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn to_state(&self) -> StateVector {
        StateVector::from_vector(self.0.clone()).expect("equilibrium points are positive")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }
}

impl Serialize for EquilibriumPoint {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.as_slice().serialize(serializer)
    }
}

/// Why a membership test concluded the way it did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MembershipReason {
    /// Some linkage class is not strongly connected, so no rate vector on
    /// this network is complex balanced.
    NotWeaklyReversible,
    /// The log-linear system has no positive solution within tolerance.
    InconsistentLogSystem,
    Ok,
}

/// Outcome of a toric-locus membership test.
#[derive(Debug, Clone, Serialize)]
pub struct MembershipReport {
    pub member: bool,
    /// Largest symmetric relative gap among the pairwise binomial
    /// conditions, in [0, 1]. Reported as 1 (maximal violation) when the
    /// binomial system does not exist.
    pub residual: f64,
    pub witness: Option<EquilibriumPoint>,
    pub reason: MembershipReason,
}

impl MembershipReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}

/// Log-space description of the full equilibrium set: every positive `x`
/// with `log x` in `base_log + span(normal_space)` is complex balanced.
#[derive(Debug, Clone)]
pub struct EquilibriumSetDescription {
    pub base_log: DVector<f64>,
    /// Orthonormal basis of the orthogonal complement of the stoichiometric
    /// subspace, n x (n - s).
    pub normal_space: DMatrix<f64>,
}

/// The linear system in `log x` induced by the binomial conditions along a
/// spanning tree of each linkage class: rows `(y_j - y_i)^T`, right-hand
/// sides `log K_j - log K_i`. Pair relations add along chains, so spanning
/// pairs generate all of them; membership re-checks every pair afterwards.
pub fn log_linear_system(
    net: &ReactionNetwork,
    constants: &TreeConstants,
) -> (DMatrix<f64>, DVector<f64>) {
    let n = net.species_count();
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    let decomposition = net.linkage_classes();
    for class in decomposition.classes() {
        // Undirected BFS over the class; each discovery edge contributes one
        // row, oriented the way the underlying edge is.
        let mut seen = vec![class[0]];
        let mut queue = vec![class[0]];
        while let Some(v) = queue.pop() {
            for &(src, dst) in net.edges() {
                let other = if src == v {
                    dst
                } else if dst == v {
                    src
                } else {
                    continue;
                };
                if seen.contains(&other) {
                    continue;
                }
                seen.push(other);
                queue.push(other);
                let (yi, yj) = (net.complexes()[src].coords(), net.complexes()[dst].coords());
                rows.push(yj - yi);
                rhs.push(constants.as_slice()[dst].ln() - constants.as_slice()[src].ln());
            }
        }
    }
    let mut matrix = DMatrix::zeros(rows.len(), n);
    for (r, row) in rows.iter().enumerate() {
        matrix.set_row(r, &row.transpose());
    }
    (matrix, DVector::from_vec(rhs))
}

/// Symmetric relative gap |e^a - e^b| / (e^a + e^b), evaluated stably.
fn symmetric_gap(log_a: f64, log_b: f64) -> f64 {
    ((log_a - log_b) / 2.0).tanh().abs()
}

/// Largest pairwise binomial gap of `log_x` against the tree constants,
/// over all same-class vertex pairs.
fn pairwise_residual(
    net: &ReactionNetwork,
    constants: &TreeConstants,
    log_x: &DVector<f64>,
) -> f64 {
    let decomposition = net.linkage_classes();
    let mut worst = 0.0_f64;
    for class in decomposition.classes() {
        for (a, &i) in class.iter().enumerate() {
            for &j in &class[a + 1..] {
                let log_lhs = constants.as_slice()[i].ln() + net.complexes()[j].coords().dot(log_x);
                let log_rhs = constants.as_slice()[j].ln() + net.complexes()[i].coords().dot(log_x);
                worst = worst.max(symmetric_gap(log_lhs, log_rhs));
            }
        }
    }
    worst
}

/// Decide whether the rate vector of `sys` lies in the toric locus of its
/// network, with `tolerance` bounding the pairwise binomial gap.
///
/// Non-weakly-reversible networks report `member = false` rather than an
/// error: their toric locus is empty.
pub fn toric_membership(sys: &MassActionSystem, tolerance: f64) -> MembershipReport {
    let net = sys.net();
    if !net.is_weakly_reversible() {
        return MembershipReport {
            member: false,
            residual: 1.0,
            witness: None,
            reason: MembershipReason::NotWeaklyReversible,
        };
    }
    let constants = match tree_constants_minor(sys) {
        Ok(k) => k,
        Err(_) => {
            // Weak reversibility makes this unreachable short of numerical
            // breakdown; report the system as undecidable-off rather than
            // panicking.
            return MembershipReport {
                member: false,
                residual: 1.0,
                witness: None,
                reason: MembershipReason::InconsistentLogSystem,
            };
        }
    };
    let (matrix, rhs) = log_linear_system(net, &constants);
    let log_x = linalg::least_squares(&matrix, &rhs);
    if log_x.iter().any(|v| !v.is_finite()) {
        return MembershipReport {
            member: false,
            residual: 1.0,
            witness: None,
            reason: MembershipReason::InconsistentLogSystem,
        };
    }
    let residual = pairwise_residual(net, &constants, &log_x);
    let member = residual <= tolerance;
    let witness = if member {
        EquilibriumPoint::from_vector(log_x.map(f64::exp)).ok()
    } else {
        None
    };
    if member && witness.is_none() {
        // exp over/underflowed: no usable positive witness.
        return MembershipReport {
            member: false,
            residual: 1.0,
            witness: None,
            reason: MembershipReason::InconsistentLogSystem,
        };
    }
    MembershipReport {
        member,
        residual,
        witness,
        reason: if member {
            MembershipReason::Ok
        } else {
            MembershipReason::InconsistentLogSystem
        },
    }
}

/// Log-space description of the whole equilibrium set from one witness.
pub fn equilibrium_set(
    net: &ReactionNetwork,
    witness: &EquilibriumPoint,
) -> EquilibriumSetDescription {
    EquilibriumSetDescription {
        base_log: witness.as_vector().map(f64::ln),
        normal_space: net.stoichiometric_space().complement(),
    }
}

/// The unique point of the affine polyhedron `(x0 + S), x > 0` whose log
/// differs from `log x_star` by an element of the orthogonal complement of S.
///
/// Solves `F(u) = B^T (log(x0 + B u) - log x_star) = 0` by Newton iteration
/// with a backtracking line search that keeps `x0 + B u` strictly positive;
/// the Jacobian `B^T diag(1/x) B` is positive definite.
pub fn birch_projection(
    x_star: &EquilibriumPoint,
    x0: &StateVector,
    space: &StoichiometricSpace,
) -> Result<EquilibriumPoint> {
    let basis = space.basis();
    let s = basis.ncols();
    if s == 0 {
        return EquilibriumPoint::from_vector(x0.as_vector().clone());
    }
    let log_star = x_star.as_vector().map(f64::ln);
    let target = tol::NEWTON_TOL * (1.0 + log_star.norm());

    let state = |u: &DVector<f64>| x0.as_vector() + basis * u;
    let positive = |x: &DVector<f64>| x.iter().all(|v| *v > 0.0 && v.is_finite());
    let residual_at = |x: &DVector<f64>| basis.transpose() * (x.map(f64::ln) - &log_star);

    // Projecting x_star into the affine class is an exact solution whenever
    // x_star already lies in it; fall back to u = 0 (the point x0) if that
    // starting guess leaves the positive orthant.
    let mut u = basis.transpose() * (x_star.as_vector() - x0.as_vector());
    if !positive(&state(&u)) {
        u = DVector::zeros(s);
    }

    let mut x = state(&u);
    let mut f = residual_at(&x);
    for _ in 0..tol::NEWTON_MAX_ITERS {
        if f.norm() <= target {
            return EquilibriumPoint::from_vector(x);
        }
        let weighted = DMatrix::from_fn(basis.nrows(), s, |r, c| basis[(r, c)] / x[r]);
        let jacobian = basis.transpose() * weighted;
        let step = jacobian
            .clone()
            .cholesky()
            .map(|c| c.solve(&(-&f)))
            .or_else(|| jacobian.lu().solve(&(-&f)))
            .ok_or(Error::ProjectionDidNotConverge {
                iterations: tol::NEWTON_MAX_ITERS,
                residual: f.norm(),
            })?;
        let mut alpha = 1.0;
        let mut advanced = false;
        while alpha >= 1e-14 {
            let u_next = &u + &step * alpha;
            let x_next = state(&u_next);
            if positive(&x_next) {
                let f_next = residual_at(&x_next);
                if f_next.norm() <= (1.0 - 1e-4 * alpha) * f.norm() {
                    u = u_next;
                    x = x_next;
                    f = f_next;
                    advanced = true;
                    break;
                }
            }
            alpha /= 2.0;
        }
        if !advanced {
            return Err(Error::ProjectionDidNotConverge {
                iterations: tol::NEWTON_MAX_ITERS,
                residual: f.norm(),
            });
        }
    }
    if f.norm() <= target {
        return EquilibriumPoint::from_vector(x);
    }
    Err(Error::ProjectionDidNotConverge {
        iterations: tol::NEWTON_MAX_ITERS,
        residual: f.norm(),
    })
}

/// The complex balanced equilibrium of `sys` inside the compatibility class
/// of `x0`. Errors when the rate vector is not in the toric locus.
pub fn q_map(sys: &MassActionSystem, x0: &StateVector) -> Result<EquilibriumPoint> {
    let report = toric_membership(sys, tol::MEMBERSHIP_TOL);
    let witness = match (report.member, report.witness) {
        (true, Some(w)) => w,
        _ => {
            return Err(Error::NotInToricLocus {
                residual: report.residual,
            })
        }
    };
    let space = sys.net().stoichiometric_space();
    let projected = birch_projection(&witness, x0, &space)?;
    debug_assert!(
        space
            .residual(&(projected.as_vector() - x0.as_vector()))
            .norm()
            <= tol::PROJECTION_RESIDUAL * (1.0 + (projected.as_vector() - x0.as_vector()).norm()),
        "projected equilibrium left the compatibility class"
    );
    debug_assert!(
        sys.is_complex_balanced_at(&projected.to_state(), tol::COMPLEX_BALANCE_TOL),
        "projected equilibrium is not complex balanced"
    );
    Ok(projected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mass_action::RateVector;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn system(net: ReactionNetwork, rates: Vec<f64>) -> MassActionSystem {
        MassActionSystem::new(net, RateVector::new(rates).unwrap()).unwrap()
    }

    #[test]
    fn log_system_rhs_vanishes_for_equal_constants() {
        let sys = system(fixtures::bidirected_triangle(), vec![1.0; 6]);
        let constants = tree_constants_minor(&sys).unwrap();
        let (_, rhs) = log_linear_system(sys.net(), &constants);
        assert!(rhs.amax() <= 1e-14);
    }

    #[test]
    fn log_system_is_consistent_at_deficiency_zero() {
        let sys = system(fixtures::triangle_cycle(), vec![1.0, 2.0, 3.0]);
        let constants = tree_constants_minor(&sys).unwrap();
        let (matrix, rhs) = log_linear_system(sys.net(), &constants);
        let solution = crate::linalg::least_squares(&matrix, &rhs);
        assert!((matrix * solution - rhs).amax() <= 1e-12);
    }

    #[test]
    fn log_system_solution_for_geometric_constants() {
        // On the collinear 4-cycle, constants (1, 2, 4, 8) force
        // log x = log 2 along the single species axis.
        let net = fixtures::collinear_four_cycle();
        let constants = TreeConstants::from_raw(vec![1.0, 2.0, 4.0, 8.0]);
        let (matrix, rhs) = log_linear_system(&net, &constants);
        let solution = crate::linalg::least_squares(&matrix, &rhs);
        assert_eq!(solution.len(), 1);
        assert_relative_eq!(solution[0], 2.0_f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn triangle_is_always_member() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let rates = fixtures::random_rates(&mut rng, 3, 1e-2, 1e2);
            let sys = MassActionSystem::new(fixtures::triangle_cycle(), rates).unwrap();
            let report = toric_membership(&sys, tol::MEMBERSHIP_TOL);
            assert!(report.member, "residual {}", report.residual);
            assert_eq!(report.reason, MembershipReason::Ok);
            let witness = report.witness.unwrap();
            assert!(sys.is_complex_balanced_at(&witness.to_state(), 1e-8));
        }
    }

    #[test]
    fn four_cycle_membership_matches_quartic_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let net = fixtures::collinear_four_cycle();
        let mut seen_member = 0;
        let mut seen_non_member = 0;
        for trial in 0..200 {
            let rates = if trial % 2 == 0 {
                fixtures::random_rates(&mut rng, 4, 1e-1, 1e1)
            } else {
                // On-variety sample: rates of the form beta / x^{y_src} for
                // a positive x and a circulation beta.
                let x: f64 = rng.gen_range(0.3..3.0);
                let beta: f64 = rng.gen_range(0.5..2.0);
                let k: Vec<f64> = net
                    .edges()
                    .iter()
                    .map(|&(src, _)| beta / x.powf(net.complexes()[src].coords()[0]))
                    .collect();
                RateVector::new(k).unwrap()
            };
            let k = rates.as_slice();
            // Edge order (k14, k43, k32, k21); the in-tree products:
            let big_k = [
                k[1] * k[2] * k[3],
                k[0] * k[1] * k[2],
                k[3] * k[0] * k[1],
                k[2] * k[3] * k[0],
            ];
            let eq1 = sym_gap(big_k[0] * big_k[2], big_k[1] * big_k[1]);
            let eq2 = sym_gap(big_k[1] * big_k[3], big_k[2] * big_k[2]);
            let on_variety = eq1.max(eq2);
            let report = toric_membership(
                &MassActionSystem::new(net.clone(), rates).unwrap(),
                tol::MEMBERSHIP_TOL,
            );
            if on_variety <= 1e-9 {
                assert!(report.member, "equation residual {on_variety:.3e}");
                seen_member += 1;
            } else if on_variety >= 1e-7 {
                assert!(!report.member, "equation residual {on_variety:.3e}");
                seen_non_member += 1;
            }
        }
        assert!(seen_member >= 50);
        assert!(seen_non_member >= 50);
    }

    fn sym_gap(a: f64, b: f64) -> f64 {
        (a - b).abs() / (a + b)
    }

    #[test]
    fn bidirected_triangle_membership_on_and_off_variety() {
        let net = fixtures::bidirected_triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            // Member by construction: k = beta / x^{y_src} with beta a
            // balanced flux (uniform on each reversible pair).
            let x = fixtures::random_state(&mut rng, 2, 0.3, 3.0);
            let log_x = x.as_vector().map(f64::ln);
            let beta: Vec<f64> = (0..6).map(|_| rng.gen_range(0.5..2.0)).collect();
            // Pair up opposite edges so each unordered pair carries equal
            // flux: (0,1), (2,3), (4,5) are mutual reverses in the fixture.
            let balanced = [beta[0], beta[0], beta[2], beta[2], beta[4], beta[4]];
            let k: Vec<f64> = net
                .edges()
                .iter()
                .zip(balanced)
                .map(|(&(src, _), b)| b / net.complexes()[src].coords().dot(&log_x).exp())
                .collect();
            let sys = system(net.clone(), k.clone());
            let report = toric_membership(&sys, tol::MEMBERSHIP_TOL);
            assert!(report.member, "residual {}", report.residual);

            // Perturbing one rate by 10% leaves the variety.
            let mut off = k;
            off[0] *= 1.1;
            let report = toric_membership(&system(net.clone(), off), tol::MEMBERSHIP_TOL);
            assert!(!report.member);
            assert_eq!(report.reason, MembershipReason::InconsistentLogSystem);
        }
    }

    #[test]
    fn membership_is_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for net in [
            fixtures::collinear_four_cycle(),
            fixtures::bidirected_triangle(),
        ] {
            for _ in 0..20 {
                let rates = fixtures::random_rates(&mut rng, net.edge_count(), 1e-1, 1e1);
                let flags: Vec<bool> = [1e-3, 1.0, 1e3]
                    .iter()
                    .map(|&c| {
                        let scaled = rates.scaled(c).unwrap();
                        toric_membership(
                            &MassActionSystem::new(net.clone(), scaled).unwrap(),
                            tol::MEMBERSHIP_TOL,
                        )
                        .member
                    })
                    .collect();
                assert_eq!(flags[0], flags[1]);
                assert_eq!(flags[1], flags[2]);
            }
        }
    }

    #[test]
    fn non_weakly_reversible_is_reported_not_crashed() {
        let net = ReactionNetwork::new(
            vec!["A".into(), "B".into()],
            vec![
                crate::network::Complex::new(vec![1.0, 0.0]),
                crate::network::Complex::new(vec![0.0, 1.0]),
            ],
            vec![(0, 1)],
        )
        .unwrap();
        let report = toric_membership(&system(net, vec![1.0]), tol::MEMBERSHIP_TOL);
        assert!(!report.member);
        assert_eq!(report.reason, MembershipReason::NotWeaklyReversible);
        assert_eq!(report.residual, 1.0);
        assert!(report.witness.is_none());
    }

    #[test]
    fn birch_fixed_point_when_already_compatible() {
        let space = fixtures::reversible_pair().stoichiometric_space();
        let x_star = EquilibriumPoint::new(vec![2.5, 1.5]).unwrap();
        let x0 = StateVector::new(vec![3.0, 1.0]).unwrap();
        // x_star - x0 = (-0.5, 0.5) lies in S = span(1,-1).
        let projected = birch_projection(&x_star, &x0, &space).unwrap();
        assert_relative_eq!(projected.as_vector(), x_star.as_vector(), epsilon = 1e-10);
    }

    #[test]
    fn birch_is_identity_for_full_dimensional_subspace() {
        let space = fixtures::triangle_cycle().stoichiometric_space();
        let x_star = EquilibriumPoint::new(vec![0.7, 4.2]).unwrap();
        let x0 = StateVector::new(vec![9.0, 0.1]).unwrap();
        let projected = birch_projection(&x_star, &x0, &space).unwrap();
        assert_relative_eq!(projected.as_vector(), x_star.as_vector(), epsilon = 1e-10);
    }

    #[test]
    fn birch_balances_reversible_pair() {
        let space = fixtures::reversible_pair().stoichiometric_space();
        let x_star = EquilibriumPoint::new(vec![1.0, 1.0]).unwrap();
        let x0 = StateVector::new(vec![3.0, 1.0]).unwrap();
        let projected = birch_projection(&x_star, &x0, &space).unwrap();
        assert_relative_eq!(
            projected.as_vector(),
            &DVector::from_column_slice(&[2.0, 2.0]),
            epsilon = 1e-10
        );
    }

    #[test]
    fn q_map_of_triangle_is_analytic_equilibrium() {
        let (k12, k23, k31) = (2.0, 5.0, 0.4);
        let sys = system(fixtures::triangle_cycle(), vec![k12, k23, k31]);
        for x0 in [vec![1.0, 1.0], vec![0.2, 7.0]] {
            let x0 = StateVector::new(x0).unwrap();
            let q = q_map(&sys, &x0).unwrap();
            assert_relative_eq!(q.as_slice()[0], k12 / k23, epsilon = 1e-9);
            assert_relative_eq!(q.as_slice()[1], k12 / k31, epsilon = 1e-9);
        }
    }

    #[test]
    fn q_map_of_reversible_pair_splits_conserved_total() {
        let sys = system(fixtures::reversible_pair(), vec![1.0, 1.0]);
        let x0 = StateVector::new(vec![3.0, 1.0]).unwrap();
        let q = q_map(&sys, &x0).unwrap();
        assert_relative_eq!(
            q.as_vector(),
            &DVector::from_column_slice(&[2.0, 2.0]),
            epsilon = 1e-9
        );
    }

    #[test]
    fn q_map_of_symmetric_square_cycle() {
        let sys = system(fixtures::square_cycle(), vec![1.0; 4]);
        let x0 = StateVector::new(vec![1.0, 1.0]).unwrap();
        let q = q_map(&sys, &x0).unwrap();
        assert_relative_eq!(
            q.as_vector(),
            &DVector::from_column_slice(&[1.0, 1.0]),
            epsilon = 1e-9
        );
    }

    #[test]
    fn q_map_rejects_non_members() {
        let sys = system(fixtures::collinear_four_cycle(), vec![1.0, 2.0, 3.0, 4.0]);
        assert!(matches!(
            q_map(&sys, &StateVector::new(vec![1.0]).unwrap()),
            Err(Error::NotInToricLocus { .. })
        ));
    }

    #[test]
    fn edgeless_network_is_trivially_member() {
        let net = ReactionNetwork::new(
            vec!["A".into()],
            vec![
                crate::network::Complex::new(vec![0.0]),
                crate::network::Complex::new(vec![1.0]),
            ],
            vec![],
        )
        .unwrap();
        let sys = system(net, vec![]);
        let report = toric_membership(&sys, tol::MEMBERSHIP_TOL);
        assert!(report.member);
        assert_eq!(report.residual, 0.0);
        assert_eq!(report.witness.unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn equilibrium_set_sweeps_out_balanced_states() {
        // Every point with log x in base_log + span(normal_space) is itself
        // complex balanced.
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let net = fixtures::reversible_pair();
        let rates = fixtures::random_rates(&mut rng, 2, 0.5, 2.0);
        let sys = MassActionSystem::new(net.clone(), rates).unwrap();
        let report = toric_membership(&sys, tol::MEMBERSHIP_TOL);
        let description = equilibrium_set(&net, &report.witness.unwrap());
        assert_eq!(description.normal_space.ncols(), 1);
        for _ in 0..10 {
            let shift: f64 = rng.gen_range(-1.0..1.0);
            let log_x = &description.base_log + &description.normal_space * shift;
            let x = StateVector::from_vector(log_x.map(f64::exp)).unwrap();
            assert!(sys.is_complex_balanced_at(&x, 1e-8));
        }
    }

    #[test]
    fn fibers_of_q_are_convex() {
        // Two members sharing an equilibrium: every convex combination is a
        // member with the same equilibrium.
        let net = fixtures::bidirected_triangle();
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let x = fixtures::random_state(&mut rng, 2, 0.5, 2.0);
        let log_x = x.as_vector().map(f64::ln);
        let monomial = |src: usize| net.complexes()[src].coords().dot(&log_x).exp();
        let make = |pair_fluxes: [f64; 3]| {
            let balanced = [
                pair_fluxes[0],
                pair_fluxes[0],
                pair_fluxes[1],
                pair_fluxes[1],
                pair_fluxes[2],
                pair_fluxes[2],
            ];
            let k: Vec<f64> = net
                .edges()
                .iter()
                .zip(balanced)
                .map(|(&(src, _), b)| b / monomial(src))
                .collect();
            k
        };
        let k1 = make([1.0, 2.0, 0.5]);
        let k2 = make([0.3, 1.1, 2.2]);
        let x0 = StateVector::new(vec![1.0, 1.0]).unwrap();
        let q1 = q_map(&system(net.clone(), k1.clone()), &x0).unwrap();
        let q2 = q_map(&system(net.clone(), k2.clone()), &x0).unwrap();
        assert!((q1.as_vector() - q2.as_vector()).amax() <= 1e-10);
        for lambda in [0.25, 0.5, 0.75] {
            let mix: Vec<f64> = k1
                .iter()
                .zip(&k2)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect();
            let sys = system(net.clone(), mix);
            let report = toric_membership(&sys, tol::MEMBERSHIP_TOL);
            assert!(report.member);
            let q = q_map(&sys, &x0).unwrap();
            assert!((q.as_vector() - q1.as_vector()).amax() <= 1e-8);
        }
    }

    #[test]
    fn rate_surgery_moves_equilibrium_where_asked() {
        // From a member with equilibrium x, the rates k * x^y / x_hat^y form
        // a member whose equilibrium is x_hat, for any positive x_hat in the
        // same compatibility class.
        let sys = system(fixtures::triangle_cycle(), vec![1.0, 1.0, 1.0]);
        let x0 = StateVector::new(vec![2.0, 2.0]).unwrap();
        let x = q_map(&sys, &x0).unwrap();
        let x_hat = StateVector::new(vec![0.5, 3.0]).unwrap();
        let log_x = x.as_vector().map(f64::ln);
        let log_hat = x_hat.as_vector().map(f64::ln);
        let net = sys.net();
        let surgered: Vec<f64> = net
            .edges()
            .iter()
            .zip(sys.rates().as_slice())
            .map(|(&(src, _), k)| {
                let y = net.complexes()[src].coords();
                k * (y.dot(&log_x) - y.dot(&log_hat)).exp()
            })
            .collect();
        let new_sys = system(net.clone(), surgered);
        let q = q_map(&new_sys, &x_hat).unwrap();
        assert!((q.as_vector() - x_hat.as_vector()).amax() <= 1e-8);
    }
}
