//! Small reference networks and seeded random generators, shared by the
//! test suites, the guide, and quick experiments.

use rand::Rng;

use crate::mass_action::{RateVector, StateVector};
use crate::network::{Complex, ReactionNetwork};

/// Directed 3-cycle `0 -> X1 -> X2 -> 0` on complexes (0,0), (1,0), (0,1).
/// Deficiency zero: every positive rate vector admits a complex balanced
/// equilibrium.
pub fn triangle_cycle() -> ReactionNetwork {
    ReactionNetwork::new(
        vec!["X1".into(), "X2".into()],
        vec![
            Complex::new(vec![0.0, 0.0]),
            Complex::new(vec![1.0, 0.0]),
            Complex::new(vec![0.0, 1.0]),
        ],
        vec![(0, 1), (1, 2), (2, 0)],
    )
    .expect("valid fixture")
}

/// Directed 4-cycle around the unit square. Deficiency one.
pub fn square_cycle() -> ReactionNetwork {
    ReactionNetwork::new(
        vec!["X1".into(), "X2".into()],
        vec![
            Complex::new(vec![0.0, 0.0]),
            Complex::new(vec![1.0, 0.0]),
            Complex::new(vec![1.0, 1.0]),
            Complex::new(vec![0.0, 1.0]),
        ],
        vec![(0, 1), (1, 2), (2, 3), (3, 0)],
    )
    .expect("valid fixture")
}

/// Directed 4-cycle on four equally spaced collinear complexes
/// 0, A, 2A, 3A, traversed as `1 -> 4 -> 3 -> 2 -> 1` with edge order
/// (k14, k43, k32, k21). Deficiency two: membership in the toric locus is
/// cut out by the two equations `K1*K3 = K2^2` and `K2*K4 = K3^2`.
pub fn collinear_four_cycle() -> ReactionNetwork {
    ReactionNetwork::new(
        vec!["A".into()],
        vec![
            Complex::new(vec![0.0]),
            Complex::new(vec![1.0]),
            Complex::new(vec![2.0]),
            Complex::new(vec![3.0]),
        ],
        vec![(0, 3), (3, 2), (2, 1), (1, 0)],
    )
    .expect("valid fixture")
}

/// Complete bidirected graph on the collinear complexes 2A, A+B, 2B with
/// edge order (k12, k21, k13, k31, k23, k32). Deficiency one: membership is
/// cut out by the single equation `K1*K3 = K2^2`.
pub fn bidirected_triangle() -> ReactionNetwork {
    ReactionNetwork::new(
        vec!["A".into(), "B".into()],
        vec![
            Complex::new(vec![2.0, 0.0]),
            Complex::new(vec![1.0, 1.0]),
            Complex::new(vec![0.0, 2.0]),
        ],
        vec![(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)],
    )
    .expect("valid fixture")
}

/// Reversible pair `A <=> B` embedded at (1,0) and (0,1); conserves the
/// total `x1 + x2`.
pub fn reversible_pair() -> ReactionNetwork {
    ReactionNetwork::new(
        vec!["A".into(), "B".into()],
        vec![Complex::new(vec![1.0, 0.0]), Complex::new(vec![0.0, 1.0])],
        vec![(0, 1), (1, 0)],
    )
    .expect("valid fixture")
}

fn species_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

fn random_distinct_complexes<R: Rng>(rng: &mut R, count: usize, dim: usize) -> Vec<Complex> {
    let mut out: Vec<Complex> = Vec::with_capacity(count);
    while out.len() < count {
        let candidate = Complex::new((0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect());
        if !out.contains(&candidate) {
            out.push(candidate);
        }
    }
    out
}

/// Random Hamiltonian cycle over `vertices`, plus extra chords with
/// probability 0.3: a strongly connected edge set.
fn random_strongly_connected_edges<R: Rng>(
    rng: &mut R,
    vertices: std::ops::Range<usize>,
) -> Vec<(usize, usize)> {
    let ids: Vec<usize> = vertices.collect();
    if ids.len() < 2 {
        return Vec::new();
    }
    let mut order = ids.clone();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut edges: Vec<(usize, usize)> = (0..order.len())
        .map(|i| (order[i], order[(i + 1) % order.len()]))
        .collect();
    for &u in &ids {
        for &v in &ids {
            if u != v && !edges.contains(&(u, v)) && rng.gen_bool(0.3) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Random strongly connected network with up to `max_vertices` complexes in
/// the plane.
pub fn random_strongly_connected<R: Rng>(rng: &mut R, max_vertices: usize) -> ReactionNetwork {
    let m = rng.gen_range(1..=max_vertices);
    let complexes = random_distinct_complexes(rng, m, 2);
    let edges = random_strongly_connected_edges(rng, 0..m);
    ReactionNetwork::new(species_names(2), complexes, edges).expect("generated network is valid")
}

/// Random weakly reversible network: one to three strongly connected linkage
/// classes over a shared species space of dimension two to four.
pub fn random_weakly_reversible<R: Rng>(rng: &mut R) -> ReactionNetwork {
    let class_count = rng.gen_range(1..=3);
    let sizes: Vec<usize> = (0..class_count).map(|_| rng.gen_range(1..=5)).collect();
    let total: usize = sizes.iter().sum();
    let dim = rng.gen_range(2..=4);
    let complexes = random_distinct_complexes(rng, total, dim);
    let mut edges = Vec::new();
    let mut offset = 0;
    for &size in &sizes {
        edges.extend(random_strongly_connected_edges(rng, offset..offset + size));
        offset += size;
    }
    ReactionNetwork::new(species_names(dim), complexes, edges).expect("generated network is valid")
}

/// Log-uniform rates in `[lo, hi]`, one per edge.
pub fn random_rates<R: Rng>(rng: &mut R, count: usize, lo: f64, hi: f64) -> RateVector {
    RateVector::new(
        (0..count)
            .map(|_| rng.gen_range(lo.ln()..hi.ln()).exp())
            .collect(),
    )
    .expect("log-uniform rates are positive")
}

/// Log-uniform strictly positive state in `[lo, hi]^n`.
pub fn random_state<R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> StateVector {
    StateVector::new(
        (0..dim)
            .map(|_| rng.gen_range(lo.ln()..hi.ln()).exp())
            .collect(),
    )
    .expect("log-uniform states are positive")
}
