//! Mass-action dynamics: the monomial vector, the Laplacian-type matrix,
//! the vector field, complex-balance residuals, and fixed-step integration.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::network::ReactionNetwork;
use crate::tol;

/// One strictly positive rate constant per edge.
#[derive(Debug, Clone, PartialEq)]
pub struct RateVector(Vec<f64>);

impl RateVector {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        for (index, &value) in rates.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveRate { index, value });
            }
        }
        Ok(RateVector(rates))
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

    /// Rescaled rates `c * k`; `c` must be positive.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        RateVector::new(self.0.iter().map(|k| c * k).collect())
    }
}

impl serde::Serialize for RateVector {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// Strictly positive species concentrations.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<f64>);

impl StateVector {
    pub fn new(x: Vec<f64>) -> Result<Self> {
        for (index, &value) in x.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveState { index, value });
            }
        }
        Ok(StateVector(DVector::from_vec(x)))
    }

    pub fn from_vector(x: DVector<f64>) -> Result<Self> {
        StateVector::new(x.iter().copied().collect())
    }

    pub fn as_vector(&self) -> &DVector<f64> {
        &self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.len() == 0
    }
}

/// The m x m matrix `A_k` acting on the monomial vector: column `i` carries
/// the total outflow rate of vertex `i` on the diagonal (negated) and the
/// rate of each edge `i -> j` in row `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianMatrix(DMatrix<f64>);

impl LaplacianMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl ReactionNetwork {
    /// The monomial vector with components `x^{y_i}`, evaluated in log space.
    pub fn psi(&self, x: &StateVector) -> DVector<f64> {
        let log_x = x.as_vector().map(f64::ln);
        DVector::from_iterator(
            self.complex_count(),
            self.complexes()
                .iter()
                .map(|c| c.coords().dot(&log_x).exp()),
        )
    }
}

/// A reaction network together with a rate vector.
#[derive(Debug, Clone, PartialEq)]
pub struct MassActionSystem {
    net: ReactionNetwork,
    rates: RateVector,
}

impl MassActionSystem {
    pub fn new(net: ReactionNetwork, rates: RateVector) -> Result<Self> {
        if rates.len() != net.edge_count() {
            return Err(Error::RateCountMismatch {
                found: rates.len(),
                expected: net.edge_count(),
            });
        }
        Ok(MassActionSystem { net, rates })
    }

    pub fn net(&self) -> &ReactionNetwork {
        &self.net
    }

    pub fn rates(&self) -> &RateVector {
        &self.rates
    }

    /// The matrix `A_k`. Column sums vanish by construction.
    pub fn laplacian(&self) -> LaplacianMatrix {
        let m = self.net.complex_count();
        let mut a = DMatrix::zeros(m, m);
        for (e, &(src, dst)) in self.net.edges().iter().enumerate() {
            a[(dst, src)] += self.rates.as_slice()[e];
        }
        for i in 0..m {
            let outflow: f64 = (0..m).map(|j| a[(j, i)]).sum();
            a[(i, i)] = -outflow;
        }
        LaplacianMatrix(a)
    }

    /// Flow carried by each edge at state `x`: `k_e * x^{y_src}`.
    fn edge_flows(&self, x: &StateVector) -> Vec<f64> {
        let log_x = x.as_vector().map(f64::ln);
        self.net
            .edges()
            .iter()
            .zip(self.rates.as_slice())
            .map(|(&(src, _), k)| k * self.net.complexes()[src].coords().dot(&log_x).exp())
            .collect()
    }

    /// Right-hand side of the species ODE at `x`, computed as
    /// `Y * A_k * psi(x)`. In debug builds the result is checked against the
    /// explicit edge sum of flows times reaction vectors.
    pub fn rhs(&self, x: &StateVector) -> DVector<f64> {
        let value = self.net.complex_matrix() * (self.laplacian().0 * self.net.psi(x));
        #[cfg(debug_assertions)]
        {
            let flows = self.edge_flows(x);
            let mut edge_sum = DVector::zeros(self.net.species_count());
            for (e, flow) in flows.iter().enumerate() {
                edge_sum += self.net.reaction_vector(e) * *flow;
            }
            let scale = 1.0 + value.norm().max(edge_sum.norm());
            debug_assert!(
                (&value - &edge_sum).norm() <= tol::RHS_AGREEMENT_REL * scale,
                "matrix and edge-sum vector fields disagree"
            );
        }
        value
    }

    /// Complex-balance residual at `x`: for each vertex, total inflow minus
    /// total outflow of mass-action flux. Equals `A_k * psi(x)` componentwise.
    pub fn complex_balance_residual(&self, x: &StateVector) -> DVector<f64> {
        let flows = self.edge_flows(x);
        let mut residual = DVector::zeros(self.net.complex_count());
        for (e, &(src, dst)) in self.net.edges().iter().enumerate() {
            residual[dst] += flows[e];
            residual[src] -= flows[e];
        }
        residual
    }

    /// Total flux moving through each vertex at `x` (inflow plus outflow).
    pub fn vertex_throughput(&self, x: &StateVector) -> DVector<f64> {
        let flows = self.edge_flows(x);
        let mut throughput = DVector::zeros(self.net.complex_count());
        for (e, &(src, dst)) in self.net.edges().iter().enumerate() {
            throughput[dst] += flows[e];
            throughput[src] += flows[e];
        }
        throughput
    }

    /// True when the largest complex-balance residual, relative to
    /// `1 + max vertex throughput`, stays within `tolerance`.
    pub fn is_complex_balanced_at(&self, x: &StateVector, tolerance: f64) -> bool {
        let residual = self.complex_balance_residual(x);
        let throughput = self.vertex_throughput(x);
        let scale = 1.0 + throughput.iter().fold(0.0_f64, |a, &b| a.max(b));
        residual.amax() / scale <= tolerance
    }

    /// Integrate the system with classical fixed-step RK4 from `x0` to
    /// `t_end`. Every stage must stay strictly positive; a step that would
    /// leave the positive orthant is reported as an error rather than
    /// clamped.
    pub fn simulate(&self, x0: &StateVector, t_end: f64, dt: f64) -> Result<Trajectory> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidSimulation(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(t_end.is_finite() && t_end >= 0.0) {
            return Err(Error::InvalidSimulation(format!(
                "t_end must be non-negative, got {t_end}"
            )));
        }
        if x0.len() != self.net.species_count() {
            return Err(Error::InvalidSimulation(format!(
                "x0 has {} entries, network has {} species",
                x0.len(),
                self.net.species_count()
            )));
        }
        let eval = |x: &DVector<f64>, t: f64| -> Result<DVector<f64>> {
            let state =
                StateVector::from_vector(x.clone()).map_err(|_| Error::StepUnderflow { t })?;
            Ok(self.rhs(&state))
        };
        let mut times = vec![0.0];
        let mut states = vec![x0.as_vector().clone()];
        let mut t = 0.0;
        let mut x = x0.as_vector().clone();
        while t < t_end * (1.0 - 1e-12) {
            let h = dt.min(t_end - t);
            let k1 = eval(&x, t)?;
            let k2 = eval(&(&x + &k1 * (h / 2.0)), t)?;
            let k3 = eval(&(&x + &k2 * (h / 2.0)), t)?;
            let k4 = eval(&(&x + &k3 * h), t)?;
            x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
            if x.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::StepUnderflow { t });
            }
            t += h;
            times.push(t);
            states.push(x.clone());
        }
        Ok(Trajectory {
            species: self.net.species().to_vec(),
            times,
            states,
        })
    }
}

/// A sampled trajectory: one state per accepted step, starting at t = 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    species: Vec<String>,
    times: Vec<f64>,
    states: Vec<DVector<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DVector<f64>] {
        &self.states
    }

    pub fn final_state(&self) -> &DVector<f64> {
        self.states
            .last()
            .expect("trajectory has at least one sample")
    }

    /// CSV with header `t,x1,...,xn` and full double precision
    /// (17 significant digits per value).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for name in &self.species {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (t, state) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t:.16e}"));
            for v in state.iter() {
                out.push_str(&format!(",{v:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}
