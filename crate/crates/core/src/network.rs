//! Reaction networks as Euclidean embedded graphs.
//!
//! A network is a directed graph whose vertices (the complexes) are points of
//! species space R^n. Edges are reactions; the displacement `y_dst - y_src`
//! of an edge is its reaction vector.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// A complex: one vertex of the reaction graph, embedded in species space.
#[derive(Debug, Clone, PartialEq)]
pub struct Complex {
    coords: DVector<f64>,
}

impl Complex {
    pub fn new(coords: Vec<f64>) -> Self {
        Complex {
            coords: DVector::from_vec(coords),
        }
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }
}

/// Undirected connected components of a reaction graph (the linkage classes).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinkageDecomposition {
    component_id: Vec<usize>,
    count: usize,
}

impl LinkageDecomposition {
    /// Component id of each vertex; ids are contiguous starting at 0.
    pub fn component_id(&self) -> &[usize] {
        &self.component_id
    }

    /// Number of linkage classes, `l`.
    pub fn count(&self) -> usize {
        self.count
    }

    /// Vertex indices of each class, in ascending order.
    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (v, &c) in self.component_id.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

/// Orthonormal basis of the stoichiometric subspace
/// S = span { y_dst - y_src : edges }.
#[derive(Debug, Clone, PartialEq)]
pub struct StoichiometricSpace {
    basis: DMatrix<f64>,
}

impl StoichiometricSpace {
    /// Dimension `s` of the subspace.
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    /// n x s matrix with orthonormal columns spanning S.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Orthonormal basis of the orthogonal complement of S (n x (n - s)).
    pub fn complement(&self) -> DMatrix<f64> {
        linalg::orthonormal_complement(&self.basis)
    }

    /// Component of `v` orthogonal to S. Vanishes exactly when `v` lies in S.
    pub fn residual(&self, v: &DVector<f64>) -> DVector<f64> {
        linalg::project_out(&self.basis, v)
    }
}

#[derive(Serialize, Deserialize)]
struct NetworkFile {
    species: Vec<String>,
    complexes: Vec<Vec<f64>>,
    edges: Vec<(usize, usize)>,
}

/// A mass-action reaction network: species names, embedded complexes, and
/// directed edges between them. Immutable after construction; all
/// structural invariants are validated by [`ReactionNetwork::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionNetwork {
    species: Vec<String>,
    complexes: Vec<Complex>,
    edges: Vec<(usize, usize)>,
}

impl ReactionNetwork {
    pub fn new(
        species: Vec<String>,
        complexes: Vec<Complex>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let n = species.len();
        for (i, name) in species.iter().enumerate() {
            if species[..i].iter().any(|other| other == name) {
                return Err(Error::DuplicateSpecies { name: name.clone() });
            }
        }
        for (i, c) in complexes.iter().enumerate() {
            if c.dim() != n {
                return Err(Error::DimensionMismatch {
                    index: i,
                    found: c.dim(),
                    expected: n,
                });
            }
            if c.coords.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFiniteCoordinate { index: i });
            }
        }
        for i in 0..complexes.len() {
            for j in (i + 1)..complexes.len() {
                if complexes[i] == complexes[j] {
                    return Err(Error::DuplicateComplex {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        let m = complexes.len();
        for (e, &(src, dst)) in edges.iter().enumerate() {
            for &v in &[src, dst] {
                if v >= m {
                    return Err(Error::EdgeOutOfRange {
                        edge: e,
                        vertex: v,
                        vertex_count: m,
                    });
                }
            }
            if src == dst {
                return Err(Error::SelfLoop {
                    edge: e,
                    vertex: src,
                });
            }
            if edges[..e].contains(&(src, dst)) {
                return Err(Error::DuplicateEdge { src, dst });
            }
        }
        Ok(ReactionNetwork {
            species,
            complexes,
            edges,
        })
    }

    /// Parse a network from its JSON file format:
    /// `{"species": [...], "complexes": [[...]], "edges": [[src, dst], ...]}`
    /// with 0-based vertex indices.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(text)?;
        ReactionNetwork::new(
            file.species,
            file.complexes.into_iter().map(Complex::new).collect(),
            file.edges,
        )
    }

    /// Serialize to the JSON file format. `from_json_str` reproduces the
    /// network field by field.
    pub fn to_json_string(&self) -> String {
        let file = NetworkFile {
            species: self.species.clone(),
            complexes: self
                .complexes
                .iter()
                .map(|c| c.coords.iter().copied().collect())
                .collect(),
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&file).expect("network serialization is infallible")
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    /// Number of species, `n`.
    pub fn species_count(&self) -> usize {
        self.species.len()
    }

    pub fn complexes(&self) -> &[Complex] {
        &self.complexes
    }

    /// Number of complexes (vertices), `m`.
    pub fn complex_count(&self) -> usize {
        self.complexes.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Reaction vector `y_dst - y_src` of edge `e`.
    pub fn reaction_vector(&self, e: usize) -> DVector<f64> {
        let (src, dst) = self.edges[e];
        self.complexes[dst].coords() - self.complexes[src].coords()
    }

    /// The n x m matrix whose columns are the complexes.
    pub fn complex_matrix(&self) -> DMatrix<f64> {
        let n = self.species_count();
        let m = self.complex_count();
        let mut y = DMatrix::zeros(n, m);
        for (j, c) in self.complexes.iter().enumerate() {
            y.set_column(j, c.coords());
        }
        y
    }

    /// Undirected connected components of the graph.
    pub fn linkage_classes(&self) -> LinkageDecomposition {
        let m = self.complex_count();
        let mut adjacency = vec![Vec::new(); m];
        for &(src, dst) in &self.edges {
            adjacency[src].push(dst);
            adjacency[dst].push(src);
        }
        let mut component_id = vec![usize::MAX; m];
        let mut count = 0;
        for start in 0..m {
            if component_id[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            component_id[start] = count;
            while let Some(v) = stack.pop() {
                for &w in &adjacency[v] {
                    if component_id[w] == usize::MAX {
                        component_id[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        LinkageDecomposition {
            component_id,
            count,
        }
    }

    /// True when every linkage class is strongly connected as a digraph.
    pub fn is_weakly_reversible(&self) -> bool {
        self.strongly_connected_component_count() == self.linkage_classes().count()
    }

    fn strongly_connected_component_count(&self) -> usize {
        let m = self.complex_count();
        let mut forward = vec![Vec::new(); m];
        let mut backward = vec![Vec::new(); m];
        for &(src, dst) in &self.edges {
            forward[src].push(dst);
            backward[dst].push(src);
        }
        // Kosaraju, iterative: finish order on the forward graph, then
        // sweep the reverse graph in reverse finish order.
        let mut visited = vec![false; m];
        let mut order = Vec::with_capacity(m);
        for start in 0..m {
            if visited[start] {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            visited[start] = true;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < forward[v].len() {
                    let w = forward[v][*next];
                    *next += 1;
                    if !visited[w] {
                        visited[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut assigned = vec![false; m];
        let mut count = 0;
        for &start in order.iter().rev() {
            if assigned[start] {
                continue;
            }
            count += 1;
            let mut stack = vec![start];
            assigned[start] = true;
            while let Some(v) = stack.pop() {
                for &w in &backward[v] {
                    if !assigned[w] {
                        assigned[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Orthonormal basis of the stoichiometric subspace, with numerical rank
    /// decided by singular values.
    pub fn stoichiometric_space(&self) -> StoichiometricSpace {
        let n = self.species_count();
        let mut reactions = DMatrix::zeros(n, self.edge_count());
        for e in 0..self.edge_count() {
            reactions.set_column(e, &self.reaction_vector(e));
        }
        let (basis, _) = linalg::column_space_basis(&reactions);
        StoichiometricSpace { basis }
    }

    /// Deficiency `m - s - l`. A negative value would indicate an internal
    /// rank bug, so it aborts.
    pub fn deficiency(&self) -> usize {
        let m = self.complex_count();
        let s = self.stoichiometric_space().dim();
        let l = self.linkage_classes().count();
        assert!(
            m >= s + l,
            "deficiency would be negative (m = {m}, s = {s}, l = {l})"
        );
        m - s - l
    }

    /// Image of the network under the invertible affine map `y -> a*y + b`:
    /// complexes move, the edge list is unchanged.
    pub fn affine_transform(&self, a: &DMatrix<f64>, b: &DVector<f64>) -> Result<Self> {
        let n = self.species_count();
        if a.nrows() != n || a.ncols() != n || b.len() != n {
            return Err(Error::TransformShape {
                expected: n,
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        if n > 0 && linalg::numeric_rank(a) < n {
            return Err(Error::SingularTransform);
        }
        let complexes: Vec<Complex> = self
            .complexes
            .iter()
            .map(|c| Complex {
                coords: a * c.coords() + b,
            })
            .collect();
        ReactionNetwork::new(self.species.clone(), complexes, self.edges.clone()).map_err(|err| {
            match err {
                Error::DuplicateComplex { first, second } => {
                    Error::ComplexCollision { first, second }
                }
                other => other,
            }
        })
    }
}
