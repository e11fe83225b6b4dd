//! Generalized chemical reaction networks.
//!
//! A network is a digraph without self-loops whose vertices carry a
//! stoichiometric complex `y(i)` and, at every source vertex, a kinetic-order
//! complex `ỹ(i)`. Edges carry positive rate constants, which are kept apart
//! from the network in a [`RateAssignment`].

mod cycles;
mod parse;

use std::collections::HashSet;

use nalgebra::DMatrix;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Subspace;

pub use cycles::{enumerate_cycles, enumerate_cycles_capped, Cycle, DEFAULT_CYCLE_CAP};
pub use parse::{parse_network, parse_network_file, to_text, NetworkFile};

/// Stoichiometric and (optional) kinetic-order complex of one vertex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexPair {
    pub stoich: Vec<f64>,
    pub kinetic: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Vertex {
    pub name: String,
    pub complex: ComplexPair,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
}

/// A validated generalized chemical reaction network `(G, y, ỹ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GmasNetwork {
    species: Vec<String>,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

impl GmasNetwork {
    pub fn new(species: Vec<String>, vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::NoVertices);
        }
        let n = species.len();
        let mut names = HashSet::new();
        for s in &species {
            if !names.insert(s.as_str()) {
                return Err(Error::InvalidNetwork(format!("species `{s}` declared twice")));
            }
        }
        let mut vnames = HashSet::new();
        for v in &vertices {
            if !vnames.insert(v.name.as_str()) {
                return Err(Error::InvalidNetwork(format!("vertex `{}` declared twice", v.name)));
            }
            if v.complex.stoich.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.complex.stoich.len() });
            }
            if v.complex.stoich.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(Error::InvalidNetwork(format!(
                    "stoichiometric complex of `{}` must be finite and non-negative",
                    v.name
                )));
            }
            if let Some(kin) = &v.complex.kinetic {
                if kin.len() != n {
                    return Err(Error::DimensionMismatch { expected: n, found: kin.len() });
                }
                if kin.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidNetwork(format!(
                        "kinetic-order complex of `{}` must be finite",
                        v.name
                    )));
                }
            }
        }
        let m = vertices.len();
        let mut seen = HashSet::new();
        for e in &edges {
            if e.source >= m || e.target >= m {
                return Err(Error::InvalidNetwork(format!(
                    "edge {} -> {} references a missing vertex",
                    e.source, e.target
                )));
            }
            if e.source == e.target {
                return Err(Error::SelfLoop(vertices[e.source].name.clone()));
            }
            if !seen.insert(*e) {
                return Err(Error::DuplicateEdge(
                    vertices[e.source].name.clone(),
                    vertices[e.target].name.clone(),
                ));
            }
            if vertices[e.source].complex.kinetic.is_none() {
                return Err(Error::MissingKinetic(vertices[e.source].name.clone()));
            }
        }
        Ok(Self { species, vertices, edges })
    }

    pub fn species(&self) -> &[String] {
        &self.species
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Number of species `n`.
    pub fn n_species(&self) -> usize {
        self.species.len()
    }

    /// Number of vertices `m`.
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_source(&self, vertex: usize) -> bool {
        self.edges.iter().any(|e| e.source == vertex)
    }

    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.name == name)
    }

    pub fn edge_index(&self, source: usize, target: usize) -> Option<usize> {
        self.edges.iter().position(|e| e.source == source && e.target == target)
    }

    /// Kinetic-order complex used in computations: the declared one, or zero at
    /// vertices without one (only allowed at non-sources).
    pub fn kinetic(&self, vertex: usize) -> Vec<f64> {
        self.vertices[vertex]
            .complex
            .kinetic
            .clone()
            .unwrap_or_else(|| vec![0.0; self.n_species()])
    }

    /// Adjacency lists `vertex -> [(target, edge index)]`.
    pub(crate) fn out_edges(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n_vertices()];
        for (idx, e) in self.edges.iter().enumerate() {
            adj[e.source].push((e.target, idx));
        }
        adj
    }

    fn digraph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::with_capacity(self.n_vertices(), self.n_edges());
        for _ in 0..self.n_vertices() {
            g.add_node(());
        }
        for e in &self.edges {
            g.add_edge((e.source as u32).into(), (e.target as u32).into(), ());
        }
        g
    }
}

/// Strictly positive rate constants, one per edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RateAssignment(Vec<f64>);

impl RateAssignment {
    pub fn new(k: Vec<f64>) -> Result<Self> {
        if k.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::NonPositive { what: "rate constants" });
        }
        Ok(Self(k))
    }

    /// Unit rates on every edge of `net`.
    pub fn ones(net: &GmasNetwork) -> Self {
        Self(vec![1.0; net.n_edges()])
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

    pub(crate) fn check_for(&self, net: &GmasNetwork) -> Result<()> {
        if self.len() != net.n_edges() {
            return Err(Error::DimensionMismatch { expected: net.n_edges(), found: self.len() });
        }
        Ok(())
    }
}

/// `Y`, `Ỹ`, `I_E` and `I_E^s` of a network.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralMatrices {
    /// n×m, columns `y(i)`.
    pub y: DMatrix<f64>,
    /// n×m, columns `ỹ(i)`; zero at non-source vertices without a declared complex.
    pub y_tilde: DMatrix<f64>,
    /// m×|E| incidence matrix.
    pub incidence: DMatrix<f64>,
    /// m×|E| source matrix.
    pub source: DMatrix<f64>,
}

pub fn structural_matrices(net: &GmasNetwork) -> StructuralMatrices {
    let n = net.n_species();
    let m = net.n_vertices();
    let ne = net.n_edges();
    let y = DMatrix::from_fn(n, m, |s, i| net.vertices[i].complex.stoich[s]);
    let y_tilde = DMatrix::from_fn(n, m, |s, i| {
        net.vertices[i].complex.kinetic.as_ref().map_or(0.0, |k| k[s])
    });
    let mut incidence = DMatrix::zeros(m, ne);
    let mut source = DMatrix::zeros(m, ne);
    for (j, e) in net.edges.iter().enumerate() {
        incidence[(e.source, j)] = -1.0;
        incidence[(e.target, j)] = 1.0;
        source[(e.source, j)] = 1.0;
    }
    StructuralMatrices { y, y_tilde, incidence, source }
}

/// Laplacian `A_k = I_E diag(k) (I_E^s)ᵀ` of the labeled digraph.
pub fn laplacian(net: &GmasNetwork, k: &RateAssignment) -> Result<DMatrix<f64>> {
    k.check_for(net)?;
    Ok(laplacian_of_edges(net.n_vertices(), net.edges.iter().copied().zip(k.0.iter().copied())))
}

/// Laplacian of an arbitrary labeled edge set on `m` vertices.
pub(crate) fn laplacian_of_edges(m: usize, edges: impl IntoIterator<Item = (Edge, f64)>) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(m, m);
    for (e, k) in edges {
        a[(e.target, e.source)] += k;
        a[(e.source, e.source)] -= k;
    }
    a
}

/// True iff every connected component of the reaction graph is strongly connected.
pub fn weakly_reversible(net: &GmasNetwork) -> bool {
    let sccs = tarjan_scc(&net.digraph()).len();
    sccs == component_count(net)
}

/// Connected-component label of each vertex (labels are `0..count`, in order
/// of first appearance).
pub fn component_labels(net: &GmasNetwork) -> Vec<usize> {
    let m = net.n_vertices();
    let mut uf = UnionFind::new(m);
    for e in &net.edges {
        uf.union(e.source, e.target);
    }
    let mut relabel = std::collections::HashMap::new();
    (0..m)
        .map(|i| {
            let root = uf.find(i);
            let next = relabel.len();
            *relabel.entry(root).or_insert(next)
        })
        .collect()
}

pub fn component_count(net: &GmasNetwork) -> usize {
    component_labels(net).into_iter().max().map_or(0, |c| c + 1)
}

/// `S = im(Y I_E)`.
pub fn stoichiometric_subspace(net: &GmasNetwork) -> Subspace {
    let sm = structural_matrices(net);
    Subspace::from_spanning(&(&sm.y * &sm.incidence))
}

/// `S̃ = im(Ỹ I_E)`.
pub fn kinetic_subspace(net: &GmasNetwork) -> Subspace {
    let sm = structural_matrices(net);
    Subspace::from_spanning(&(&sm.y_tilde * &sm.incidence))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle3() -> GmasNetwork {
        parse_network(
            "species: X Y Z\n\
             vertex a: stoich = X, kinetic = X\n\
             vertex b: stoich = Y, kinetic = Y\n\
             vertex c: stoich = Z, kinetic = Z\n\
             edge a -> b\nedge b -> c\nedge c -> a\n",
        )
        .unwrap()
    }

    fn xy_pair() -> GmasNetwork {
        parse_network(
            "species: X Y\n\
             vertex x: stoich = X, kinetic = X\n\
             vertex y: stoich = Y, kinetic = 0\n\
             edge x <-> y\n",
        )
        .unwrap()
    }

    #[test]
    fn incidence_of_three_cycle() {
        let sm = structural_matrices(&cycle3());
        let expected = DMatrix::from_row_slice(3, 3, &[-1., 0., 1., 1., -1., 0., 0., 1., -1.]);
        assert_eq!(sm.incidence, expected);
        for j in 0..3 {
            assert_eq!(sm.incidence.column(j).sum(), 0.0);
            assert_eq!(sm.source.column(j).sum(), 1.0);
        }
    }

    #[test]
    fn xy_structural_matrices() {
        let sm = structural_matrices(&xy_pair());
        assert_eq!(sm.y, DMatrix::from_row_slice(2, 2, &[1., 0., 0., 1.]));
        assert_eq!(sm.y_tilde, DMatrix::from_row_slice(2, 2, &[1., 0., 0., 0.]));
    }

    #[test]
    fn non_source_kinetic_is_zero() {
        let net = parse_network(
            "species: X Y\nvertex a: stoich = X, kinetic = 2 X\nvertex b: stoich = Y\nedge a -> b\n",
        )
        .unwrap();
        let sm = structural_matrices(&net);
        assert_eq!(sm.y_tilde.column(1).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.0]);
    }

    #[test]
    fn laplacian_examples() {
        let a = laplacian(&cycle3(), &RateAssignment::ones(&cycle3())).unwrap();
        let expected = DMatrix::from_row_slice(3, 3, &[-1., 0., 1., 1., -1., 0., 0., 1., -1.]);
        assert_eq!(a, expected);

        let a = laplacian(&xy_pair(), &RateAssignment::new(vec![2.0, 3.0]).unwrap()).unwrap();
        assert_eq!(a, DMatrix::from_row_slice(2, 2, &[-2., 3., 2., -3.]));
    }

    #[test]
    fn laplacian_rejects_wrong_length() {
        let r = laplacian(&cycle3(), &RateAssignment::new(vec![1.0]).unwrap());
        assert!(matches!(r, Err(Error::DimensionMismatch { expected: 3, found: 1 })));
    }

    #[test]
    fn rates_must_be_positive() {
        assert!(RateAssignment::new(vec![1.0, 0.0]).is_err());
        assert!(RateAssignment::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn weak_reversibility() {
        assert!(weakly_reversible(&cycle3()));
        let one_edge = parse_network(
            "species: X Y\nvertex a: stoich = X, kinetic = X\nvertex b: stoich = Y\nedge a -> b\n",
        )
        .unwrap();
        assert!(!weakly_reversible(&one_edge));
        let two_pairs = parse_network(
            "species: A B C D\n\
             vertex a: stoich = A, kinetic = A\nvertex b: stoich = B, kinetic = B\n\
             vertex c: stoich = C, kinetic = C\nvertex d: stoich = D, kinetic = D\n\
             edge a <-> b\nedge c <-> d\n",
        )
        .unwrap();
        assert!(weakly_reversible(&two_pairs));
        assert_eq!(component_count(&two_pairs), 2);
        assert_eq!(component_labels(&two_pairs), vec![0, 0, 1, 1]);
    }

    #[test]
    fn subspace_dimensions() {
        assert_eq!(stoichiometric_subspace(&cycle3()).dim(), 2);
        let s = stoichiometric_subspace(&xy_pair());
        assert_eq!(s.dim(), 1);
        let b = s.basis();
        let r = 1.0 / 2f64.sqrt();
        // sign of a basis vector is arbitrary
        let sign = b[(1, 0)].signum();
        assert!((b[(0, 0)] * sign + r).abs() < 1e-12);
        assert!((b[(1, 0)] * sign - r).abs() < 1e-12);
        assert_eq!(kinetic_subspace(&xy_pair()).dim(), 1);
    }

    #[test]
    fn validation_errors() {
        let v = |name: &str, kin: Option<Vec<f64>>| Vertex {
            name: name.into(),
            complex: ComplexPair { stoich: vec![1.0], kinetic: kin },
        };
        assert!(matches!(GmasNetwork::new(vec!["X".into()], vec![], vec![]), Err(Error::NoVertices)));
        let r = GmasNetwork::new(
            vec!["X".into()],
            vec![v("a", Some(vec![1.0])), v("b", None)],
            vec![Edge { source: 1, target: 0 }],
        );
        assert!(matches!(r, Err(Error::MissingKinetic(name)) if name == "b"));
        let r = GmasNetwork::new(
            vec!["X".into()],
            vec![v("a", Some(vec![1.0]))],
            vec![Edge { source: 0, target: 0 }],
        );
        assert!(matches!(r, Err(Error::SelfLoop(_))));
        let r = GmasNetwork::new(
            vec!["X".into()],
            vec![v("a", Some(vec![1.0])), v("b", None)],
            vec![Edge { source: 0, target: 1 }, Edge { source: 0, target: 1 }],
        );
        assert!(matches!(r, Err(Error::DuplicateEdge(..))));
    }
}
