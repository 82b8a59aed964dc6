//! Driver graphs on the hypercube vertex set and their Laplacians.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{eigh, HermitianOperator, LinalgError};
use crate::ordering::{check_n, hamming, weight, Ordering, OrderingError};

pub const MAX_GRAPH_N: u32 = 9;
const CONNECTIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("graph {0} has no edges")]
    Degenerate(String),
    #[error("graph {0} is disconnected")]
    Disconnected(String),
    #[error("window must be at least 1")]
    BadWindow,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    Hypercube,
    Sector,
    PathWindow { ordering: String, w: usize },
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Hypercube => f.write_str("hypercube"),
            GraphKind::Sector => f.write_str("sector"),
            GraphKind::PathWindow { ordering, w } => write!(f, "path_window[{ordering},w={w}]"),
        }
    }
}

/// Simple undirected graph on `0..2^n`; edges stored as `(x, y)` with
/// `x < y`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpec {
    pub n: u32,
    pub kind: GraphKind,
    edges: Vec<(u32, u32)>,
}

impl GraphSpec {
    fn from_edges(n: u32, kind: GraphKind, mut edges: Vec<(u32, u32)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        Self { n, kind, edges }
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.n
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        let key = (x.min(y), x.max(y));
        self.edges.binary_search(&key).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count()];
        for &(x, y) in &self.edges {
            deg[x as usize] += 1;
            deg[y as usize] += 1;
        }
        deg
    }

    /// Dense row-major 0/1 adjacency.
    pub fn adjacency(&self) -> Vec<f64> {
        let dim = self.vertex_count();
        let mut a = vec![0.0; dim * dim];
        for &(x, y) in &self.edges {
            a[x as usize * dim + y as usize] = 1.0;
            a[y as usize * dim + x as usize] = 1.0;
        }
        a
    }

    pub fn is_connected(&self) -> bool {
        let dim = self.vertex_count();
        let mut parent: Vec<usize> = (0..dim).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let mut components = dim;
        for &(x, y) in &self.edges {
            let (rx, ry) = (find(&mut parent, x as usize), find(&mut parent, y as usize));
            if rx != ry {
                parent[rx] = ry;
                components -= 1;
            }
        }
        components == 1
    }
}

pub fn hypercube_graph(n: u32) -> Result<GraphSpec, GraphError> {
    check_n(n, 1, MAX_GRAPH_N)?;
    let edges = (0..1u32 << n)
        .flat_map(|x| (0..n).map(move |i| (x, x | 1 << i)).filter(|&(x, y)| x != y))
        .collect();
    Ok(GraphSpec::from_edges(n, GraphKind::Hypercube, edges))
}

pub fn sector_graph(n: u32) -> Result<GraphSpec, GraphError> {
    check_n(n, 1, MAX_GRAPH_N)?;
    let len = 1u32 << n;
    let edges = (0..len)
        .flat_map(|x| (x + 1..len).map(move |y| (x, y)))
        .filter(|&(x, y)| weight(x).abs_diff(weight(y)) <= 1)
        .collect();
    Ok(GraphSpec::from_edges(n, GraphKind::Sector, edges))
}

/// Pairs within path distance `w` of each other whose weights differ by at
/// most one.
pub fn path_window_graph(ordering: &Ordering, w: usize) -> Result<GraphSpec, GraphError> {
    if w == 0 {
        return Err(GraphError::BadWindow);
    }
    let n = ordering.n();
    check_n(n, 1, MAX_GRAPH_N)?;
    let states = ordering.states();
    let mut edges = Vec::new();
    for t in 0..states.len() {
        for u in t + 1..(t + w + 1).min(states.len()) {
            let (x, y) = (states[t], states[u]);
            if weight(x).abs_diff(weight(y)) <= 1 {
                edges.push((x.min(y), x.max(y)));
            }
        }
    }
    Ok(GraphSpec::from_edges(n, GraphKind::PathWindow { ordering: ordering.label(), w }, edges))
}

/// `L = D - A`, optionally divided by its largest eigenvalue.
#[derive(Clone, Debug)]
pub struct LaplacianOperator {
    pub graph: GraphKind,
    pub operator: HermitianOperator,
    pub lambda_max: f64,
    pub normalized: bool,
    /// Ascending spectrum of the unnormalized Laplacian.
    pub spectrum: Vec<f64>,
}

impl LaplacianOperator {
    /// Second-smallest eigenvalue of the stored operator.
    pub fn algebraic_connectivity(&self) -> f64 {
        let scale = if self.normalized { self.lambda_max } else { 1.0 };
        self.spectrum.get(1).copied().unwrap_or(0.0) / scale
    }
}

pub fn laplacian_matrix(graph: &GraphSpec) -> Vec<f64> {
    let dim = graph.vertex_count();
    let mut l = vec![0.0; dim * dim];
    for &(x, y) in graph.edges() {
        let (x, y) = (x as usize, y as usize);
        l[x * dim + y] -= 1.0;
        l[y * dim + x] -= 1.0;
        l[x * dim + x] += 1.0;
        l[y * dim + y] += 1.0;
    }
    l
}

pub fn laplacian(graph: &GraphSpec, normalize: bool) -> Result<LaplacianOperator, GraphError> {
    if graph.edge_count() == 0 {
        return Err(GraphError::Degenerate(graph.kind.to_string()));
    }
    let dim = graph.vertex_count();
    let raw = HermitianOperator::from_real(dim, laplacian_matrix(graph))?;
    let spectrum = eigh(&raw)?.eigenvalues().to_vec();
    let lambda_max = *spectrum.last().expect("nonempty");
    let operator = if normalize { raw.scaled(1.0 / lambda_max) } else { raw };
    Ok(LaplacianOperator { graph: graph.kind.clone(), operator, lambda_max, normalized: normalize, spectrum })
}

/// Normalized Laplacian of a graph that must be connected.
pub fn connected_normalized_laplacian(graph: &GraphSpec) -> Result<LaplacianOperator, GraphError> {
    if !graph.is_connected() {
        return Err(GraphError::Disconnected(graph.kind.to_string()));
    }
    let lap = laplacian(graph, true)?;
    if lap.algebraic_connectivity() <= CONNECTIVITY_TOL {
        return Err(GraphError::Disconnected(graph.kind.to_string()));
    }
    Ok(lap)
}

/// Edge counts and spectral extremes, for inspection.
#[derive(Clone, Debug, Serialize)]
pub struct GraphStats {
    pub graph: String,
    pub n: u32,
    pub edges: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub lambda_max: f64,
    pub algebraic_connectivity: f64,
    pub connected: bool,
}

pub fn graph_stats(graph: &GraphSpec) -> Result<GraphStats, GraphError> {
    let lap = laplacian(graph, false)?;
    let deg = graph.degrees();
    Ok(GraphStats {
        graph: graph.kind.to_string(),
        n: graph.n,
        edges: graph.edge_count(),
        min_degree: deg.iter().copied().min().unwrap_or(0),
        max_degree: deg.iter().copied().max().unwrap_or(0),
        lambda_max: lap.lambda_max,
        algebraic_connectivity: lap.algebraic_connectivity(),
        connected: graph.is_connected(),
    })
}

/// `n I - sum_i X_i`, built independently of the edge list.
pub fn transverse_field_matrix(n: u32) -> Vec<f64> {
    let dim = 1usize << n;
    let mut m = vec![0.0; dim * dim];
    for x in 0..dim {
        m[x * dim + x] = n as f64;
        for y in 0..dim {
            if hamming(x as u32, y as u32) == 1 {
                m[x * dim + y] -= 1.0;
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ordering::{standard_ordering, strict_ordering, OrderingKind};

    fn edge_set(g: &GraphSpec) -> Vec<(u32, u32)> {
        g.edges().to_vec()
    }

    #[test]
    fn hypercube_counts() {
        assert_eq!(edge_set(&hypercube_graph(1).unwrap()), vec![(0, 1)]);
        for n in 1..=8 {
            assert_eq!(hypercube_graph(n).unwrap().edge_count(), n as usize * (1 << (n - 1)));
        }
        assert!(hypercube_graph(0).is_err());
        assert!(hypercube_graph(10).is_err());
    }

    #[test]
    fn sector_counts() {
        assert_eq!(sector_graph(1).unwrap().edge_count(), 1);
        let g2 = sector_graph(2).unwrap();
        assert_eq!(g2.edge_count(), 5);
        assert!(!g2.contains(0b00, 0b11));
        assert_eq!(sector_graph(3).unwrap().edge_count(), 21);
        assert!(sector_graph(8).unwrap().is_connected());
    }

    #[test]
    fn strict_window_one_is_the_path() {
        let o = strict_ordering(5).unwrap();
        let g = path_window_graph(&o, 1).unwrap();
        assert_eq!(g.edge_count(), 31);
        for t in 0..31 {
            assert!(g.contains(o.states()[t], o.states()[t + 1]));
        }
    }

    #[test]
    fn wide_window_equals_sector() {
        for kind in [OrderingKind::Binary, OrderingKind::Gray] {
            let o = standard_ordering(kind, 4, None).unwrap();
            assert_eq!(path_window_graph(&o, 15).unwrap().edges(), sector_graph(4).unwrap().edges());
        }
        assert!(matches!(path_window_graph(&strict_ordering(3).unwrap(), 0), Err(GraphError::BadWindow)));
    }

    #[test]
    fn single_edge_laplacian() {
        let lap = laplacian(&hypercube_graph(1).unwrap(), false).unwrap();
        assert_eq!(lap.operator.as_real().unwrap(), &[1.0, -1.0, -1.0, 1.0]);
        assert!((lap.lambda_max - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hypercube_spectrum_three_bits() {
        let lap = laplacian(&hypercube_graph(3).unwrap(), false).unwrap();
        let expected = [0.0, 2.0, 2.0, 2.0, 4.0, 4.0, 4.0, 6.0];
        for (a, b) in lap.spectrum.iter().zip(expected) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn hypercube_matches_transverse_field() {
        for n in 1..=4 {
            let l = laplacian_matrix(&hypercube_graph(n).unwrap());
            assert_eq!(l, transverse_field_matrix(n));
        }
    }

    #[test]
    fn normalized_has_unit_norm() {
        let lap = laplacian(&sector_graph(5).unwrap(), true).unwrap();
        let top = *eigh(&lap.operator).unwrap().eigenvalues().last().unwrap();
        assert!((top - 1.0).abs() < 1e-10);
    }

    #[test]
    fn empty_graph_rejected() {
        let g = GraphSpec::from_edges(2, GraphKind::Sector, vec![]);
        assert!(matches!(laplacian(&g, true), Err(GraphError::Degenerate(_))));
    }

    #[test]
    fn disconnected_rejected() {
        let g = GraphSpec::from_edges(2, GraphKind::Sector, vec![(0, 1), (2, 3)]);
        assert!(!g.is_connected());
        assert!(matches!(connected_normalized_laplacian(&g), Err(GraphError::Disconnected(_))));
        let stats = graph_stats(&g).unwrap();
        assert!(!stats.connected);
        assert!(stats.algebraic_connectivity.abs() < 1e-12);
    }
}
