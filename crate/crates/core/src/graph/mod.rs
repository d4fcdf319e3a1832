//! Undirected multigraph storage with adjacency-list query access.
//!
//! A [`Graph`] is immutable once built. Neighbor lists are kept sorted so that
//! `neighbor(v, i)` is deterministic, parallel edges appear as repeated
//! entries, and self-loops never survive construction. Estimators do not see
//! the [`Graph`] type directly; they are written against [`AdjacencyList`],
//! which exposes only degree queries, neighbor queries and uniform vertex
//! sampling.

mod access;
mod contract;
pub mod generate;
mod io;

use std::collections::{HashMap, VecDeque};

pub use access::{AccessStats, AdjacencyList, CountingOracle};
pub use contract::ContractedView;
pub use io::{load_edge_list, load_path, read_binary, write_binary, LoadOptions, CACHE_MAGIC};

use rand::Rng;

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("graph has no edges")]
    Empty,
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("neighbor index {index} out of range for vertex {vertex} (degree {degree})")]
    NeighborOutOfRange { vertex: usize, index: usize, degree: usize },
    #[error("cannot contract vertex {0} with itself")]
    ContractSelf(usize),
    #[error("random walk reached isolated vertex {0}")]
    Isolated(usize),
    #[error("graph too large: {0} vertices do not fit 32-bit ids")]
    TooLarge(usize),
    #[error("binary cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable undirected multigraph in compressed sparse row form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    edge_count: usize,
    connected: bool,
    original_ids: Vec<u64>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Parallel edges are kept, self-loops dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
        }
        Self::from_parts(n, &edges, (0..n as u64).collect())
    }

    pub(crate) fn from_parts(n: usize, edges: &[(usize, usize)], original_ids: Vec<u64>) -> Result<Self, GraphError> {
        if n > u32::MAX as usize {
            return Err(GraphError::TooLarge(n));
        }
        debug_assert_eq!(original_ids.len(), n);
        let mut degrees = vec![0usize; n];
        let mut edge_count = 0;
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            degrees[u] += 1;
            degrees[v] += 1;
            edge_count += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degrees {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; 2 * edge_count];
        for &(u, v) in edges {
            if u == v {
                continue;
            }
            targets[fill[u]] = v as u32;
            fill[u] += 1;
            targets[fill[v]] = u as u32;
            fill[v] += 1;
        }
        for v in 0..n {
            targets[offsets[v]..offsets[v + 1]].sort_unstable();
        }
        let mut graph = Graph {
            offsets,
            targets,
            edge_count,
            connected: false,
            original_ids,
        };
        graph.connected = graph.component_labels().1 <= 1;
        Ok(graph)
    }

    /// Reads every neighbor list through the query interface and stores the result.
    pub fn from_adjacency<G: AdjacencyList + ?Sized>(source: &G) -> Result<Self, GraphError> {
        let n = source.vertex_count();
        let mut edges = Vec::with_capacity(source.edge_count());
        for v in 0..n {
            for i in 0..source.degree(v)? {
                let u = source.neighbor(v, i)?;
                if v < u {
                    edges.push((v, u));
                }
            }
        }
        Self::from_parts(n, &edges, (0..n as u64).collect())
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    #[inline]
    fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            })
        }
    }

    #[inline]
    pub fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        Ok(self.offsets[v + 1] - self.offsets[v])
    }

    #[inline]
    pub fn neighbor(&self, v: usize, i: usize) -> Result<usize, GraphError> {
        let list = self.neighbors(v)?;
        list.get(i).map(|&u| u as usize).ok_or(GraphError::NeighborOutOfRange {
            vertex: v,
            index: i,
            degree: list.len(),
        })
    }

    /// Sorted neighbor list of `v`; parallel edges repeat.
    #[inline]
    pub fn neighbors(&self, v: usize) -> Result<&[u32], GraphError> {
        self.check_vertex(v)?;
        Ok(&self.targets[self.offsets[v]..self.offsets[v + 1]])
    }

    pub fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.gen_range(0..self.vertex_count())
    }

    /// Number of parallel edges joining `u` and `v`.
    pub fn multiplicity(&self, u: usize, v: usize) -> Result<usize, GraphError> {
        self.check_vertex(v)?;
        let list = self.neighbors(u)?;
        let key = v as u32;
        let lo = list.partition_point(|&x| x < key);
        let hi = list.partition_point(|&x| x <= key);
        Ok(hi - lo)
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, repeated per multiplicity.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |u| {
            self.targets[self.offsets[u]..self.offsets[u + 1]]
                .iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    pub fn min_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.offsets.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Raw id the vertex carried in its source file.
    pub fn original_id(&self, v: usize) -> u64 {
        self.original_ids[v]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    /// Inverse of [`Graph::original_id`].
    pub fn original_index(&self) -> HashMap<u64, usize> {
        self.original_ids.iter().enumerate().map(|(v, &id)| (id, v)).collect()
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn targets(&self) -> &[u32] {
        &self.targets
    }

    /// Component label per vertex (labels in order of lowest member) and the
    /// number of components.
    pub fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.vertex_count();
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            label[root] = next;
            queue.push_back(root);
            while let Some(u) = queue.pop_front() {
                for &w in &self.targets[self.offsets[u]..self.offsets[u + 1]] {
                    let w = w as usize;
                    if label[w] == usize::MAX {
                        label[w] = next;
                        queue.push_back(w);
                    }
                }
            }
            next += 1;
        }
        (label, next)
    }

    /// Identifies `s` and `t`. Edges between them vanish, every other parallel
    /// edge created by the merge is kept.
    ///
    /// The merged vertex takes `s`'s original id; vertices above `t` shift down by one.
    pub fn contract_pair(&self, s: usize, t: usize) -> Result<Graph, GraphError> {
        self.check_vertex(s)?;
        self.check_vertex(t)?;
        if s == t {
            return Err(GraphError::ContractSelf(s));
        }
        let map = |v: usize| {
            let v = if v == t { s } else { v };
            if v > t {
                v - 1
            } else {
                v
            }
        };
        let edges: Vec<(usize, usize)> = self.edges().map(|(u, v)| (map(u), map(v))).collect();
        let mut ids = self.original_ids.clone();
        ids.remove(t);
        Graph::from_parts(self.vertex_count() - 1, &edges, ids)
    }
}

impl AdjacencyList for Graph {
    fn vertex_count(&self) -> usize {
        Graph::vertex_count(self)
    }

    fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    fn degree(&self, v: usize) -> Result<usize, GraphError> {
        Graph::degree(self, v)
    }

    #[inline]
    fn neighbor(&self, v: usize, i: usize) -> Result<usize, GraphError> {
        Graph::neighbor(self, v, i)
    }

    fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        Graph::sample_vertex(self, rng)
    }
}
