use std::cell::Cell;
use std::ops::{Add, AddAssign};

use rand::Rng;

use super::GraphError;

/// The adjacency-list query model: degree queries, i-th neighbor queries and
/// uniform vertex sampling, together with knowledge of `n` and `m`.
pub trait AdjacencyList {
    fn vertex_count(&self) -> usize;
    fn edge_count(&self) -> usize;
    fn degree(&self, v: usize) -> Result<usize, GraphError>;
    fn neighbor(&self, v: usize, i: usize) -> Result<usize, GraphError>;
    fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> usize;
}

impl<T: AdjacencyList + ?Sized> AdjacencyList for &T {
    fn vertex_count(&self) -> usize {
        (**self).vertex_count()
    }
    fn edge_count(&self) -> usize {
        (**self).edge_count()
    }
    fn degree(&self, v: usize) -> Result<usize, GraphError> {
        (**self).degree(v)
    }
    fn neighbor(&self, v: usize, i: usize) -> Result<usize, GraphError> {
        (**self).neighbor(v, i)
    }
    fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        (**self).sample_vertex(rng)
    }
}

/// Query counts observed by a [`CountingOracle`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AccessStats {
    pub degree_queries: u64,
    pub neighbor_queries: u64,
    pub vertex_samples: u64,
}

impl AccessStats {
    pub fn total(&self) -> u64 {
        self.degree_queries + self.neighbor_queries + self.vertex_samples
    }
}

impl Add for AccessStats {
    type Output = AccessStats;

    fn add(self, rhs: Self) -> Self::Output {
        AccessStats {
            degree_queries: self.degree_queries + rhs.degree_queries,
            neighbor_queries: self.neighbor_queries + rhs.neighbor_queries,
            vertex_samples: self.vertex_samples + rhs.vertex_samples,
        }
    }
}

impl AddAssign for AccessStats {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Facade that forwards the query model and counts every access.
///
/// It deliberately offers nothing beyond [`AdjacencyList`] and the counters,
/// so code holding one cannot read the graph any other way. One oracle serves
/// one estimator call on one thread.
#[derive(Debug)]
pub struct CountingOracle<'g, G: ?Sized> {
    inner: &'g G,
    degree: Cell<u64>,
    neighbor: Cell<u64>,
    sample: Cell<u64>,
}

impl<'g, G: AdjacencyList + ?Sized> CountingOracle<'g, G> {
    pub fn new(inner: &'g G) -> Self {
        CountingOracle {
            inner,
            degree: Cell::new(0),
            neighbor: Cell::new(0),
            sample: Cell::new(0),
        }
    }

    pub fn stats(&self) -> AccessStats {
        AccessStats {
            degree_queries: self.degree.get(),
            neighbor_queries: self.neighbor.get(),
            vertex_samples: self.sample.get(),
        }
    }

    pub fn reset(&self) {
        self.degree.set(0);
        self.neighbor.set(0);
        self.sample.set(0);
    }
}

impl<G: AdjacencyList + ?Sized> AdjacencyList for CountingOracle<'_, G> {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn degree(&self, v: usize) -> Result<usize, GraphError> {
        self.degree.set(self.degree.get() + 1);
        self.inner.degree(v)
    }

    fn neighbor(&self, v: usize, i: usize) -> Result<usize, GraphError> {
        self.neighbor.set(self.neighbor.get() + 1);
        self.inner.neighbor(v, i)
    }

    fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sample.set(self.sample.get() + 1);
        self.inner.sample_vertex(rng)
    }
}
