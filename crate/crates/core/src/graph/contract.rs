use rand::Rng;

use super::{AdjacencyList, GraphError};

/// Lazy view of a graph with `s` and `t` identified.
///
/// Only the merged vertex's neighbor list is built (from `deg(s) + deg(t)`
/// neighbor queries); every other query is forwarded to the underlying graph
/// with ids translated. Vertex numbering matches [`super::Graph::contract_pair`].
#[derive(Debug)]
pub struct ContractedView<'g, G: ?Sized> {
    inner: &'g G,
    t: usize,
    merged: usize,
    merged_neighbors: Vec<usize>,
    pair_multiplicity: usize,
}

impl<'g, G: AdjacencyList + ?Sized> ContractedView<'g, G> {
    pub fn new(inner: &'g G, s: usize, t: usize) -> Result<Self, GraphError> {
        let ds = inner.degree(s)?;
        let dt = inner.degree(t)?;
        if s == t {
            return Err(GraphError::ContractSelf(s));
        }
        let merged = if s > t { s - 1 } else { s };
        let mut view = ContractedView {
            inner,
            t,
            merged,
            merged_neighbors: Vec::with_capacity(ds + dt),
            pair_multiplicity: 0,
        };
        for (from, other, degree) in [(s, t, ds), (t, s, dt)] {
            for i in 0..degree {
                let u = inner.neighbor(from, i)?;
                if u == other {
                    if from == s {
                        view.pair_multiplicity += 1;
                    }
                } else {
                    let mapped = view.map(u);
                    view.merged_neighbors.push(mapped);
                }
            }
        }
        Ok(view)
    }

    /// Number of `s`–`t` edges removed by the contraction.
    pub fn pair_multiplicity(&self) -> usize {
        self.pair_multiplicity
    }

    pub fn merged_vertex(&self) -> usize {
        self.merged
    }

    // Old id (never `t`, never the source of the merged vertex) to new id.
    fn map(&self, v: usize) -> usize {
        if v > self.t {
            v - 1
        } else {
            v
        }
    }

    fn unmap(&self, w: usize) -> usize {
        if w >= self.t {
            w + 1
        } else {
            w
        }
    }

    fn check(&self, w: usize) -> Result<(), GraphError> {
        let n = self.vertex_count();
        if w < n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: w, n })
        }
    }
}

impl<G: AdjacencyList + ?Sized> AdjacencyList for ContractedView<'_, G> {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count() - 1
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count() - self.pair_multiplicity
    }

    fn degree(&self, w: usize) -> Result<usize, GraphError> {
        self.check(w)?;
        if w == self.merged {
            Ok(self.merged_neighbors.len())
        } else {
            self.inner.degree(self.unmap(w))
        }
    }

    fn neighbor(&self, w: usize, i: usize) -> Result<usize, GraphError> {
        self.check(w)?;
        if w == self.merged {
            return self
                .merged_neighbors
                .get(i)
                .copied()
                .ok_or(GraphError::NeighborOutOfRange {
                    vertex: w,
                    index: i,
                    degree: self.merged_neighbors.len(),
                });
        }
        let u = self.inner.neighbor(self.unmap(w), i)?;
        Ok(if u == self.t { self.merged } else { self.map(u) })
    }

    fn sample_vertex<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        // Rejecting `t` leaves a uniform draw over the n - 1 surviving vertices.
        loop {
            let v = self.inner.sample_vertex(rng);
            if v != self.t {
                return self.map(v);
            }
        }
    }
}
