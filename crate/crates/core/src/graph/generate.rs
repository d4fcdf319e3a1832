//! Small named graphs and random generators used by tests, benchmarks and the CLI.

use std::collections::HashSet;

use rand::Rng;
use rand_distr::{Distribution, Geometric};

use super::Graph;

fn build(n: usize, edges: Vec<(usize, usize)>) -> Graph {
    Graph::from_edges(n, edges).expect("generator produced valid ids")
}

pub fn complete(n: usize) -> Graph {
    build(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect())
}

pub fn path(n: usize) -> Graph {
    build(n, (1..n).map(|v| (v - 1, v)).collect())
}

pub fn cycle(n: usize) -> Graph {
    build(n, (0..n).map(|v| (v, (v + 1) % n)).collect())
}

/// Star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Graph {
    build(leaves + 1, (1..=leaves).map(|v| (0, v)).collect())
}

/// 5-cycle plus the chord 0–2. Not bipartite, so the walk is aperiodic.
pub fn cycle5_with_chord() -> Graph {
    build(5, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)])
}

/// Uniform random recursive tree on `n` vertices plus uniformly random extra
/// simple edges until the graph has `m` edges. Always connected.
pub fn random_connected<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Graph {
    assert!(n >= 2, "need at least two vertices");
    let max_edges = n * (n - 1) / 2;
    assert!(m + 1 >= n && m <= max_edges, "m = {m} out of range for n = {n}");
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for v in 1..n {
        let u = rng.gen_range(0..v);
        seen.insert((u, v));
        edges.push((u, v));
    }
    while edges.len() < m {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            edges.push(key);
        }
    }
    build(n, edges)
}

/// Erdős–Rényi G(n, p) by geometric edge skipping. May be disconnected.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    assert!((0.0..=1.0).contains(&p));
    let mut edges = Vec::new();
    if p > 0.0 {
        let skip = Geometric::new(p).expect("p in (0, 1]");
        // Walk the upper triangle in row-major order, jumping over non-edges.
        let (mut u, mut v) = (0usize, 0usize);
        loop {
            let mut jump = skip.sample(rng) as usize + 1;
            while u < n && v + jump >= n {
                jump -= n - 1 - v;
                u += 1;
                v = u;
            }
            if u >= n {
                break;
            }
            v += jump;
            edges.push((u, v));
        }
    }
    build(n, edges)
}

/// Largest connected component of `g` (ties to the lowest vertex id), renumbered.
pub fn largest_component(g: &Graph) -> Graph {
    let (labels, count) = g.component_labels();
    if count <= 1 {
        return g.clone();
    }
    let mut sizes = vec![0usize; count];
    for &l in &labels {
        sizes[l] += 1;
    }
    let best = (0..count).fold(0, |best, l| if sizes[l] > sizes[best] { l } else { best });
    let mut index = vec![usize::MAX; g.vertex_count()];
    let mut ids = Vec::new();
    for (v, &l) in labels.iter().enumerate() {
        if l == best {
            index[v] = ids.len();
            ids.push(g.original_id(v));
        }
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(u, _)| labels[u] == best)
        .map(|(u, v)| (index[u], index[v]))
        .collect();
    Graph::from_parts(ids.len(), &edges, ids).expect("subgraph of a valid graph")
}

/// Writes `g` as a SNAP edge list using its original ids.
pub fn to_edge_list(g: &Graph) -> String {
    use std::fmt::Write;
    let mut out = format!("# Nodes: {} Edges: {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        writeln!(out, "{}\t{}", g.original_id(u), g.original_id(v)).unwrap();
    }
    out
}
