//! Reference computations shared by the integration tests. They deliberately
//! avoid the crate's own dense oracle.

#![allow(dead_code)]

use effres::graph::generate::{complete, cycle5_with_chord, random_connected};
use effres::rng::master;
use effres::Graph;
use nalgebra::{DMatrix, DVector};

/// `R(s, t)` by grounding `t`: solve the Laplacian with row and column `t`
/// removed against `e_s`, then read the `s` entry.
pub fn grounded_resistance(g: &Graph, s: usize, t: usize) -> f64 {
    if s == t {
        return 0.0;
    }
    let n = g.vertex_count();
    let keep: Vec<usize> = (0..n).filter(|&v| v != t).collect();
    let pos = |v: usize| keep.iter().position(|&k| k == v).unwrap();
    let mut l = DMatrix::<f64>::zeros(n - 1, n - 1);
    for (u, v) in g.edges() {
        if u != t {
            l[(pos(u), pos(u))] += 1.0;
        }
        if v != t {
            l[(pos(v), pos(v))] += 1.0;
        }
        if u != t && v != t {
            l[(pos(u), pos(v))] -= 1.0;
            l[(pos(v), pos(u))] -= 1.0;
        }
    }
    let mut rhs = DVector::<f64>::zeros(n - 1);
    rhs[pos(s)] = 1.0;
    let x = l
        .lu()
        .solve(&rhs)
        .expect("grounded Laplacian of a connected graph is invertible");
    x[pos(s)]
}

/// Dense walk matrix `P = D^{-1} A`.
pub fn transition_matrix(g: &Graph) -> DMatrix<f64> {
    let n = g.vertex_count();
    let mut p = DMatrix::<f64>::zeros(n, n);
    for v in 0..n {
        let d = g.degree(v).unwrap() as f64;
        for &u in g.neighbors(v).unwrap() {
            p[(v, u as usize)] += 1.0 / d;
        }
    }
    p
}

/// Small aperiodic graphs with modest mixing parameter: K3, K5, the chorded
/// 5-cycle and five random connected graphs on 12 to 40 vertices.
pub fn suite() -> Vec<(String, Graph)> {
    let mut graphs = vec![
        ("K3".to_string(), complete(3)),
        ("K5".to_string(), complete(5)),
        ("C5+chord".to_string(), cycle5_with_chord()),
    ];
    let mut rng = master(2024);
    for (i, n) in [12usize, 18, 24, 32, 40].into_iter().enumerate() {
        let m = n * (n - 1) / 4;
        graphs.push((format!("random{i}(n={n})"), random_connected(n, m, &mut rng)));
    }
    graphs
}

/// First edge of `g`.
pub fn some_edge(g: &Graph) -> (usize, usize) {
    g.edges().next().expect("graph has an edge")
}
