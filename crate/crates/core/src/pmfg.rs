//! Planar maximally filtered graphs and their topology.
//!
//! Candidate edges are visited in descending `ρ`, ties broken by `(i, j)`,
//! and kept whenever the graph stays planar. A maximal planar graph on `n`
//! vertices has `3(n − 2)` edges, so construction stops there.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::graph::{dijkstra, Graph, WeightedAdjacency};
use crate::planarity::quick_is_planar;
use crate::qdcca::QCorrMatrix;

#[derive(Clone, Debug, PartialEq)]
pub struct PmfgGraph {
    pub tickers: Vec<String>,
    /// `(i, j, ρ_ij)` with `i < j`, in insertion order.
    pub edges: Vec<(usize, usize, f64)>,
}

impl PmfgGraph {
    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn graph(&self) -> Graph {
        let mut g = Graph::new(self.n());
        for &(i, j, _) in &self.edges {
            g.add_edge(i, j);
        }
        g
    }

    /// Adjacency with `ρ` as the edge value.
    pub fn weight_adjacency(&self) -> WeightedAdjacency {
        let mut adj = vec![Vec::new(); self.n()];
        for &(i, j, w) in &self.edges {
            adj[i].push((j, w));
            adj[j].push((i, w));
        }
        adj
    }

    /// Adjacency with the metric distance `d = √(2(1 − ρ))` as edge length.
    pub fn distance_adjacency(&self) -> WeightedAdjacency {
        let mut adj = self.weight_adjacency();
        for nb in &mut adj {
            for e in nb.iter_mut() {
                e.1 = corr_distance(e.1);
            }
        }
        adj
    }

    pub fn write_edges_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["i", "j", "ticker_i", "ticker_j", "rho"])?;
        for &(i, j, w) in &self.edges {
            wtr.write_record([i.to_string(), j.to_string(), self.tickers[i].clone(), self.tickers[j].clone(), w.to_string()])?;
        }
        wtr.flush().map_err(|e| Error::io("<edge csv>", e))?;
        Ok(())
    }
}

pub fn corr_distance(rho: f64) -> f64 {
    (2.0 * (1.0 - rho)).max(0.0).sqrt()
}

/// All pairs `i < j` sorted by descending `ρ`, then by `(i, j)`.
pub fn ranked_pairs(rho: &nalgebra::DMatrix<f64>) -> Vec<(usize, usize, f64)> {
    let n = rho.nrows();
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j, rho[(i, j)]));
        }
    }
    pairs.sort_by(|a, b| b.2.total_cmp(&a.2).then((a.0, a.1).cmp(&(b.0, b.1))));
    pairs
}

pub fn build_pmfg(matrix: &QCorrMatrix) -> Result<PmfgGraph> {
    let n = matrix.n();
    if n < 3 {
        return Err(config_err!("a PMFG needs at least 3 nodes, got {n}"));
    }
    let target = 3 * (n - 2);
    let mut g = Graph::new(n);
    let mut comp: Vec<usize> = (0..n).collect();
    let mut edges = Vec::with_capacity(target);
    for (i, j, w) in ranked_pairs(&matrix.rho) {
        if edges.len() == target {
            break;
        }
        let (ci, cj) = (find(&mut comp, i), find(&mut comp, j));
        g.add_edge(i, j);
        if ci == cj && !quick_is_planar(&g) {
            g.remove_edge(i, j);
            continue;
        }
        comp[ci] = cj;
        edges.push((i, j, w));
    }
    Ok(PmfgGraph { tickers: matrix.tickers.clone(), edges })
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Mean local clustering; vertices of degree < 2 count as 0.
pub fn clustering_coefficient(g: &Graph) -> f64 {
    let n = g.n();
    if n == 0 {
        return 0.0;
    }
    let mut total = 0.0;
    let mut mark = vec![false; n];
    for v in 0..n {
        let nb = g.neighbors(v);
        let k = nb.len();
        if k < 2 {
            continue;
        }
        for &w in nb {
            mark[w] = true;
        }
        let mut links = 0usize;
        for &w in nb {
            links += g.neighbors(w).iter().filter(|&&x| mark[x]).count();
        }
        for &w in nb {
            mark[w] = false;
        }
        // every triangle edge seen from both ends
        total += links as f64 / (k * (k - 1)) as f64;
    }
    total / n as f64
}

/// Mean hop distance over unordered pairs.
pub fn avg_shortest_path(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 2 {
        return Err(config_err!("path length needs at least 2 nodes"));
    }
    let mut sum = 0usize;
    for v in 0..n {
        for d in g.bfs(v) {
            sum += d.ok_or_else(|| Error::Numerical("graph is disconnected".into()))?;
        }
    }
    Ok(sum as f64 / (n * (n - 1)) as f64)
}

/// Mean shortest-path length under edge lengths `√(2(1 − ρ))`.
pub fn avg_weighted_path(pmfg: &PmfgGraph) -> Result<f64> {
    let n = pmfg.n();
    let adj = pmfg.distance_adjacency();
    let mut sum = 0.0;
    for v in 0..n {
        for d in dijkstra(&adj, v) {
            if d.is_infinite() {
                return Err(Error::Numerical("graph is disconnected".into()));
            }
            sum += d;
        }
    }
    Ok(sum / (n * (n - 1)) as f64)
}

/// `γ = (n − 2 Σ_E (k_i k_j)^{−1/2}) / (n − 2√(n − 1))`: 0 on regular graphs, 1 on stars.
pub fn heterogeneity_index(g: &Graph) -> Result<f64> {
    let n = g.n();
    if n < 3 {
        return Err(config_err!("heterogeneity needs at least 3 nodes, got {n}"));
    }
    let deg = g.degrees();
    if let Some(v) = deg.iter().position(|&k| k == 0) {
        return Err(config_err!("node {v} is isolated"));
    }
    let sum: f64 = g.edges().iter().map(|&(i, j)| 1.0 / ((deg[i] * deg[j]) as f64).sqrt()).sum();
    let nf = n as f64;
    Ok((nf - 2.0 * sum) / (nf - 2.0 * (nf - 1.0).sqrt()))
}

/// Degree assortativity (Newman); `None` when endpoint degrees do not vary.
pub fn assortativity(g: &Graph) -> Option<f64> {
    let edges = g.edges();
    if edges.len() < 2 {
        return None;
    }
    let deg = g.degrees();
    let m = edges.len() as f64;
    let (mut prod, mut half, mut sq) = (0.0, 0.0, 0.0);
    for &(i, j) in &edges {
        let (a, b) = (deg[i] as f64, deg[j] as f64);
        prod += a * b;
        half += 0.5 * (a + b);
        sq += 0.5 * (a * a + b * b);
    }
    let (prod, half, sq) = (prod / m, half / m, sq / m);
    let den = sq - half * half;
    if den <= 1e-12 * sq {
        return None;
    }
    Some(((prod - half * half) / den).clamp(-1.0, 1.0))
}

/// True when every edge of the maximum-`ρ` spanning tree is in the graph.
pub fn contains_mst(pmfg: &PmfgGraph, matrix: &QCorrMatrix) -> bool {
    let g = pmfg.graph();
    let mut parent: Vec<usize> = (0..matrix.n()).collect();
    for (i, j, _) in ranked_pairs(&matrix.rho) {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a == b {
            continue;
        }
        parent[a] = b;
        if !g.has_edge(i, j) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub clustering: f64,
    pub path_length: f64,
    pub heterogeneity: f64,
    pub assortativity: Option<f64>,
}

impl TopologyReport {
    pub fn new(g: &Graph) -> Result<Self> {
        Ok(TopologyReport {
            clustering: clustering_coefficient(g),
            path_length: avg_shortest_path(g)?,
            heterogeneity: heterogeneity_index(g)?,
            assortativity: assortativity(g),
        })
    }
}
