//! Simple undirected graphs on vertices `0..n`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
    n_edges: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], n_edges: 0 }
    }

    /// Build from an edge list, silently skipping loops and duplicates.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }

    /// Adds `u-v`; returns false for a self-loop or an existing edge.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.n_edges += 1;
        true
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let Some(pu) = self.adj[u].iter().position(|&x| x == v) else {
            return false;
        };
        self.adj[u].remove(pu);
        let pv = self.adj[v].iter().position(|&x| x == u).expect("symmetric adjacency");
        self.adj[v].remove(pv);
        self.n_edges -= 1;
        true
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].contains(&b)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    /// Every edge once, as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        out.sort_unstable();
        out
    }

    /// Every edge with length 1.
    pub fn unit_adjacency(&self) -> WeightedAdjacency {
        self.adj.iter().map(|nb| nb.iter().map(|&w| (w, 1.0)).collect()).collect()
    }

    /// Hop distances from `src`; `None` for unreachable vertices.
    pub fn bfs(&self, src: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n()];
        dist[src] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].expect("queued vertices are reached");
            for &w in &self.adj[v] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs(0).iter().all(Option::is_some)
    }

    /// Component label of every vertex, numbered in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n()];
        let mut next = 0;
        for s in 0..self.n() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adj[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Adjacency lists with non-negative edge lengths.
pub type WeightedAdjacency = Vec<Vec<(usize, f64)>>;

#[derive(PartialEq)]
struct Frontier(f64, usize);

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Shortest-path lengths from `src`; `f64::INFINITY` for unreachable vertices.
pub fn dijkstra(adj: &WeightedAdjacency, src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[src] = 0.0;
    let mut heap = BinaryHeap::from([Frontier(0.0, src)]);
    while let Some(Frontier(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, len) in &adj[v] {
            let nd = d + len;
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Frontier(nd, w));
            }
        }
    }
    dist
}

/// Single-source shortest-path DAG as used by Brandes' betweenness.
pub struct PathDag {
    pub dist: Vec<f64>,
    /// Number of shortest paths from the source.
    pub sigma: Vec<f64>,
    pub preds: Vec<Vec<usize>>,
    /// Reached vertices in non-decreasing distance.
    pub order: Vec<usize>,
}

pub fn shortest_path_dag(adj: &WeightedAdjacency, src: usize) -> PathDag {
    let n = adj.len();
    let mut dag = PathDag { dist: vec![f64::INFINITY; n], sigma: vec![0.0; n], preds: vec![Vec::new(); n], order: Vec::new() };
    let mut done = vec![false; n];
    dag.dist[src] = 0.0;
    dag.sigma[src] = 1.0;
    let mut heap = BinaryHeap::from([Frontier(0.0, src)]);
    while let Some(Frontier(d, v)) = heap.pop() {
        if done[v] || d > dag.dist[v] {
            continue;
        }
        done[v] = true;
        dag.order.push(v);
        for &(w, len) in &adj[v] {
            let nd = d + len;
            if nd < dag.dist[w] {
                dag.dist[w] = nd;
                dag.sigma[w] = dag.sigma[v];
                dag.preds[w].clear();
                dag.preds[w].push(v);
                heap.push(Frontier(nd, w));
            } else if nd == dag.dist[w] && !done[w] {
                dag.sigma[w] += dag.sigma[v];
                dag.preds[w].push(v);
            }
        }
    }
    dag
}

pub fn complete(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            g.add_edge(u, v);
        }
    }
    g
}

/// `K_{a,b}` with parts `0..a` and `a..a+b`.
pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    let mut g = Graph::new(a + b);
    for u in 0..a {
        for v in a..a + b {
            g.add_edge(u, v);
        }
    }
    g
}

pub fn cycle(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 0..n {
        g.add_edge(v, (v + 1) % n);
    }
    g
}

pub fn path(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge(v - 1, v);
    }
    g
}

/// Hub 0 joined to leaves `1..n`.
pub fn star(n: usize) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge(0, v);
    }
    g
}
