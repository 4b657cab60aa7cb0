//! Independent reference implementations used by the integration and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use qcorr::graph::Graph;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha20Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| StandardNormal.sample(rng)).collect()
}

/// Pair of Gaussian series with correlation `c`.
pub fn gaussian_pair(seed: u64, len: usize, c: f64) -> (Vec<f64>, Vec<f64>) {
    let mut r = rng(seed);
    let x = normals(&mut r, len);
    let e = normals(&mut r, len);
    let y = x.iter().zip(&e).map(|(a, b)| c * a + (1.0 - c * c).sqrt() * b).collect();
    (x, y)
}

/// Solve a small dense system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        b.swap(col, p);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Residuals of a least-squares polynomial fit of order `m` via normal equations.
fn poly_residuals(y: &[f64], m: usize) -> Vec<f64> {
    let s = y.len();
    let t: Vec<f64> = (0..s).map(|i| 2.0 * i as f64 / (s - 1) as f64 - 1.0).collect();
    let mut ata = vec![vec![0.0; m + 1]; m + 1];
    let mut aty = vec![0.0; m + 1];
    for (ti, yi) in t.iter().zip(y) {
        for r in 0..=m {
            aty[r] += ti.powi(r as i32) * yi;
            for c in 0..=m {
                ata[r][c] += ti.powi((r + c) as i32);
            }
        }
    }
    let beta = solve(ata, aty);
    t.iter().zip(y).map(|(ti, yi)| yi - (0..=m).map(|r| beta[r] * ti.powi(r as i32)).sum::<f64>()).collect()
}

/// Plain DCCA coefficient: forward and backward boxes, polynomial detrending.
pub fn dcca_oracle(x: &[f64], y: &[f64], s: usize, m: usize) -> f64 {
    let prof = |v: &[f64]| {
        let mu = v.iter().sum::<f64>() / v.len() as f64;
        let mut acc = 0.0;
        v.iter().map(|a| {
            acc += a - mu;
            acc
        }).collect::<Vec<f64>>()
    };
    let (px, py) = (prof(x), prof(y));
    let l = x.len();
    let nb = l / s;
    let starts: Vec<usize> = (0..nb).map(|v| v * s).chain((0..nb).map(|v| l - (v + 1) * s)).collect();
    let (mut fxy, mut fxx, mut fyy) = (0.0, 0.0, 0.0);
    for st in starts {
        let ex = poly_residuals(&px[st..st + s], m);
        let ey = poly_residuals(&py[st..st + s], m);
        fxy += ex.iter().zip(&ey).map(|(a, b)| a * b).sum::<f64>() / s as f64;
        fxx += ex.iter().map(|a| a * a).sum::<f64>() / s as f64;
        fyy += ey.iter().map(|a| a * a).sum::<f64>() / s as f64;
    }
    fxy / (fxx * fyy).sqrt()
}

/// Edges `(i < j)` of a maximum spanning tree by Kruskal.
pub fn kruskal_max(n: usize, w: impl Fn(usize, usize) -> f64) -> BTreeSet<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    pairs.sort_by(|a, b| w(b.0, b.1).total_cmp(&w(a.0, a.1)));
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut Vec<usize>, mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    let mut tree = BTreeSet::new();
    for (i, j) in pairs {
        let (a, b) = (find(&mut parent, i), find(&mut parent, j));
        if a != b {
            parent[a] = b;
            tree.insert((i, j));
        }
    }
    tree
}

/// Check a rotation system against the graph and Euler's formula, component by component.
pub fn check_embedding(g: &Graph, rotation: &[Vec<usize>]) -> Result<(), String> {
    let n = g.n();
    if rotation.len() != n {
        return Err("rotation has wrong vertex count".into());
    }
    for v in 0..n {
        let mut a: Vec<usize> = rotation[v].clone();
        let mut b: Vec<usize> = g.neighbors(v).to_vec();
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(format!("rotation at {v} is not its neighbourhood"));
        }
    }
    let pos = |v: usize, u: usize| rotation[v].iter().position(|&x| x == u).unwrap();
    let mut seen = BTreeSet::new();
    let mut comp = vec![usize::MAX; n];
    let mut faces_per = Vec::new();
    let mut ve = Vec::new();
    for root in 0..n {
        if comp[root] != usize::MAX {
            continue;
        }
        let c = faces_per.len();
        let mut stack = vec![root];
        comp[root] = c;
        let (mut nv, mut ne) = (0usize, 0usize);
        while let Some(v) = stack.pop() {
            nv += 1;
            ne += rotation[v].len();
            for &u in &rotation[v] {
                if comp[u] == usize::MAX {
                    comp[u] = c;
                    stack.push(u);
                }
            }
        }
        faces_per.push(0usize);
        ve.push((nv, ne / 2));
    }
    for v in 0..n {
        for &u in &rotation[v] {
            if seen.contains(&(v, u)) {
                continue;
            }
            let (mut a, mut b) = (v, u);
            while seen.insert((a, b)) {
                let k = pos(b, a);
                let next = rotation[b][(k + 1) % rotation[b].len()];
                a = b;
                b = next;
            }
            faces_per[comp[v]] += 1;
        }
    }
    for (c, (&(nv, ne), &f)) in ve.iter().zip(&faces_per).enumerate() {
        let f = if ne == 0 { 1 } else { f };
        if nv as i64 - ne as i64 + f as i64 != 2 {
            return Err(format!("component {c}: V - E + F = {nv} - {ne} + {f} != 2"));
        }
    }
    Ok(())
}

/// Preferential attachment: each new vertex links to `m` distinct targets chosen by degree.
pub fn barabasi_albert(n: usize, m: usize, seed: u64) -> Graph {
    let mut r = rng(seed);
    let mut g = Graph::new(n);
    let mut ends = Vec::new();
    for i in 0..=m {
        for j in 0..i {
            g.add_edge(i, j);
            ends.extend([i, j]);
        }
    }
    for v in m + 1..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(ends[r.random_range(0..ends.len())]);
        }
        for t in targets {
            g.add_edge(v, t);
            ends.extend([v, t]);
        }
    }
    g
}

/// Minimise `wᵀΣw - τ Rᵀw` over 3-asset budgets by nested grid refinement.
pub fn markowitz_grid3(cov: &[[f64; 3]; 3], r: &[f64; 3], tau: f64) -> [f64; 3] {
    let obj = |w1: f64, w2: f64| {
        let w = [w1, w2, 1.0 - w1 - w2];
        let mut q = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                q += w[i] * cov[i][j] * w[j];
            }
        }
        q - tau * (0..3).map(|i| r[i] * w[i]).sum::<f64>()
    };
    let (mut c1, mut c2, mut half) = (0.0, 0.0, 4.0);
    for _ in 0..12 {
        let steps = 40;
        let h = 2.0 * half / steps as f64;
        let mut best = (f64::INFINITY, c1, c2);
        for a in 0..=steps {
            for b in 0..=steps {
                let (w1, w2) = (c1 - half + a as f64 * h, c2 - half + b as f64 * h);
                let v = obj(w1, w2);
                if v < best.0 {
                    best = (v, w1, w2);
                }
            }
        }
        c1 = best.1;
        c2 = best.2;
        half = 2.0 * h;
    }
    [c1, c2, 1.0 - c1 - c2]
}

/// Check that `edges` is a subgraph of `g` homeomorphic to `K5` or `K3,3`.
pub fn check_kuratowski(g: &Graph, edges: &[(usize, usize)]) -> Result<&'static str, String> {
    use std::collections::BTreeMap;
    let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for &(u, v) in edges {
        if u == v || !g.has_edge(u, v) {
            return Err(format!("({u}, {v}) is not an edge"));
        }
        if !adj.entry(u).or_default().insert(v) || !adj.entry(v).or_default().insert(u) {
            return Err(format!("({u}, {v}) listed twice"));
        }
    }
    loop {
        let Some((&v, _)) = adj.iter().find(|(_, nb)| nb.len() == 2) else { break };
        let nb: Vec<usize> = adj.remove(&v).unwrap().into_iter().collect();
        let (a, b) = (nb[0], nb[1]);
        for (x, y) in [(a, b), (b, a)] {
            let set = adj.get_mut(&x).unwrap();
            set.remove(&v);
            if !set.insert(y) {
                return Err("smoothing creates a parallel edge".into());
            }
        }
    }
    let degs: Vec<usize> = adj.values().map(|s| s.len()).collect();
    if degs.len() == 5 && degs.iter().all(|&d| d == 4) {
        return Ok("K5");
    }
    if degs.len() == 6 && degs.iter().all(|&d| d == 3) {
        let verts: Vec<usize> = adj.keys().copied().collect();
        let side: BTreeSet<usize> = adj[&verts[0]].clone();
        let other: BTreeSet<usize> = verts.iter().copied().filter(|v| !side.contains(v)).collect();
        let bip = other.iter().all(|v| adj[v] == side) && side.iter().all(|v| adj[v] == other);
        if bip {
            return Ok("K33");
        }
    }
    Err(format!("smoothed degrees {degs:?} are neither K5 nor K3,3"))
}
