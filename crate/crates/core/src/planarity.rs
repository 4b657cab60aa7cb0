//! Planarity testing with certificates.
//!
//! The test is the left-right (de Fraysseix-Rosenstiehl) criterion in the
//! formulation of Brandes: a DFS orientation with lowpoints, then a second
//! DFS that maintains a stack of conflict pairs of return-edge intervals.
//! A planar graph additionally yields a combinatorial embedding (clockwise
//! rotation at every vertex). A non-planar graph yields a Kuratowski
//! subgraph, found by deleting every edge whose removal keeps the graph
//! non-planar.
//!
//! Both certificates can be checked without trusting the tester:
//! [`Embedding::verify`] traces faces and checks Euler's formula per
//! component, [`Kuratowski::verify`] smooths degree-2 vertices and checks
//! the result is `K5` or `K3,3`.

use std::collections::{HashMap, HashSet};

use crate::graph::Graph;

type EdgeId = usize;
const NONE: usize = usize::MAX;

/// Clockwise neighbour order around every vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub rotation: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KuratowskiKind {
    K5,
    K33,
}

/// Edge set of a subdivision of `K5` or `K3,3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kuratowski {
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Planarity {
    Planar(Embedding),
    NonPlanar(Kuratowski),
}

impl Planarity {
    pub fn is_planar(&self) -> bool {
        matches!(self, Planarity::Planar(_))
    }
}

/// Planarity test with certificate.
pub fn is_planar(g: &Graph) -> Planarity {
    match LrState::new(g).run(true) {
        Some(rotation) => Planarity::Planar(Embedding { rotation }),
        None => Planarity::NonPlanar(kuratowski_subgraph(g)),
    }
}

/// Planarity test without building a certificate.
pub fn quick_is_planar(g: &Graph) -> bool {
    LrState::new(g).run(false).is_some()
}

fn kuratowski_subgraph(g: &Graph) -> Kuratowski {
    let mut h = g.clone();
    for (u, v) in g.edges() {
        h.remove_edge(u, v);
        if quick_is_planar(&h) {
            h.add_edge(u, v);
        }
    }
    Kuratowski { edges: h.edges() }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Interval {
    low: Option<EdgeId>,
    high: Option<EdgeId>,
}

impl Interval {
    fn single(e: EdgeId) -> Self {
        Interval { low: Some(e), high: Some(e) }
    }

    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct ConflictPair {
    left: Interval,
    right: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }
}

struct LrState {
    n: usize,
    /// Adjacency in compressed rows: neighbours of `v` are
    /// `nbr[start[v]..start[v + 1]]`, with undirected edge ids in `eid`.
    start: Vec<usize>,
    nbr: Vec<usize>,
    eid: Vec<EdgeId>,
    src: Vec<usize>,
    dst: Vec<usize>,
    oriented: Vec<bool>,
    height: Vec<usize>,
    parent_edge: Vec<EdgeId>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    /// Outgoing edges of `v` occupy `out[start[v]..start[v] + out_len[v]]`.
    out: Vec<EdgeId>,
    out_len: Vec<usize>,
    refs: Vec<EdgeId>,
    side: Vec<i8>,
    stack: Vec<ConflictPair>,
    stack_bottom: Vec<usize>,
    lowpt_edge: Vec<EdgeId>,
    roots: Vec<usize>,
}

impl LrState {
    fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut start = Vec::with_capacity(n + 1);
        let mut nbr = Vec::with_capacity(2 * g.n_edges());
        start.push(0);
        for v in 0..n {
            nbr.extend_from_slice(g.neighbors(v));
            start.push(nbr.len());
        }
        let mut eid = vec![NONE; nbr.len()];
        let mut m = 0;
        for v in 0..n {
            for k in start[v]..start[v + 1] {
                let w = nbr[k];
                if v < w {
                    eid[k] = m;
                    m += 1;
                } else {
                    let back = (start[w]..start[w + 1]).find(|&x| nbr[x] == v).expect("symmetric adjacency");
                    eid[k] = eid[back];
                }
            }
        }
        LrState {
            n,
            out: vec![NONE; nbr.len()],
            out_len: vec![0; n],
            start,
            nbr,
            eid,
            src: vec![NONE; m],
            dst: vec![NONE; m],
            oriented: vec![false; m],
            height: vec![NONE; n],
            parent_edge: vec![NONE; n],
            lowpt: vec![0; m],
            lowpt2: vec![0; m],
            nesting_depth: vec![0; m],
            refs: vec![NONE; m],
            side: vec![1; m],
            stack: Vec::new(),
            stack_bottom: vec![0; m],
            lowpt_edge: vec![NONE; m],
            roots: Vec::new(),
        }
    }

    fn outs(&self, v: usize) -> &[EdgeId] {
        &self.out[self.start[v]..self.start[v] + self.out_len[v]]
    }

    fn sort_outs(&mut self) {
        for v in 0..self.n {
            let nd = &self.nesting_depth;
            self.out[self.start[v]..self.start[v] + self.out_len[v]].sort_by_key(|&e| nd[e]);
        }
    }

    fn run(mut self, embed: bool) -> Option<Vec<Vec<usize>>> {
        let n = self.n;
        if n > 2 && self.src.len() > 3 * n - 6 {
            return None;
        }
        for v in 0..n {
            if self.height[v] == NONE {
                self.height[v] = 0;
                self.roots.push(v);
                self.dfs_orientation(v);
            }
        }
        self.sort_outs();
        for r in self.roots.clone() {
            if !self.dfs_testing(r) {
                return None;
            }
        }
        if !embed {
            return Some(Vec::new());
        }
        Some(self.embedding())
    }

    fn dfs_orientation(&mut self, root: usize) {
        let mut stack = vec![root];
        let mut ind = self.start[..self.n].to_vec();
        let mut resumed = vec![false; self.src.len()];
        while let Some(v) = stack.pop() {
            let e = self.parent_edge[v];
            while ind[v] < self.start[v + 1] {
                let w = self.nbr[ind[v]];
                let vw = self.eid[ind[v]];
                if !resumed[vw] {
                    if self.oriented[vw] {
                        ind[v] += 1;
                        continue;
                    }
                    self.oriented[vw] = true;
                    self.src[vw] = v;
                    self.dst[vw] = w;
                    self.out[self.start[v] + self.out_len[v]] = vw;
                    self.out_len[v] += 1;
                    self.lowpt[vw] = self.height[v];
                    self.lowpt2[vw] = self.height[v];
                    if self.height[w] == NONE {
                        self.parent_edge[w] = vw;
                        self.height[w] = self.height[v] + 1;
                        stack.push(v);
                        stack.push(w);
                        resumed[vw] = true;
                        break;
                    }
                    self.lowpt[vw] = self.height[w];
                }
                self.nesting_depth[vw] = 2 * self.lowpt[vw] as i64;
                if self.lowpt2[vw] < self.height[v] {
                    // chordal
                    self.nesting_depth[vw] += 1;
                }
                if e != NONE {
                    if self.lowpt[vw] < self.lowpt[e] {
                        self.lowpt2[e] = self.lowpt[e].min(self.lowpt2[vw]);
                        self.lowpt[e] = self.lowpt[vw];
                    } else if self.lowpt[vw] > self.lowpt[e] {
                        self.lowpt2[e] = self.lowpt2[e].min(self.lowpt[vw]);
                    } else {
                        self.lowpt2[e] = self.lowpt2[e].min(self.lowpt2[vw]);
                    }
                }
                ind[v] += 1;
            }
        }
    }

    fn dfs_testing(&mut self, root: usize) -> bool {
        let mut stack = vec![root];
        let mut ind = vec![0usize; self.n];
        let mut resumed = vec![false; self.src.len()];
        while let Some(v) = stack.pop() {
            let e = self.parent_edge[v];
            let mut descended = false;
            while ind[v] < self.out_len[v] {
                let ei = self.out[self.start[v] + ind[v]];
                let w = self.dst[ei];
                if !resumed[ei] {
                    self.stack_bottom[ei] = self.stack.len();
                    if self.parent_edge[w] == ei {
                        stack.push(v);
                        stack.push(w);
                        resumed[ei] = true;
                        descended = true;
                        break;
                    }
                    self.lowpt_edge[ei] = ei;
                    self.stack.push(ConflictPair { left: Interval::default(), right: Interval::single(ei) });
                }
                if self.lowpt[ei] < self.height[v] {
                    if ind[v] == 0 {
                        self.lowpt_edge[e] = self.lowpt_edge[ei];
                    } else if !self.add_constraints(ei, e) {
                        return false;
                    }
                }
                ind[v] += 1;
            }
            if !descended && e != NONE {
                self.remove_back_edges(e);
            }
        }
        true
    }

    fn conflicting(&self, i: &Interval, b: EdgeId) -> bool {
        match i.high {
            Some(h) => self.lowpt[h] > self.lowpt[b],
            None => false,
        }
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.left.low, p.right.low) {
            (None, Some(r)) => self.lowpt[r],
            (Some(l), None) => self.lowpt[l],
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (None, None) => unreachable!("empty conflict pair on stack"),
        }
    }

    fn add_constraints(&mut self, ei: EdgeId, e: EdgeId) -> bool {
        let mut p = ConflictPair::default();
        // merge return edges of ei into p.right
        while let Some(mut q) = self.stack.pop() {
            if !q.left.is_empty() {
                q.swap();
            }
            if !q.left.is_empty() {
                return false;
            }
            let qlow = q.right.low.expect("non-empty interval");
            if self.lowpt[qlow] > self.lowpt[e] {
                if p.right.is_empty() {
                    p.right = q.right;
                } else if let Some(pl) = p.right.low {
                    self.refs[pl] = q.right.high.unwrap_or(NONE);
                }
                p.right.low = q.right.low;
            } else {
                // align
                self.refs[qlow] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.left
        while let Some(top) = self.stack.last() {
            if !(self.conflicting(&top.left, ei) || self.conflicting(&top.right, ei)) {
                break;
            }
            let mut q = self.stack.pop().expect("checked non-empty");
            if self.conflicting(&q.right, ei) {
                q.swap();
            }
            if self.conflicting(&q.right, ei) {
                return false;
            }
            if let Some(pl) = p.right.low {
                self.refs[pl] = q.right.high.unwrap_or(NONE);
            }
            if q.right.low.is_some() {
                p.right.low = q.right.low;
            }
            if p.left.is_empty() {
                p.left = q.left;
            } else if let Some(pl) = p.left.low {
                self.refs[pl] = q.left.high.unwrap_or(NONE);
            }
            p.left.low = q.left.low;
        }
        if !(p.left.is_empty() && p.right.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn remove_back_edges(&mut self, e: EdgeId) {
        let u = self.src[e];
        // drop entire conflict pairs returning to u
        while let Some(top) = self.stack.last() {
            if self.lowest(top) != self.height[u] {
                break;
            }
            let p = self.stack.pop().expect("checked non-empty");
            if let Some(l) = p.left.low {
                self.side[l] = -1;
            }
        }
        if let Some(mut p) = self.stack.pop() {
            // trim left interval
            while let Some(h) = p.left.high {
                if self.dst[h] != u {
                    break;
                }
                p.left.high = some(self.refs[h]);
            }
            if p.left.high.is_none() {
                if let Some(l) = p.left.low {
                    self.refs[l] = p.right.low.unwrap_or(NONE);
                    self.side[l] = -1;
                    p.left.low = None;
                }
            }
            // trim right interval
            while let Some(h) = p.right.high {
                if self.dst[h] != u {
                    break;
                }
                p.right.high = some(self.refs[h]);
            }
            if p.right.high.is_none() {
                if let Some(l) = p.right.low {
                    self.refs[l] = p.left.low.unwrap_or(NONE);
                    self.side[l] = -1;
                    p.right.low = None;
                }
            }
            self.stack.push(p);
        }
        // side of e is the side of a highest return edge
        if self.lowpt[e] < self.height[u] {
            let top = self.stack.last().expect("return edge implies a pending pair");
            let (hl, hr) = (top.left.high, top.right.high);
            self.refs[e] = match (hl, hr) {
                (Some(l), None) => l,
                (Some(l), Some(r)) if self.lowpt[l] > self.lowpt[r] => l,
                (_, r) => r.unwrap_or(NONE),
            };
        }
    }

    /// Resolve relative sides along the reference chain of `e`.
    fn sign(&mut self, e: EdgeId) -> i8 {
        let mut chain = vec![e];
        while let Some(&last) = chain.last() {
            let r = self.refs[last];
            if r == NONE {
                break;
            }
            chain.push(r);
        }
        for k in (0..chain.len() - 1).rev() {
            let (a, b) = (chain[k], chain[k + 1]);
            self.side[a] *= self.side[b];
            self.refs[a] = NONE;
        }
        self.side[e]
    }

    fn embedding(&mut self) -> Vec<Vec<usize>> {
        let n = self.n;
        for e in 0..self.src.len() {
            let s = self.sign(e) as i64;
            self.nesting_depth[e] *= s;
        }
        self.sort_outs();
        let mut rotation: Vec<Vec<usize>> = (0..n).map(|v| self.outs(v).iter().map(|&e| self.dst[e]).collect()).collect();
        let mut left_ref = vec![NONE; n];
        let mut right_ref = vec![NONE; n];
        for &root in &self.roots {
            let mut stack = vec![root];
            let mut ind = vec![0usize; n];
            while let Some(v) = stack.pop() {
                while ind[v] < self.out_len[v] {
                    let ei = self.outs(v)[ind[v]];
                    ind[v] += 1;
                    let w = self.dst[ei];
                    if self.parent_edge[w] == ei {
                        rotation[w].insert(0, v);
                        left_ref[v] = w;
                        right_ref[v] = w;
                        stack.push(v);
                        stack.push(w);
                        break;
                    }
                    let rot = &mut rotation[w];
                    if self.side[ei] == 1 {
                        let at = rot.iter().position(|&x| x == right_ref[w]).expect("reference in rotation");
                        rot.insert(at + 1, v);
                    } else {
                        let at = rot.iter().position(|&x| x == left_ref[w]).expect("reference in rotation");
                        rot.insert(at, v);
                        left_ref[w] = v;
                    }
                }
            }
        }
        rotation
    }
}

fn some(e: EdgeId) -> Option<EdgeId> {
    (e != NONE).then_some(e)
}

impl Embedding {
    /// Check that this rotation system is a planar embedding of `g`: every
    /// rotation is a permutation of the neighbourhood and each connected
    /// component satisfies `V − E + F = 2`.
    pub fn verify(&self, g: &Graph) -> Result<(), String> {
        let n = g.n();
        if self.rotation.len() != n {
            return Err(format!("rotation covers {} of {n} vertices", self.rotation.len()));
        }
        let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
        for (v, rot) in self.rotation.iter().enumerate() {
            let mut a = rot.clone();
            let mut b = g.neighbors(v).to_vec();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return Err(format!("rotation at {v} is not its neighbourhood"));
            }
            for (k, &w) in rot.iter().enumerate() {
                pos.insert((v, w), k);
            }
        }
        let comp = g.components();
        let n_comp = comp.iter().copied().max().map_or(0, |c| c + 1);
        let mut faces = vec![0i64; n_comp];
        let mut seen: HashSet<(usize, usize)> = HashSet::new();
        for v in 0..n {
            for &w in &self.rotation[v] {
                if seen.contains(&(v, w)) {
                    continue;
                }
                faces[comp[v]] += 1;
                let (mut a, mut b) = (v, w);
                loop {
                    if !seen.insert((a, b)) {
                        return Err(format!("half-edge ({a}, {b}) lies on two faces"));
                    }
                    let rot = &self.rotation[b];
                    let k = pos[&(b, a)];
                    let next = rot[(k + rot.len() - 1) % rot.len()];
                    (a, b) = (b, next);
                    if (a, b) == (v, w) {
                        break;
                    }
                }
            }
        }
        let mut verts = vec![0i64; n_comp];
        let mut edges = vec![0i64; n_comp];
        for v in 0..n {
            verts[comp[v]] += 1;
            edges[comp[v]] += g.degree(v) as i64;
        }
        for c in 0..n_comp {
            let e = edges[c] / 2;
            if e == 0 {
                continue;
            }
            let euler = verts[c] - e + faces[c];
            if euler != 2 {
                return Err(format!("component {c}: V - E + F = {euler}, expected 2"));
            }
        }
        Ok(())
    }
}

impl Kuratowski {
    /// Check that the witness is a subgraph of `g` homeomorphic to `K5` or `K3,3`.
    pub fn verify(&self, g: &Graph) -> Result<KuratowskiKind, String> {
        let h = Graph::from_edges(g.n(), &self.edges);
        if h.n_edges() != self.edges.len() {
            return Err("witness has repeated edges or loops".into());
        }
        if let Some(&(u, v)) = self.edges.iter().find(|&&(u, v)| !g.has_edge(u, v)) {
            return Err(format!("witness edge ({u}, {v}) not in graph"));
        }
        let deg = h.degrees();
        let branch: Vec<usize> = (0..h.n()).filter(|&v| deg[v] >= 3).collect();
        if (0..h.n()).any(|v| deg[v] == 1) {
            return Err("witness has a vertex of degree 1".into());
        }
        let kind = match (branch.len(), branch.iter().map(|&b| deg[b]).max()) {
            (5, Some(4)) if branch.iter().all(|&b| deg[b] == 4) => KuratowskiKind::K5,
            (6, Some(3)) if branch.iter().all(|&b| deg[b] == 3) => KuratowskiKind::K33,
            _ => return Err(format!("branch vertex degrees do not match K5 or K3,3: {branch:?}")),
        };
        let mut visited = vec![false; h.n()];
        let mut pairs: HashSet<(usize, usize)> = HashSet::new();
        let mut paths = 0;
        for &b in &branch {
            visited[b] = true;
            for &first in h.neighbors(b) {
                let (mut prev, mut cur) = (b, first);
                while deg[cur] == 2 {
                    visited[cur] = true;
                    let nb = h.neighbors(cur);
                    let next = if nb[0] == prev { nb[1] } else { nb[0] };
                    (prev, cur) = (cur, next);
                }
                if cur == b {
                    return Err(format!("path from {b} returns to itself"));
                }
                paths += 1;
                pairs.insert((b.min(cur), b.max(cur)));
            }
        }
        if (0..h.n()).any(|v| deg[v] == 2 && !visited[v]) {
            return Err("witness contains a cycle detached from branch vertices".into());
        }
        // every path is found once from each end
        let expected = if kind == KuratowskiKind::K5 { 10 } else { 9 };
        if paths != 2 * expected || pairs.len() != expected {
            return Err(format!("{} distinct branch paths, expected {expected}", pairs.len()));
        }
        if kind == KuratowskiKind::K33 {
            let a = branch[0];
            let side_a: Vec<usize> = branch.iter().copied().filter(|&x| x == a || !pairs.contains(&(a.min(x), a.max(x)))).collect();
            let side_b: Vec<usize> = branch.iter().copied().filter(|x| !side_a.contains(x)).collect();
            if side_a.len() != 3 || side_b.len() != 3 {
                return Err("branch vertices are not split 3 + 3".into());
            }
            for &x in &side_a {
                for &y in &side_b {
                    if !pairs.contains(&(x.min(y), x.max(y))) {
                        return Err(format!("missing branch path {x}-{y}"));
                    }
                }
            }
        }
        Ok(kind)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, complete_bipartite, cycle, path, star};

    fn assert_planar(g: &Graph) {
        match is_planar(g) {
            Planarity::Planar(emb) => emb.verify(g).unwrap(),
            Planarity::NonPlanar(k) => panic!("expected planar, got witness {k:?}"),
        }
        assert!(quick_is_planar(g));
    }

    fn assert_nonplanar(g: &Graph) -> KuratowskiKind {
        assert!(!quick_is_planar(g));
        match is_planar(g) {
            Planarity::NonPlanar(k) => k.verify(g).unwrap(),
            Planarity::Planar(_) => panic!("expected non-planar"),
        }
    }

    #[test]
    fn small_named_graphs() {
        assert_planar(&complete(4));
        assert_planar(&cycle(7));
        assert_planar(&star(9));
        assert_planar(&path(5));
        assert_planar(&Graph::new(3));
        assert_eq!(assert_nonplanar(&complete(5)), KuratowskiKind::K5);
        assert_eq!(assert_nonplanar(&complete_bipartite(3, 3)), KuratowskiKind::K33);
        assert_planar(&complete_bipartite(2, 7));
    }

    #[test]
    fn k5_minus_edge_and_wheel() {
        let mut g = complete(5);
        g.remove_edge(0, 1);
        assert_planar(&g);
        let mut wheel = cycle(8);
        let mut hub = Graph::new(9);
        for (u, v) in wheel.edges() {
            hub.add_edge(u, v);
        }
        for v in 0..8 {
            hub.add_edge(8, v);
        }
        assert_planar(&hub);
        wheel.add_edge(0, 4);
        wheel.add_edge(2, 6);
        assert_planar(&wheel);
    }

    #[test]
    fn petersen_is_not_planar() {
        let mut g = Graph::new(10);
        for i in 0..5 {
            g.add_edge(i, (i + 1) % 5);
            g.add_edge(i, i + 5);
            g.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        assert_eq!(assert_nonplanar(&g), KuratowskiKind::K33);
    }

    #[test]
    fn subdivided_k5_is_recognised() {
        // K5 with every edge split by a new vertex.
        let mut g = Graph::new(15);
        let mut mid = 5;
        for u in 0..5 {
            for v in u + 1..5 {
                g.add_edge(u, mid);
                g.add_edge(mid, v);
                mid += 1;
            }
        }
        assert_eq!(assert_nonplanar(&g), KuratowskiKind::K5);
    }

    #[test]
    fn triangulated_grid_is_planar() {
        let k = 6;
        let id = |r: usize, c: usize| r * k + c;
        let mut g = Graph::new(k * k);
        for r in 0..k {
            for c in 0..k {
                if c + 1 < k {
                    g.add_edge(id(r, c), id(r, c + 1));
                }
                if r + 1 < k {
                    g.add_edge(id(r, c), id(r + 1, c));
                }
                if r + 1 < k && c + 1 < k {
                    g.add_edge(id(r, c), id(r + 1, c + 1));
                }
            }
        }
        assert_planar(&g);
        g.add_edge(id(0, 0), id(k - 1, k - 1));
        g.add_edge(id(0, k - 1), id(k - 1, 0));
        assert_nonplanar(&g);
    }

    #[test]
    fn bad_certificates_are_rejected() {
        let g = complete(4);
        let emb = Embedding { rotation: vec![vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]] };
        // This rotation system puts K4 on a torus.
        assert!(emb.verify(&g).is_err());
        let k = Kuratowski { edges: complete(4).edges() };
        assert!(k.verify(&complete(4)).is_err());
    }
}
