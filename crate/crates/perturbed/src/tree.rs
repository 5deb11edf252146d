//! Bounded-degree trees: leaf trimming, interior independent sets, random
//! generation and the leaves-or-bare-paths statistics.

use crate::graph::VertexSet;
use crate::random::Seed;
use crate::{Error, Result};
use rand::Rng;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::io::{BufRead, Write};

/// A tree, possibly living on a subset of a larger vertex universe (leaf
/// trimming keeps original ids). Connected and acyclic over its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    adj: Vec<Vec<u32>>,
    vertices: Vec<u32>,
    max_degree: usize,
}

impl Tree {
    /// Builds a tree on all of `0..n` from an edge list.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Tree> {
        if n == 0 {
            return Err(Error::NotATree);
        }
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::VertexOutOfRange { endpoint: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { endpoint: v, n });
            }
            if u == v {
                return Err(Error::NotATree);
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        if edges.len() + 1 != n {
            return Err(Error::NotATree);
        }
        for list in adj.iter_mut() {
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            if list.len() != before {
                return Err(Error::NotATree);
            }
        }
        // Connectivity: n vertices, n - 1 distinct edges, one BFS component.
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    queue.push_back(w as usize);
                }
            }
        }
        if count != n {
            return Err(Error::NotATree);
        }
        let max_degree = adj.iter().map(|l| l.len()).max().unwrap_or(0);
        Ok(Tree {
            adj,
            vertices: (0..n as u32).collect(),
            max_degree,
        })
    }

    fn from_parts(adj: Vec<Vec<u32>>, vertices: Vec<u32>) -> Tree {
        let max_degree = vertices
            .iter()
            .map(|&v| adj[v as usize].len())
            .max()
            .unwrap_or(0);
        Tree {
            adj,
            vertices,
            max_degree,
        }
    }

    /// Size of the id universe (original n); alive vertices may be fewer.
    pub fn universe(&self) -> usize {
        self.adj.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.vertices.iter().map(|&v| v as usize)
    }

    pub fn contains(&self, v: usize) -> bool {
        v < self.universe() && self.vertices.binary_search(&(v as u32)).is_ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn edge_count(&self) -> usize {
        self.vertices().map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Re-attaches a vertex of the universe as a leaf. Keeps adjacency and
    /// vertex lists sorted so replaying a trim reconstructs the original
    /// tree as an equal value.
    pub(crate) fn attach_leaf(&mut self, v: usize, parent: usize) {
        debug_assert!(v < self.universe() && !self.contains(v));
        debug_assert!(self.contains(parent));
        let vv = v as u32;
        let pos = self.adj[parent].partition_point(|&x| x < vv);
        self.adj[parent].insert(pos, vv);
        self.adj[v] = vec![parent as u32];
        let pos = self.vertices.partition_point(|&x| x < vv);
        self.vertices.insert(pos, vv);
        self.max_degree = self.max_degree.max(self.adj[parent].len()).max(1);
    }

    /// Writes the tree text form: `tree n m` header, then `u v` edge lines.
    pub fn write_text<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "tree {} {}", self.universe(), self.edge_count())?;
        for v in self.vertices() {
            for &x in self.neighbors(v) {
                if (x as usize) > v {
                    writeln!(w, "{} {}", v, x)?;
                }
            }
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: &mut R) -> Result<Tree> {
        let (n, _m, edges) = crate::graph::read_header_and_edges(r, true)?;
        Tree::new(n, &edges)
    }
}

/// Outcome of leaf trimming: the surviving core plus the removal log, in
/// order, as (leaf, its neighbor at removal time).
#[derive(Debug, Clone)]
pub struct TrimResult {
    pub core: Tree,
    pub removed: Vec<(usize, usize)>,
    pub eps: f64,
}

/// Deletes the smallest-id leaf until at most (1 - eps) * n vertices remain.
/// Replaying `removed` in reverse rebuilds the tree exactly.
pub fn trim_tree(t: &Tree, eps: f64) -> Result<TrimResult> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let n = t.vertex_count();
    let target = ((1.0 - eps) * n as f64).floor() as usize;
    if target < 1 {
        return Err(Error::TrimTooAggressive);
    }
    let universe = t.universe();
    let mut alive = vec![false; universe];
    let mut deg = vec![0usize; universe];
    for v in t.vertices() {
        alive[v] = true;
        deg[v] = t.degree(v);
    }
    let mut heap: BinaryHeap<std::cmp::Reverse<usize>> = t
        .vertices()
        .filter(|&v| deg[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut remaining = n;
    let mut removed = Vec::with_capacity(n - target);
    while remaining > target {
        let v = loop {
            let std::cmp::Reverse(v) = heap.pop().expect("a tree with >= 2 vertices has a leaf");
            if alive[v] && deg[v] == 1 {
                break v;
            }
        };
        let parent = t
            .neighbors(v)
            .iter()
            .map(|&x| x as usize)
            .find(|&x| alive[x])
            .expect("leaf has one live neighbor");
        alive[v] = false;
        removed.push((v, parent));
        deg[parent] -= 1;
        if deg[parent] == 1 {
            heap.push(std::cmp::Reverse(parent));
        }
        remaining -= 1;
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); universe];
    for v in t.vertices() {
        if alive[v] {
            adj[v] = t
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&x| alive[x as usize])
                .collect();
        }
    }
    let vertices: Vec<u32> = t
        .vertices()
        .filter(|&v| alive[v])
        .map(|v| v as u32)
        .collect();
    Ok(TrimResult {
        core: Tree::from_parts(adj, vertices),
        removed,
        eps,
    })
}

/// Greedy independent set of core vertices with no trimmed neighbor, scanned
/// in BFS order (and in reverse as a fallback). Meeting the size bound
/// (1 - delta eps) n / (delta + 1) is an error condition, not best-effort.
pub fn interior_independent_set(t: &Tree, trim: &TrimResult) -> Result<VertexSet> {
    let universe = t.universe();
    let mut removed_ind = vec![false; universe];
    for &(v, _) in &trim.removed {
        removed_ind[v] = true;
    }
    let core = &trim.core;
    let start = core.vertices().next().ok_or(Error::TrimTooAggressive)?;
    let mut order = Vec::with_capacity(core.vertex_count());
    let mut seen = vec![false; universe];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &w in core.neighbors(v) {
            if !seen[w as usize] {
                seen[w as usize] = true;
                queue.push_back(w as usize);
            }
        }
    }

    let greedy = |scan: &mut dyn Iterator<Item = usize>| -> Vec<usize> {
        let mut taken = vec![false; universe];
        let mut out = Vec::new();
        for v in scan {
            let nbrs = t.neighbors(v);
            let blocked = nbrs
                .iter()
                .any(|&w| taken[w as usize] || removed_ind[w as usize]);
            if !blocked {
                taken[v] = true;
                out.push(v);
            }
        }
        out
    };

    let forward = greedy(&mut order.iter().copied());
    let delta = t.max_degree();
    let bound = (1.0 - delta as f64 * trim.eps) * t.vertex_count() as f64 / (delta as f64 + 1.0);
    let best = if (forward.len() as f64) < bound {
        let backward = greedy(&mut order.iter().rev().copied());
        if backward.len() > forward.len() {
            backward
        } else {
            forward
        }
    } else {
        forward
    };
    if (best.len() as f64) < bound {
        return Err(Error::InteriorSetTooSmall {
            got: best.len(),
            bound,
        });
    }
    Ok(VertexSet::from_unsorted(best))
}

/// Uniform attachment tree with a degree cap: vertex i joins a uniformly
/// random earlier vertex whose degree is still below delta.
pub fn random_tree(n: usize, delta: usize, seed: Seed) -> Result<Tree> {
    if n == 0 || delta < 2 {
        return Err(Error::InvalidParameter(format!(
            "random tree needs n >= 1 and delta >= 2, got n={n} delta={delta}"
        )));
    }
    let mut rng = seed.rng();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut eligible: Vec<u32> = Vec::with_capacity(n);
    if n > 1 {
        eligible.push(0);
    }
    for i in 1..n {
        let slot = rng.random_range(0..eligible.len());
        let parent = eligible[slot] as usize;
        adj[parent].push(i as u32);
        adj[i].push(parent as u32);
        if adj[parent].len() == delta {
            eligible.swap_remove(slot);
        }
        if delta >= 2 {
            eligible.push(i as u32);
        }
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
    }
    Ok(Tree::from_parts(adj, (0..n as u32).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeStats {
    pub leaves: usize,
    /// Vertex-disjoint paths with k edges whose internal vertices all have
    /// degree 2, extracted greedily along degree-2 chains.
    pub bare_paths: usize,
}

pub fn tree_stats(t: &Tree, k: usize) -> TreeStats {
    let leaves = t.vertices().filter(|&v| t.degree(v) == 1).count();
    if k == 0 || t.vertex_count() < k + 1 {
        return TreeStats {
            leaves,
            bare_paths: 0,
        };
    }
    let mut used = vec![false; t.universe()];
    let mut walked: HashSet<(usize, usize)> = HashSet::new();
    let mut bare_paths = 0;
    let norm = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    for s in t.vertices().filter(|&v| t.degree(v) != 2) {
        for &w0 in t.neighbors(s) {
            if walked.contains(&norm(s, w0 as usize)) {
                continue;
            }
            // Walk the degree-2 chain starting with edge (s, w0).
            let mut chain = vec![s, w0 as usize];
            walked.insert(norm(s, w0 as usize));
            let (mut prev, mut cur) = (s, w0 as usize);
            while t.degree(cur) == 2 {
                let next = t
                    .neighbors(cur)
                    .iter()
                    .map(|&x| x as usize)
                    .find(|&x| x != prev)
                    .expect("degree-2 vertex has another neighbor");
                walked.insert(norm(cur, next));
                chain.push(next);
                prev = cur;
                cur = next;
            }
            // Pack k-edge windows; internal vertices must be chain-internal.
            let last = chain.len() - 1;
            let mut a = 0;
            while a + k <= last {
                let window = &chain[a..=a + k];
                let internal_ok = window[1..k].iter().all(|&x| t.degree(x) == 2);
                let unused = window.iter().all(|&x| !used[x]);
                if internal_ok && unused {
                    for &x in window {
                        used[x] = true;
                    }
                    bare_paths += 1;
                    a += k + 1;
                } else {
                    a += 1;
                }
            }
        }
    }
    TreeStats { leaves, bare_paths }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path_tree(n: usize) -> Tree {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Tree::new(n, &edges).unwrap()
    }

    fn star(n: usize) -> Tree {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (0, i)).collect();
        Tree::new(n, &edges).unwrap()
    }

    #[test]
    fn tree_constructor_validates() {
        assert!(Tree::new(3, &[(0, 1)]).is_err()); // disconnected
        assert!(Tree::new(3, &[(0, 1), (1, 2), (2, 0)]).is_err()); // cycle
        assert!(Tree::new(3, &[(0, 1), (0, 1)]).is_err()); // duplicate edge
        assert!(Tree::new(2, &[(0, 2)]).is_err()); // out of range
        let t = Tree::new(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(t.max_degree(), 3);
        assert_eq!(t.vertex_count(), 4);
    }

    #[test]
    fn trim_path_example() {
        let t = path_tree(10);
        let r = trim_tree(&t, 0.2).unwrap();
        assert_eq!(r.core.vertex_count(), 8);
        // Smallest leaves go first: vertex 0, then vertex 1.
        assert_eq!(r.removed, vec![(0, 1), (1, 2)]);
        assert_eq!(r.core.max_degree(), 2);
    }

    #[test]
    fn trim_star_example() {
        let t = star(10);
        let r = trim_tree(&t, 0.5).unwrap();
        assert_eq!(r.core.vertex_count(), 5);
        assert_eq!(
            r.removed,
            vec![(1, 0), (2, 0), (3, 0), (4, 0), (5, 0)]
        );
        assert!(r.core.contains(0) && r.core.contains(9));
    }

    #[test]
    fn trim_rejects_vanishing() {
        let t = path_tree(3);
        assert!(matches!(
            trim_tree(&t, 0.99).unwrap_err(),
            Error::TrimTooAggressive
        ));
    }

    #[test]
    fn trim_replay_reconstructs() {
        for seed in 0..20u64 {
            let t = random_tree(60, 4, Seed::new(77, seed)).unwrap();
            let r = trim_tree(&t, 0.3).unwrap();
            // Replay in reverse: each removed vertex re-attaches to a vertex
            // already present, and degrees end up matching the original.
            let mut present: Vec<bool> = (0..t.universe()).map(|v| r.core.contains(v)).collect();
            for &(leaf, parent) in r.removed.iter().rev() {
                assert!(!present[leaf], "removed vertex {leaf} already present");
                assert!(present[parent], "parent {parent} missing at replay");
                assert!(t.neighbors(leaf).contains(&(parent as u32)));
                present[leaf] = true;
            }
            assert!(present.iter().all(|&b| b));
            // Removal order respected the smallest-current-leaf rule at step 0.
            let first_leaf = t.vertices().filter(|&v| t.degree(v) == 1).min().unwrap();
            assert_eq!(r.removed[0].0, first_leaf);
        }
    }

    #[test]
    fn interior_set_on_path() {
        let t = path_tree(30);
        let r = trim_tree(&t, 0.03).unwrap(); // removes one leaf
        let s = interior_independent_set(&t, &r).unwrap();
        assert!(s.len() as f64 >= 28.0 / 3.0);
        let ind = s.indicator(t.universe());
        for v in s.iter() {
            for &w in t.neighbors(v) {
                assert!(!ind[w as usize], "adjacent pair in independent set");
                assert!(r.core.contains(w as usize), "neighbor of {v} was trimmed");
            }
        }
    }

    #[test]
    fn interior_set_bound_on_random_trees() {
        for seed in 0..30u64 {
            let delta = 3 + (seed % 3) as usize;
            let t = random_tree(200, delta, Seed::new(5, seed)).unwrap();
            let eps = 0.01;
            let r = trim_tree(&t, eps).unwrap();
            let s = interior_independent_set(&t, &r).unwrap();
            let bound = (1.0 - delta as f64 * eps) * 200.0 / (delta as f64 + 1.0);
            assert!(s.len() as f64 >= bound);
        }
    }

    #[test]
    fn random_tree_respects_cap() {
        for seed in 0..10u64 {
            let t = random_tree(300, 3, Seed::new(9, seed)).unwrap();
            assert!(t.max_degree() <= 3);
            assert_eq!(t.edge_count(), 299);
        }
        // Degree cap 2 forces a Hamilton path shape.
        let t = random_tree(50, 2, Seed::new(9, 0)).unwrap();
        assert_eq!(t.max_degree(), 2);
        assert_eq!(t.vertices().filter(|&v| t.degree(v) == 1).count(), 2);
    }

    #[test]
    fn stats_on_path_and_star() {
        let t = path_tree(41);
        let s = tree_stats(&t, 10);
        assert_eq!(s.leaves, 2);
        // 40 edges, 11 vertices per bare path: floor(41 / 11) = 3.
        assert_eq!(s.bare_paths, 3);

        let t = star(20);
        let s = tree_stats(&t, 3);
        assert_eq!(s.leaves, 19);
        assert_eq!(s.bare_paths, 0);
    }

    #[test]
    fn stats_spider() {
        // Three legs of length 5 from a center: chains allow one 4-edge path each.
        let mut edges = Vec::new();
        let mut next = 1;
        for _ in 0..3 {
            let mut prev = 0;
            for _ in 0..5 {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        let t = Tree::new(16, &edges).unwrap();
        let s = tree_stats(&t, 4);
        assert_eq!(s.leaves, 3);
        assert_eq!(s.bare_paths, 3);
    }

    #[test]
    fn text_round_trip() {
        let t = random_tree(40, 4, Seed::new(3, 3)).unwrap();
        let mut buf = Vec::new();
        t.write_text(&mut buf).unwrap();
        let back = Tree::read_text(&mut buf.as_slice()).unwrap();
        assert_eq!(t, back);
    }
}
