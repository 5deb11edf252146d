//! Greedy randomized tree embedding: BFS order from a centroid, children
//! mapped to random unused host neighbors, and local backtracking on dead
//! ends (evict an occupant and re-place it, at most two evictions deep).
//! Also the planted-instance generator used as a pipeline oracle.

use crate::graph::Graph;
use crate::random::{sample_gnp, Seed};
use crate::span::TreeEmbedding;
use crate::tree::Tree;
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use std::collections::VecDeque;

const TAG_NOISE: u64 = 1;
const MAX_EVICTION_DEPTH: usize = 2;

/// Embeds `t` into `g` using only hosts with id below `target`. When a
/// vertex has no unused host available, an occupied candidate host is
/// freed by re-placing its occupant elsewhere; such evictions nest at most
/// two deep and their total number is capped by `backtrack_budget`.
pub fn embed_almost_spanning_tree(
    g: &Graph,
    t: &Tree,
    target: usize,
    backtrack_budget: usize,
    seed: Seed,
) -> Result<TreeEmbedding> {
    let k = t.vertex_count();
    if k > target {
        return Err(Error::PatternTooLarge {
            pattern: k,
            host: target,
        });
    }
    if target > g.n() {
        return Err(Error::InvalidParameter(format!(
            "target {target} exceeds host size {}",
            g.n()
        )));
    }
    let order = bfs_order_from_centroid(t);
    debug_assert_eq!(order.len(), k);
    let mut eng = Embedder {
        g,
        t,
        target,
        rng: seed.rng(),
        images: vec![None; t.universe()],
        occupant: vec![NONE_OCC; g.n()],
        in_flight: vec![false; t.universe()],
        evictions_left: backtrack_budget,
    };
    for (idx, &v) in order.iter().enumerate() {
        if !eng.try_place(v, 0) {
            return Err(Error::EmbeddingBudget {
                placed: idx,
                total: k,
            });
        }
    }
    Ok(TreeEmbedding::from_parts(t.clone(), eng.images))
}

const NONE_OCC: u32 = u32::MAX;

struct Embedder<'a> {
    g: &'a Graph,
    t: &'a Tree,
    target: usize,
    rng: ChaCha8Rng,
    images: Vec<Option<usize>>,
    occupant: Vec<u32>,
    in_flight: Vec<bool>,
    evictions_left: usize,
}

impl<'a> Embedder<'a> {
    /// Hosts compatible with every already placed tree-neighbor of `x`.
    /// Empty anchor list means `x` is the root; a random sample serves then.
    fn candidate_hosts(&mut self, x: usize, out: &mut Vec<u32>) {
        out.clear();
        let mut anchors: Vec<usize> = Vec::new();
        for &w in self.t.neighbors(x) {
            if let Some(h) = self.images[w as usize] {
                anchors.push(h);
            }
        }
        if anchors.is_empty() {
            let take = self.target.min(64);
            out.extend(
                rand::seq::index::sample(&mut self.rng, self.target, take)
                    .iter()
                    .map(|h| h as u32),
            );
            return;
        }
        'host: for &h in self.g.neighbors(anchors[0]) {
            if h as usize >= self.target {
                continue;
            }
            for &a in &anchors[1..] {
                if !self.g.has_edge(h as usize, a) {
                    continue 'host;
                }
            }
            out.push(h);
        }
        out.shuffle(&mut self.rng);
    }

    fn place(&mut self, x: usize, h: usize) {
        self.images[x] = Some(h);
        self.occupant[h] = x as u32;
    }

    fn unplace(&mut self, x: usize) -> usize {
        let h = self.images[x].take().expect("unplacing unplaced vertex");
        self.occupant[h] = NONE_OCC;
        h
    }

    fn try_place(&mut self, x: usize, depth: usize) -> bool {
        let mut cands = Vec::new();
        self.candidate_hosts(x, &mut cands);
        for &h in &cands {
            if self.occupant[h as usize] == NONE_OCC {
                self.place(x, h as usize);
                return true;
            }
        }
        if depth >= MAX_EVICTION_DEPTH {
            return false;
        }
        self.in_flight[x] = true;
        for &h in &cands {
            let tw = self.occupant[h as usize];
            debug_assert_ne!(tw, NONE_OCC);
            let tw = tw as usize;
            if self.in_flight[tw] {
                continue;
            }
            if self.evictions_left == 0 {
                break;
            }
            self.evictions_left -= 1;
            self.unplace(tw);
            self.place(x, h as usize);
            if self.try_place(tw, depth + 1) {
                self.in_flight[x] = false;
                return true;
            }
            self.unplace(x);
            self.place(tw, h as usize);
        }
        self.in_flight[x] = false;
        false
    }
}

/// BFS order over the alive vertices starting at a centroid. Within each
/// layer, high-degree vertices come first (hardest constraints earliest),
/// ties by id.
fn bfs_order_from_centroid(t: &Tree) -> Vec<usize> {
    let c = centroid(t);
    let mut depth: Vec<Option<u32>> = vec![None; t.universe()];
    depth[c] = Some(0);
    let mut queue = VecDeque::from([c]);
    let mut layers: Vec<Vec<usize>> = vec![vec![c]];
    while let Some(v) = queue.pop_front() {
        for &w in t.neighbors(v) {
            let wi = w as usize;
            if depth[wi].is_none() {
                let d = depth[v].expect("visited") + 1;
                depth[wi] = Some(d);
                if layers.len() == d as usize {
                    layers.push(Vec::new());
                }
                layers[d as usize].push(wi);
                queue.push_back(wi);
            }
        }
    }
    let mut order = Vec::with_capacity(t.vertex_count());
    for mut layer in layers {
        layer.sort_by_key(|&v| (std::cmp::Reverse(t.degree(v)), v));
        order.extend(layer);
    }
    order
}

/// Vertex minimizing the largest component of the tree after its removal;
/// smallest id on ties.
fn centroid(t: &Tree) -> usize {
    let k = t.vertex_count();
    let root = t.vertices().next().expect("nonempty tree");
    if k == 1 {
        return root;
    }
    // Iterative post-order subtree sizes.
    let mut parent: Vec<Option<usize>> = vec![None; t.universe()];
    let mut dfs_order = Vec::with_capacity(k);
    let mut stack = vec![root];
    let mut seen = vec![false; t.universe()];
    seen[root] = true;
    while let Some(v) = stack.pop() {
        dfs_order.push(v);
        for &w in t.neighbors(v) {
            let wi = w as usize;
            if !seen[wi] {
                seen[wi] = true;
                parent[wi] = Some(v);
                stack.push(wi);
            }
        }
    }
    let mut size = vec![1usize; t.universe()];
    for &v in dfs_order.iter().rev() {
        if let Some(p) = parent[v] {
            size[p] += size[v];
        }
    }
    let mut best = (usize::MAX, usize::MAX);
    for v in t.vertices() {
        let mut worst = k - size[v];
        for &w in t.neighbors(v) {
            let wi = w as usize;
            if parent[wi] == Some(v) {
                worst = worst.max(size[wi]);
            }
        }
        if (worst, v) < best {
            best = (worst, v);
        }
    }
    best.1
}

/// Plants `t` at a uniformly random injective image inside `0..n` and unions
/// the image edges with G(n, noise_beta/n) noise. The returned embedding is
/// valid in the returned graph by construction.
pub fn plant_embedding(
    t: Tree,
    n: usize,
    noise_beta: f64,
    seed: Seed,
) -> Result<(Graph, TreeEmbedding)> {
    let k = t.vertex_count();
    if k > n {
        return Err(Error::PatternTooLarge {
            pattern: k,
            host: n,
        });
    }
    let mut rng = seed.rng();
    let hosts = rand::seq::index::sample(&mut rng, n, k);
    let mut images: Vec<Option<usize>> = vec![None; t.universe()];
    for (idx, v) in t.vertices().enumerate() {
        images[v] = Some(hosts.index(idx));
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for v in t.vertices() {
        for &w in t.neighbors(v) {
            if (w as usize) > v {
                let a = images[v].expect("alive vertex imaged");
                let b = images[w as usize].expect("alive vertex imaged");
                edges.push((a, b));
            }
        }
    }
    let noise = sample_gnp(n, noise_beta / n as f64, seed.child(TAG_NOISE))?;
    edges.extend(noise.edges());
    let graph = Graph::build(n, &edges)?;
    Ok((graph, TreeEmbedding::from_parts(t, images)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::random_tree;

    fn seed(k: u64) -> Seed {
        Seed::new(0x7ee, k)
    }

    fn check_embedding(g: &Graph, t: &Tree, e: &TreeEmbedding) {
        let mut seen = vec![false; g.n()];
        for v in t.vertices() {
            let h = e.image(v).expect("placed");
            assert!(!seen[h], "host reused");
            seen[h] = true;
            for &w in t.neighbors(v) {
                let hw = e.image(w as usize).expect("placed");
                assert!(g.has_edge(h, hw), "tree edge ({v},{w}) missing in host");
            }
        }
    }

    #[test]
    fn single_edge_into_k2() {
        let t = Tree::new(2, &[(0, 1)]).unwrap();
        let g = Graph::build(2, &[(0, 1)]).unwrap();
        let e = embed_almost_spanning_tree(&g, &t, 2, 100, seed(0)).unwrap();
        check_embedding(&g, &t, &e);
        assert_eq!(e.placed(), 2);
    }

    #[test]
    fn path_into_cycle() {
        let n = 25;
        let t = Tree::new(n, &(0..n - 1).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let mut edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        edges.push((n - 1, 0));
        let g = Graph::build(n, &edges).unwrap();
        let e = embed_almost_spanning_tree(&g, &t, n, 10_000, seed(1)).unwrap();
        check_embedding(&g, &t, &e);
    }

    #[test]
    fn respects_target_cap() {
        // Host is a path on 6; only the first 3 hosts are allowed.
        let g = Graph::build(6, &(0..5).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let t = Tree::new(3, &[(0, 1), (1, 2)]).unwrap();
        let e = embed_almost_spanning_tree(&g, &t, 3, 10_000, seed(2)).unwrap();
        for v in t.vertices() {
            assert!(e.image(v).unwrap() < 3);
        }
    }

    #[test]
    fn size_validation() {
        let g = Graph::build(3, &[(0, 1), (1, 2)]).unwrap();
        let t = Tree::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(matches!(
            embed_almost_spanning_tree(&g, &t, 3, 100, seed(3)),
            Err(Error::PatternTooLarge { pattern: 4, host: 3 })
        ));
        let t2 = Tree::new(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            embed_almost_spanning_tree(&g, &t2, 5, 100, seed(3)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn impossible_pattern_reports_budget() {
        // A star cannot embed into a path no matter the budget.
        let g = Graph::build(8, &(0..7).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        let t = Tree::new(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = embed_almost_spanning_tree(&g, &t, 8, 1_000, seed(4));
        assert!(matches!(r, Err(Error::EmbeddingBudget { .. })));
    }

    #[test]
    fn dense_random_host_mostly_succeeds() {
        let n = 1000;
        let g = sample_gnp(n, 20.0 / n as f64, seed(5)).unwrap();
        let mut ok = 0;
        for s in 0..10 {
            let t = random_tree(9 * n / 10, 3, seed(100 + s)).unwrap();
            if let Ok(e) = embed_almost_spanning_tree(&g, &t, n, 20 * n, seed(200 + s)) {
                check_embedding(&g, &t, &e);
                ok += 1;
            }
        }
        assert!(ok >= 9, "only {ok}/10 embeddings succeeded");
    }

    #[test]
    fn deterministic_per_seed() {
        let n = 300;
        let g = sample_gnp(n, 12.0 / n as f64, seed(6)).unwrap();
        let t = random_tree(n / 2, 4, seed(7)).unwrap();
        let a = embed_almost_spanning_tree(&g, &t, n, 5000, seed(8)).unwrap();
        let b = embed_almost_spanning_tree(&g, &t, n, 5000, seed(8)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn planted_path_no_noise() {
        let t = Tree::new(3, &[(0, 1), (1, 2)]).unwrap();
        let (g, e) = plant_embedding(t, 3, 0.0, seed(9)).unwrap();
        assert_eq!(g.m(), 2);
        check_embedding(&g, e.tree(), &e);
    }

    #[test]
    fn planted_edge_count_with_noise() {
        // m should land within 4 sigma of tree edges plus expected noise,
        // allowing up to n overlap collisions.
        let n = 10_000usize;
        let t = random_tree(n / 2, 4, seed(10)).unwrap();
        let tree_edges = (n / 2 - 1) as f64;
        let (g, e) = plant_embedding(t, n, 1.0, seed(11)).unwrap();
        check_embedding(&g, e.tree(), &e);
        let pairs = (n * (n - 1) / 2) as f64;
        let p = 1.0 / n as f64;
        let mean = pairs * p;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        let m = g.m() as f64;
        assert!(m <= tree_edges + mean + 4.0 * sd);
        assert!(m >= tree_edges + mean - 4.0 * sd - n as f64);
    }

    #[test]
    fn centroid_prefers_balance() {
        // Path on 7: centroid is the middle vertex 3.
        let t = Tree::new(7, &(0..6).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap();
        assert_eq!(centroid(&t), 3);
        // Star: the center.
        let t = Tree::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        assert_eq!(centroid(&t), 0);
    }
}
