//! Search for large spanning-ish structures: rotation-based path and cycle
//! search, greedy plus augmenting matchings, and tree embedding.

pub mod embed;
pub mod matching;
pub mod posa;
pub mod rotate;

use crate::graph::EdgeView;

/// A simple path given by its vertex sequence (distinct vertices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    vertices: Vec<usize>,
}

impl Path {
    pub fn new(vertices: Vec<usize>) -> Path {
        assert!(!vertices.is_empty(), "a path has at least one vertex");
        Path { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_vertices(self) -> Vec<usize> {
        self.vertices
    }

    /// Checks distinctness and that consecutive vertices are adjacent.
    pub fn is_valid_in<E: EdgeView>(&self, g: &E) -> bool {
        distinct_in_range(&self.vertices, g.n_vertices())
            && self
                .vertices
                .windows(2)
                .all(|w| g.connects(w[0], w[1]))
    }
}

/// A cycle given by its vertex sequence in cyclic order (closing edge from
/// last back to first implied). At least three vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cycle {
    vertices: Vec<usize>,
}

impl Cycle {
    pub fn new(vertices: Vec<usize>) -> Cycle {
        assert!(vertices.len() >= 3, "a cycle has at least three vertices");
        Cycle { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_valid_in<E: EdgeView>(&self, g: &E) -> bool {
        self.vertices.len() >= 3
            && distinct_in_range(&self.vertices, g.n_vertices())
            && self
                .vertices
                .windows(2)
                .all(|w| g.connects(w[0], w[1]))
            && g.connects(self.vertices[self.vertices.len() - 1], self.vertices[0])
    }
}

/// A matching as a list of disjoint edges, each stored with the smaller
/// endpoint first and the list sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edges: Vec<(usize, usize)>,
}

impl Matching {
    /// Normalizes edge order; panics on shared endpoints or loops since all
    /// in-crate producers guarantee disjointness.
    pub fn new(mut edges: Vec<(usize, usize)>) -> Matching {
        for e in edges.iter_mut() {
            assert!(e.0 != e.1, "loop edge in matching");
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in &edges {
            assert!(seen.insert(u) && seen.insert(v), "shared endpoint in matching");
        }
        Matching { edges }
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Per-vertex partner lookup table.
    pub fn mates(&self, n: usize) -> Vec<Option<usize>> {
        let mut mate = vec![None; n];
        for &(u, v) in &self.edges {
            mate[u] = Some(v);
            mate[v] = Some(u);
        }
        mate
    }

    pub fn covers(&self, v: usize) -> bool {
        self.edges.iter().any(|&(a, b)| a == v || b == v)
    }

    pub fn is_valid_in<E: EdgeView>(&self, g: &E) -> bool {
        let n = g.n_vertices();
        self.edges
            .iter()
            .all(|&(u, v)| u < n && v < n && g.connects(u, v))
    }
}

/// An injective map from pattern-tree vertices to host vertices, carrying
/// the pattern tree itself. Images are indexed by pattern vertex id; only
/// alive pattern vertices have images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeEmbedding {
    tree: crate::tree::Tree,
    images: Vec<Option<usize>>,
}

impl TreeEmbedding {
    /// An embedding with no vertex placed yet.
    pub fn empty(tree: crate::tree::Tree) -> TreeEmbedding {
        let images = vec![None; tree.universe()];
        TreeEmbedding { tree, images }
    }

    pub(crate) fn from_parts(tree: crate::tree::Tree, images: Vec<Option<usize>>) -> TreeEmbedding {
        debug_assert_eq!(images.len(), tree.universe());
        TreeEmbedding { tree, images }
    }

    pub fn tree(&self) -> &crate::tree::Tree {
        &self.tree
    }

    pub fn image(&self, v: usize) -> Option<usize> {
        self.images.get(v).copied().flatten()
    }

    pub(crate) fn set(&mut self, v: usize, host: usize) {
        debug_assert!(self.images[v].is_none(), "vertex {v} embedded twice");
        self.images[v] = Some(host);
    }

    pub(crate) fn unset(&mut self, v: usize) {
        self.images[v] = None;
    }

    /// Moves an already embedded pattern vertex to a different host.
    pub(crate) fn relocate(&mut self, v: usize, host: usize) {
        debug_assert!(self.images[v].is_some(), "relocating unplaced vertex {v}");
        self.images[v] = Some(host);
    }

    /// Attaches a new pattern leaf to the tree and embeds it in one step.
    pub(crate) fn attach_embedded_leaf(&mut self, leaf: usize, parent: usize, host: usize) {
        self.tree.attach_leaf(leaf, parent);
        self.set(leaf, host);
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.images
    }

    pub fn placed(&self) -> usize {
        self.images.iter().filter(|i| i.is_some()).count()
    }

    /// Host -> pattern-vertex inverse table.
    pub fn inverse(&self, host_n: usize) -> Vec<Option<usize>> {
        let mut inv = vec![None; host_n];
        for (v, img) in self.images.iter().enumerate() {
            if let Some(h) = *img {
                debug_assert!(inv[h].is_none(), "host {h} used twice");
                inv[h] = Some(v);
            }
        }
        inv
    }
}

fn distinct_in_range(vs: &[usize], n: usize) -> bool {
    let mut seen = vec![false; n];
    vs.iter().all(|&v| {
        if v >= n || seen[v] {
            return false;
        }
        seen[v] = true;
        true
    })
}
