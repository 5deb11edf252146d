//! Simple undirected graphs with sorted adjacency, plus degeneracy-style
//! peeling helpers shared by everything downstream.

use crate::{Error, Result};
use std::collections::VecDeque;
use std::io::{BufRead, Write};

/// Undirected simple graph on vertices `0..n`. Adjacency lists are sorted
/// ascending and symmetric; no self-loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    m: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges and self-loops are
    /// dropped; an endpoint `>= n` is an error.
    pub fn build(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        assert!(n <= u32::MAX as usize, "vertex ids must fit in u32");
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::VertexOutOfRange { endpoint: u, n });
            }
            if v >= n {
                return Err(Error::VertexOutOfRange { endpoint: v, n });
            }
            if u == v {
                continue;
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        let mut m = 0;
        for list in adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
            m += list.len();
        }
        Ok(Graph { adj, m: m / 2 })
    }

    pub fn empty(n: usize) -> Graph {
        Graph {
            adj: vec![Vec::new(); n],
            m: 0,
        }
    }

    /// Adjacency lists must already be sorted, deduplicated and symmetric.
    pub(crate) fn from_sorted_adj(adj: Vec<Vec<u32>>) -> Graph {
        let m: usize = adj.iter().map(|l| l.len()).sum();
        debug_assert!(adj.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        Graph { adj, m: m / 2 }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n() || v >= self.n() {
            return false;
        }
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(|l| l.len()).min().unwrap_or(0)
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .filter(move |&&v| (v as usize) > u)
                .map(move |&v| (u, v as usize))
        })
    }

    /// Union of two graphs on the same vertex set.
    pub fn union(&self, other: &Graph) -> Graph {
        assert_eq!(self.n(), other.n());
        let mut adj = Vec::with_capacity(self.n());
        for v in 0..self.n() {
            let (a, b) = (&self.adj[v], &other.adj[v]);
            let mut merged = Vec::with_capacity(a.len() + b.len());
            merged.extend_from_slice(a);
            merged.extend_from_slice(b);
            merged.sort_unstable();
            merged.dedup();
            adj.push(merged);
        }
        Graph::from_sorted_adj(adj)
    }

    /// Writes the edge-list text form: a `n m` header line, then one `u v`
    /// line per edge.
    pub fn write_edge_list<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "{} {}", self.n(), self.m)?;
        for (u, v) in self.edges() {
            writeln!(w, "{} {}", u, v)?;
        }
        Ok(())
    }

    /// Parses the edge-list text form produced by [`Graph::write_edge_list`].
    pub fn read_edge_list<R: BufRead>(r: &mut R) -> Result<Graph> {
        let (n, _m, edges) = read_header_and_edges(r, false)?;
        Graph::build(n, &edges)
    }
}

/// Adjacency queries abstracted over concrete graph storage, so structure
/// checkers run unchanged against plain graphs and layered random ones.
pub trait EdgeView {
    fn n_vertices(&self) -> usize;
    fn connects(&self, u: usize, v: usize) -> bool;
}

impl EdgeView for Graph {
    fn n_vertices(&self) -> usize {
        self.n()
    }

    fn connects(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v)
    }
}

pub(crate) fn read_header_and_edges<R: BufRead>(
    r: &mut R,
    tree_header: bool,
) -> Result<(usize, usize, Vec<(usize, usize)>)> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))??;
    let mut tok = header.split_whitespace();
    if tree_header {
        match tok.next() {
            Some("tree") => {}
            other => {
                return Err(Error::Parse(format!(
                    "expected 'tree n m' header, got {:?}",
                    other
                )))
            }
        }
    }
    let n: usize = tok
        .next()
        .ok_or_else(|| Error::Parse("missing vertex count".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
    let m: usize = tok
        .next()
        .ok_or_else(|| Error::Parse("missing edge count".into()))?
        .parse()
        .map_err(|e| Error::Parse(format!("bad edge count: {e}")))?;
    let mut edges = Vec::with_capacity(m);
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut it = t.split_whitespace();
        let u: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing endpoint".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad endpoint: {e}")))?;
        let v: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing endpoint".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad endpoint: {e}")))?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "header promises {m} edges, found {}",
            edges.len()
        )));
    }
    Ok((n, m, edges))
}

/// Sorted set of vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VertexSet {
    members: Vec<usize>,
}

impl VertexSet {
    pub fn new() -> VertexSet {
        VertexSet::default()
    }

    pub fn from_unsorted(mut members: Vec<usize>) -> VertexSet {
        members.sort_unstable();
        members.dedup();
        VertexSet { members }
    }

    /// `members` must be strictly increasing.
    pub fn from_sorted(members: Vec<usize>) -> VertexSet {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        VertexSet { members }
    }

    pub fn from_indicator(ind: &[bool]) -> VertexSet {
        VertexSet {
            members: ind
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    /// Membership bitmap over `0..n`, for hot loops.
    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut ind = vec![false; n];
        for &v in &self.members {
            ind[v] = true;
        }
        ind
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::from_unsorted(iter.into_iter().collect())
    }
}

/// Vertices surviving iterated removal of vertices with degree <= 1.
///
/// Queue-based peeling on a mutable degree array, O(n + m). Every vertex in
/// the result has at least two neighbors inside the result.
pub fn two_core(g: &Graph) -> VertexSet {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    for &v in &queue {
        removed[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.neighbors(v) {
            let w = w as usize;
            if removed[w] {
                continue;
            }
            deg[w] -= 1;
            if deg[w] <= 1 {
                removed[w] = true;
                queue.push_back(w);
            }
        }
    }
    VertexSet::from_sorted((0..n).filter(|&v| !removed[v]).collect())
}

/// Vertices with no neighbors at all.
pub fn isolated_vertices(g: &Graph) -> VertexSet {
    VertexSet::from_sorted((0..g.n()).filter(|&v| g.degree(v) == 0).collect())
}
