//! Random graph sampling and the perturbed-model container.
//!
//! All randomness flows from a `Seed` (master, stream) pair through ChaCha8,
//! so every sample is reproducible across runs, platforms and worker counts.

use crate::graph::Graph;
use crate::{Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::str::FromStr;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Counter-style seed: `master` names the experiment, `stream` the trial.
/// Distinct (master, stream) pairs give decorrelated generators, so trials
/// can run on any worker in any order without changing their outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed {
    pub master: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(master: u64, stream: u64) -> Seed {
        Seed { master, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut state = self.master ^ self.stream.wrapping_mul(0xA24BAED4963EE407);
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }

    /// Derives an independent seed for a sub-purpose (dense part, exposure
    /// rounds, search heuristics, ...).
    pub fn child(&self, tag: u64) -> Seed {
        let mut state = self.master
            ^ self.stream.wrapping_mul(0xA24BAED4963EE407)
            ^ tag.wrapping_mul(0xD6E8FEB86659FD93);
        let master = splitmix64(&mut state);
        let stream = splitmix64(&mut state);
        Seed { master, stream }
    }
}

/// Samples G(n, p) by geometric gap skipping over the C(n, 2) pair indices:
/// expected O(n + p n^2) work, so sparse graphs at n = 10^6 stay cheap.
pub fn sample_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    if n >= 2 && p >= 1.0 {
        for u in 0..n {
            adj[u] = (0..n as u32).filter(|&w| w as usize != u).collect();
        }
        return Ok(Graph::from_sorted_adj(adj));
    }
    if n >= 2 && p > 0.0 {
        let mut rng = seed.rng();
        let log_q = (-p).ln_1p();
        let mut u = 0usize;
        let mut v = 1usize; // next candidate pair (u, v)
        'sweep: loop {
            let draw: f64 = rng.random();
            // Geometric(p) count of pairs skipped before the next edge.
            let gap = ((1.0 - draw).ln() / log_q).floor();
            if gap >= (n * n) as f64 {
                break; // beyond every remaining pair
            }
            v += gap as usize;
            while v >= n {
                let over = v - n;
                u += 1;
                if u + 1 >= n {
                    break 'sweep;
                }
                v = u + 1 + over;
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
            v += 1;
        }
        // Row sweep emits both endpoints in increasing order already.
        return Ok(Graph::from_sorted_adj(adj));
    }
    Ok(Graph::from_sorted_adj(adj))
}

/// Samples a bipartite G(n, n, p) on 2n vertices: left side {0..n}, right
/// side {n..2n}, each of the n^2 crossing pairs kept with probability p.
pub fn sample_bipartite_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::InvalidProbability(p));
    }
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); 2 * n];
    if n >= 1 && p >= 1.0 {
        for i in 0..n {
            adj[i] = (n as u32..2 * n as u32).collect();
            adj[n + i] = (0..n as u32).collect();
        }
        return Ok(Graph::from_sorted_adj(adj));
    }
    if n >= 1 && p > 0.0 {
        let mut rng = seed.rng();
        let log_q = (-p).ln_1p();
        let mut i = 0usize;
        let mut j = 0usize;
        loop {
            let draw: f64 = rng.random();
            let gap = ((1.0 - draw).ln() / log_q).floor();
            if gap >= (n * n) as f64 {
                break;
            }
            j += gap as usize;
            i += j / n;
            j %= n;
            if i >= n {
                break;
            }
            adj[i].push((n + j) as u32);
            adj[n + j].push(i as u32);
            j += 1;
        }
        return Ok(Graph::from_sorted_adj(adj));
    }
    Ok(Graph::from_sorted_adj(adj))
}

/// Round probabilities for the two-round exposure of G(n, beta/n).
///
/// The identity (1 - p1)(1 - p2) = 1 - beta/n holds exactly, so the union of
/// independent G(n, p1) and G(n, p2) is distributed as G(n, beta/n). The
/// first round carries (beta - 1)/n when beta > 2 and beta/(2n) otherwise.
pub fn two_round_probs(n: usize, beta: f64) -> Result<(f64, f64)> {
    if n == 0 || !beta.is_finite() || beta < 0.0 || beta > n as f64 {
        return Err(Error::InvalidParameter(format!(
            "beta must lie in [0, n], got beta={beta} n={n}"
        )));
    }
    let p = beta / n as f64;
    let p1 = if beta > 2.0 {
        (beta - 1.0) / n as f64
    } else {
        beta / (2.0 * n as f64)
    };
    let p2 = 1.0 - (1.0 - p) / (1.0 - p1);
    Ok((p1, p2.clamp(0.0, 1.0)))
}

/// Exposes G(n, beta/n) as a union of two independent rounds (r1, r2).
pub fn two_round_exposure(n: usize, beta: f64, seed: Seed) -> Result<(Graph, Graph)> {
    let (p1, p2) = two_round_probs(n, beta)?;
    let r1 = sample_gnp(n, p1, seed.child(1))?;
    let r2 = sample_gnp(n, p2, seed.child(2))?;
    Ok((r1, r2))
}

/// Families of dense parts with minimum degree at least ceil(alpha * n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GAlphaKind {
    /// Complete bipartite K_{a, n-a} with a = ceil(alpha n): the extremal
    /// construction whose big side can starve perfect matchings.
    CompleteBipartite,
    /// Disjoint cliques of size ceil(alpha n) + 1, remainder merged into the
    /// last clique.
    CliqueBlowup,
    /// G(n, 2 alpha) patched greedily until the degree floor holds.
    NoisyRegularish,
}

impl GAlphaKind {
    pub const ALL: [GAlphaKind; 3] = [
        GAlphaKind::CompleteBipartite,
        GAlphaKind::CliqueBlowup,
        GAlphaKind::NoisyRegularish,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            GAlphaKind::CompleteBipartite => "complete-bipartite",
            GAlphaKind::CliqueBlowup => "clique-blowup",
            GAlphaKind::NoisyRegularish => "noisy-regularish",
        }
    }
}

impl fmt::Display for GAlphaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GAlphaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<GAlphaKind> {
        match s {
            "complete-bipartite" => Ok(GAlphaKind::CompleteBipartite),
            "clique-blowup" => Ok(GAlphaKind::CliqueBlowup),
            "noisy-regularish" => Ok(GAlphaKind::NoisyRegularish),
            other => Err(Error::Parse(format!("unknown dense-part kind '{other}'"))),
        }
    }
}

fn degree_floor(n: usize, alpha: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if alpha * (n as f64) < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha * n = {} < 1: dense part would be edgeless",
            alpha * n as f64
        )));
    }
    Ok((alpha * n as f64).ceil() as usize)
}

/// Small side size of the complete-bipartite dense part.
pub(crate) fn bipartite_small_side(n: usize, alpha: f64) -> Result<usize> {
    let a = degree_floor(n, alpha)?;
    if n - a < a {
        return Err(Error::InvalidParameter(format!(
            "complete bipartite cannot reach minimum degree {a} on {n} vertices"
        )));
    }
    Ok(a)
}

/// Builds a dense part of the requested kind with delta(G) >= ceil(alpha n).
pub fn make_galpha(kind: GAlphaKind, n: usize, alpha: f64, seed: Seed) -> Result<Graph> {
    let floor = degree_floor(n, alpha)?;
    match kind {
        GAlphaKind::CompleteBipartite => {
            let a = bipartite_small_side(n, alpha)?;
            let mut adj: Vec<Vec<u32>> = Vec::with_capacity(n);
            for v in 0..n {
                if v < a {
                    adj.push((a as u32..n as u32).collect());
                } else {
                    adj.push((0..a as u32).collect());
                }
            }
            Ok(Graph::from_sorted_adj(adj))
        }
        GAlphaKind::CliqueBlowup => {
            let k = floor + 1;
            let full = if k >= n { 1 } else { n / k };
            let mut starts: Vec<usize> = (0..full).map(|i| i * k).collect();
            starts.push(n); // sentinel: last clique absorbs the remainder
            let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
            for w in starts.windows(2) {
                let (lo, hi) = (w[0], w[1]);
                for v in lo..hi {
                    adj[v] = (lo as u32..hi as u32).filter(|&x| x as usize != v).collect();
                }
            }
            let g = Graph::from_sorted_adj(adj);
            if g.min_degree() < floor {
                return Err(Error::InvalidParameter(format!(
                    "clique blowup reaches minimum degree {} < {floor}",
                    g.min_degree()
                )));
            }
            Ok(g)
        }
        GAlphaKind::NoisyRegularish => {
            if floor > n - 1 {
                return Err(Error::InvalidParameter(format!(
                    "degree floor {floor} exceeds n - 1"
                )));
            }
            let g = sample_gnp(n, (2.0 * alpha).min(1.0), seed)?;
            patch_to_floor(g, floor)
        }
    }
}

/// Raises every vertex to the degree floor by connecting deficient vertices
/// to the lowest-degree vertices they are not yet adjacent to.
fn patch_to_floor(g: Graph, floor: usize) -> Result<Graph> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    if deg.iter().all(|&d| d >= floor) {
        return Ok(g);
    }
    let mut extra: Vec<Vec<u32>> = vec![Vec::new(); n];
    loop {
        let v = match (0..n).filter(|&v| deg[v] < floor).min_by_key(|&v| (deg[v], v)) {
            Some(v) => v,
            None => break,
        };
        let mut order: Vec<usize> = (0..n).filter(|&u| u != v).collect();
        order.sort_unstable_by_key(|&u| (deg[u], u));
        let mut progressed = false;
        for u in order {
            if deg[v] >= floor {
                break;
            }
            if g.has_edge(u, v) || extra[v].contains(&(u as u32)) {
                continue;
            }
            extra[v].push(u as u32);
            extra[u].push(v as u32);
            deg[v] += 1;
            deg[u] += 1;
            progressed = true;
        }
        if !progressed {
            return Err(Error::InvalidParameter(
                "cannot patch dense part to its degree floor".into(),
            ));
        }
    }
    let mut adj: Vec<Vec<u32>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut list = g.neighbors(v).to_vec();
        list.extend_from_slice(&extra[v]);
        list.sort_unstable();
        list.dedup();
        adj.push(list);
    }
    Ok(Graph::from_sorted_adj(adj))
}

/// Dense part, stored implicitly when the structure makes that free.
#[derive(Debug, Clone)]
pub enum DPart {
    Explicit(Graph),
    /// K_{small, n-small} with the small side on ids 0..small.
    CompleteBipartite { small: usize, n: usize },
}

impl DPart {
    pub fn n(&self) -> usize {
        match self {
            DPart::Explicit(g) => g.n(),
            DPart::CompleteBipartite { n, .. } => *n,
        }
    }

    pub fn degree(&self, u: usize) -> usize {
        match self {
            DPart::Explicit(g) => g.degree(u),
            DPart::CompleteBipartite { small, n } => {
                if u < *small {
                    n - small
                } else {
                    *small
                }
            }
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        match self {
            DPart::Explicit(g) => g.has_edge(u, v),
            DPart::CompleteBipartite { small, n } => {
                u != v && u < *n && v < *n && ((u < *small) != (v < *small))
            }
        }
    }

    pub fn min_degree(&self) -> usize {
        match self {
            DPart::Explicit(g) => g.min_degree(),
            DPart::CompleteBipartite { small, n } => (*small).min(n - small),
        }
    }

    pub fn neighbors(&self, u: usize) -> DPartNeighbors<'_> {
        match self {
            DPart::Explicit(g) => DPartNeighbors::Slice(g.neighbors(u).iter()),
            DPart::CompleteBipartite { small, n } => {
                if u < *small {
                    DPartNeighbors::Range(*small..*n)
                } else {
                    DPartNeighbors::Range(0..*small)
                }
            }
        }
    }
}

pub enum DPartNeighbors<'a> {
    Slice(std::slice::Iter<'a, u32>),
    Range(std::ops::Range<usize>),
}

impl Iterator for DPartNeighbors<'_> {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        match self {
            DPartNeighbors::Slice(it) => it.next().map(|&v| v as usize),
            DPartNeighbors::Range(r) => r.next(),
        }
    }
}

/// The perturbed model: a dense part with minimum degree >= ceil(alpha n),
/// plus two independently exposed random rounds whose union is G(n, beta/n).
#[derive(Debug, Clone)]
pub struct PerturbedGraph {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub kind: GAlphaKind,
    dpart: DPart,
    pub r1: Graph,
    pub r2: Graph,
}

pub const SEED_DPART: u64 = 1;
pub const SEED_EXPOSURE: u64 = 2;
pub const SEED_SEARCH: u64 = 3;
pub const SEED_TREE: u64 = 4;
pub const SEED_PLANT: u64 = 5;

impl PerturbedGraph {
    /// Samples the full model from one trial seed.
    pub fn sample(
        n: usize,
        alpha: f64,
        beta: f64,
        kind: GAlphaKind,
        seed: Seed,
    ) -> Result<PerturbedGraph> {
        let dpart = match kind {
            GAlphaKind::CompleteBipartite => DPart::CompleteBipartite {
                small: bipartite_small_side(n, alpha)?,
                n,
            },
            _ => DPart::Explicit(make_galpha(kind, n, alpha, seed.child(SEED_DPART))?),
        };
        let (r1, r2) = two_round_exposure(n, beta, seed.child(SEED_EXPOSURE))?;
        PerturbedGraph::from_parts(alpha, beta, kind, dpart, r1, r2)
    }

    /// Assembles a model from pre-built parts, validating the degree floor.
    pub fn from_parts(
        alpha: f64,
        beta: f64,
        kind: GAlphaKind,
        dpart: DPart,
        r1: Graph,
        r2: Graph,
    ) -> Result<PerturbedGraph> {
        let n = dpart.n();
        if r1.n() != n || r2.n() != n {
            return Err(Error::InvalidParameter(
                "dense part and random rounds disagree on n".into(),
            ));
        }
        let floor = degree_floor(n, alpha)?;
        if dpart.min_degree() < floor {
            return Err(Error::InvalidParameter(format!(
                "dense part minimum degree {} below ceil(alpha n) = {floor}",
                dpart.min_degree()
            )));
        }
        Ok(PerturbedGraph {
            n,
            alpha,
            beta,
            kind,
            dpart,
            r1,
            r2,
        })
    }

    pub fn dpart(&self) -> &DPart {
        &self.dpart
    }

    pub fn dpart_degree(&self, u: usize) -> usize {
        self.dpart.degree(u)
    }

    pub fn dpart_has_edge(&self, u: usize, v: usize) -> bool {
        self.dpart.has_edge(u, v)
    }

    pub fn dpart_neighbors(&self, u: usize) -> DPartNeighbors<'_> {
        self.dpart.neighbors(u)
    }

    /// Edge presence in the union dpart + r1 + r2.
    pub fn union_has_edge(&self, u: usize, v: usize) -> bool {
        self.dpart.has_edge(u, v) || self.r1.has_edge(u, v) || self.r2.has_edge(u, v)
    }

    /// True when the vertex has no incident edge in either random round.
    pub fn random_isolated(&self, u: usize) -> bool {
        self.r1.degree(u) == 0 && self.r2.degree(u) == 0
    }
}

impl crate::graph::EdgeView for PerturbedGraph {
    fn n_vertices(&self) -> usize {
        self.n
    }

    fn connects(&self, u: usize, v: usize) -> bool {
        self.union_has_edge(u, v)
    }
}
