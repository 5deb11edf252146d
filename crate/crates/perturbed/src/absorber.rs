//! Switching structures supported on the dense part. Each flavor picks a
//! helper element adjacent (in the dense part) to the vertex being inserted
//! and to a companion, then rewires one structure edge so the structure grows
//! by exactly one vertex or edge without losing validity.
//!
//! Sets are computed lazily per (u, v) pair by scanning the dense-part
//! neighborhood of u, never precomputed for all pairs.

use crate::graph::VertexSet;
use crate::random::PerturbedGraph;
use crate::span::{Cycle, Matching, Path, TreeEmbedding};
use crate::{Error, Result};

/// Helper candidates for inserting next to `u` with companion `v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbsorberSet {
    pub u: usize,
    pub v: usize,
    pub members: AbsorberMembers,
}

/// Flavor-specific member lists, each in a deterministic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbsorberMembers {
    /// Path vertices, ordered by position on the path.
    Path(Vec<usize>),
    /// Ordered matched pairs (x, x') with x on the u side, sorted.
    Matching(Vec<(usize, usize)>),
    /// Host vertices carrying a relocatable interior tree vertex, ascending.
    Tree(Vec<usize>),
}

impl AbsorberSet {
    pub fn len(&self) -> usize {
        match &self.members {
            AbsorberMembers::Path(m) => m.len(),
            AbsorberMembers::Matching(m) => m.len(),
            AbsorberMembers::Tree(m) => m.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Path-flavor members; panics on other flavors.
    pub fn path_members(&self) -> &[usize] {
        match &self.members {
            AbsorberMembers::Path(m) => m,
            _ => panic!("not a path-flavor absorber set"),
        }
    }

    /// Matching-flavor members; panics on other flavors.
    pub fn matching_members(&self) -> &[(usize, usize)] {
        match &self.members {
            AbsorberMembers::Matching(m) => m,
            _ => panic!("not a matching-flavor absorber set"),
        }
    }

    /// Tree-flavor members; panics on other flavors.
    pub fn tree_members(&self) -> &[usize] {
        match &self.members {
            AbsorberMembers::Tree(m) => m,
            _ => panic!("not a tree-flavor absorber set"),
        }
    }
}

/// Per-run absorption counters: how many insertions happened and the
/// smallest candidate set seen before any single insertion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AbsorbStats {
    pub absorbed: usize,
    pub min_set: Option<usize>,
}

impl AbsorbStats {
    fn record(&mut self, size: usize) {
        self.min_set = Some(self.min_set.map_or(size, |m| m.min(size)));
        self.absorbed += 1;
    }
}

/// A spanning cycle plus edge provenance. Every consecutive pair (and the
/// wrap-around pair) is an edge of the dense part or one of the two random
/// rounds; ties are attributed in that order.
#[derive(Debug, Clone)]
pub struct HamCertificate {
    pub cycle: Cycle,
    pub dpart_edges: usize,
    pub r1_edges: usize,
    pub r2_edges: usize,
    /// True when the closing edge came from the fallback scan over unused
    /// first-round edges instead of the second round.
    pub closing_retried: bool,
}

/// Every other vertex of the path, excluding the final vertex. Equivalently
/// the 1-based even positions minus the last; members are pairwise
/// non-adjacent on the path, so insertions at distinct members never touch
/// each other's path neighborhoods.
pub fn alternating_set(p: &Path) -> VertexSet {
    let seq = p.vertices();
    let picked: Vec<usize> = (1..seq.len().saturating_sub(1))
        .step_by(2)
        .map(|i| seq[i])
        .collect();
    VertexSet::from_unsorted(picked)
}

/// Path-flavor candidates: x in the dense neighborhood of `u`, x in
/// `pprime`, and both path neighbors of x in the dense neighborhood of `v`.
/// Members come back ordered by path position.
pub fn absorber_set_path(
    pg: &PerturbedGraph,
    p: &Path,
    pprime: &VertexSet,
    u: usize,
    v: usize,
) -> AbsorberSet {
    let seq = p.vertices();
    let mut pos = vec![usize::MAX; pg.n];
    for (i, &x) in seq.iter().enumerate() {
        pos[x] = i;
    }
    let mut members: Vec<usize> = Vec::new();
    for x in pg.dpart_neighbors(u) {
        if !pprime.contains(x) {
            continue;
        }
        let j = pos[x];
        debug_assert!(j != usize::MAX && j >= 1 && j + 1 < seq.len());
        if pg.dpart_has_edge(v, seq[j - 1]) && pg.dpart_has_edge(v, seq[j + 1]) {
            members.push(x);
        }
    }
    members.sort_unstable_by_key(|&x| pos[x]);
    AbsorberSet {
        u,
        v,
        members: AbsorberMembers::Path(members),
    }
}

/// One scan of the path-flavor predicate against mutable path state.
/// Returns the candidate count and the smallest qualifying position.
fn scan_path_members(
    pg: &PerturbedGraph,
    seq: &[usize],
    pos: &[usize],
    active: &[bool],
    u: usize,
    v: usize,
) -> (usize, Option<usize>) {
    let mut count = 0;
    let mut best: Option<usize> = None;
    for x in pg.dpart_neighbors(u) {
        if !active[x] {
            continue;
        }
        let j = pos[x];
        debug_assert!(j >= 1 && j + 1 < seq.len());
        if pg.dpart_has_edge(v, seq[j - 1]) && pg.dpart_has_edge(v, seq[j + 1]) {
            count += 1;
            if best.is_none_or(|b| j < b) {
                best = Some(j);
            }
        }
    }
    (count, best)
}

/// Inserts every leftover vertex except the last two into the path, one
/// switch per vertex. Each step picks the smallest-position candidate x for
/// the pair (current path end, leftover vertex), replaces x by the leftover
/// vertex, and moves x to the end of the path. Consumed candidates leave
/// the active set for good. Fails when a candidate set drops below
/// alpha^3 n / 8, the regime floor for this flavor.
pub fn absorb_leftover_path(
    pg: &PerturbedGraph,
    p: Path,
    leftover: &VertexSet,
) -> Result<(Path, AbsorbStats)> {
    let n = pg.n;
    for &w in leftover.as_slice() {
        if w >= n {
            return Err(Error::VertexOutOfRange { endpoint: w, n });
        }
    }
    if !p.is_valid_in(&pg.r1) {
        return Err(Error::InvalidParameter(
            "path must live inside the first random round".into(),
        ));
    }
    let mut seq = p.into_vertices();
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in seq.iter().enumerate() {
        pos[x] = i;
        if leftover.contains(x) {
            return Err(Error::InvalidParameter(format!(
                "leftover vertex {x} already lies on the path"
            )));
        }
    }
    // The alternating set is frozen at the start; it only loses members.
    let mut active = vec![false; n];
    for i in (1..seq.len().saturating_sub(1)).step_by(2) {
        active[seq[i]] = true;
    }
    let required = pg.alpha.powi(3) * n as f64 / 8.0;
    let mut stats = AbsorbStats::default();
    let take = leftover.len().saturating_sub(2);
    for &vi in &leftover.as_slice()[..take] {
        let u = *seq.last().expect("path is nonempty");
        let (count, best) = scan_path_members(pg, &seq, &pos, &active, u, vi);
        if (count as f64) < required {
            return Err(Error::AbsorberExhausted {
                stage: "path",
                observed: count,
                required,
            });
        }
        stats.record(count);
        let j = best.expect("count >= 1");
        let x = seq[j];
        seq[j] = vi;
        pos[vi] = j;
        pos[x] = seq.len();
        seq.push(x);
        active[x] = false;
        // Spent members aside, the same scan must see the same candidates:
        // positions are untouched and member neighborhoods cannot overlap.
        debug_assert_eq!(scan_path_members(pg, &seq, &pos, &active, u, vi).0, count - 1);
    }
    Ok((Path::new(seq), stats))
}

/// Crossing-edge scan: smallest (i, j) with i < j, position i in `in_a`,
/// position j in `in_b`, and (seq[i], seq[j]) an edge of `g`.
fn smallest_crossing(
    g: &crate::graph::Graph,
    seq: &[usize],
    pos: &[usize],
    in_a: &[bool],
    in_b: &[bool],
) -> Option<(usize, usize)> {
    let mut found: Option<(usize, usize)> = None;
    for (i, &x) in seq.iter().enumerate() {
        if !in_a[i] {
            continue;
        }
        for &w in g.neighbors(x) {
            let j = pos[w as usize];
            if j == usize::MAX || j <= i || !in_b[j] {
                continue;
            }
            if found.is_none_or(|f| (i, j) < f) {
                found = Some((i, j));
            }
        }
    }
    found
}

/// Turns a path on n-2 vertices plus the two remaining vertices into a
/// spanning cycle. Candidate sets are taken at the two path ends; a
/// second-round edge between them supplies the single non-dense closing
/// edge. When the second round has no such edge, one retry scans unused
/// first-round edges (candidate positions are never path-adjacent, so no
/// path edge can be picked up by mistake).
pub fn close_cycle(
    pg: &PerturbedGraph,
    p: &Path,
    v1: usize,
    v2: usize,
) -> Result<HamCertificate> {
    let n = pg.n;
    if p.len() + 2 != n {
        return Err(Error::InvalidParameter(format!(
            "closing needs a path on {} vertices, got {}",
            n - 2,
            p.len()
        )));
    }
    if v1 == v2 || v1 >= n || v2 >= n {
        return Err(Error::InvalidParameter(
            "closing vertices must be two distinct vertices".into(),
        ));
    }
    let seq = p.vertices();
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in seq.iter().enumerate() {
        pos[x] = i;
    }
    if pos[v1] != usize::MAX || pos[v2] != usize::MAX {
        return Err(Error::InvalidParameter(
            "closing vertices must lie off the path".into(),
        ));
    }
    let pprime = alternating_set(p);
    let a = absorber_set_path(pg, p, &pprime, seq[0], v1);
    let b = absorber_set_path(pg, p, &pprime, seq[seq.len() - 1], v2);
    if a.is_empty() || b.is_empty() {
        return Err(Error::AbsorberExhausted {
            stage: "closing",
            observed: 0,
            required: 1.0,
        });
    }
    let mut in_a = vec![false; n];
    for &x in a.path_members() {
        in_a[pos[x]] = true;
    }
    let mut in_b = vec![false; n];
    for &x in b.path_members() {
        in_b[pos[x]] = true;
    }
    let mut retried = false;
    let mut hit = smallest_crossing(&pg.r2, seq, &pos, &in_a, &in_b);
    if hit.is_none() {
        retried = true;
        hit = smallest_crossing(&pg.r1, seq, &pos, &in_a, &in_b);
    }
    let Some((i, j)) = hit else {
        return Err(Error::NoClosingEdge);
    };
    // Both positions sit on the alternating set, so they are interior,
    // distinct in parity terms, and at least two apart.
    debug_assert!(i >= 1 && j + 1 < seq.len() && j >= i + 2);
    let mut cyc = Vec::with_capacity(n);
    cyc.push(seq[i]);
    cyc.extend_from_slice(&seq[..i]);
    cyc.push(v1);
    cyc.extend_from_slice(&seq[i + 1..j]);
    cyc.push(v2);
    cyc.extend_from_slice(&seq[j + 1..]);
    cyc.push(seq[j]);
    debug_assert_eq!(cyc.len(), n);
    let cycle = Cycle::new(cyc);
    let (mut d, mut r1, mut r2) = (0usize, 0usize, 0usize);
    let verts = cycle.vertices();
    for k in 0..n {
        let x = verts[k];
        let y = verts[(k + 1) % n];
        if pg.dpart_has_edge(x, y) {
            d += 1;
        } else if pg.r1.has_edge(x, y) {
            r1 += 1;
        } else if pg.r2.has_edge(x, y) {
            r2 += 1;
        } else {
            debug_assert!(false, "cycle edge {x}-{y} missing from the union");
        }
    }
    Ok(HamCertificate {
        cycle,
        dpart_edges: d,
        r1_edges: r1,
        r2_edges: r2,
        closing_retried: retried,
    })
}

/// Matching-flavor candidates: ordered pairs (x, x') forming a matching
/// edge with x dense-adjacent to `u` and x' dense-adjacent to `v`. Both
/// orientations of each edge are examined.
pub fn absorber_set_matching(
    pg: &PerturbedGraph,
    m: &Matching,
    u: usize,
    v: usize,
) -> AbsorberSet {
    let mates = m.mates(pg.n);
    let mut members: Vec<(usize, usize)> = Vec::new();
    for x in pg.dpart_neighbors(u) {
        if let Some(xp) = mates[x] {
            if pg.dpart_has_edge(v, xp) {
                members.push((x, xp));
            }
        }
    }
    members.sort_unstable();
    AbsorberSet {
        u,
        v,
        members: AbsorberMembers::Matching(members),
    }
}

/// Pairs up the leftover vertices and switches one matching edge per pair:
/// {x, x'} leaves the matching, {u, x} and {v, x'} enter it. Edges created
/// by earlier switches are never picked again. Fails when a candidate set
/// drops below alpha^2 n / 8.
pub fn complete_matching(
    pg: &PerturbedGraph,
    m: &Matching,
    leftover: &VertexSet,
) -> Result<(Matching, AbsorbStats)> {
    let n = pg.n;
    if leftover.len() % 2 != 0 {
        return Err(Error::InvalidParameter(
            "leftover set must have even size".into(),
        ));
    }
    let mates = m.mates(n);
    for &w in leftover.as_slice() {
        if w >= n {
            return Err(Error::VertexOutOfRange { endpoint: w, n });
        }
        if mates[w].is_some() {
            return Err(Error::InvalidParameter(format!(
                "leftover vertex {w} is already matched"
            )));
        }
    }
    // eligible: covered by an original edge that has not been switched out.
    let mut eligible = vec![false; n];
    for &(x, y) in m.edges() {
        eligible[x] = true;
        eligible[y] = true;
    }
    let required = pg.alpha * pg.alpha * n as f64 / 8.0;
    let mut stats = AbsorbStats::default();
    let mut new_edges: Vec<(usize, usize)> = Vec::new();
    for couple in leftover.as_slice().chunks(2) {
        let (u, v) = (couple[0], couple[1]);
        let mut count = 0;
        let mut best: Option<(usize, usize)> = None;
        for x in pg.dpart_neighbors(u) {
            if !eligible[x] {
                continue;
            }
            let xp = mates[x].expect("eligible vertices are matched");
            if pg.dpart_has_edge(v, xp) {
                count += 1;
                if best.is_none_or(|b| (x, xp) < b) {
                    best = Some((x, xp));
                }
            }
        }
        if (count as f64) < required {
            return Err(Error::AbsorberExhausted {
                stage: "matching",
                observed: count,
                required,
            });
        }
        stats.record(count);
        let (x, xp) = best.expect("count >= 1");
        eligible[x] = false;
        eligible[xp] = false;
        new_edges.push((u, x));
        new_edges.push((v, xp));
    }
    let mut final_edges: Vec<(usize, usize)> = m
        .edges()
        .iter()
        .copied()
        .filter(|&(x, _)| eligible[x])
        .collect();
    final_edges.extend(new_edges);
    Ok((Matching::new(final_edges), stats))
}

/// Tree-flavor candidates: host vertices x in the dense neighborhood of `u`
/// and in `pool`, whose occupying tree vertex has all its embedded tree
/// neighbors imaged inside the dense neighborhood of `v`.
pub fn absorber_set_tree(
    pg: &PerturbedGraph,
    emb: &TreeEmbedding,
    pool: &VertexSet,
    u: usize,
    v: usize,
) -> AbsorberSet {
    let inv = emb.inverse(pg.n);
    let mut members: Vec<usize> = Vec::new();
    for x in pg.dpart_neighbors(u) {
        if !pool.contains(x) {
            continue;
        }
        let Some(tx) = inv[x] else { continue };
        let ok = emb.tree().neighbors(tx).iter().all(|&tn| {
            emb.image(tn as usize)
                .is_some_and(|h| pg.dpart_has_edge(v, h))
        });
        if ok {
            members.push(x);
        }
    }
    members.sort_unstable();
    AbsorberSet {
        u,
        v,
        members: AbsorberMembers::Tree(members),
    }
}

/// Re-attaches trimmed leaves in reverse removal order. Each step frees a
/// host next to the new leaf's parent image by relocating the interior tree
/// vertex living there to the smallest unused host, then embeds the leaf on
/// the freed host. The candidate floor alpha^(D+1) n / (4(D+1)) shrinks by
/// one per consumed helper and must stay positive, where D is the maximum
/// degree of the fully restored tree.
pub fn absorb_tree_leaves(
    pg: &PerturbedGraph,
    emb: TreeEmbedding,
    interior_image: &VertexSet,
    removed: &[(usize, usize)],
) -> Result<(TreeEmbedding, AbsorbStats)> {
    let n = pg.n;
    let mut emb = emb;
    let mut deg: Vec<usize> = (0..emb.tree().universe())
        .map(|v| emb.tree().degree(v))
        .collect();
    for &(leaf, parent) in removed {
        if leaf >= deg.len() || parent >= deg.len() {
            return Err(Error::VertexOutOfRange {
                endpoint: leaf.max(parent),
                n: deg.len(),
            });
        }
        deg[leaf] += 1;
        deg[parent] += 1;
    }
    let delta = deg.iter().copied().max().unwrap_or(0);
    let base = pg.alpha.powi(delta as i32 + 1) * n as f64 / (4.0 * (delta as f64 + 1.0));
    let mut inv = emb.inverse(n);
    let mut pool = interior_image.indicator(n);
    for &x in interior_image.as_slice() {
        if inv[x].is_none() {
            return Err(Error::InvalidParameter(format!(
                "pool host {x} carries no embedded tree vertex"
            )));
        }
    }
    let mut free_cursor = 0usize;
    let mut stats = AbsorbStats::default();
    let mut consumed = 0usize;
    for &(leaf, parent) in removed.iter().rev() {
        let u = emb.image(parent).ok_or_else(|| {
            Error::InvalidParameter(format!("replay parent {parent} is not embedded"))
        })?;
        while free_cursor < n && inv[free_cursor].is_some() {
            free_cursor += 1;
        }
        if free_cursor == n {
            return Err(Error::InvalidParameter(
                "no free host left for leaf re-attachment".into(),
            ));
        }
        let v = free_cursor;
        let required = base - consumed as f64;
        let mut count = 0;
        let mut best = usize::MAX;
        for x in pg.dpart_neighbors(u) {
            if !pool[x] {
                continue;
            }
            let tx = inv[x].expect("pool hosts stay occupied");
            let ok = emb.tree().neighbors(tx).iter().all(|&tn| {
                emb.image(tn as usize)
                    .is_some_and(|h| pg.dpart_has_edge(v, h))
            });
            if ok {
                count += 1;
                best = best.min(x);
            }
        }
        if required <= 0.0 || (count as f64) < required {
            return Err(Error::AbsorberExhausted {
                stage: "tree",
                observed: count,
                required,
            });
        }
        stats.record(count);
        let x = best;
        let tx = inv[x].expect("chosen host is occupied");
        emb.relocate(tx, v);
        inv[v] = Some(tx);
        emb.attach_embedded_leaf(leaf, parent, x);
        inv[x] = Some(leaf);
        pool[x] = false;
        consumed += 1;
        debug_assert!(pg.dpart_has_edge(u, x), "leaf edge must come from the dense part");
    }
    Ok((emb, stats))
}
