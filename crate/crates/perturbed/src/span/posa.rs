//! Long path and cycle search by rotation. The path lives in a balanced
//! arrangement so endpoint rotations cost logarithmic time. When both ends
//! are stuck the search prefers rotations that expose an endpoint with an
//! unvisited neighbor, then tries to splice an unvisited vertex between two
//! adjacent path vertices, then closes the arrangement into a cycle across
//! a chord and reopens it at a vertex that can still grow, which moves the
//! active endpoint to any unfinished region in one step. Last-resort blind
//! rotations pick the pivot untouched the longest, so sparse endpoints walk
//! through all their chords instead of oscillating between two of them.

use crate::graph::{two_core, Graph};
use crate::random::Seed;
use crate::span::rotate::RotatablePath;
use crate::span::{Cycle, Path};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::Rng;

/// Work limits for one search call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    /// Rotations allowed per restart (grow and close phases combined).
    pub rotations: usize,
    /// Number of independent restarts.
    pub restarts: usize,
}

impl SearchBudget {
    /// Default allowance scaling with graph size.
    pub fn for_n(n: usize) -> SearchBudget {
        SearchBudget {
            rotations: 50 * n.max(1),
            restarts: 20,
        }
    }
}

const TAG_TREAP_PRIO: u64 = u64::MAX;

/// How many unvisited vertices one splice attempt samples.
const INSERT_TRIES: usize = 8;

/// How many candidates one jump samples when picking the cheapest cut.
const JUMP_SAMPLES: usize = 8;

/// Consecutive blind rotations tolerated before a truncating jump.
const JUMP_AFTER: usize = 64;

/// Stall allowance for one reopen-and-regrow burst while improving a
/// cycle in place. Endpoint rotations reach only a handful of distinct
/// arrangements before repeating themselves, so long bursts buy nothing.
const BURST_STALLS: usize = 64;

/// Longest path found within budget. Always returns something (possibly a
/// single vertex).
pub fn long_path(g: &Graph, budget: SearchBudget, seed: Seed) -> Path {
    let (best_path, _) = search(g, budget, seed, false);
    Path::new(best_path)
}

/// Longest cycle found within budget. The walk is confined to the two-core
/// since no cycle can leave it.
pub fn long_cycle(g: &Graph, budget: SearchBudget, seed: Seed) -> Result<Cycle> {
    let (_, best_cycle) = search(g, budget, seed, true);
    best_cycle.map(Cycle::new).ok_or(Error::NoCycleFound)
}

enum Step {
    /// Grew the path or committed a rotation whose new endpoint can extend.
    Progress,
    /// Committed a blind rotation.
    Stalled,
    /// The endpoints are now adjacent; the caller records or reopens.
    CycleFormed,
    /// No rotation available at either end.
    Dead,
}

/// One reversible arrangement operation recorded during an improvement
/// burst. Undo pops these newest first; every inverse is exact, so a
/// position recorded at apply time is valid again by the time its entry
/// is undone.
enum LogOp {
    /// Appended a vertex at the back.
    Ext { old_tail: u32 },
    /// Reversed the suffix starting at pos + 1.
    Rot { pos: u32, old_tail: u32 },
    /// Reversed the whole arrangement.
    Flip,
    /// Inserted v at pos.
    Ins { v: u32, pos: u32 },
    /// Rotated the first k vertices to the back.
    Reopen {
        k: u32,
        old_head: u32,
        old_tail: u32,
    },
}

struct State<'a> {
    g: &'a Graph,
    allowed: &'a [bool],
    base_cnt: &'a [u32],
    path: RotatablePath,
    on_path: Vec<bool>,
    /// Unvisited allowed neighbors per vertex; monotone within a restart.
    cnt: Vec<u32>,
    /// Path vertices that had cnt > 0 when pushed; filtered lazily on pop.
    candidates: Vec<u32>,
    /// Allowed vertices not yet on the path, order irrelevant.
    free: Vec<u32>,
    /// Index into free, or NOT_FREE once visited.
    free_pos: Vec<u32>,
    /// Free vertices with at least one neighbor on the path; where splice
    /// attempts sample from.
    boundary: Vec<u32>,
    boundary_pos: Vec<u32>,
    /// Last blind rotation that used this vertex as pivot.
    stamp: Vec<u64>,
    clock: u64,
    head: usize,
    tail: usize,
    scratch: Vec<u32>,
    scratch2: Vec<u32>,
    rotations_used: usize,
    /// Burst journal; appended to while logging is on, drained by undo.
    log: Vec<LogOp>,
    logging: bool,
    n_checks: usize,
    n_inserts: usize,
}

const NOT_FREE: u32 = u32::MAX;

impl<'a> State<'a> {
    fn reset(&mut self, start: usize) {
        debug_assert!(!self.logging);
        self.path.clear();
        self.on_path.fill(false);
        self.cnt.copy_from_slice(self.base_cnt);
        self.candidates.clear();
        self.rebuild_free();
        self.stamp.fill(0);
        self.clock = 0;
        self.rotations_used = 0;
        self.log.clear();
        self.n_checks = 0;
        self.n_inserts = 0;
        self.path.push_back(start);
        self.head = start;
        self.tail = start;
        self.join(start);
    }

    fn rebuild_free(&mut self) {
        self.free.clear();
        self.free_pos.fill(NOT_FREE);
        self.boundary.clear();
        self.boundary_pos.fill(NOT_FREE);
        for v in 0..self.g.n() {
            if self.allowed[v] && !self.on_path[v] {
                self.free_pos[v] = self.free.len() as u32;
                self.free.push(v as u32);
                if self.path_nbrs(v) > 0 {
                    self.boundary_pos[v] = self.boundary.len() as u32;
                    self.boundary.push(v as u32);
                }
            }
        }
    }

    /// Neighbors of v on the path, counted within the allowed subgraph.
    fn path_nbrs(&self, v: usize) -> u32 {
        self.base_cnt[v] - self.cnt[v]
    }

    fn boundary_add(&mut self, v: usize) {
        if self.boundary_pos[v] == NOT_FREE {
            self.boundary_pos[v] = self.boundary.len() as u32;
            self.boundary.push(v as u32);
        }
    }

    fn boundary_remove(&mut self, v: usize) {
        let i = self.boundary_pos[v];
        if i == NOT_FREE {
            return;
        }
        let last = *self.boundary.last().unwrap();
        self.boundary[i as usize] = last;
        self.boundary_pos[last as usize] = i;
        self.boundary.pop();
        self.boundary_pos[v] = NOT_FREE;
    }

    fn len(&self) -> usize {
        self.path.len()
    }

    fn flip(&mut self) {
        if self.logging {
            self.log.push(LogOp::Flip);
        }
        self.path.reverse_all();
        std::mem::swap(&mut self.head, &mut self.tail);
    }

    /// Marks w visited and keeps cnt, free, boundary and the candidate
    /// stack in sync.
    fn join(&mut self, w: usize) {
        self.on_path[w] = true;
        for &u in self.g.neighbors(w) {
            let ui = u as usize;
            self.cnt[ui] -= 1;
            if !self.on_path[ui] && self.allowed[ui] && self.path_nbrs(ui) == 1 {
                self.boundary_add(ui);
            }
        }
        if self.cnt[w] > 0 {
            self.candidates.push(w as u32);
        }
        let i = self.free_pos[w];
        debug_assert_ne!(i, NOT_FREE);
        let last = *self.free.last().unwrap();
        self.free[i as usize] = last;
        self.free_pos[last as usize] = i;
        self.free.pop();
        self.free_pos[w] = NOT_FREE;
        self.boundary_remove(w);
    }

    /// Returns a removed vertex to the unvisited pool, reviving path
    /// vertices whose last outside option it becomes.
    fn un_join(&mut self, w: usize) {
        self.on_path[w] = false;
        for &u in self.g.neighbors(w) {
            let ui = u as usize;
            self.cnt[ui] += 1;
            if self.cnt[ui] == 1 && self.on_path[ui] {
                self.candidates.push(u);
            }
            if !self.on_path[ui] && self.path_nbrs(ui) == 0 {
                self.boundary_remove(ui);
            }
        }
        self.free_pos[w] = self.free.len() as u32;
        self.free.push(w as u32);
        if self.path_nbrs(w) > 0 {
            self.boundary_add(w);
        }
    }

    /// Appends an unvisited allowed neighbor of the tail, uniformly among
    /// those that keep an onward move. Stepping onto a vertex with no
    /// unvisited neighbors freezes this end, so take one only when forced.
    fn extend_tail<R: Rng>(&mut self, rng: &mut R) -> bool {
        if self.cnt[self.tail] == 0 {
            return false;
        }
        let g = self.g;
        self.scratch.clear();
        let mut open = 0usize;
        for &w in g.neighbors(self.tail) {
            let wi = w as usize;
            if self.allowed[wi] && !self.on_path[wi] {
                self.scratch.push(w);
                if self.cnt[wi] > 0 {
                    // Keep live options in the prefix of the scratch list.
                    let last = self.scratch.len() - 1;
                    self.scratch.swap(open, last);
                    open += 1;
                }
            }
        }
        let pick = if open > 0 { open } else { self.scratch.len() };
        let w = self.scratch[rng.random_range(0..pick)] as usize;
        if self.logging {
            self.log.push(LogOp::Ext {
                old_tail: self.tail as u32,
            });
        }
        self.path.push_back(w);
        self.join(w);
        self.tail = w;
        true
    }

    fn commit_rotation(&mut self, pos: usize) {
        let new_tail = self.path.vertex_at(pos + 1);
        if self.logging {
            self.log.push(LogOp::Rot {
                pos: pos as u32,
                old_tail: self.tail as u32,
            });
        }
        self.path.reverse_suffix(pos + 1);
        self.tail = new_tail;
        self.rotations_used += 1;
    }

    fn insert_logged(&mut self, pos: usize, v: usize) {
        if self.logging {
            self.log.push(LogOp::Ins {
                v: v as u32,
                pos: pos as u32,
            });
        }
        self.path.insert_at(pos, v);
    }

    /// Rotation whose new tail still has an unvisited neighbor, chosen
    /// uniformly among the qualifying chords of the current tail.
    fn try_productive<R: Rng>(&mut self, rng: &mut R) -> bool {
        let len = self.len();
        if len < 3 {
            return false;
        }
        let g = self.g;
        let (t, h) = (self.tail, self.head);
        self.scratch.clear();
        for &w in g.neighbors(t) {
            let wi = w as usize;
            if !self.on_path[wi] || wi == h {
                continue;
            }
            let pos = self.path.position(wi);
            if pos + 3 <= len && self.cnt[self.path.vertex_at(pos + 1)] > 0 {
                self.scratch.push(pos as u32);
            }
        }
        if self.scratch.is_empty() {
            return false;
        }
        let pos = self.scratch[rng.random_range(0..self.scratch.len())] as usize;
        self.commit_rotation(pos);
        true
    }

    /// Splices one or two unvisited vertices between two consecutive path
    /// vertices adjacent to them. This reaches interior gaps no endpoint
    /// move can; attempts sample the path boundary, and hits get likelier
    /// as rotations churn the arrangement.
    fn try_insert<R: Rng>(&mut self, rng: &mut R) -> bool {
        if self.boundary.is_empty() || self.len() < 2 {
            return false;
        }
        let g = self.g;
        for _ in 0..INSERT_TRIES {
            let z = self.boundary[rng.random_range(0..self.boundary.len())] as usize;
            self.scratch.clear();
            for &u in g.neighbors(z) {
                if self.on_path[u as usize] {
                    self.scratch.push(self.path.position(u as usize) as u32);
                }
            }
            // Lone splice: two of z's own anchors sit side by side.
            self.scratch.sort_unstable();
            for i in 1..self.scratch.len() {
                if self.scratch[i] == self.scratch[i - 1] + 1 {
                    self.insert_logged(self.scratch[i] as usize, z);
                    self.join(z);
                    self.rotations_used += 1;
                    self.n_inserts += 1;
                    return true;
                }
            }
            // Pair splice through a free neighbor: an anchor of z and one
            // of z2 sit side by side, so the chain z, z2 fills the gap.
            for &z2 in g.neighbors(z) {
                let z2i = z2 as usize;
                if self.free_pos[z2i] == NOT_FREE {
                    continue;
                }
                self.scratch2.clear();
                for &b in g.neighbors(z2i) {
                    if self.on_path[b as usize] {
                        self.scratch2.push(self.path.position(b as usize) as u32);
                    }
                }
                for i in 0..self.scratch.len() {
                    for j in 0..self.scratch2.len() {
                        let (ap, bp) = (self.scratch[i], self.scratch2[j]);
                        if bp == ap + 1 {
                            // Fill as a, z, z2, b.
                            self.insert_logged(bp as usize, z2i);
                            self.insert_logged(bp as usize, z);
                        } else if ap == bp + 1 {
                            // Fill as b, z2, z, a.
                            self.insert_logged(ap as usize, z);
                            self.insert_logged(ap as usize, z2i);
                        } else {
                            continue;
                        }
                        self.join(z);
                        self.join(z2i);
                        self.rotations_used += 1;
                        self.n_inserts += 1;
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Makes the endpoints adjacent, directly or after one rotation whose
    /// new tail sees the head. Does not reopen the cycle.
    fn try_form_cycle(&mut self) -> bool {
        let len = self.len();
        if len < 3 {
            return false;
        }
        let g = self.g;
        let (t, h) = (self.tail, self.head);
        self.n_checks += 1;
        if g.has_edge(t, h) {
            return true;
        }
        for &w in g.neighbors(t) {
            let wi = w as usize;
            if !self.on_path[wi] || wi == h {
                continue;
            }
            let pos = self.path.position(wi);
            if pos + 3 <= len && g.has_edge(self.path.vertex_at(pos + 1), h) {
                self.commit_rotation(pos);
                return true;
            }
        }
        false
    }

    /// Closure attempt with one committed rotation of lookahead on the
    /// tail side. Failed branches are rolled back and refunded; a success
    /// leaves the endpoints adjacent like try_form_cycle does.
    fn try_form_cycle_deep(&mut self) -> bool {
        if self.try_form_cycle() {
            return true;
        }
        let len = self.len();
        if len < 4 {
            return false;
        }
        let g = self.g;
        let (t, h) = (self.tail, self.head);
        self.scratch2.clear();
        for &w in g.neighbors(t) {
            let wi = w as usize;
            if !self.on_path[wi] || wi == h {
                continue;
            }
            let pos = self.path.position(wi);
            if pos + 3 <= len {
                self.scratch2.push(pos as u32);
            }
        }
        for i in 0..self.scratch2.len() {
            let pos = self.scratch2[i] as usize;
            self.commit_rotation(pos);
            if self.try_form_cycle() {
                return true;
            }
            self.path.reverse_suffix(pos + 1);
            self.tail = t;
            self.rotations_used -= 1;
            if self.logging {
                let op = self.log.pop();
                debug_assert!(matches!(op, Some(LogOp::Rot { .. })));
            }
        }
        false
    }

    /// Rotation at the tail around the pivot not used for the longest time,
    /// productive or not. Favoring stale pivots keeps the walk exploring
    /// instead of bouncing between the few chords of a sparse endpoint.
    fn try_blind<R: Rng>(&mut self, rng: &mut R) -> bool {
        let len = self.len();
        if len < 3 {
            return false;
        }
        let g = self.g;
        let (t, h) = (self.tail, self.head);
        self.scratch.clear();
        let mut oldest = u64::MAX;
        for &w in g.neighbors(t) {
            let wi = w as usize;
            if !self.on_path[wi] || wi == h {
                continue;
            }
            let s = self.stamp[wi];
            if s > oldest {
                continue;
            }
            let pos = self.path.position(wi);
            if pos + 3 <= len {
                if s < oldest {
                    oldest = s;
                    self.scratch.clear();
                }
                self.scratch.push(pos as u32);
            }
        }
        if self.scratch.is_empty() {
            return false;
        }
        let pos = self.scratch[rng.random_range(0..self.scratch.len())] as usize;
        let w = self.path.vertex_at(pos);
        self.clock += 1;
        self.stamp[w] = self.clock;
        self.commit_rotation(pos);
        true
    }

    /// One move when both endpoints have no unvisited neighbor. Preference
    /// order: a productive rotation at either end, a splice, a closure at
    /// either end, then a blind rotation at a random end. `deep` buys the
    /// closure attempts a level of lookahead, worth the cost only when a
    /// closure is the goal rather than a repositioning trick.
    fn rotation_step<R: Rng>(&mut self, rng: &mut R, deep: bool) -> Step {
        if self.try_productive(rng) {
            return Step::Progress;
        }
        self.flip();
        if self.try_productive(rng) {
            return Step::Progress;
        }
        if self.try_insert(rng) {
            return Step::Progress;
        }
        let closed = if deep {
            self.try_form_cycle_deep()
        } else {
            self.try_form_cycle()
        };
        if closed {
            return Step::CycleFormed;
        }
        self.flip();
        let closed = if deep {
            self.try_form_cycle_deep()
        } else {
            self.try_form_cycle()
        };
        if closed {
            return Step::CycleFormed;
        }
        if rng.random::<bool>() {
            self.flip();
        }
        if self.try_blind(rng) {
            return Step::Stalled;
        }
        self.flip();
        if self.try_blind(rng) {
            return Step::Stalled;
        }
        Step::Dead
    }

    /// Pops a path vertex that still has an unvisited allowed neighbor.
    /// Entries whose vertex left the path or ran out of options are stale
    /// and get dropped; a vertex rejoining the path is pushed anew.
    fn pop_candidate(&mut self) -> Option<usize> {
        while let Some(v) = self.candidates.pop() {
            let vi = v as usize;
            if self.on_path[vi] && self.cnt[vi] > 0 {
                return Some(vi);
            }
        }
        None
    }

    /// Escape hatch when rotations orbit without reaching a closable or
    /// extendable arrangement: cut the path just past a vertex that still
    /// has an outside option and regrow from there. The removed stretch
    /// returns to the unvisited pool, so only its ordering is lost. Among
    /// a few sampled candidates the cheapest cut wins.
    fn jump<R: Rng>(&mut self, rng: &mut R) -> bool {
        debug_assert!(!self.logging);
        let len = self.len();
        let mut pool = [0usize; JUMP_SAMPLES];
        let mut found = 0;
        while found < JUMP_SAMPLES {
            match self.pop_candidate() {
                Some(y) => {
                    pool[found] = y;
                    found += 1;
                }
                None => break,
            }
        }
        if found == 0 {
            return false;
        }
        let mut best_loss = usize::MAX;
        let mut best_y = 0;
        let mut best_pos = 0;
        for &y in &pool[..found] {
            let pos = self.path.position(y);
            let loss = pos.min(len - 1 - pos);
            if loss < best_loss {
                best_loss = loss;
                best_y = y;
                best_pos = pos;
            }
        }
        // All sampled candidates stay on the path and stay candidates.
        pool[..found].shuffle(rng);
        for &y in &pool[..found] {
            self.candidates.push(y as u32);
        }
        if best_pos < len - 1 - best_pos {
            self.flip();
            best_pos = len - 1 - best_pos;
        }
        let removed = self.path.truncate(best_pos + 1);
        for &w in &removed {
            self.un_join(w);
        }
        self.tail = best_y;
        self.rotations_used += 1;
        true
    }

    /// Widens the allowed set mid-restart, keeping the current path. The
    /// counts, free list and candidate stack are rebuilt for the new set.
    fn expand_allowed(&mut self, allowed: &'a [bool], base_cnt: &'a [u32]) {
        self.allowed = allowed;
        self.base_cnt = base_cnt;
        self.cnt.copy_from_slice(base_cnt);
        self.candidates.clear();
        let g = self.g;
        for v in 0..g.n() {
            if self.on_path[v] {
                for &u in g.neighbors(v) {
                    self.cnt[u as usize] -= 1;
                }
            }
        }
        for v in 0..g.n() {
            if self.on_path[v] && self.cnt[v] > 0 {
                self.candidates.push(v as u32);
            }
        }
        self.rebuild_free();
    }

    /// Precondition: the endpoints are adjacent. Rotates the cyclic order
    /// so y becomes the tail; growth resumes from there.
    fn reopen_at(&mut self, y: usize) {
        debug_assert!(self.g.has_edge(self.tail, self.head));
        let k = self.path.position(y) + 1;
        if k < self.len() {
            if self.logging {
                self.log.push(LogOp::Reopen {
                    k: k as u32,
                    old_head: self.head as u32,
                    old_tail: self.tail as u32,
                });
            }
            let new_head = self.path.vertex_at(k);
            self.path.rotate_left(k);
            self.head = new_head;
            self.tail = y;
        }
        // y may still have unvisited neighbors after the next extension.
        self.candidates.push(y as u32);
        self.rotations_used += 1;
    }

    /// Replaces the current path with the given one, keeping the budget
    /// spent so far.
    fn load_path(&mut self, vs: &[usize]) {
        let spent = self.rotations_used;
        self.reset(vs[0]);
        self.rotations_used = spent;
        for &v in &vs[1..] {
            self.path.push_back(v);
            self.join(v);
            self.tail = v;
        }
    }

    /// Rolls back every journaled operation, newest first, restoring the
    /// arrangement, endpoints, visited marks and counts to their state
    /// from before logging started. Work stays spent and the candidate
    /// stack keeps the extra entries pushed along the way; the caller
    /// truncates those, and pop filters stale ones regardless.
    fn undo_log(&mut self) {
        debug_assert!(!self.logging);
        while let Some(op) = self.log.pop() {
            match op {
                LogOp::Ext { old_tail } => {
                    let w = self.path.remove_at(self.len() - 1);
                    debug_assert_eq!(w, self.tail);
                    self.un_join(w);
                    self.tail = old_tail as usize;
                }
                LogOp::Rot { pos, old_tail } => {
                    self.path.reverse_suffix(pos as usize + 1);
                    self.tail = old_tail as usize;
                }
                LogOp::Flip => {
                    self.path.reverse_all();
                    std::mem::swap(&mut self.head, &mut self.tail);
                }
                LogOp::Ins { v, pos } => {
                    let got = self.path.remove_at(pos as usize);
                    debug_assert_eq!(got, v as usize);
                    self.un_join(got);
                }
                LogOp::Reopen {
                    k,
                    old_head,
                    old_tail,
                } => {
                    let back = self.len() - k as usize;
                    self.path.rotate_left(back);
                    self.head = old_head as usize;
                    self.tail = old_tail as usize;
                }
            }
        }
    }

    /// Splices in every unvisited chain whose two attachment points land on
    /// consecutive positions, treating the arrangement as a cycle (the last
    /// and first positions count as adjacent). A lone vertex is the chain
    /// of length one. Returns the number of vertices gained; the endpoints
    /// stay adjacent throughout.
    fn splice_chains(&mut self, seen: &mut [bool]) -> usize {
        debug_assert!(!self.logging);
        let g = self.g;
        let mut gained = 0usize;
        let mut chain: Vec<usize> = Vec::new();
        for v0 in 0..g.n() {
            if !self.allowed[v0] || self.on_path[v0] || seen[v0] {
                continue;
            }
            // Walk the pocket around v0; give up on anything branching or
            // closing into a free cycle.
            chain.clear();
            chain.push(v0);
            seen[v0] = true;
            let mut ends = [usize::MAX; 2];
            let mut n_ends = 0;
            for &u in g.neighbors(v0) {
                let ui = u as usize;
                if self.allowed[ui] && !self.on_path[ui] {
                    if n_ends == 2 {
                        n_ends = 3;
                        break;
                    }
                    ends[n_ends] = ui;
                    n_ends += 1;
                }
            }
            let mut straight = n_ends <= 2;
            for dir in 0..2 {
                if !straight || dir >= n_ends.min(2) {
                    break;
                }
                let mut prev = v0;
                let mut cur = ends[dir];
                loop {
                    if seen[cur] {
                        straight = false;
                        break;
                    }
                    seen[cur] = true;
                    if dir == 0 {
                        chain.push(cur);
                    } else {
                        chain.insert(0, cur);
                    }
                    let mut next = usize::MAX;
                    let mut onward = 0;
                    for &u in g.neighbors(cur) {
                        let ui = u as usize;
                        if self.allowed[ui] && !self.on_path[ui] && ui != prev {
                            onward += 1;
                            next = ui;
                        }
                    }
                    if onward == 0 {
                        break;
                    }
                    if onward > 1 {
                        straight = false;
                        break;
                    }
                    prev = cur;
                    cur = next;
                }
            }
            if !straight {
                continue;
            }
            let (e1, e2) = (chain[0], chain[chain.len() - 1]);
            let len = self.len();
            self.scratch.clear();
            for &a in g.neighbors(e1) {
                if self.on_path[a as usize] {
                    self.scratch.push(self.path.position(a as usize) as u32);
                }
            }
            if chain.len() == 1 {
                self.scratch2.clear();
                self.scratch2.extend_from_slice(&self.scratch);
            } else {
                self.scratch2.clear();
                for &b in g.neighbors(e2) {
                    if self.on_path[b as usize] {
                        self.scratch2.push(self.path.position(b as usize) as u32);
                    }
                }
            }
            let mut hit = None;
            'pairs: for &ap in &self.scratch {
                for &bp in &self.scratch2 {
                    let (ap, bp) = (ap as usize, bp as usize);
                    if bp == ap + 1 || (ap + 1 == len && bp == 0) {
                        hit = Some((ap, false));
                        break 'pairs;
                    }
                    if ap == bp + 1 || (bp + 1 == len && ap == 0) {
                        hit = Some((bp, true));
                        break 'pairs;
                    }
                }
            }
            let Some((lo, reversed)) = hit else { continue };
            if reversed {
                chain.reverse();
            }
            if lo + 1 == len {
                // The gap is the wrap edge; append and keep the new tail
                // adjacent to the head.
                for &q in &chain {
                    self.path.insert_at(self.len(), q);
                    self.join(q);
                    self.tail = q;
                }
            } else {
                for &q in chain.iter().rev() {
                    self.path.insert_at(lo + 1, q);
                    self.join(q);
                }
            }
            gained += chain.len();
        }
        gained
    }
}

/// Grows the current path until the budget, a stall, or exhaustion stops
/// it. Cycles formed along the way are recorded when asked for and then
/// reopened at a vertex that can still grow; orbiting stall runs are cut
/// short by a jump. Since jumps shrink the path, the best arrangement is
/// snapshotted before each one.
fn run_phase<R: Rng>(
    st: &mut State,
    rng: &mut R,
    budget: SearchBudget,
    target: usize,
    record_cycles: bool,
    best_path: &mut Vec<usize>,
    best_cycle: &mut Option<Vec<usize>>,
    best_cycle_len: &mut usize,
) {
    let mut stall = 0usize;
    loop {
        // Extend at both ends as long as anything is reachable.
        let mut grew = false;
        loop {
            if st.extend_tail(rng) {
                grew = true;
                continue;
            }
            st.flip();
            if st.extend_tail(rng) {
                grew = true;
                continue;
            }
            break;
        }
        if grew {
            stall = 0;
        }
        if st.len() == target && !record_cycles {
            return;
        }
        if st.rotations_used >= budget.rotations {
            eprintln!("PROBE end budget len={}", st.len());
            return;
        }
        let stall_limit = 2000.max(2 * (target - st.len()));
        if stall >= stall_limit {
            eprintln!("PROBE end stall len={} limit={stall_limit}", st.len());
            return;
        }
        match st.rotation_step(rng, false) {
            Step::Progress => {}
            Step::Stalled => {
                stall += 1;
                if stall % JUMP_AFTER == 0 {
                    if !record_cycles && st.len() > best_path.len() {
                        *best_path = st.path.to_vec();
                    }
                    if !st.jump(rng) {
                        eprintln!("PROBE end nojump len={}", st.len());
                        return;
                    }
                }
            }
            Step::CycleFormed => {
                if record_cycles && st.len() > *best_cycle_len {
                    *best_cycle_len = st.len();
                    *best_cycle = Some(st.path.to_vec());
                    // At or near the target the in-place ratchet finishes
                    // cheaper than more growth rounds.
                    if *best_cycle_len + target / 8 >= target {
                        return;
                    }
                }
                match st.pop_candidate() {
                    // Jump the endpoint to a vertex that can grow.
                    Some(y) => st.reopen_at(y),
                    // Nothing on the path can reach outside; done here.
                    None => {
                        eprintln!("PROBE end saturated len={}", st.len());
                        return;
                    }
                }
            }
            Step::Dead => {
                if !record_cycles && st.len() > best_path.len() {
                    *best_path = st.path.to_vec();
                }
                if !st.jump(rng) {
                    eprintln!("PROBE end dead len={}", st.len());
                    return;
                }
            }
        }
    }
}

/// Ratchets a found cycle upward without ever losing ground. Alternates
/// loss-free chain splices with short reopen-and-regrow bursts; a burst
/// that fails to close again is undone operation by operation, so the
/// recorded cycle only grows.
fn improve_cycle<R: Rng>(
    st: &mut State,
    rng: &mut R,
    budget: SearchBudget,
    target: usize,
    best_cycle: &mut Option<Vec<usize>>,
    best_cycle_len: &mut usize,
) {
    let mut seen = vec![false; st.g.n()];
    let mut buf: Vec<usize> = Vec::new();
    // Already-tried candidates since the last accepted closure. A failed
    // round restores the exact previous state, so a plain pop would retry
    // the same vertex forever.
    let mut skip = 0usize;
    // Splice passes scan everything; rerun them only after an accepted
    // burst has changed the arrangement.
    let mut dirty = true;
    let (mut n_rounds, mut n_accept, mut n_spliced) = (0usize, 0usize, 0usize);
    loop {
        // The path is closed here: endpoints adjacent.
        if dirty {
            loop {
                let gained = st.splice_chains(&mut seen);
                seen.fill(false);
                if gained == 0 {
                    break;
                }
                n_spliced += gained;
            }
            dirty = false;
            if st.len() > *best_cycle_len {
                *best_cycle_len = st.len();
                *best_cycle = Some(st.path.to_vec());
            }
        }
        if st.len() == target || st.rotations_used >= budget.rotations {
            eprintln!(
                "PROBE improve: rounds={n_rounds} accept={n_accept} spliced={n_spliced} len={} why=budget",
                st.len()
            );
            return;
        }
        buf.clear();
        let y = loop {
            match st.pop_candidate() {
                Some(c) if buf.len() < skip => buf.push(c),
                Some(c) => break Some(c),
                None => break None,
            }
        };
        for &c in &buf {
            st.candidates.push(c as u32);
        }
        let Some(y) = y else {
            // Every live candidate has had a round since the last accept.
            eprintln!(
                "PROBE improve: rounds={n_rounds} accept={n_accept} spliced={n_spliced} len={} why=exhausted",
                st.len()
            );
            return;
        };
        n_rounds += 1;
        st.logging = true;
        st.reopen_at(y);
        // Entries at or below this mark are exactly the pre-round stack.
        let cand_mark = st.candidates.len();
        // Regrow and hunt for any closure; without jumps the path never
        // shrinks, and the forced first extension means any closure beats
        // the previous cycle, in a fresh arrangement that the next splice
        // pass harvests.
        let mut accepted = false;
        let mut stalls = 0usize;
        'burst: loop {
            let mut grew = false;
            loop {
                if st.extend_tail(rng) {
                    grew = true;
                    continue;
                }
                st.flip();
                if st.extend_tail(rng) {
                    grew = true;
                    continue;
                }
                break;
            }
            if grew {
                stalls = 0;
            }
            if st.rotations_used >= budget.rotations || stalls >= BURST_STALLS {
                break 'burst;
            }
            match st.rotation_step(rng, true) {
                Step::Progress => {}
                Step::Stalled => stalls += 1,
                Step::CycleFormed => {
                    accepted = true;
                    n_accept += 1;
                    break 'burst;
                }
                Step::Dead => break 'burst,
            }
        }
        st.logging = false;
        if accepted {
            skip = 0;
            dirty = true;
            st.log.clear();
        } else {
            skip += 1;
            st.undo_log();
            st.candidates.truncate(cand_mark);
        }
    }
}

fn search(
    g: &Graph,
    budget: SearchBudget,
    seed: Seed,
    want_cycle: bool,
) -> (Vec<usize>, Option<Vec<usize>>) {
    let n = g.n();
    assert!(n >= 1, "search needs a nonempty graph");
    // Inside the two-core every vertex keeps degree two, so rotations and
    // reopened cycles stay available; endpoints freeze only outside it.
    // Cycles never leave it at all.
    let core: Vec<bool> = two_core(g).indicator(n);
    let core_count = core.iter().filter(|&&b| b).count();
    let core_starts: Vec<u32> = (0..n).filter(|&v| core[v]).map(|v| v as u32).collect();
    if want_cycle && core_count < 3 {
        return (Vec::new(), None);
    }
    let all_starts: Vec<u32> = (0..n)
        .filter(|&v| g.degree(v) > 0)
        .map(|v| v as u32)
        .collect();
    if all_starts.is_empty() {
        // Edgeless graph; a single vertex is the best path.
        return (vec![0], None);
    }
    let base_core: Vec<u32> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .iter()
                .filter(|&&u| core[u as usize])
                .count() as u32
        })
        .collect();
    let all: Vec<bool> = vec![true; n];
    let base_all: Vec<u32> = (0..n).map(|v| g.degree(v) as u32).collect();

    let mut prio_rng = seed.child(TAG_TREAP_PRIO).rng();
    let mut st = State {
        g,
        allowed: &all,
        base_cnt: &base_all,
        path: RotatablePath::new(n, &mut prio_rng),
        on_path: vec![false; n],
        cnt: vec![0; n],
        candidates: Vec::new(),
        free: Vec::new(),
        free_pos: vec![NOT_FREE; n],
        boundary: Vec::new(),
        boundary_pos: vec![NOT_FREE; n],
        stamp: vec![0; n],
        clock: 0,
        head: 0,
        tail: 0,
        scratch: Vec::new(),
        scratch2: Vec::new(),
        rotations_used: 0,
        log: Vec::new(),
        logging: false,
        n_checks: 0,
        n_inserts: 0,
    };
    let mut best_path: Vec<usize> = Vec::new();
    let mut best_cycle: Option<Vec<usize>> = None;
    let mut best_cycle_len = 0usize;

    // Cycle searches grow one starting cycle, then spend the remaining
    // restarts ratcheting it in place; once two consecutive sweeps add
    // nothing the remaining pockets are out of reach and more sweeps
    // would only repeat them.
    let mut zero_gain_sweeps = 0usize;
    for r in 0..budget.restarts {
        let mut rng = seed.child(r as u64).rng();
        if want_cycle {
            st.allowed = &core;
            st.base_cnt = &base_core;
            let grew_this_restart = best_cycle.is_none();
            if best_cycle.is_none() {
                let start = core_starts[rng.random_range(0..core_starts.len())] as usize;
                st.reset(start);
                // Growing from scratch only needs to produce a starting
                // cycle; the ratchet spends the rest better.
                let grow_budget = SearchBudget {
                    rotations: budget.rotations / 2,
                    restarts: budget.restarts,
                };
                run_phase(
                    &mut st,
                    &mut rng,
                    grow_budget,
                    core_count,
                    true,
                    &mut best_path,
                    &mut best_cycle,
                    &mut best_cycle_len,
                );
            }
            if let Some(c) = best_cycle.clone() {
                if !grew_this_restart {
                    st.rotations_used = 0;
                }
                if best_cycle_len < core_count && st.rotations_used < budget.rotations {
                    let before = best_cycle_len;
                    st.load_path(&c);
                    improve_cycle(
                        &mut st,
                        &mut rng,
                        budget,
                        core_count,
                        &mut best_cycle,
                        &mut best_cycle_len,
                    );
                    if best_cycle_len == before {
                        zero_gain_sweeps += 1;
                        if zero_gain_sweeps >= 2 {
                            break;
                        }
                    } else {
                        zero_gain_sweeps = 0;
                    }
                }
            }
            if best_cycle_len == core_count {
                break;
            }
            continue;
        }
        // Path restarts alternate between core-first growth (cover the
        // core, then walk out into the pendant trees) and an unrestricted
        // run, which also serves graphs whose best path avoids the core.
        let core_first = core_count >= 3 && r % 2 == 0;
        if core_first {
            let start = core_starts[rng.random_range(0..core_starts.len())] as usize;
            st.allowed = &core;
            st.base_cnt = &base_core;
            st.reset(start);
            run_phase(
                &mut st,
                &mut rng,
                budget,
                core_count,
                false,
                &mut best_path,
                &mut best_cycle,
                &mut best_cycle_len,
            );
            st.expand_allowed(&all, &base_all);
            run_phase(
                &mut st,
                &mut rng,
                budget,
                n,
                false,
                &mut best_path,
                &mut best_cycle,
                &mut best_cycle_len,
            );
        } else {
            let start = all_starts[rng.random_range(0..all_starts.len())] as usize;
            st.allowed = &all;
            st.base_cnt = &base_all;
            st.reset(start);
            run_phase(
                &mut st,
                &mut rng,
                budget,
                n,
                false,
                &mut best_path,
                &mut best_cycle,
                &mut best_cycle_len,
            );
        }
        if st.len() > best_path.len() {
            best_path = st.path.to_vec();
        }
        if best_path.len() == n {
            break;
        }
    }
    (best_path, best_cycle)
}
