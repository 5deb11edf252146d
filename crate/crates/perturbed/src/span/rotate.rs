//! Path representation supporting the operations rotation search hammers on:
//! suffix reversal, whole-path reversal, position lookup and appends, each in
//! O(log n) via an implicit treap keyed by path position. Node ids are vertex
//! ids, so membership and position queries need no extra map.

use rand::Rng;

const NONE: u32 = u32::MAX;

pub struct RotatablePath {
    left: Vec<u32>,
    right: Vec<u32>,
    parent: Vec<u32>,
    size: Vec<u32>,
    prio: Vec<u32>,
    rev: Vec<bool>,
    root: u32,
    len: usize,
    scratch: Vec<u32>,
}

impl RotatablePath {
    /// Allocates for vertices `0..capacity`. Priorities are drawn once; the
    /// structure stays deterministic for a fixed rng.
    pub fn new<R: Rng>(capacity: usize, rng: &mut R) -> RotatablePath {
        assert!(capacity < NONE as usize);
        RotatablePath {
            left: vec![NONE; capacity],
            right: vec![NONE; capacity],
            parent: vec![NONE; capacity],
            size: vec![1; capacity],
            prio: (0..capacity).map(|_| rng.random()).collect(),
            rev: vec![false; capacity],
            root: NONE,
            len: 0,
            scratch: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Empties the path, resetting only the nodes it used.
    pub fn clear(&mut self) {
        let members = self.to_vec();
        for v in members {
            self.left[v] = NONE;
            self.right[v] = NONE;
            self.parent[v] = NONE;
            self.size[v] = 1;
            self.rev[v] = false;
        }
        self.root = NONE;
        self.len = 0;
    }

    fn size_of(&self, t: u32) -> u32 {
        if t == NONE {
            0
        } else {
            self.size[t as usize]
        }
    }

    fn push_down(&mut self, t: u32) {
        let t = t as usize;
        if self.rev[t] {
            self.rev[t] = false;
            let (l, r) = (self.left[t], self.right[t]);
            self.left[t] = r;
            self.right[t] = l;
            if l != NONE {
                self.rev[l as usize] ^= true;
            }
            if r != NONE {
                self.rev[r as usize] ^= true;
            }
        }
    }

    fn pull(&mut self, t: u32) {
        let ti = t as usize;
        let (l, r) = (self.left[ti], self.right[ti]);
        self.size[ti] = 1 + self.size_of(l) + self.size_of(r);
        if l != NONE {
            self.parent[l as usize] = t;
        }
        if r != NONE {
            self.parent[r as usize] = t;
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NONE {
            return b;
        }
        if b == NONE {
            return a;
        }
        if self.prio[a as usize] > self.prio[b as usize] {
            self.push_down(a);
            let r = self.merge(self.right[a as usize], b);
            self.right[a as usize] = r;
            self.pull(a);
            a
        } else {
            self.push_down(b);
            let l = self.merge(a, self.left[b as usize]);
            self.left[b as usize] = l;
            self.pull(b);
            b
        }
    }

    /// Splits into (first k, rest).
    fn split(&mut self, t: u32, k: u32) -> (u32, u32) {
        if t == NONE {
            return (NONE, NONE);
        }
        self.push_down(t);
        let ls = self.size_of(self.left[t as usize]);
        if k <= ls {
            let (a, b) = self.split(self.left[t as usize], k);
            self.left[t as usize] = b;
            self.pull(t);
            if a != NONE {
                self.parent[a as usize] = NONE;
            }
            (a, t)
        } else {
            let (a, b) = self.split(self.right[t as usize], k - ls - 1);
            self.right[t as usize] = a;
            self.pull(t);
            if b != NONE {
                self.parent[b as usize] = NONE;
            }
            (t, b)
        }
    }

    /// Appends a vertex at the tail. The vertex must not be on the path.
    pub fn push_back(&mut self, v: usize) {
        debug_assert_eq!(self.size[v], 1);
        debug_assert_eq!(self.left[v], NONE);
        debug_assert_eq!(self.right[v], NONE);
        self.parent[v] = NONE;
        self.rev[v] = false;
        let r = self.merge(self.root, v as u32);
        self.root = r;
        self.parent[r as usize] = NONE;
        self.len += 1;
    }

    /// Inserts a vertex so it ends up at position `k`. The vertex must not
    /// be on the path.
    pub fn insert_at(&mut self, k: usize, v: usize) {
        assert!(k <= self.len);
        debug_assert_eq!(self.size[v], 1);
        debug_assert_eq!(self.left[v], NONE);
        debug_assert_eq!(self.right[v], NONE);
        self.parent[v] = NONE;
        self.rev[v] = false;
        let (a, b) = self.split(self.root, k as u32);
        let m = self.merge(a, v as u32);
        let r = self.merge(m, b);
        self.root = r;
        self.parent[r as usize] = NONE;
        self.len += 1;
    }

    /// Removes and returns the vertex at position `k`, resetting its node
    /// to a singleton so it can be pushed or inserted again.
    pub fn remove_at(&mut self, k: usize) -> usize {
        assert!(k < self.len);
        let (a, rest) = self.split(self.root, k as u32);
        let (m, b) = self.split(rest, 1);
        let r = self.merge(a, b);
        self.root = r;
        if r != NONE {
            self.parent[r as usize] = NONE;
        }
        self.len -= 1;
        let v = m as usize;
        self.left[v] = NONE;
        self.right[v] = NONE;
        self.parent[v] = NONE;
        self.size[v] = 1;
        self.rev[v] = false;
        v
    }

    /// 0-based position of an on-path vertex.
    pub fn position(&mut self, v: usize) -> usize {
        let mut chain = std::mem::take(&mut self.scratch);
        chain.clear();
        let mut x = v as u32;
        chain.push(x);
        while self.parent[x as usize] != NONE {
            x = self.parent[x as usize];
            chain.push(x);
        }
        debug_assert_eq!(x, self.root, "position of off-path vertex");
        for i in (0..chain.len()).rev() {
            self.push_down(chain[i]);
        }
        let mut rank = self.size_of(self.left[v]) as usize;
        let mut child = chain[0];
        for &p in &chain[1..] {
            if self.right[p as usize] == child {
                rank += self.size_of(self.left[p as usize]) as usize + 1;
            }
            child = p;
        }
        self.scratch = chain;
        rank
    }

    /// Vertex at a 0-based position.
    pub fn vertex_at(&mut self, mut rank: usize) -> usize {
        assert!(rank < self.len);
        let mut t = self.root;
        loop {
            self.push_down(t);
            let ls = self.size_of(self.left[t as usize]) as usize;
            if rank < ls {
                t = self.left[t as usize];
            } else if rank == ls {
                return t as usize;
            } else {
                rank -= ls + 1;
                t = self.right[t as usize];
            }
        }
    }

    pub fn first(&mut self) -> usize {
        self.vertex_at(0)
    }

    pub fn last(&mut self) -> usize {
        self.vertex_at(self.len - 1)
    }

    /// Reverses positions `from..len`.
    pub fn reverse_suffix(&mut self, from: usize) {
        assert!(from <= self.len);
        if from == self.len {
            return;
        }
        let (a, b) = self.split(self.root, from as u32);
        if b != NONE {
            self.rev[b as usize] ^= true;
        }
        let r = self.merge(a, b);
        self.root = r;
        if r != NONE {
            self.parent[r as usize] = NONE;
        }
    }

    pub fn reverse_all(&mut self) {
        if self.root != NONE {
            self.rev[self.root as usize] ^= true;
        }
    }

    /// Moves the first `k` positions to the back, both segments keeping
    /// their order: a_0..a_k | a_k..a_len becomes a_k..a_len | a_0..a_k.
    /// This reopens a closed cycle at a chosen break point.
    pub fn rotate_left(&mut self, k: usize) {
        assert!(k <= self.len);
        if k == 0 || k == self.len {
            return;
        }
        let (a, b) = self.split(self.root, k as u32);
        let r = self.merge(b, a);
        self.root = r;
        if r != NONE {
            self.parent[r as usize] = NONE;
        }
    }

    /// Keeps the first `k` positions, removing the rest. The removed
    /// vertices come back in path order, their nodes reset to singletons
    /// so they can be pushed or inserted again.
    pub fn truncate(&mut self, k: usize) -> Vec<usize> {
        assert!(k <= self.len);
        let (a, b) = self.split(self.root, k as u32);
        self.root = a;
        if a != NONE {
            self.parent[a as usize] = NONE;
        }
        let removed = self.len - k;
        self.len = k;
        let mut out = Vec::with_capacity(removed);
        let mut stack = std::mem::take(&mut self.scratch);
        stack.clear();
        let mut t = b;
        loop {
            while t != NONE {
                self.push_down(t);
                stack.push(t);
                t = self.left[t as usize];
            }
            let Some(node) = stack.pop() else { break };
            out.push(node as usize);
            t = self.right[node as usize];
        }
        self.scratch = stack;
        for &v in &out {
            self.left[v] = NONE;
            self.right[v] = NONE;
            self.parent[v] = NONE;
            self.size[v] = 1;
            self.rev[v] = false;
        }
        out
    }

    /// In-order traversal. Resolves all pending reversals along the way.
    pub fn to_vec(&mut self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len);
        let mut stack = std::mem::take(&mut self.scratch);
        stack.clear();
        let mut t = self.root;
        loop {
            while t != NONE {
                self.push_down(t);
                stack.push(t);
                t = self.left[t as usize];
            }
            let Some(node) = stack.pop() else { break };
            out.push(node as usize);
            t = self.right[node as usize];
        }
        self.scratch = stack;
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fresh(cap: usize, seed: u64) -> RotatablePath {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        RotatablePath::new(cap, &mut rng)
    }

    #[test]
    fn basic_ops() {
        let mut p = fresh(10, 1);
        for v in [3, 1, 4, 0, 5] {
            p.push_back(v);
        }
        assert_eq!(p.to_vec(), vec![3, 1, 4, 0, 5]);
        assert_eq!(p.first(), 3);
        assert_eq!(p.last(), 5);
        assert_eq!(p.position(4), 2);
        p.reverse_suffix(2);
        assert_eq!(p.to_vec(), vec![3, 1, 5, 0, 4]);
        p.reverse_all();
        assert_eq!(p.to_vec(), vec![4, 0, 5, 1, 3]);
        assert_eq!(p.position(3), 4);
        p.push_back(7);
        assert_eq!(p.to_vec(), vec![4, 0, 5, 1, 3, 7]);
        p.clear();
        assert_eq!(p.len(), 0);
        p.push_back(2);
        assert_eq!(p.to_vec(), vec![2]);
    }

    #[derive(Debug, Clone)]
    enum Op {
        Push,
        InsertAt(usize),
        ReverseSuffix(usize),
        ReverseAll,
        RotateLeft(usize),
        Truncate(usize),
        RemoveAt(usize),
        QueryPosition(usize),
        QueryAt(usize),
        Clear,
    }

    fn op_strategy() -> impl Strategy<Value = Op> {
        prop_oneof![
            4 => Just(Op::Push),
            2 => (0usize..64).prop_map(Op::InsertAt),
            3 => (0usize..64).prop_map(Op::ReverseSuffix),
            2 => Just(Op::ReverseAll),
            2 => (0usize..64).prop_map(Op::RotateLeft),
            2 => (0usize..64).prop_map(Op::Truncate),
            2 => (0usize..64).prop_map(Op::RemoveAt),
            2 => (0usize..64).prop_map(Op::QueryPosition),
            2 => (0usize..64).prop_map(Op::QueryAt),
            1 => Just(Op::Clear),
        ]
    }

    proptest! {
        // Model check against a plain Vec performing the same operations.
        // Truncated and cleared vertices go back to a free pool, so node
        // reuse after removal is exercised as well.
        #[test]
        fn matches_vec_model(ops in proptest::collection::vec(op_strategy(), 1..200), seed in 0u64..1000) {
            let cap = 64usize;
            let mut real = fresh(cap, seed);
            let mut model: Vec<usize> = Vec::new();
            let mut next = 0usize;
            let mut freed: Vec<usize> = Vec::new();
            for op in ops {
                let take = |freed: &mut Vec<usize>, next: &mut usize| {
                    freed.pop().or_else(|| {
                        (*next < cap).then(|| {
                            *next += 1;
                            *next - 1
                        })
                    })
                };
                match op {
                    Op::Push => {
                        if let Some(v) = take(&mut freed, &mut next) {
                            real.push_back(v);
                            model.push(v);
                        }
                    }
                    Op::InsertAt(k) => {
                        if let Some(v) = take(&mut freed, &mut next) {
                            let at = if model.is_empty() { 0 } else { k % (model.len() + 1) };
                            real.insert_at(at, v);
                            model.insert(at, v);
                        }
                    }
                    Op::ReverseSuffix(k) => {
                        let from = if model.is_empty() { 0 } else { k % (model.len() + 1) };
                        real.reverse_suffix(from);
                        model[from..].reverse();
                    }
                    Op::ReverseAll => {
                        real.reverse_all();
                        model.reverse();
                    }
                    Op::RotateLeft(k) => {
                        let at = if model.is_empty() { 0 } else { k % (model.len() + 1) };
                        real.rotate_left(at);
                        model.rotate_left(at);
                    }
                    Op::Truncate(k) => {
                        let keep = if model.is_empty() { 0 } else { k % (model.len() + 1) };
                        let gone = real.truncate(keep);
                        prop_assert_eq!(&gone, &model.split_off(keep));
                        freed.extend(gone);
                    }
                    Op::RemoveAt(k) => {
                        if !model.is_empty() {
                            let idx = k % model.len();
                            let got = real.remove_at(idx);
                            prop_assert_eq!(got, model.remove(idx));
                            freed.push(got);
                        }
                    }
                    Op::QueryPosition(k) => {
                        if !model.is_empty() {
                            let idx = k % model.len();
                            prop_assert_eq!(real.position(model[idx]), idx);
                        }
                    }
                    Op::QueryAt(k) => {
                        if !model.is_empty() {
                            let idx = k % model.len();
                            prop_assert_eq!(real.vertex_at(idx), model[idx]);
                            prop_assert_eq!(real.first(), model[0]);
                            prop_assert_eq!(real.last(), *model.last().unwrap());
                        }
                    }
                    Op::Clear => {
                        freed.extend(real.to_vec());
                        real.clear();
                        model.clear();
                    }
                }
                prop_assert_eq!(real.len(), model.len());
            }
            prop_assert_eq!(real.to_vec(), model);
        }
    }
}
