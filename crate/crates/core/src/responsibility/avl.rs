//! Arena AVL tree of index nodes with `L`/`R` subtree aggregates.

use std::collections::HashMap;

use crate::edgeset::EdgeSet;
use crate::graph::{EdgeId, EdgeKey};

/// Position of a node under its parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Root,
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub(super) struct Node {
    pub edge: EdgeId,
    pub key: EdgeKey,
    pub c: EdgeSet,
    pub n: EdgeSet,
    pub l: EdgeSet,
    pub r: EdgeSet,
    pub left: Option<usize>,
    pub right: Option<usize>,
    height: u32,
}

#[derive(Clone, Debug, Default)]
pub(super) struct Avl {
    nodes: Vec<Node>,
    free: Vec<usize>,
    root: Option<usize>,
    slots: HashMap<EdgeId, usize>,
}

impl Avl {
    /// Balanced tree over entries sorted by key; the middle entry (upper
    /// median) becomes the root. Responsibility sets start empty.
    pub fn from_sorted(entries: Vec<(EdgeKey, EdgeSet)>) -> Self {
        let mut t = Avl::default();
        let slots: Vec<usize> = entries
            .into_iter()
            .map(|(key, c)| t.alloc(key.id, key, c))
            .collect();
        t.root = t.build(&slots);
        t
    }

    fn build(&mut self, slots: &[usize]) -> Option<usize> {
        if slots.is_empty() {
            return None;
        }
        let mid = slots.len() / 2;
        let x = slots[mid];
        self.nodes[x].left = self.build(&slots[..mid]);
        self.nodes[x].right = self.build(&slots[mid + 1..]);
        self.pull(x);
        Some(x)
    }

    fn alloc(&mut self, edge: EdgeId, key: EdgeKey, c: EdgeSet) -> usize {
        let node = Node {
            edge,
            key,
            c,
            n: EdgeSet::new(),
            l: EdgeSet::new(),
            r: EdgeSet::new(),
            left: None,
            right: None,
            height: 1,
        };
        let s = match self.free.pop() {
            Some(s) => {
                self.nodes[s] = node;
                s
            }
            None => {
                self.nodes.push(node);
                self.nodes.len() - 1
            }
        };
        self.slots.insert(edge, s);
        s
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn root(&self) -> Option<usize> {
        self.root
    }

    pub fn node(&self, s: usize) -> &Node {
        &self.nodes[s]
    }

    pub fn node_mut(&mut self, s: usize) -> &mut Node {
        &mut self.nodes[s]
    }

    pub fn slot_of(&self, e: EdgeId) -> Option<usize> {
        self.slots.get(&e).copied()
    }

    fn height(&self, x: Option<usize>) -> u32 {
        x.map_or(0, |s| self.nodes[s].height)
    }

    fn aggregate(&self, x: Option<usize>) -> EdgeSet {
        match x {
            None => EdgeSet::new(),
            Some(s) => {
                let nd = &self.nodes[s];
                nd.n.union(&nd.l).union(&nd.r)
            }
        }
    }

    /// Recomputes height and `L`/`R` of `x` from its children.
    fn pull(&mut self, x: usize) {
        let (left, right) = (self.nodes[x].left, self.nodes[x].right);
        let l = self.aggregate(left);
        let r = self.aggregate(right);
        let h = 1 + self.height(left).max(self.height(right));
        let nd = &mut self.nodes[x];
        nd.l = l;
        nd.r = r;
        nd.height = h;
    }

    fn rotate_right(&mut self, x: usize) -> usize {
        let y = self.nodes[x].left.expect("rotation needs a left child");
        self.nodes[x].left = self.nodes[y].right;
        self.nodes[y].right = Some(x);
        self.pull(x);
        self.pull(y);
        y
    }

    fn rotate_left(&mut self, x: usize) -> usize {
        let y = self.nodes[x].right.expect("rotation needs a right child");
        self.nodes[x].right = self.nodes[y].left;
        self.nodes[y].left = Some(x);
        self.pull(x);
        self.pull(y);
        y
    }

    fn balance(&mut self, x: usize) -> usize {
        self.pull(x);
        let (left, right) = (self.nodes[x].left, self.nodes[x].right);
        let bf = self.height(left) as i64 - self.height(right) as i64;
        if bf > 1 {
            let l = left.unwrap();
            if self.height(self.nodes[l].left) < self.height(self.nodes[l].right) {
                self.nodes[x].left = Some(self.rotate_left(l));
            }
            return self.rotate_right(x);
        }
        if bf < -1 {
            let r = right.unwrap();
            if self.height(self.nodes[r].right) < self.height(self.nodes[r].left) {
                self.nodes[x].right = Some(self.rotate_right(r));
            }
            return self.rotate_left(x);
        }
        x
    }

    /// Inserts a node with an empty responsibility set.
    pub fn insert(&mut self, edge: EdgeId, key: EdgeKey, c: EdgeSet) {
        let s = self.alloc(edge, key, c);
        self.root = Some(self.insert_at(self.root, s));
    }

    fn insert_at(&mut self, x: Option<usize>, s: usize) -> usize {
        let Some(x) = x else {
            self.pull(s);
            return s;
        };
        if self.nodes[s].key < self.nodes[x].key {
            let l = self.insert_at(self.nodes[x].left, s);
            self.nodes[x].left = Some(l);
        } else {
            let r = self.insert_at(self.nodes[x].right, s);
            self.nodes[x].right = Some(r);
        }
        self.balance(x)
    }

    /// Removes the node with `key` and returns its cycle set.
    pub fn remove(&mut self, key: EdgeKey) -> EdgeSet {
        let mut removed = None;
        self.root = self.remove_at(self.root, key, &mut removed);
        let s = removed.expect("removed key is present");
        let nd = &mut self.nodes[s];
        self.slots.remove(&nd.edge);
        self.free.push(s);
        std::mem::take(&mut nd.c)
    }

    fn remove_at(
        &mut self,
        x: Option<usize>,
        key: EdgeKey,
        removed: &mut Option<usize>,
    ) -> Option<usize> {
        let x = x?;
        match key.cmp(&self.nodes[x].key) {
            std::cmp::Ordering::Less => {
                self.nodes[x].left = self.remove_at(self.nodes[x].left, key, removed);
            }
            std::cmp::Ordering::Greater => {
                self.nodes[x].right = self.remove_at(self.nodes[x].right, key, removed);
            }
            std::cmp::Ordering::Equal => {
                *removed = Some(x);
                let (left, right) = (self.nodes[x].left, self.nodes[x].right);
                return match (left, right) {
                    (None, r) => r,
                    (l, None) => l,
                    (Some(_), Some(r)) => {
                        let (rest, m) = self.remove_min(r);
                        self.nodes[m].left = left;
                        self.nodes[m].right = rest;
                        Some(self.balance(m))
                    }
                };
            }
        }
        Some(self.balance(x))
    }

    fn remove_min(&mut self, x: usize) -> (Option<usize>, usize) {
        match self.nodes[x].left {
            None => (self.nodes[x].right, x),
            Some(l) => {
                let (rest, m) = self.remove_min(l);
                self.nodes[x].left = rest;
                (Some(self.balance(x)), m)
            }
        }
    }

    /// Union of the responsibility sets of all nodes keyed below `key`,
    /// collected on one descent: every right turn takes the node's own set
    /// and the aggregate of the subtree passed over on its left.
    pub fn covered_below(&self, key: EdgeKey) -> EdgeSet {
        let mut acc = EdgeSet::new();
        let mut cur = self.root;
        while let Some(s) = cur {
            let nd = &self.nodes[s];
            if nd.key < key {
                acc = acc.union(&nd.n).union(&nd.l);
                cur = nd.right;
            } else {
                cur = nd.left;
            }
        }
        acc
    }

    /// Recomputes `N = C \ (cycles of lighter nodes)` for every node keyed
    /// at or above `from` (all nodes for `None`), then the aggregates above
    /// them.
    pub fn resweep(&mut self, from: Option<EdgeKey>) {
        let mut covered = match from {
            Some(k) => self.covered_below(k),
            None => EdgeSet::new(),
        };
        if let Some(r) = self.root {
            self.sweep(r, from, &mut covered);
        }
    }

    fn sweep(&mut self, x: usize, from: Option<EdgeKey>, covered: &mut EdgeSet) {
        let inside = from.map_or(true, |k| self.nodes[x].key >= k);
        if inside {
            if let Some(l) = self.nodes[x].left {
                self.sweep(l, from, covered);
            }
            let nd = &mut self.nodes[x];
            nd.n = nd.c.difference(covered);
            *covered = covered.union(&nd.c);
        }
        if let Some(r) = self.nodes[x].right {
            self.sweep(r, from, covered);
        }
        self.pull(x);
    }

    pub fn in_order(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack = Vec::new();
        let mut cur = self.root;
        while cur.is_some() || !stack.is_empty() {
            while let Some(s) = cur {
                stack.push(s);
                cur = self.nodes[s].left;
            }
            let s = stack.pop().unwrap();
            out.push(s);
            cur = self.nodes[s].right;
        }
        out
    }

    /// `(slot, depth)` in pre-order.
    pub fn pre_order(&self) -> Vec<(usize, usize, Side)> {
        let mut out = Vec::with_capacity(self.len());
        let mut stack: Vec<(usize, usize, Side)> =
            self.root.map(|r| (r, 0, Side::Root)).into_iter().collect();
        while let Some((s, d, side)) = stack.pop() {
            out.push((s, d, side));
            if let Some(r) = self.nodes[s].right {
                stack.push((r, d + 1, Side::Right));
            }
            if let Some(l) = self.nodes[s].left {
                stack.push((l, d + 1, Side::Left));
            }
        }
        out
    }

    /// Balance, heights, aggregates and slot map, recomputed bottom-up.
    pub fn check(&self) -> Result<(), String> {
        fn walk(t: &Avl, x: Option<usize>, count: &mut usize) -> Result<(u32, EdgeSet), String> {
            let Some(s) = x else {
                return Ok((0, EdgeSet::new()));
            };
            *count += 1;
            let nd = &t.nodes[s];
            let (hl, al) = walk(t, nd.left, count)?;
            let (hr, ar) = walk(t, nd.right, count)?;
            if hl.abs_diff(hr) > 1 {
                return Err(format!("node {} unbalanced", nd.edge));
            }
            if nd.height != 1 + hl.max(hr) {
                return Err(format!("node {} has stale height", nd.edge));
            }
            if nd.l != al || nd.r != ar {
                return Err(format!("node {} has stale L/R", nd.edge));
            }
            if t.slots.get(&nd.edge) != Some(&s) {
                return Err(format!("node {} missing from slot map", nd.edge));
            }
            Ok((nd.height, nd.n.union(&al).union(&ar)))
        }
        let mut count = 0;
        walk(self, self.root, &mut count)?;
        if count != self.slots.len() {
            return Err(format!(
                "{count} reachable nodes, {} slots",
                self.slots.len()
            ));
        }
        Ok(())
    }
}
