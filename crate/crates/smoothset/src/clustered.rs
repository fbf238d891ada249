//! Linear-space indirection over the vEB trie.
//!
//! Elements are grouped into consecutive sorted clusters of Θ(log w) size,
//! joined by a doubly linked list; the trie only stores one representative
//! (the minimum) per cluster. Clusters split above `2C` and borrow or merge
//! below `ceil(C/2)`, B-tree style.

use std::collections::HashMap;

use crate::veb::{DepthGauge, VebNode};

#[derive(Debug)]
struct Cluster {
    keys: Vec<u64>,
    prev: Option<usize>,
    next: Option<usize>,
}

/// Ordered set of `width`-bit integers with a clustered vEB directory.
#[derive(Debug)]
pub struct ClusteredVeb {
    width: u32,
    capacity: usize,
    directory: VebNode,
    rep_index: HashMap<u64, usize>,
    arena: Vec<Option<Cluster>>,
    free: Vec<usize>,
    head: Option<usize>,
    tail: Option<usize>,
    count: usize,
}

/// Default cluster capacity for a `width`-bit universe: Θ(log w), floored
/// at 4 so tiny widths still cluster.
pub fn default_capacity(width: u32) -> usize {
    ((width.max(2) as f64).log2().ceil() as usize).max(4)
}

impl ClusteredVeb {
    pub fn new(width: u32) -> Self {
        Self::with_capacity(width, default_capacity(width))
    }

    pub fn with_capacity(width: u32, capacity: usize) -> Self {
        assert!(capacity >= 2, "cluster capacity must be at least 2");
        ClusteredVeb {
            width,
            capacity,
            directory: VebNode::new(width),
            rep_index: HashMap::new(),
            arena: Vec::new(),
            free: Vec::new(),
            head: None,
            tail: None,
            count: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Universe width in bits.
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn min(&self) -> Option<u64> {
        self.head.map(|h| self.cluster(h).keys[0])
    }

    pub fn max(&self) -> Option<u64> {
        self.tail.map(|t| *self.cluster(t).keys.last().unwrap())
    }

    fn cluster(&self, slot: usize) -> &Cluster {
        self.arena[slot].as_ref().unwrap()
    }

    fn cluster_mut(&mut self, slot: usize) -> &mut Cluster {
        self.arena[slot].as_mut().unwrap()
    }

    fn alloc(&mut self, c: Cluster) -> usize {
        if let Some(slot) = self.free.pop() {
            self.arena[slot] = Some(c);
            slot
        } else {
            self.arena.push(Some(c));
            self.arena.len() - 1
        }
    }

    fn release(&mut self, slot: usize) {
        self.arena[slot] = None;
        self.free.push(slot);
    }

    /// Cluster whose range covers `x`: the one whose representative is the
    /// largest rep `<= x`. `None` when `x` precedes every cluster.
    fn find_cluster(&self, x: u64, gauge: &mut DepthGauge) -> Option<usize> {
        let rep = if self.directory.contains(x) {
            x
        } else {
            self.directory.predecessor(x, gauge)?
        };
        Some(self.rep_index[&rep])
    }

    fn replace_rep(&mut self, old: u64, new: u64, slot: usize, gauge: &mut DepthGauge) {
        self.directory.remove(old, gauge);
        self.directory.insert(new, gauge);
        self.rep_index.remove(&old);
        self.rep_index.insert(new, slot);
    }

    pub fn insert(&mut self, x: u64, gauge: &mut DepthGauge) -> bool {
        if self.count == 0 {
            let slot = self.alloc(Cluster { keys: vec![x], prev: None, next: None });
            self.head = Some(slot);
            self.tail = Some(slot);
            self.directory.insert(x, gauge);
            self.rep_index.insert(x, slot);
            self.count = 1;
            return true;
        }
        let slot = match self.find_cluster(x, gauge) {
            Some(slot) => {
                let c = self.cluster_mut(slot);
                match c.keys.binary_search(&x) {
                    Ok(_) => return false,
                    Err(pos) => {
                        debug_assert!(pos > 0, "x below rep implies find_cluster missed");
                        c.keys.insert(pos, x);
                    }
                }
                slot
            }
            None => {
                // New global minimum: goes to the front of the head cluster.
                let slot = self.head.unwrap();
                let old_rep = self.cluster(slot).keys[0];
                self.cluster_mut(slot).keys.insert(0, x);
                self.replace_rep(old_rep, x, slot, gauge);
                slot
            }
        };
        self.count += 1;
        if self.cluster(slot).keys.len() > 2 * self.capacity {
            self.split(slot, gauge);
        }
        true
    }

    fn split(&mut self, slot: usize, gauge: &mut DepthGauge) {
        let half = {
            let c = self.cluster_mut(slot);
            let at = c.keys.len() / 2;
            c.keys.split_off(at)
        };
        let new_rep = half[0];
        let next = self.cluster(slot).next;
        let new_slot = self.alloc(Cluster { keys: half, prev: Some(slot), next });
        self.cluster_mut(slot).next = Some(new_slot);
        match next {
            Some(n) => self.cluster_mut(n).prev = Some(new_slot),
            None => self.tail = Some(new_slot),
        }
        self.directory.insert(new_rep, gauge);
        self.rep_index.insert(new_rep, new_slot);
    }

    pub fn remove(&mut self, x: u64, gauge: &mut DepthGauge) -> bool {
        let Some(slot) = self.find_cluster(x, gauge) else { return false };
        let pos = match self.cluster(slot).keys.binary_search(&x) {
            Ok(pos) => pos,
            Err(_) => return false,
        };
        self.cluster_mut(slot).keys.remove(pos);
        self.count -= 1;
        if self.cluster(slot).keys.is_empty() {
            // x was the rep and sole element.
            self.unlink(slot);
            self.directory.remove(x, gauge);
            self.rep_index.remove(&x);
            self.release(slot);
            return true;
        }
        if pos == 0 {
            let new_rep = self.cluster(slot).keys[0];
            self.replace_rep(x, new_rep, slot, gauge);
        }
        if self.cluster(slot).keys.len() < self.capacity.div_ceil(2) {
            self.rebalance(slot, gauge);
        }
        true
    }

    fn unlink(&mut self, slot: usize) {
        let (prev, next) = {
            let c = self.cluster(slot);
            (c.prev, c.next)
        };
        match prev {
            Some(p) => self.cluster_mut(p).next = next,
            None => self.head = next,
        }
        match next {
            Some(n) => self.cluster_mut(n).prev = prev,
            None => self.tail = prev,
        }
    }

    fn rebalance(&mut self, slot: usize, gauge: &mut DepthGauge) {
        let min_size = self.capacity.div_ceil(2);
        let (prev, next) = {
            let c = self.cluster(slot);
            (c.prev, c.next)
        };
        // Borrow from a roomy neighbor first, merge otherwise. A cluster
        // with no neighbors may stay small.
        if let Some(p) = prev {
            if self.cluster(p).keys.len() > min_size {
                let borrowed = self.cluster_mut(p).keys.pop().unwrap();
                let old_rep = self.cluster(slot).keys[0];
                self.cluster_mut(slot).keys.insert(0, borrowed);
                self.replace_rep(old_rep, borrowed, slot, gauge);
                return;
            }
        }
        if let Some(n) = next {
            if self.cluster(n).keys.len() > min_size {
                let borrowed = self.cluster_mut(n).keys.remove(0);
                let new_next_rep = self.cluster(n).keys[0];
                self.replace_rep(borrowed, new_next_rep, n, gauge);
                self.cluster_mut(slot).keys.push(borrowed);
                return;
            }
        }
        if let Some(p) = prev {
            let mut keys = std::mem::take(&mut self.cluster_mut(slot).keys);
            let rep = keys[0];
            self.cluster_mut(p).keys.append(&mut keys);
            self.directory.remove(rep, gauge);
            self.rep_index.remove(&rep);
            self.unlink(slot);
            self.release(slot);
        } else if let Some(n) = next {
            let mut keys = std::mem::take(&mut self.cluster_mut(n).keys);
            let rep = keys[0];
            self.cluster_mut(slot).keys.append(&mut keys);
            self.directory.remove(rep, gauge);
            self.rep_index.remove(&rep);
            self.unlink(n);
            self.release(n);
        }
    }

    pub fn contains(&self, x: u64, gauge: &mut DepthGauge) -> bool {
        self.find_cluster(x, gauge)
            .is_some_and(|slot| self.cluster(slot).keys.binary_search(&x).is_ok())
    }

    /// Largest member strictly less than `x`.
    pub fn predecessor(&self, x: u64, gauge: &mut DepthGauge) -> Option<u64> {
        let slot = self.find_cluster(x, gauge)?;
        let c = self.cluster(slot);
        let pos = c.keys.partition_point(|&k| k < x);
        if pos > 0 {
            return Some(c.keys[pos - 1]);
        }
        // x equals this cluster's rep; the answer sits in the left neighbor.
        c.prev.map(|p| *self.cluster(p).keys.last().unwrap())
    }

    /// Smallest member strictly greater than `x`.
    pub fn successor(&self, x: u64, gauge: &mut DepthGauge) -> Option<u64> {
        if self.count == 0 {
            return None;
        }
        let Some(slot) = self.find_cluster(x, gauge) else {
            // Every member exceeds x; the global min answers.
            return self.min();
        };
        let c = self.cluster(slot);
        let pos = c.keys.partition_point(|&k| k <= x);
        if pos < c.keys.len() {
            return Some(c.keys[pos]);
        }
        c.next.map(|n| self.cluster(n).keys[0])
    }

    /// Members in ascending order via the linked list.
    pub fn collect(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.count);
        let mut cur = self.head;
        while let Some(slot) = cur {
            let c = self.cluster(slot);
            out.extend_from_slice(&c.keys);
            cur = c.next;
        }
        out
    }

    /// Number of cluster representatives held by the directory.
    pub fn directory_entries(&self) -> usize {
        self.rep_index.len()
    }

    /// Allocated trie nodes under the directory.
    pub fn directory_nodes(&self) -> usize {
        self.directory.node_count()
    }

    /// Live clusters.
    pub fn cluster_count(&self) -> usize {
        self.arena.len() - self.free.len()
    }

    /// Panics if any structural invariant is broken. Test helper.
    pub fn assert_consistent(&self) {
        let mut seen = 0usize;
        let mut cur = self.head;
        let mut prev_slot = None;
        let mut last_key: Option<u64> = None;
        let mut reps = Vec::new();
        while let Some(slot) = cur {
            let c = self.cluster(slot);
            assert_eq!(c.prev, prev_slot, "broken prev link");
            assert!(!c.keys.is_empty(), "empty cluster in list");
            assert!(c.keys.windows(2).all(|w| w[0] < w[1]), "unsorted cluster");
            if let Some(lk) = last_key {
                assert!(lk < c.keys[0], "cluster ranges overlap");
            }
            if !(c.prev.is_none() && c.next.is_none()) {
                assert!(
                    c.keys.len() >= self.capacity.div_ceil(2) && c.keys.len() <= 2 * self.capacity,
                    "cluster size {} outside [{}, {}]",
                    c.keys.len(),
                    self.capacity.div_ceil(2),
                    2 * self.capacity
                );
            }
            reps.push(c.keys[0]);
            assert_eq!(self.rep_index.get(&c.keys[0]), Some(&slot));
            last_key = c.keys.last().copied();
            seen += c.keys.len();
            prev_slot = Some(slot);
            cur = c.next;
        }
        assert_eq!(prev_slot, self.tail, "tail mismatch");
        assert_eq!(seen, self.count, "count mismatch");
        assert_eq!(self.rep_index.len(), reps.len());
        assert_eq!(self.directory.collect(), reps, "directory out of sync with cluster minima");
    }
}
