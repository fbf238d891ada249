//! Hashed van Emde Boas trie.
//!
//! A `VebNode` of width `k` stores a set of integers below `2^k`. Children
//! live in a hash map keyed by the high half, so space is proportional to the
//! occupied paths rather than the universe. The minimum is kept only in the
//! node's own field, never recursed, which keeps every operation down to one
//! nontrivial recursive call per level. Nodes of width at most
//! [`BASE_WIDTH`] degrade to a single 64-bit mask.

use std::collections::HashMap;

/// Widths at or below this are represented by one `u64` bitmask.
pub const BASE_WIDTH: u32 = 6;

/// Tracks the deepest recursion level reached across one or more trie
/// traversals. `levels()` is a maximum, not a sum, so several descents
/// within one logical operation still report the depth bound.
#[derive(Clone, Copy, Debug, Default)]
pub struct DepthGauge {
    max: u32,
}

impl DepthGauge {
    fn visit(&mut self, depth: u32) {
        if depth > self.max {
            self.max = depth;
        }
    }

    pub fn levels(&self) -> u32 {
        self.max
    }
}

#[derive(Debug)]
enum Repr {
    /// Members except `min`, as a bitmask.
    Leaf(u64),
    Branch {
        /// High halves that key nonempty children; `None` while no child exists.
        summary: Option<Box<VebNode>>,
        children: HashMap<u64, VebNode>,
    },
}

/// One node of the hashed vEB trie.
#[derive(Debug)]
pub struct VebNode {
    width: u32,
    min: Option<u64>,
    max: Option<u64>,
    repr: Repr,
}

impl VebNode {
    pub fn new(width: u32) -> Self {
        assert!((1..=64).contains(&width));
        let repr = if width <= BASE_WIDTH {
            Repr::Leaf(0)
        } else {
            Repr::Branch { summary: None, children: HashMap::new() }
        };
        VebNode { width, min: None, max: None, repr }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_none()
    }

    pub fn min(&self) -> Option<u64> {
        self.min
    }

    pub fn max(&self) -> Option<u64> {
        self.max
    }

    #[inline]
    fn low_width(&self) -> u32 {
        self.width / 2
    }

    #[inline]
    fn high_width(&self) -> u32 {
        self.width - self.width / 2
    }

    #[inline]
    fn high(&self, x: u64) -> u64 {
        x >> self.low_width()
    }

    #[inline]
    fn low(&self, x: u64) -> u64 {
        x & ((1u64 << self.low_width()) - 1)
    }

    #[inline]
    fn combine(&self, high: u64, low: u64) -> u64 {
        (high << self.low_width()) | low
    }

    fn check_universe(&self, x: u64) {
        debug_assert!(self.width == 64 || x < (1u64 << self.width));
    }

    pub fn contains(&self, x: u64) -> bool {
        self.check_universe(x);
        let Some(mn) = self.min else { return false };
        if x == mn {
            return true;
        }
        if x < mn || Some(x) > self.max {
            return false;
        }
        match &self.repr {
            Repr::Leaf(mask) => mask & (1u64 << x) != 0,
            Repr::Branch { children, .. } => {
                let (h, l) = (self.high(x), self.low(x));
                children.get(&h).is_some_and(|c| c.contains(l))
            }
        }
    }

    pub fn insert(&mut self, x: u64, gauge: &mut DepthGauge) -> bool {
        self.check_universe(x);
        self.insert_at(x, 1, gauge)
    }

    fn insert_at(&mut self, x: u64, depth: u32, gauge: &mut DepthGauge) -> bool {
        gauge.visit(depth);
        let Some(mn) = self.min else {
            self.min = Some(x);
            self.max = Some(x);
            return true;
        };
        if x == mn {
            return false;
        }
        if x < mn {
            // New minimum; the old one moves down into the repr.
            self.min = Some(x);
            self.repr_insert(mn, depth, gauge);
            return true;
        }
        let changed = self.repr_insert(x, depth, gauge);
        if changed && Some(x) > self.max {
            self.max = Some(x);
        }
        changed
    }

    fn repr_insert(&mut self, x: u64, depth: u32, gauge: &mut DepthGauge) -> bool {
        let (h, l) = (self.high(x), self.low(x));
        let (low_w, high_w) = (self.low_width(), self.high_width());
        match &mut self.repr {
            Repr::Leaf(mask) => {
                let bit = 1u64 << x;
                if *mask & bit != 0 {
                    false
                } else {
                    *mask |= bit;
                    true
                }
            }
            Repr::Branch { summary, children } => {
                if let Some(child) = children.get_mut(&h) {
                    child.insert_at(l, depth + 1, gauge)
                } else {
                    // Creating the child is O(1); the nontrivial recursive
                    // call of this level goes into the summary.
                    let mut child = VebNode::new(low_w);
                    child.min = Some(l);
                    child.max = Some(l);
                    children.insert(h, child);
                    summary
                        .get_or_insert_with(|| Box::new(VebNode::new(high_w)))
                        .insert_at(h, depth + 1, gauge);
                    true
                }
            }
        }
    }

    pub fn remove(&mut self, x: u64, gauge: &mut DepthGauge) -> bool {
        self.check_universe(x);
        self.remove_at(x, 1, gauge)
    }

    fn remove_at(&mut self, x: u64, depth: u32, gauge: &mut DepthGauge) -> bool {
        gauge.visit(depth);
        let Some(mn) = self.min else { return false };
        let mx = self.max.unwrap();
        if mn == mx {
            return if x == mn {
                self.min = None;
                self.max = None;
                true
            } else {
                false
            };
        }
        if x == mn {
            // Pull the successor up out of the repr to become the new min.
            let new_min = self.repr_min().expect("nonempty repr when min < max");
            self.repr_remove(new_min, depth, gauge);
            self.min = Some(new_min);
            if self.repr_is_empty() {
                self.max = self.min;
            }
            return true;
        }
        let changed = self.repr_remove(x, depth, gauge);
        if changed && x == mx {
            self.max = Some(self.repr_max().unwrap_or(mn));
        }
        changed
    }

    fn repr_remove(&mut self, x: u64, depth: u32, gauge: &mut DepthGauge) -> bool {
        let (h, l) = (self.high(x), self.low(x));
        match &mut self.repr {
            Repr::Leaf(mask) => {
                let bit = 1u64 << x;
                if *mask & bit == 0 {
                    false
                } else {
                    *mask &= !bit;
                    true
                }
            }
            Repr::Branch { summary, children } => {
                let Some(child) = children.get_mut(&h) else { return false };
                let changed = child.remove_at(l, depth + 1, gauge);
                if changed && child.is_empty() {
                    // The child held one element, so its removal was O(1);
                    // the summary update is the real recursive call.
                    children.remove(&h);
                    let s = summary.as_mut().expect("summary present while children exist");
                    s.remove_at(h, depth + 1, gauge);
                    if s.is_empty() {
                        *summary = None;
                    }
                }
                changed
            }
        }
    }

    /// Largest member strictly less than `x`.
    pub fn predecessor(&self, x: u64, gauge: &mut DepthGauge) -> Option<u64> {
        self.check_universe(x);
        self.pred_at(x, 1, gauge)
    }

    fn pred_at(&self, x: u64, depth: u32, gauge: &mut DepthGauge) -> Option<u64> {
        gauge.visit(depth);
        let mn = self.min?;
        if x > self.max.unwrap() {
            return self.max;
        }
        if x <= mn {
            return None;
        }
        match &self.repr {
            Repr::Leaf(mask) => {
                let below = mask & ((1u64 << x) - 1);
                if below != 0 {
                    Some(63 - below.leading_zeros() as u64)
                } else {
                    Some(mn)
                }
            }
            Repr::Branch { summary, children } => {
                let (h, l) = (self.high(x), self.low(x));
                if let Some(child) = children.get(&h) {
                    if child.min.unwrap() < l {
                        let y = child.pred_at(l, depth + 1, gauge).unwrap();
                        return Some(self.combine(h, y));
                    }
                }
                match summary.as_ref().and_then(|s| s.pred_at(h, depth + 1, gauge)) {
                    Some(hp) => Some(self.combine(hp, children[&hp].max.unwrap())),
                    None => Some(mn),
                }
            }
        }
    }

    /// Smallest member strictly greater than `x`.
    pub fn successor(&self, x: u64, gauge: &mut DepthGauge) -> Option<u64> {
        self.check_universe(x);
        self.succ_at(x, 1, gauge)
    }

    fn succ_at(&self, x: u64, depth: u32, gauge: &mut DepthGauge) -> Option<u64> {
        gauge.visit(depth);
        let mn = self.min?;
        if x < mn {
            return Some(mn);
        }
        if x >= self.max.unwrap() {
            return None;
        }
        // min < max and x < max, so the answer lives in the repr.
        match &self.repr {
            Repr::Leaf(mask) => {
                let above = if x >= 63 { 0 } else { mask & (u64::MAX << (x + 1)) };
                debug_assert!(above != 0);
                Some(above.trailing_zeros() as u64)
            }
            Repr::Branch { summary, children } => {
                let (h, l) = (self.high(x), self.low(x));
                if let Some(child) = children.get(&h) {
                    if child.max.unwrap() > l {
                        let y = child.succ_at(l, depth + 1, gauge).unwrap();
                        return Some(self.combine(h, y));
                    }
                }
                let hs = summary
                    .as_ref()
                    .and_then(|s| s.succ_at(h, depth + 1, gauge))
                    .expect("successor high half must exist while x < max");
                Some(self.combine(hs, children[&hs].min.unwrap()))
            }
        }
    }

    fn repr_is_empty(&self) -> bool {
        match &self.repr {
            Repr::Leaf(mask) => *mask == 0,
            Repr::Branch { children, .. } => children.is_empty(),
        }
    }

    /// Smallest element stored in the repr (excludes `min`). O(1) via the
    /// cached min/max fields of summary and children.
    fn repr_min(&self) -> Option<u64> {
        match &self.repr {
            Repr::Leaf(mask) => {
                if *mask == 0 {
                    None
                } else {
                    Some(mask.trailing_zeros() as u64)
                }
            }
            Repr::Branch { summary, children } => {
                let h = summary.as_ref()?.min?;
                Some(self.combine(h, children[&h].min.unwrap()))
            }
        }
    }

    fn repr_max(&self) -> Option<u64> {
        match &self.repr {
            Repr::Leaf(mask) => {
                if *mask == 0 {
                    None
                } else {
                    Some(63 - mask.leading_zeros() as u64)
                }
            }
            Repr::Branch { summary, children } => {
                let h = summary.as_ref()?.max?;
                Some(self.combine(h, children[&h].max.unwrap()))
            }
        }
    }

    /// Total `VebNode` objects reachable from this one, itself included.
    pub fn node_count(&self) -> usize {
        match &self.repr {
            Repr::Leaf(_) => 1,
            Repr::Branch { summary, children } => {
                1 + summary.as_ref().map_or(0, |s| s.node_count())
                    + children.values().map(|c| c.node_count()).sum::<usize>()
            }
        }
    }

    /// All members in ascending order. Test and rebuild helper.
    pub fn collect(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut gauge = DepthGauge::default();
        let Some(mut cur) = self.min else { return out };
        loop {
            out.push(cur);
            match self.successor(cur, &mut gauge) {
                Some(next) => cur = next,
                None => break,
            }
        }
        out
    }

    #[cfg(test)]
    fn repr_elements(&self, out: &mut Vec<u64>) {
        match &self.repr {
            Repr::Leaf(mask) => {
                for b in 0..64 {
                    if mask & (1u64 << b) != 0 {
                        out.push(b);
                    }
                }
            }
            Repr::Branch { children, .. } => {
                let mut highs: Vec<_> = children.keys().copied().collect();
                highs.sort_unstable();
                for h in highs {
                    let child = &children[&h];
                    let mut sub = Vec::new();
                    if let Some(cm) = child.min {
                        sub.push(cm);
                    }
                    child.repr_elements(&mut sub);
                    for l in sub {
                        out.push(self.combine(h, l));
                    }
                }
            }
        }
    }
}

/// Depth allowance for one traversal of a width-`w` trie.
pub fn depth_bound(width: u32) -> u32 {
    (width.max(2) as f64).log2().ceil() as u32 + 2
}
