//! Per-prefix bucket: a sorted array of low-bit suffixes.
//!
//! Expected size is O(1) under smooth input, so a flat sorted vector beats
//! any tree here. Buckets are linked to their prefix-order neighbors; the
//! links are maintained by the owning layered structure.

/// Ordered small-set of `(w - p)`-bit suffixes for one occupied prefix.
#[derive(Clone, Debug)]
pub struct Bucket {
    pub prefix: u64,
    lows: Vec<u64>,
    /// Prefix of the neighboring bucket to the left, if any.
    pub prev: Option<u64>,
    /// Prefix of the neighboring bucket to the right, if any.
    pub next: Option<u64>,
}

impl Bucket {
    pub fn new(prefix: u64, low: u64) -> Self {
        Bucket { prefix, lows: vec![low], prev: None, next: None }
    }

    pub fn len(&self) -> usize {
        self.lows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lows.is_empty()
    }

    pub fn lows(&self) -> &[u64] {
        &self.lows
    }

    pub fn insert(&mut self, low: u64) -> bool {
        match self.lows.binary_search(&low) {
            Ok(_) => false,
            Err(pos) => {
                self.lows.insert(pos, low);
                true
            }
        }
    }

    /// Removes `low`. The caller destroys the bucket and relinks neighbors
    /// when it observes `is_empty()` afterwards.
    pub fn remove(&mut self, low: u64) -> bool {
        match self.lows.binary_search(&low) {
            Ok(pos) => {
                self.lows.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn contains(&self, low: u64) -> bool {
        self.lows.binary_search(&low).is_ok()
    }

    /// Largest stored suffix strictly less than `x`. Counts binary-search
    /// probes into `probes`.
    pub fn predecessor(&self, x: u64, probes: &mut u32) -> Option<u64> {
        let pos = self.partition_counted(x, probes);
        if pos > 0 {
            Some(self.lows[pos - 1])
        } else {
            None
        }
    }

    /// Smallest stored suffix strictly greater than `x`.
    pub fn successor(&self, x: u64, probes: &mut u32) -> Option<u64> {
        let mut lo = 0usize;
        let mut hi = self.lows.len();
        while lo < hi {
            *probes += 1;
            let mid = (lo + hi) / 2;
            if self.lows[mid] <= x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        self.lows.get(lo).copied()
    }

    // First index with lows[i] >= x.
    fn partition_counted(&self, x: u64, probes: &mut u32) -> usize {
        let mut lo = 0usize;
        let mut hi = self.lows.len();
        while lo < hi {
            *probes += 1;
            let mid = (lo + hi) / 2;
            if self.lows[mid] < x {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Smallest suffix. Buckets are nonempty by invariant.
    pub fn min(&self) -> u64 {
        self.lows[0]
    }

    /// Largest suffix.
    pub fn max(&self) -> u64 {
        *self.lows.last().expect("bucket nonempty by invariant")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn sorted_insert_and_duplicates() {
        let mut b = Bucket::new(0, 2);
        assert!(b.insert(7));
        assert!(b.insert(5));
        assert_eq!(b.lows(), &[2, 5, 7]);
        assert!(!b.insert(2));
        assert_eq!(b.lows(), &[2, 5, 7]);
    }

    #[test]
    fn remove_and_empty_signal() {
        let mut b = Bucket::new(0, 2);
        b.insert(5);
        b.insert(7);
        assert!(b.remove(5));
        assert_eq!(b.lows(), &[2, 7]);
        assert!(!b.remove(9));
        assert!(b.remove(2));
        assert!(b.remove(7));
        assert!(b.is_empty());
    }

    #[test]
    fn predecessor_examples() {
        let mut b = Bucket::new(0, 2);
        b.insert(5);
        b.insert(7);
        let mut probes = 0;
        assert_eq!(b.predecessor(7, &mut probes), Some(5));
        assert_eq!(b.predecessor(2, &mut probes), None);
        assert!(probes > 0);
        assert_eq!(b.min(), 2);
        assert_eq!(b.max(), 7);
    }

    #[test]
    fn exhaustive_width8_low_universe() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut b = Bucket::new(0, rng.random_range(0..256));
        let mut oracle = BTreeSet::new();
        oracle.insert(b.min());
        for _ in 0..80 {
            let v = rng.random_range(0..256u64);
            assert_eq!(b.insert(v), oracle.insert(v));
        }
        let mut probes = 0;
        for x in 0..256u64 {
            assert_eq!(b.predecessor(x, &mut probes), oracle.range(..x).next_back().copied());
            assert_eq!(b.successor(x, &mut probes), oracle.range(x + 1..).next().copied());
        }
    }

    #[test]
    fn random_inserts_match_sorted_dedup_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut b = Bucket::new(0, 0);
        let mut oracle = BTreeSet::from([0u64]);
        for _ in 0..1000 {
            let v = rng.random::<u64>() >> 8;
            assert_eq!(b.insert(v), oracle.insert(v));
        }
        assert_eq!(b.lows(), oracle.iter().copied().collect::<Vec<_>>().as_slice());
    }
}
