//! The layered predecessor structure.
//!
//! Each key is cut into a `p`-bit prefix and a `(w - p)`-bit suffix. The
//! prefixes live in a clustered vEB trie; each occupied prefix owns a small
//! bucket of suffixes, linked to its neighbors in prefix order. A full
//! rebuild after every `n0/4` successful modifications keeps `p` in step
//! with the set size.

use std::collections::HashMap;

use crate::bucket::Bucket;
use crate::clustered::ClusteredVeb;
use crate::split::{split_key, OpMetrics, SmoothParams, SplitConfig};
use crate::veb::{depth_bound, DepthGauge};

/// Aggregates over the structure's lifetime (reset on demand, not by rebuilds).
#[derive(Clone, Copy, Debug, Default)]
pub struct CumulativeStats {
    pub ops: u64,
    pub sum_levels: u64,
    pub max_levels: u32,
    pub sum_bucket_probes: u64,
    pub max_bucket_probes: u32,
    pub rebuilds: u64,
}

impl CumulativeStats {
    pub fn mean_levels(&self) -> f64 {
        if self.ops == 0 {
            0.0
        } else {
            self.sum_levels as f64 / self.ops as f64
        }
    }
}

/// Snapshot of the space/time evidence counters.
#[derive(Clone, Debug)]
pub struct SpaceTimeReport {
    pub size: usize,
    pub p: u32,
    pub n0: usize,
    /// (bucket size, number of buckets of that size), ascending.
    pub bucket_hist: Vec<(usize, usize)>,
    pub mean_bucket: f64,
    pub max_bucket: usize,
    pub p99_bucket: usize,
    pub mean_levels: f64,
    pub max_levels: u32,
    pub rebuilds: u64,
    /// Allocated nodes/entries: trie nodes, directory reps, cluster slots,
    /// clusters, buckets, and stored suffixes.
    pub entries: usize,
    pub entries_per_key: f64,
}

/// Dynamic predecessor structure over `w`-bit keys.
#[derive(Debug)]
pub struct LayeredSet {
    cfg: SplitConfig,
    cluster_cap: Option<usize>,
    top: ClusteredVeb,
    buckets: HashMap<u64, Bucket>,
    head: Option<u64>,
    tail: Option<u64>,
    size: usize,
    stats: CumulativeStats,
    last: OpMetrics,
}

impl LayeredSet {
    pub fn new(w: u32, params: Option<SmoothParams>) -> Self {
        Self::with_options(w, params, None)
    }

    /// `cluster_cap` overrides the Θ(log w) cluster capacity of the top layer.
    pub fn with_options(w: u32, params: Option<SmoothParams>, cluster_cap: Option<usize>) -> Self {
        let cfg = SplitConfig::new(w, params);
        let top = match cluster_cap {
            Some(c) => ClusteredVeb::with_capacity(cfg.p, c),
            None => ClusteredVeb::new(cfg.p),
        };
        LayeredSet {
            cfg,
            cluster_cap,
            top,
            buckets: HashMap::new(),
            head: None,
            tail: None,
            size: 0,
            stats: CumulativeStats::default(),
            last: OpMetrics::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn config(&self) -> &SplitConfig {
        &self.cfg
    }

    /// Metrics of the most recent operation.
    pub fn last_metrics(&self) -> OpMetrics {
        self.last
    }

    pub fn cumulative(&self) -> CumulativeStats {
        self.stats
    }

    pub fn reset_stats(&mut self) {
        let rebuilds = self.stats.rebuilds;
        self.stats = CumulativeStats { rebuilds, ..Default::default() };
    }

    fn check_key(&self, key: u64) {
        assert!(self.cfg.w == 64 || key < (1u64 << self.cfg.w), "key outside 2^w universe");
    }

    fn record(&mut self, gauge: &DepthGauge, probes: u32, rebuilt: bool) {
        let levels = gauge.levels();
        debug_assert!(levels <= depth_bound(self.cfg.p), "depth bound violated");
        self.last = OpMetrics {
            veb_levels_touched: levels,
            bucket_probes: probes,
            rebuild_triggered: rebuilt,
        };
        self.stats.ops += 1;
        self.stats.sum_levels += levels as u64;
        self.stats.max_levels = self.stats.max_levels.max(levels);
        self.stats.sum_bucket_probes += probes as u64;
        self.stats.max_bucket_probes = self.stats.max_bucket_probes.max(probes);
    }

    pub fn insert(&mut self, key: u64) -> bool {
        self.check_key(key);
        let mut gauge = DepthGauge::default();
        let (q, low) = split_key(key, self.cfg.p, self.cfg.w);
        let changed = if let Some(b) = self.buckets.get_mut(&q) {
            b.insert(low)
        } else {
            self.top.insert(q, &mut gauge);
            let prev = self.top.predecessor(q, &mut gauge);
            let next = self.top.successor(q, &mut gauge);
            let mut b = Bucket::new(q, low);
            b.prev = prev;
            b.next = next;
            match prev {
                Some(pq) => self.buckets.get_mut(&pq).unwrap().next = Some(q),
                None => self.head = Some(q),
            }
            match next {
                Some(nq) => self.buckets.get_mut(&nq).unwrap().prev = Some(q),
                None => self.tail = Some(q),
            }
            self.buckets.insert(q, b);
            true
        };
        let mut rebuilt = false;
        if changed {
            self.size += 1;
            if self.cfg.note_modification() {
                self.rebuild();
                rebuilt = true;
            }
        }
        self.record(&gauge, 0, rebuilt);
        changed
    }

    pub fn delete(&mut self, key: u64) -> bool {
        self.check_key(key);
        let mut gauge = DepthGauge::default();
        let (q, low) = split_key(key, self.cfg.p, self.cfg.w);
        let Some(b) = self.buckets.get_mut(&q) else {
            self.record(&gauge, 0, false);
            return false;
        };
        let changed = b.remove(low);
        let mut rebuilt = false;
        if changed {
            self.size -= 1;
            if b.is_empty() {
                let (prev, next) = (b.prev, b.next);
                self.buckets.remove(&q);
                match prev {
                    Some(pq) => self.buckets.get_mut(&pq).unwrap().next = next,
                    None => self.head = next,
                }
                match next {
                    Some(nq) => self.buckets.get_mut(&nq).unwrap().prev = prev,
                    None => self.tail = prev,
                }
                self.top.remove(q, &mut gauge);
            }
            if self.cfg.note_modification() {
                self.rebuild();
                rebuilt = true;
            }
        }
        self.record(&gauge, 0, rebuilt);
        changed
    }

    pub fn contains(&self, key: u64) -> bool {
        let (q, low) = split_key(key, self.cfg.p, self.cfg.w);
        self.buckets.get(&q).is_some_and(|b| b.contains(low))
    }

    /// Largest stored key strictly less than `x`.
    pub fn predecessor(&mut self, x: u64) -> Option<u64> {
        self.check_key(x);
        let mut gauge = DepthGauge::default();
        let mut probes = 0u32;
        let (q, low) = split_key(x, self.cfg.p, self.cfg.w);
        let low_bits = (self.cfg.w - self.cfg.p) as u64;
        let result = (|| {
            if let Some(b) = self.buckets.get(&q) {
                if let Some(y) = b.predecessor(low, &mut probes) {
                    return Some((q << low_bits) | y);
                }
            }
            let qp = self.top.predecessor(q, &mut gauge)?;
            Some((qp << low_bits) | self.buckets[&qp].max())
        })();
        self.record(&gauge, probes, false);
        result
    }

    /// Smallest stored key strictly greater than `x`.
    pub fn successor(&mut self, x: u64) -> Option<u64> {
        self.check_key(x);
        let mut gauge = DepthGauge::default();
        let mut probes = 0u32;
        let (q, low) = split_key(x, self.cfg.p, self.cfg.w);
        let low_bits = (self.cfg.w - self.cfg.p) as u64;
        let result = (|| {
            if let Some(b) = self.buckets.get(&q) {
                if let Some(y) = b.successor(low, &mut probes) {
                    return Some((q << low_bits) | y);
                }
            }
            let qs = self.top.successor(q, &mut gauge)?;
            Some((qs << low_bits) | self.buckets[&qs].min())
        })();
        self.record(&gauge, probes, false);
        result
    }

    /// All stored keys in ascending order, via the bucket list.
    pub fn collect(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.size);
        let low_bits = (self.cfg.w - self.cfg.p) as u64;
        let mut cur = self.head;
        while let Some(q) = cur {
            let b = &self.buckets[&q];
            for &low in b.lows() {
                out.push((q << low_bits) | low);
            }
            cur = b.next;
        }
        out
    }

    /// Full rebuild: adopt the current size as `n0`, recompute `p`, and
    /// re-split every key in one ordered sweep. Membership is unchanged.
    pub fn rebuild(&mut self) -> u32 {
        let keys = self.collect();
        self.cfg.reset_after_rebuild(keys.len());
        let p = self.cfg.p;
        self.top = match self.cluster_cap {
            Some(c) => ClusteredVeb::with_capacity(p, c),
            None => ClusteredVeb::new(p),
        };
        self.buckets = HashMap::new();
        self.head = None;
        self.tail = None;
        let mut gauge = DepthGauge::default();
        let mut prev_prefix: Option<u64> = None;
        for key in keys {
            let (q, low) = split_key(key, p, self.cfg.w);
            match prev_prefix {
                Some(pq) if pq == q => {
                    self.buckets.get_mut(&q).unwrap().insert(low);
                }
                _ => {
                    self.top.insert(q, &mut gauge);
                    let mut b = Bucket::new(q, low);
                    b.prev = prev_prefix;
                    if let Some(pq) = prev_prefix {
                        self.buckets.get_mut(&pq).unwrap().next = Some(q);
                    } else {
                        self.head = Some(q);
                    }
                    self.buckets.insert(q, b);
                    self.tail = Some(q);
                    prev_prefix = Some(q);
                }
            }
        }
        self.stats.rebuilds += 1;
        p
    }

    pub fn stats(&self) -> SpaceTimeReport {
        let mut sizes: Vec<usize> = self.buckets.values().map(|b| b.len()).collect();
        sizes.sort_unstable();
        let mut hist: Vec<(usize, usize)> = Vec::new();
        for &s in &sizes {
            match hist.last_mut() {
                Some((v, c)) if *v == s => *c += 1,
                _ => hist.push((s, 1)),
            }
        }
        let max_bucket = sizes.last().copied().unwrap_or(0);
        let p99_bucket = if sizes.is_empty() {
            0
        } else {
            sizes[(sizes.len() * 99).div_ceil(100).saturating_sub(1).min(sizes.len() - 1)]
        };
        let mean_bucket = if sizes.is_empty() {
            0.0
        } else {
            self.size as f64 / sizes.len() as f64
        };
        let entries = self.top.directory_nodes()
            + self.top.directory_entries()
            + self.top.len()
            + self.top.cluster_count()
            + self.buckets.len()
            + self.size;
        SpaceTimeReport {
            size: self.size,
            p: self.cfg.p,
            n0: self.cfg.n0,
            bucket_hist: hist,
            mean_bucket,
            max_bucket,
            p99_bucket,
            mean_levels: self.stats.mean_levels(),
            max_levels: self.stats.max_levels,
            rebuilds: self.stats.rebuilds,
            entries: if self.size == 0 { 0 } else { entries },
            entries_per_key: if self.size == 0 { 0.0 } else { entries as f64 / self.size as f64 },
        }
    }

    /// Panics if any cross-layer invariant is broken. Test helper.
    pub fn assert_consistent(&self) {
        self.top.assert_consistent();
        let prefixes = self.top.collect();
        assert_eq!(prefixes.len(), self.buckets.len(), "top/bucket-map size mismatch");
        let mut total = 0usize;
        let mut cur = self.head;
        let mut walked = Vec::new();
        let mut prev: Option<u64> = None;
        while let Some(q) = cur {
            let b = &self.buckets[&q];
            assert!(!b.is_empty(), "empty bucket retained");
            assert_eq!(b.prefix, q);
            assert_eq!(b.prev, prev, "broken prev link at prefix {q}");
            if let Some(pq) = prev {
                assert!(pq < q, "bucket list out of order");
            }
            assert!(b.lows().windows(2).all(|w| w[0] < w[1]), "bucket not strictly sorted");
            total += b.len();
            walked.push(q);
            prev = Some(q);
            cur = b.next;
        }
        assert_eq!(prev, self.tail, "tail mismatch");
        assert_eq!(walked, prefixes, "linked list diverges from top membership");
        assert_eq!(total, self.size, "size out of sync");
        // Reverse walk mirrors the forward one.
        let mut back = Vec::new();
        let mut cur = self.tail;
        while let Some(q) = cur {
            back.push(q);
            cur = self.buckets[&q].prev;
        }
        back.reverse();
        assert_eq!(back, walked, "reverse traversal mismatch");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    #[test]
    fn first_insert_builds_one_bucket() {
        let mut s = LayeredSet::new(64, None);
        assert!(s.insert(5));
        assert_eq!(s.len(), 1);
        assert!(s.contains(5));
        s.assert_consistent();
        assert!(!s.insert(5), "duplicate must be a no-op");
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn delete_to_empty() {
        let mut s = LayeredSet::new(64, None);
        s.insert(5);
        assert!(s.delete(5));
        assert!(s.is_empty());
        s.assert_consistent();
        assert!(!s.delete(5));
    }

    #[test]
    fn predecessor_shared_prefix_and_straddle() {
        // w=16, unknown params: tiny set keeps p small so 5 and 9 share a prefix.
        let mut s = LayeredSet::new(16, None);
        s.insert(5);
        s.insert(9);
        assert_eq!(s.predecessor(9), Some(5));
        assert_eq!(s.successor(5), Some(9));
        assert_eq!(s.predecessor(5), None);
        assert_eq!(s.successor(9), None);
    }

    #[test]
    fn exhaustive_w16_boundaries() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut s = LayeredSet::new(16, Some(SmoothParams::new(1.0, 1.0)));
        let mut oracle = BTreeSet::new();
        for _ in 0..400 {
            let k = rng.random_range(0..1u64 << 16);
            assert_eq!(s.insert(k), oracle.insert(k));
        }
        s.assert_consistent();
        for x in 0..1u64 << 16 {
            assert_eq!(s.predecessor(x), oracle.range(..x).next_back().copied(), "pred({x})");
            assert_eq!(s.successor(x), oracle.range(x + 1..).next().copied(), "succ({x})");
        }
    }

    #[test]
    fn interleaved_ops_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = LayeredSet::new(64, None);
        let mut oracle = BTreeSet::new();
        for step in 0..100_000u64 {
            let k = rng.random::<u64>();
            match rng.random_range(0..4u32) {
                0 | 1 => assert_eq!(s.insert(k), oracle.insert(k)),
                2 => {
                    // Delete something actually present half the time.
                    let victim = if rng.random_bool(0.5) {
                        oracle.iter().next().copied().unwrap_or(k)
                    } else {
                        k
                    };
                    assert_eq!(s.delete(victim), oracle.remove(&victim));
                }
                _ => assert_eq!(s.predecessor(k), oracle.range(..k).next_back().copied()),
            }
            if step % 9973 == 0 {
                s.assert_consistent();
            }
        }
        assert_eq!(s.collect(), oracle.iter().copied().collect::<Vec<_>>());
    }

    #[test]
    fn rebuild_is_transparent() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut s = LayeredSet::new(64, Some(SmoothParams::new(1.0, 1.0)));
        let mut oracle = BTreeSet::new();
        for _ in 0..100 {
            let k = rng.random::<u64>();
            s.insert(k);
            oracle.insert(k);
        }
        let before = s.collect();
        let p_before = s.config().p;
        s.rebuild();
        assert_eq!(s.collect(), before);
        s.assert_consistent();
        let _ = p_before;
        for _ in 0..1000 {
            let x = rng.random::<u64>();
            assert_eq!(s.predecessor(x), oracle.range(..x).next_back().copied());
        }
    }

    #[test]
    fn rebuild_on_empty() {
        let mut s = LayeredSet::new(64, None);
        let p = s.rebuild();
        assert_eq!(p, crate::split::split_width(None, 0, 64));
        assert!(s.is_empty());
        let report = s.stats();
        assert_eq!(report.size, 0);
        assert_eq!(report.entries, 0);
    }

    #[test]
    fn growth_raises_p_and_keeps_buckets_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut s = LayeredSet::new(64, Some(SmoothParams::new(1.0, 1.0)));
        let mut seen_p = Vec::new();
        for _ in 0..4096 {
            s.insert(rng.random::<u64>());
            seen_p.push(s.config().p);
        }
        assert!(seen_p.last().unwrap() > seen_p.first().unwrap(), "p never grew");
        let report = s.stats();
        assert!(report.mean_bucket <= 2.0, "mean bucket {}", report.mean_bucket);
        s.assert_consistent();
    }

    #[test]
    fn depth_bound_holds_per_operation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut s = LayeredSet::new(64, None);
        for _ in 0..20_000 {
            let k = rng.random::<u64>();
            match rng.random_range(0..3u32) {
                0 => {
                    s.insert(k);
                }
                1 => {
                    s.delete(k);
                }
                _ => {
                    s.predecessor(k);
                }
            }
            let m = s.last_metrics();
            assert!(
                m.veb_levels_touched <= depth_bound(s.config().p),
                "levels {} > bound at p={}",
                m.veb_levels_touched,
                s.config().p
            );
        }
    }
}
