//! Key arithmetic, split-width policy, and rebuild scheduling.
//!
//! Keys are unsigned integers of exactly `w` bits (`w <= 64`). The top-level
//! structure cuts each key into a `p`-bit prefix and a `(w - p)`-bit suffix;
//! this module decides `p` and when to refresh it.

/// Smoothness parameters of the input distribution, both strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothParams {
    pub alpha: f64,
    pub delta: f64,
}

impl SmoothParams {
    pub fn new(alpha: f64, delta: f64) -> Self {
        assert!(alpha > 0.0 && delta > 0.0, "smooth parameters must be positive");
        SmoothParams { alpha, delta }
    }
}

/// How many of the most significant bits to split away, given the set size
/// at the last rebuild.
///
/// With known parameters this is `(alpha/delta) * log2(n0)` bits; without
/// them, `log2(n0)^2` bits. Either way the result is clamped to `[1, w]`,
/// and sizes below 2 are treated as 2 so the logs stay defined.
pub fn split_width(params: Option<SmoothParams>, n0: usize, w: u32) -> u32 {
    debug_assert!((1..=64).contains(&w));
    let log_n = (n0.max(2) as f64).log2();
    let bits = match params {
        Some(sp) => (sp.alpha / sp.delta * log_n).ceil(),
        None => (log_n * log_n).ceil(),
    };
    // f64 -> u32 saturates, so huge widths just cap at w.
    (bits as u32).clamp(1, w)
}

/// Split a `w`-bit key into its `p`-bit prefix and `(w - p)`-bit suffix.
#[inline]
pub fn split_key(key: u64, p: u32, w: u32) -> (u64, u64) {
    debug_assert!(p >= 1 && p <= w && w <= 64);
    debug_assert!(w == 64 || key < (1u64 << w));
    let low_bits = w - p;
    (key >> low_bits, key & low_mask(low_bits))
}

/// Reassemble a key from the parts produced by [`split_key`].
#[inline]
pub fn join_key(prefix: u64, low: u64, p: u64, w: u64) -> u64 {
    (prefix << (w - p)) | low
}

#[inline]
fn low_mask(bits: u32) -> u64 {
    if bits == 0 {
        0
    } else {
        u64::MAX >> (64 - bits)
    }
}

/// Per-instance split configuration and rebuild bookkeeping.
#[derive(Clone, Debug)]
pub struct SplitConfig {
    /// Key width in bits.
    pub w: u32,
    /// Declared smoothness parameters, if known.
    pub params: Option<SmoothParams>,
    /// Current prefix width, fixed between rebuilds.
    pub p: u32,
    /// Set size at the last rebuild.
    pub n0: usize,
    /// Successful modifications since the last rebuild.
    pub mods_since_rebuild: usize,
}

impl SplitConfig {
    pub fn new(w: u32, params: Option<SmoothParams>) -> Self {
        assert!((1..=64).contains(&w), "key width must be in 1..=64");
        SplitConfig {
            w,
            params,
            p: split_width(params, 0, w),
            n0: 0,
            mods_since_rebuild: 0,
        }
    }

    /// Modifications tolerated before a rebuild fires: `ceil(n0 / 4)`, at
    /// least 1 so empty and tiny structures still adopt a fresh `p`.
    pub fn rebuild_threshold(&self) -> usize {
        self.n0.div_ceil(4).max(1)
    }

    /// Count one successful insert or delete. Returns true when a rebuild
    /// is due.
    pub fn note_modification(&mut self) -> bool {
        self.mods_since_rebuild += 1;
        self.mods_since_rebuild >= self.rebuild_threshold()
    }

    /// Adopt the current size as `n0` and recompute the prefix width.
    pub fn reset_after_rebuild(&mut self, n: usize) {
        self.n0 = n;
        self.p = split_width(self.params, n, self.w);
        self.mods_since_rebuild = 0;
    }
}

/// Counters recorded for a single operation on the layered structure.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpMetrics {
    /// Deepest trie descent during the operation (max over all traversals).
    pub veb_levels_touched: u32,
    /// Binary-search probes inside buckets.
    pub bucket_probes: u32,
    /// Whether this operation triggered a full rebuild.
    pub rebuild_triggered: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_width_known_params() {
        assert_eq!(split_width(Some(SmoothParams::new(1.0, 1.0)), 1024, 64), 10);
        assert_eq!(split_width(Some(SmoothParams::new(2.0, 1.0)), 1 << 40, 64), 64);
    }

    #[test]
    fn split_width_unknown_params() {
        assert_eq!(split_width(None, 256, 64), 64);
        assert_eq!(split_width(None, 0, 64), 1);
    }

    #[test]
    fn split_width_monotone_and_bounded() {
        for &params in &[None, Some(SmoothParams::new(0.5, 1.0)), Some(SmoothParams::new(2.0, 0.5))] {
            for w in [8u32, 16, 64] {
                let mut prev = 0;
                for n0 in 0..5000 {
                    let p = split_width(params, n0, w);
                    assert!((1..=w).contains(&p));
                    assert!(p >= prev, "split_width not monotone at n0={n0}");
                    prev = p;
                }
            }
        }
    }

    #[test]
    fn known_params_at_most_unknown_when_ratio_small() {
        let sp = SmoothParams::new(1.0, 1.0);
        for n0 in 2..4096 {
            assert!(split_width(Some(sp), n0, 64) <= split_width(None, n0, 64));
        }
    }

    #[test]
    fn split_key_examples() {
        assert_eq!(split_key(0xFF00_0000_0000_0000, 8, 64), (0xFF, 0));
        assert_eq!(split_key(0, 10, 64), (0, 0));
        assert_eq!(split_key((1 << 63) + 5, 1, 64), (1, 5));
        // p == w: the whole key is prefix
        assert_eq!(split_key(0xAB, 8, 8), (0xAB, 0));
    }

    #[test]
    fn split_key_roundtrip() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let w = rng.random_range(1..=64u32);
            let p = rng.random_range(1..=w);
            let key = if w == 64 { rng.random() } else { rng.random::<u64>() & ((1 << w) - 1) };
            let (hi, lo) = split_key(key, p, w);
            assert!(w == p || lo < (1u64 << (w - p)));
            assert!(p == 64 || hi < (1u64 << p));
            assert_eq!(join_key(hi, lo, p as u64, w as u64), key);
        }
    }

    #[test]
    fn rebuild_counter() {
        let mut cfg = SplitConfig::new(64, None);
        cfg.n0 = 100;
        cfg.mods_since_rebuild = 24;
        assert!(cfg.note_modification());

        cfg.mods_since_rebuild = 0;
        assert!(!cfg.note_modification());

        let mut fresh = SplitConfig::new(64, None);
        assert_eq!(fresh.n0, 0);
        assert!(fresh.note_modification());
    }
}
