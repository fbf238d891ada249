//! Reference sorted-array set. Slow and obviously correct; every optimized
//! answer is checked against it.

#[derive(Clone, Debug, Default)]
pub struct Oracle {
    keys: Vec<u64>,
}

impl Oracle {
    pub fn new() -> Self {
        Oracle::default()
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[u64] {
        &self.keys
    }

    pub fn insert(&mut self, key: u64) -> bool {
        match self.keys.binary_search(&key) {
            Ok(_) => false,
            Err(pos) => {
                self.keys.insert(pos, key);
                true
            }
        }
    }

    pub fn remove(&mut self, key: u64) -> bool {
        match self.keys.binary_search(&key) {
            Ok(pos) => {
                self.keys.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    pub fn contains(&self, key: u64) -> bool {
        self.keys.binary_search(&key).is_ok()
    }

    pub fn predecessor(&self, x: u64) -> Option<u64> {
        let pos = self.keys.partition_point(|&k| k < x);
        if pos > 0 {
            Some(self.keys[pos - 1])
        } else {
            None
        }
    }

    pub fn successor(&self, x: u64) -> Option<u64> {
        let pos = self.keys.partition_point(|&k| k <= x);
        self.keys.get(pos).copied()
    }
}
