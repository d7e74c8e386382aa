use rand::Rng;

/// Updates between full rebuilds of the prefix sums.
const REBUILD_INTERVAL: usize = 1 << 20;

/// Dynamic discrete distribution over `0..len` backed by a Fenwick tree:
/// `O(log n)` append, point update and proportional sampling.
#[derive(Debug, Clone, Default)]
pub struct WeightedIndex {
    weights: Vec<f64>,
    // 1-based Fenwick array; fenwick[0] is unused.
    fenwick: Vec<f64>,
    total: f64,
    updates: usize,
}

#[inline]
fn lsb(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl WeightedIndex {
    pub fn new() -> Self {
        Self { fenwick: vec![0.0], ..Default::default() }
    }

    pub fn from_weights(weights: &[f64]) -> Self {
        let mut w = Self { weights: weights.to_vec(), ..Self::new() };
        w.rebuild();
        w
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    /// Sum of weights `0..=i`.
    pub fn prefix_sum(&self, i: usize) -> f64 {
        self.fenwick_prefix(i + 1)
    }

    fn fenwick_prefix(&self, mut i: usize) -> f64 {
        let mut s = 0.0;
        while i > 0 {
            s += self.fenwick[i];
            i -= lsb(i);
        }
        s
    }

    /// Appends an item with weight `w` and returns its index.
    pub fn push(&mut self, w: f64) -> usize {
        debug_assert!(w.is_finite() && w > 0.0);
        let i = self.weights.len() + 1;
        // fenwick[i] covers (i - lsb(i), i].
        let covered = self.fenwick_prefix(i - 1) - self.fenwick_prefix(i - lsb(i));
        self.weights.push(w);
        self.fenwick.push(covered + w);
        self.total += w;
        self.bump();
        i - 1
    }

    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(w.is_finite() && w > 0.0);
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut j = i + 1;
        while j < self.fenwick.len() {
            self.fenwick[j] += delta;
            j += lsb(j);
        }
        self.total += delta;
        self.bump();
    }

    fn bump(&mut self) {
        self.updates += 1;
        if self.updates >= REBUILD_INTERVAL {
            self.rebuild();
        }
    }

    fn rebuild(&mut self) {
        let n = self.weights.len();
        self.fenwick.clear();
        self.fenwick.push(0.0);
        self.fenwick.extend_from_slice(&self.weights);
        for i in 1..=n {
            let j = i + lsb(i);
            if j <= n {
                self.fenwick[j] += self.fenwick[i];
            }
        }
        self.total = self.weights.iter().sum();
        self.updates = 0;
    }

    /// Draws index `i` with probability `weight(i) / total()`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        assert!(!self.is_empty(), "sampling from an empty index");
        let n = self.weights.len();
        let mut target = rng.random::<f64>() * self.total;
        let mut pos = 0;
        let mut step = 1 << (usize::BITS - 1 - n.leading_zeros());
        while step > 0 {
            let next = pos + step;
            if next <= n && self.fenwick[next] <= target {
                target -= self.fenwick[next];
                pos = next;
            }
            step >>= 1;
        }
        // Rounding can leave target just past the last prefix.
        pos.min(n - 1)
    }
}
