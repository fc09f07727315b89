/// Binary sum tree over non-negative weights: O(log n) update and
/// proportional sampling.
#[derive(Debug, Clone)]
pub struct RateTree {
    len: usize,
    base: usize,
    nodes: Vec<f64>,
}

impl RateTree {
    pub fn new(len: usize) -> Self {
        let base = len.next_power_of_two().max(1);
        Self {
            len,
            base,
            nodes: vec![0.0; 2 * base],
        }
    }

    pub fn from_weights(weights: impl IntoIterator<Item = f64>) -> Self {
        let weights: Vec<f64> = weights.into_iter().collect();
        let mut tree = Self::new(weights.len());
        tree.nodes[tree.base..tree.base + weights.len()].copy_from_slice(&weights);
        for i in (1..tree.base).rev() {
            tree.nodes[i] = tree.nodes[2 * i] + tree.nodes[2 * i + 1];
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> f64 {
        self.nodes[self.base + i]
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.nodes[1]
    }

    /// Parents are recomputed from their children, so rounding error never
    /// accumulates across updates.
    #[inline]
    pub fn set(&mut self, i: usize, w: f64) {
        debug_assert!(w >= 0.0 && w.is_finite());
        let mut node = self.base + i;
        if self.nodes[node] == w {
            return;
        }
        self.nodes[node] = w;
        while node > 1 {
            node >>= 1;
            self.nodes[node] = self.nodes[2 * node] + self.nodes[2 * node + 1];
        }
    }

    /// Index `i` with probability `w_i / total`, given `u` uniform in `[0, 1)`.
    /// Returns `None` when the total weight is zero.
    pub fn sample(&self, u: f64) -> Option<usize> {
        if self.total() <= 0.0 {
            return None;
        }
        let mut target = u * self.total();
        let mut node = 1;
        while node < self.base {
            let left = self.nodes[2 * node];
            if target < left || self.nodes[2 * node + 1] <= 0.0 {
                node *= 2;
            } else {
                target -= left;
                node = 2 * node + 1;
            }
        }
        let i = node - self.base;
        // Rounding can land on an empty leaf only at the very edge of a bucket.
        if self.nodes[node] > 0.0 {
            Some(i)
        } else {
            (0..self.len).rev().find(|&j| self.get(j) > 0.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sums_and_samples() {
        let mut t = RateTree::from_weights([1.0, 0.0, 2.0, 1.0, 0.0]);
        assert_eq!(t.total(), 4.0);
        assert_eq!(t.sample(0.0), Some(0));
        assert_eq!(t.sample(0.26), Some(2));
        assert_eq!(t.sample(0.74), Some(2));
        assert_eq!(t.sample(0.76), Some(3));
        assert_eq!(t.sample(0.999_999), Some(3));
        t.set(2, 0.0);
        assert_eq!(t.total(), 2.0);
        assert_eq!(t.sample(0.6), Some(3));
        t.set(0, 0.0);
        t.set(3, 0.0);
        assert_eq!(t.sample(0.5), None);
    }

    #[test]
    fn never_returns_empty_leaf() {
        let w: Vec<f64> = (0..37).map(|i| if i % 3 == 0 { 0.1 * i as f64 } else { 0.0 }).collect();
        let t = RateTree::from_weights(w.clone());
        for s in 0..=1000 {
            let u = (s as f64 / 1000.0).min(1.0 - f64::EPSILON);
            let i = t.sample(u).unwrap();
            assert!(w[i] > 0.0);
        }
    }
}
