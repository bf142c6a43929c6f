use std::collections::HashMap;
use std::hash::Hash;

/// Counts of every n-gram of orders `1..=max_order` in a sequence.
#[derive(Debug, Clone)]
pub struct NGramProfile<T: Eq + Hash> {
    orders: Vec<HashMap<Vec<T>, u32>>,
}

impl<T: Eq + Hash + Clone> NGramProfile<T> {
    pub fn new(items: &[T], max_order: usize) -> Self {
        let orders = (1..=max_order)
            .map(|n| {
                let mut counts = HashMap::new();
                if items.len() >= n {
                    for w in items.windows(n) {
                        *counts.entry(w.to_vec()).or_insert(0) += 1;
                    }
                }
                counts
            })
            .collect();
        NGramProfile { orders }
    }

    pub fn max_order(&self) -> usize {
        self.orders.len()
    }

    /// Total number of n-grams of order `n`.
    pub fn total(&self, n: usize) -> u64 {
        self.orders[n - 1].values().map(|&c| c as u64).sum()
    }

    /// Clipped overlap with `other` at order `n`.
    pub fn matches(&self, other: &Self, n: usize) -> u64 {
        let (a, b) = (&self.orders[n - 1], &other.orders[n - 1]);
        a.iter().map(|(g, &c)| b.get(g).map_or(0, |&d| c.min(d) as u64)).sum()
    }

    pub fn count(&self, gram: &[T]) -> u32 {
        self.orders
            .get(gram.len().wrapping_sub(1))
            .and_then(|m| m.get(gram))
            .copied()
            .unwrap_or(0)
    }
}
