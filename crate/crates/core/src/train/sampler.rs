use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chem::Category;
use crate::error::{Error, Result};

/// Draws batches with an equal number of samples from every category pool,
/// uniformly with replacement inside each pool.
#[derive(Debug, Clone)]
pub struct BalancedSampler {
    pools: Vec<(Category, usize)>,
    per_category: usize,
    rng: ChaCha8Rng,
}

impl BalancedSampler {
    /// `pools` lists each category with its pool size.
    pub fn new(pools: Vec<(Category, usize)>, batch_size: usize, seed: u64) -> Result<Self> {
        if pools.is_empty() {
            return Err(Error::InvalidArgument("no category pools".into()));
        }
        if let Some((c, _)) = pools.iter().find(|p| p.1 == 0) {
            return Err(Error::EmptyPool(c.name().into()));
        }
        if batch_size == 0 || !batch_size.is_multiple_of(pools.len()) {
            return Err(Error::InvalidArgument(format!(
                "batch size {batch_size} is not a positive multiple of {} categories",
                pools.len()
            )));
        }
        Ok(Self {
            per_category: batch_size / pools.len(),
            pools,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// `(category, index within its pool)` pairs, grouped by category in pool
    /// order.
    pub fn next_batch(&mut self) -> Vec<(Category, usize)> {
        let mut batch = Vec::with_capacity(self.per_category * self.pools.len());
        for &(c, n) in &self.pools {
            for _ in 0..self.per_category {
                batch.push((c, self.rng.gen_range(0..n)));
            }
        }
        batch
    }
}

impl Iterator for BalancedSampler {
    type Item = Vec<(Category, usize)>;

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_batch())
    }
}
