//! Seeded sampling; every random experiment goes through here so that runs
//! are reproducible from a single `u64`.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::setops::ElemSet;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random `k`-subset (all of `pool` when `k ≥ |pool|`).
pub fn random_subset(pool: &ElemSet, k: usize, rng: &mut Rng) -> ElemSet {
    let k = k.min(pool.len());
    let items = pool.as_slice();
    ElemSet::from_iter(pool.group(), sample(rng, items.len(), k).into_iter().map(|i| items[i]))
}

/// Independent seed for sub-experiment `i` derived from a master seed.
pub fn derive_seed(master: u64, i: u64) -> u64 {
    // splitmix64 step
    let mut z = master.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgrp::SlGroup;

    #[test]
    fn subsets_are_reproducible() {
        let g = SlGroup::new(2, 7).unwrap();
        let all = g.enumerate(crate::DEFAULT_BUDGET).unwrap();
        let a = random_subset(&all, 40, &mut rng(5));
        let b = random_subset(&all, 40, &mut rng(5));
        assert_eq!(a, b);
        assert_eq!(a.len(), 40);
        assert!(a.is_subset(&all));
        assert_eq!(random_subset(&all, 10_000, &mut rng(1)).len(), all.len());
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
    }
}
