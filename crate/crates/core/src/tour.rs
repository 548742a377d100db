//! Directed Hamiltonian cycles with cached length.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::tsplib::TspInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TourError {
    DimensionMismatch { tour: usize, instance: usize },
    NotAPermutation,
    IndexOutOfRange { index: usize, dimension: usize },
}

impl fmt::Display for TourError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { tour, instance } => {
                write!(f, "tour has {tour} cities but the instance has {instance}")
            }
            Self::NotAPermutation => f.write_str("city order is not a permutation"),
            Self::IndexOutOfRange { index, dimension } => {
                write!(f, "index {index} out of range for dimension {dimension}")
            }
        }
    }
}

impl std::error::Error for TourError {}

/// A tour over `k` cities, stored as visiting order plus its inverse.
///
/// Tours are directed: `[0, 1, 2, 3]` and `[0, 3, 2, 1]` have the same
/// length but different successor functions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tour {
    order: Vec<u32>,
    position: Vec<u32>,
    length: u64,
}

impl Tour {
    pub fn new(order: Vec<usize>, inst: &TspInstance) -> Result<Self, TourError> {
        let k = order.len();
        if k != inst.dimension() {
            return Err(TourError::DimensionMismatch {
                tour: k,
                instance: inst.dimension(),
            });
        }
        let mut position = vec![u32::MAX; k];
        for (p, &city) in order.iter().enumerate() {
            if city >= k || position[city] != u32::MAX {
                return Err(TourError::NotAPermutation);
            }
            position[city] = p as u32;
        }
        let order: Vec<u32> = order.into_iter().map(|c| c as u32).collect();
        let mut tour = Tour {
            order,
            position,
            length: 0,
        };
        tour.length = tour.recompute_length(inst);
        Ok(tour)
    }

    /// Uniformly random tour.
    pub fn random<R: Rng + ?Sized>(inst: &TspInstance, rng: &mut R) -> Self {
        let mut order: Vec<usize> = (0..inst.dimension()).collect();
        order.shuffle(rng);
        Tour::new(order, inst).expect("shuffled identity is a permutation")
    }

    pub fn dimension(&self) -> usize {
        self.order.len()
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn order(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.order.iter().map(|&c| c as usize)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.order().collect()
    }

    #[inline]
    pub fn city_at(&self, pos: usize) -> usize {
        self.order[pos] as usize
    }

    #[inline]
    pub fn position_of(&self, city: usize) -> usize {
        self.position[city] as usize
    }

    /// The city visited right after `city` (wrapping at the end).
    #[inline]
    pub fn successor(&self, city: usize) -> usize {
        let k = self.order.len();
        let p = self.position[city] as usize + 1;
        self.order[if p == k { 0 } else { p }] as usize
    }

    #[inline]
    pub fn predecessor(&self, city: usize) -> usize {
        let p = self.position[city] as usize;
        let q = if p == 0 { self.order.len() - 1 } else { p - 1 };
        self.order[q] as usize
    }

    pub fn checked_successor(&self, city: usize) -> Result<usize, TourError> {
        if city >= self.dimension() {
            return Err(TourError::IndexOutOfRange {
                index: city,
                dimension: self.dimension(),
            });
        }
        Ok(self.successor(city))
    }

    /// Writes the successor of every city into `out` (`out[c] = succ(c)`).
    pub fn successors_into(&self, out: &mut Vec<u32>) {
        let k = self.order.len();
        out.clear();
        out.resize(k, 0);
        for p in 0..k {
            let next = if p + 1 == k { 0 } else { p + 1 };
            out[self.order[p] as usize] = self.order[next];
        }
    }

    /// Full recomputation of the cycle length, independent of the cache.
    pub fn cycle_length(&self, inst: &TspInstance) -> Result<u64, TourError> {
        if self.dimension() != inst.dimension() {
            return Err(TourError::DimensionMismatch {
                tour: self.dimension(),
                instance: inst.dimension(),
            });
        }
        Ok(self.recompute_length(inst))
    }

    fn recompute_length(&self, inst: &TspInstance) -> u64 {
        let k = self.order.len();
        (0..k)
            .map(|p| {
                let next = if p + 1 == k { 0 } else { p + 1 };
                inst.dist(self.order[p] as usize, self.order[next] as usize) as u64
            })
            .sum()
    }

    /// True if `order` and `position` are mutually inverse permutations.
    pub fn is_valid(&self) -> bool {
        let k = self.order.len();
        if self.position.len() != k {
            return false;
        }
        let mut seen = vec![false; k];
        for (p, &c) in self.order.iter().enumerate() {
            let c = c as usize;
            if c >= k || seen[c] || self.position[c] as usize != p {
                return false;
            }
            seen[c] = true;
        }
        true
    }

    /// Reverses the cyclic run of positions `from_pos ..= to_pos`
    /// (walking forward, wrapping past the end when `to_pos < from_pos`).
    pub fn invert_segment(
        &mut self,
        from_pos: usize,
        to_pos: usize,
        inst: &TspInstance,
    ) -> Result<(), TourError> {
        let k = self.dimension();
        for index in [from_pos, to_pos] {
            if index >= k {
                return Err(TourError::IndexOutOfRange {
                    index,
                    dimension: k,
                });
            }
        }
        if k != inst.dimension() {
            return Err(TourError::DimensionMismatch {
                tour: k,
                instance: inst.dimension(),
            });
        }
        self.invert(from_pos, to_pos, inst);
        Ok(())
    }

    /// Unchecked [`Tour::invert_segment`].
    pub(crate) fn invert(&mut self, from_pos: usize, to_pos: usize, inst: &TspInstance) {
        let k = self.order.len();
        let span = if to_pos >= from_pos {
            to_pos - from_pos + 1
        } else {
            to_pos + k - from_pos + 1
        };
        if span < 2 {
            return;
        }
        // Reversing the whole cycle, or all but one city, leaves every
        // undirected edge in place.
        if span < k - 1 {
            let before = self.order[if from_pos == 0 { k - 1 } else { from_pos - 1 }] as usize;
            let after = self.order[if to_pos + 1 == k { 0 } else { to_pos + 1 }] as usize;
            let first = self.order[from_pos] as usize;
            let last = self.order[to_pos] as usize;
            let removed = inst.dist(before, first) as u64 + inst.dist(last, after) as u64;
            let added = inst.dist(before, last) as u64 + inst.dist(first, after) as u64;
            self.length = self.length + added - removed;
        }

        let (mut i, mut j) = (from_pos, to_pos);
        for _ in 0..span / 2 {
            let (ci, cj) = (self.order[i], self.order[j]);
            self.order[i] = cj;
            self.order[j] = ci;
            self.position[cj as usize] = i as u32;
            self.position[ci as usize] = j as u32;
            i = if i + 1 == k { 0 } else { i + 1 };
            j = if j == 0 { k - 1 } else { j - 1 };
        }
    }

    /// Overwrites the city order and recomputes everything else.
    pub(crate) fn reset_from_order(&mut self, order: &[u32], inst: &TspInstance) {
        self.order.clear();
        self.order.extend_from_slice(order);
        self.position.resize(order.len(), 0);
        for (p, &c) in order.iter().enumerate() {
            self.position[c as usize] = p as u32;
        }
        self.length = self.recompute_length(inst);
    }

    pub(crate) fn raw_order(&self) -> &[u32] {
        &self.order
    }
}

impl fmt::Display for Tour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.order.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] ({})", self.length)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tsplib::Metric;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn square() -> TspInstance {
        TspInstance::from_coords(
            "sq",
            Metric::Euc2d,
            vec![(0.0, 0.0), (0.0, 10.0), (10.0, 10.0), (10.0, 0.0)],
        )
        .unwrap()
    }

    fn scattered(k: usize, seed: u64) -> TspInstance {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let coords = (0..k)
            .map(|_| (rng.gen_range(0.0..1000.0), rng.gen_range(0.0..1000.0)))
            .collect();
        TspInstance::from_coords("rand", Metric::Euc2d, coords).unwrap()
    }

    #[test]
    fn successor_examples() {
        let inst = square();
        let t = Tour::new(vec![0, 1, 2, 3], &inst).unwrap();
        assert_eq!(t.successor(3), 0);
        let t = Tour::new(vec![0, 2, 1, 3], &inst).unwrap();
        assert_eq!(t.successor(0), 2);
        assert_eq!(t.successor(2), 1);
        assert_eq!(t.predecessor(0), 3);
        assert!(t.checked_successor(4).is_err());
    }

    #[test]
    fn triangle_length() {
        let inst = TspInstance::from_coords(
            "tri",
            Metric::Euc2d,
            vec![(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)],
        )
        .unwrap();
        let t = Tour::new(vec![0, 1, 2], &inst).unwrap();
        assert_eq!(t.length(), 3);
        assert_eq!(t.cycle_length(&inst).unwrap(), 3);
    }

    #[test]
    fn rejects_bad_orders() {
        let inst = square();
        assert_eq!(
            Tour::new(vec![0, 1, 1, 3], &inst).unwrap_err(),
            TourError::NotAPermutation
        );
        assert_eq!(
            Tour::new(vec![0, 1, 2], &inst).unwrap_err(),
            TourError::DimensionMismatch {
                tour: 3,
                instance: 4
            }
        );
        let other = scattered(5, 1);
        let t = Tour::new(vec![0, 1, 2, 3], &inst).unwrap();
        assert!(t.cycle_length(&other).is_err());
    }

    #[test]
    fn invert_inner_segment() {
        let inst = square();
        let mut t = Tour::new(vec![0, 1, 2, 3], &inst).unwrap();
        t.invert_segment(1, 2, &inst).unwrap();
        assert_eq!(t.to_vec(), vec![0, 2, 1, 3]);
        assert_eq!(t.length(), t.cycle_length(&inst).unwrap());
        assert!(t.is_valid());
    }

    #[test]
    fn invert_wrapping_segment() {
        let inst = scattered(6, 3);
        let mut t = Tour::new(vec![0, 1, 2, 3, 4, 5], &inst).unwrap();
        t.invert_segment(4, 1, &inst).unwrap();
        // positions 4,5,0,1 hold 4,5,0,1 -> reversed 1,0,5,4
        assert_eq!(t.to_vec(), vec![5, 4, 2, 3, 1, 0]);
        assert_eq!(t.length(), t.cycle_length(&inst).unwrap());
    }

    #[test]
    fn full_wrap_keeps_length() {
        let inst = scattered(7, 4);
        let mut t = Tour::new(vec![3, 1, 4, 0, 5, 2, 6], &inst).unwrap();
        let before = t.length();
        t.invert_segment(2, 1, &inst).unwrap();
        assert_eq!(t.length(), before);
        assert_eq!(t.cycle_length(&inst).unwrap(), before);
        let reversed: Vec<usize> = t.to_vec();
        let t2 = Tour::new(reversed.into_iter().rev().collect(), &inst).unwrap();
        assert_eq!(t2.length(), before);
    }

    #[test]
    fn invert_out_of_range() {
        let inst = square();
        let mut t = Tour::new(vec![0, 1, 2, 3], &inst).unwrap();
        assert!(t.invert_segment(0, 4, &inst).is_err());
    }

    #[test]
    fn incremental_length_matches_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = scattered(40, 11);
        let mut t = Tour::random(&inst, &mut rng);
        for _ in 0..10_000 {
            let a = rng.gen_range(0..40);
            let b = rng.gen_range(0..40);
            t.invert(a, b, &inst);
            assert_eq!(t.length(), t.cycle_length(&inst).unwrap());
        }
        assert!(t.is_valid());
    }

    proptest! {
        #[test]
        fn inversions_preserve_permutation(
            k in 3usize..30,
            seed in any::<u64>(),
            moves in prop::collection::vec((0usize..1000, 0usize..1000), 1..40),
        ) {
            let inst = scattered(k, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = Tour::random(&inst, &mut rng);
            for (a, b) in moves {
                t.invert_segment(a % k, b % k, &inst).unwrap();
                prop_assert!(t.is_valid());
                prop_assert_eq!(t.length(), t.cycle_length(&inst).unwrap());
            }
            let mut hit = vec![0u32; k];
            for c in 0..k {
                hit[t.successor(c)] += 1;
            }
            prop_assert!(hit.iter().all(|&h| h == 1));
        }

        #[test]
        fn reversal_has_equal_length(k in 3usize..40, seed in any::<u64>()) {
            let inst = scattered(k, seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            let t = Tour::random(&inst, &mut rng);
            let rev = Tour::new(t.to_vec().into_iter().rev().collect(), &inst).unwrap();
            prop_assert_eq!(t.length(), rev.length());
        }
    }
}
