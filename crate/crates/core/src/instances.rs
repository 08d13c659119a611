//! Seeded random spaces, partitions and functions for property checks and
//! examples.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::condexp::{from_blocks, SpaceFunction};
use crate::measure::{MeasureSpace, PartitionAlgebra, PointKind};

/// Deterministic generator of random test instances.
pub struct InstanceGen {
    rng: ChaCha8Rng,
}

impl InstanceGen {
    pub fn new(seed: u64) -> Self {
        InstanceGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Atom space with `1..=max_points` points and weights in `[0.05, 1]`.
    pub fn space(&mut self, max_points: usize) -> MeasureSpace {
        let n = self.rng.gen_range(1..=max_points.max(1));
        self.space_of(n)
    }

    pub fn space_of(&mut self, n: usize) -> MeasureSpace {
        let weights = (0..n).map(|_| self.rng.gen_range(0.05..1.0)).collect();
        MeasureSpace::with_kind(weights, PointKind::Atom).expect("positive weights")
    }

    /// Partition into `1..=max_blocks` nonempty blocks (fewer if the space
    /// is smaller), points shuffled across blocks.
    pub fn partition(&mut self, space: &MeasureSpace, max_blocks: usize) -> PartitionAlgebra {
        let n = space.len();
        let blocks = self.rng.gen_range(1..=max_blocks.clamp(1, n));
        let mut assignment: Vec<usize> = (0..n)
            .map(|x| {
                if x < blocks {
                    x
                } else {
                    self.rng.gen_range(0..blocks)
                }
            })
            .collect();
        assignment.shuffle(&mut self.rng);
        // Renumber so blocks are labelled by first appearance.
        let mut label = vec![usize::MAX; blocks];
        let mut next = 0;
        for b in assignment.iter_mut() {
            if label[*b] == usize::MAX {
                label[*b] = next;
                next += 1;
            }
            *b = label[*b];
        }
        PartitionAlgebra::new(space, &assignment).expect("every block is used")
    }

    /// Complex values with real and imaginary parts in `[-1, 1]`.
    pub fn complex_function(&mut self, n: usize) -> SpaceFunction {
        SpaceFunction::new(
            (0..n)
                .map(|_| {
                    Complex64::new(self.rng.gen_range(-1.0..1.0), self.rng.gen_range(-1.0..1.0))
                })
                .collect(),
        )
    }

    pub fn real_function(&mut self, n: usize) -> SpaceFunction {
        SpaceFunction::from_real(
            &(0..n)
                .map(|_| self.rng.gen_range(-1.0..1.0))
                .collect::<Vec<_>>(),
        )
    }

    /// Values in `[low, high)`.
    pub fn positive_function(&mut self, n: usize, low: f64, high: f64) -> SpaceFunction {
        SpaceFunction::from_real(
            &(0..n)
                .map(|_| self.rng.gen_range(low..high))
                .collect::<Vec<_>>(),
        )
    }

    /// `𝒜`-measurable complex function.
    pub fn measurable_function(&mut self, partition: &PartitionAlgebra) -> SpaceFunction {
        let per_block = self.complex_function(partition.num_blocks());
        from_blocks(partition, per_block.values())
    }

    /// Zeroes `f` on each block independently with probability `prob`.
    pub fn zero_blocks(
        &mut self,
        partition: &PartitionAlgebra,
        f: &SpaceFunction,
        prob: f64,
    ) -> SpaceFunction {
        let mut out = f.clone();
        for block in partition.blocks() {
            if self.rng.gen_bool(prob) {
                for &x in block {
                    out[x] = Complex64::new(0.0, 0.0);
                }
            }
        }
        out
    }

    pub fn pick<T: Copy>(&mut self, options: &[T]) -> T {
        *options.choose(&mut self.rng).expect("nonempty options")
    }

    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        self.rng.gen_range(low..high)
    }

    pub fn index(&mut self, upper: usize) -> usize {
        self.rng.gen_range(0..upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_well_formed() {
        let mut a = InstanceGen::new(9);
        let mut b = InstanceGen::new(9);
        for _ in 0..50 {
            let s = a.space(64);
            assert_eq!(s, b.space(64));
            let p = a.partition(&s, 16);
            assert_eq!(p, b.partition(&s, 16));
            assert!(p.num_blocks() <= 16);
            assert_eq!(p.block_of(0), 0);
        }
    }
}
