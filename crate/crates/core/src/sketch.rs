//! Bottom-h min-wise sketches over edge positions.
//!
//! Edge positions are hashed through an explicit random permutation of
//! `[0, m)`, so distinct edges never collide. A sketch keeps the `h`
//! smallest permuted values of a set; sketches built under the same
//! permutation can be merged and compared without the underlying sets.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// A seeded bijection on `[0, m)` stored as a lookup table.
///
/// The table is a Fisher-Yates shuffle of the identity driven by
/// `ChaCha8Rng::seed_from_u64(seed)`, so `(seed, m)` fully determines it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationHash {
    seed: u64,
    table: Vec<u32>,
}

impl PermutationHash {
    pub fn new(seed: u64, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParameter("permutation domain must be non-empty".into()));
        }
        if m > u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("permutation domain {m} exceeds 32 bits")));
        }
        let mut table: Vec<u32> = (0..m as u32).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        table.shuffle(&mut rng);
        Ok(PermutationHash { seed, table })
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> u32 {
        self.table.len() as u32
    }
}

/// The `h` smallest distinct values seen, in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BottomHSketch {
    capacity: usize,
    domain: u32,
    values: Vec<u32>,
}

impl BottomHSketch {
    pub fn new(capacity: usize, domain: u32) -> Self {
        BottomHSketch {
            capacity,
            domain,
            values: Vec::with_capacity(capacity),
        }
    }

    /// Sketch of a whole set of already-permuted values.
    pub fn from_values(capacity: usize, domain: u32, values: impl IntoIterator<Item = u32>) -> Self {
        let mut sketch = Self::new(capacity, domain);
        for v in values {
            sketch.insert(v);
        }
        sketch
    }

    #[inline]
    pub fn insert(&mut self, value: u32) {
        debug_assert!(value < self.domain);
        if self.values.len() == self.capacity {
            match self.values.last() {
                Some(&max) if value < max => {}
                _ => return,
            }
        }
        match self.values.binary_search(&value) {
            Ok(_) => {}
            Err(at) => {
                if self.values.len() == self.capacity {
                    self.values.pop();
                }
                self.values.insert(at, value);
            }
        }
    }

    /// `s(A ∪ B)` from `s(A)` and `s(B)`: the `h` smallest of both.
    pub fn union(&self, other: &BottomHSketch) -> Result<BottomHSketch> {
        self.check_compatible(other)?;
        let mut values = Vec::with_capacity(self.capacity);
        let (a, b) = (&self.values, &other.values);
        let (mut i, mut j) = (0, 0);
        while values.len() < self.capacity && (i < a.len() || j < b.len()) {
            let next = match (a.get(i), b.get(j)) {
                (Some(&x), Some(&y)) if x == y => {
                    i += 1;
                    j += 1;
                    x
                }
                (Some(&x), Some(&y)) if x < y => {
                    i += 1;
                    x
                }
                (Some(_), Some(&y)) => {
                    j += 1;
                    y
                }
                (Some(&x), None) => {
                    i += 1;
                    x
                }
                (None, Some(&y)) => {
                    j += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            values.push(next);
        }
        Ok(BottomHSketch {
            capacity: self.capacity,
            domain: self.domain,
            values,
        })
    }

    fn check_compatible(&self, other: &BottomHSketch) -> Result<()> {
        if self.capacity != other.capacity || self.domain != other.domain {
            return Err(Error::InvalidParameter(format!(
                "incompatible sketches: h={} m={} vs h={} m={}",
                self.capacity, self.domain, other.capacity, other.domain
            )));
        }
        Ok(())
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn domain(&self) -> u32 {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Estimated Jaccard distance `1 - |s(A∪B) ∩ s(A) ∩ s(B)| / |s(A∪B)|`.
///
/// Two empty sketches are at distance 1.
pub fn jaccard_estimate(a: &BottomHSketch, b: &BottomHSketch) -> Result<f64> {
    a.check_compatible(b)?;
    // Walk the h smallest values of the union; equal heads are shared.
    let (x, y) = (&a.values, &b.values);
    let (mut i, mut j, mut union, mut shared) = (0, 0, 0usize, 0usize);
    while union < a.capacity && (i < x.len() || j < y.len()) {
        match (x.get(i), y.get(j)) {
            (Some(p), Some(q)) if p == q => {
                shared += 1;
                i += 1;
                j += 1;
            }
            (Some(p), Some(q)) if p < q => i += 1,
            (Some(_), None) => i += 1,
            _ => j += 1,
        }
        union += 1;
    }
    if union == 0 {
        return Ok(1.0);
    }
    Ok(1.0 - shared as f64 / union as f64)
}
