//! Integer partitions in multiplicity form, used to expand the j-th
//! derivative of exp(g(z)) (Faà di Bruno) in the coverage expression.

use crate::error::{Error, Result};
use crate::mathkit::factorial;

/// Largest j accepted by [`enumerate_tj`]; p(30) = 5604.
pub const MAX_PARTITION_ORDER: usize = 30;

/// A partition of j written as counts (N₁, …, N_j): N_q parts of size q, with
/// Σ q·N_q = j. The empty vector is the single partition of 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionVector {
    counts: Vec<u32>,
}

impl PartitionVector {
    /// Validates that `counts` encodes a partition of `counts.len()`.
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        let j = counts.len();
        let total: usize = counts
            .iter()
            .enumerate()
            .map(|(i, &n)| (i + 1) * n as usize)
            .sum();
        if total != j {
            return Err(Error::invalid(format!(
                "{counts:?} is not a partition of {j}"
            )));
        }
        Ok(Self { counts })
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// The integer j being partitioned.
    pub fn order(&self) -> usize {
        self.counts.len()
    }

    /// Σ N_q, the number of parts.
    pub fn parts(&self) -> u32 {
        self.counts.iter().sum()
    }

    /// B = 1 + Σ N_q.
    pub fn b_coefficient(&self) -> u32 {
        1 + self.parts()
    }

    /// A = Π_q (1/N_q!) · ((−1)^q · scale · E_q / q!)^{N_q}, with
    /// `factors[q − 1]` = E_q.
    ///
    /// Panics if fewer than j factors are supplied.
    pub fn a_coefficient(&self, factors: &[f64], scale: f64) -> f64 {
        assert!(
            factors.len() >= self.order(),
            "need {} factors, got {}",
            self.order(),
            factors.len()
        );
        let mut product = 1.0;
        for (i, &n) in self.counts.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let q = i as u32 + 1;
            let sign = if q.is_multiple_of(2) { 1.0 } else { -1.0 };
            let base = sign * scale * factors[i] / factorial(q);
            product *= base.powi(n as i32) / factorial(n);
        }
        product
    }
}

/// All partitions of j, in descending lexicographic order of (N₁, …, N_j).
pub fn enumerate_tj(j: usize) -> Result<Vec<PartitionVector>> {
    if j > MAX_PARTITION_ORDER {
        return Err(Error::invalid(format!(
            "partition order must be <= {MAX_PARTITION_ORDER}, got {j}"
        )));
    }
    let mut out = Vec::new();
    let mut counts = vec![0u32; j];
    descend(1, j, &mut counts, &mut out);
    Ok(out)
}

fn descend(q: usize, remaining: usize, counts: &mut Vec<u32>, out: &mut Vec<PartitionVector>) {
    if remaining == 0 {
        out.push(PartitionVector {
            counts: counts.clone(),
        });
        return;
    }
    if q > counts.len() {
        return;
    }
    for n in (0..=remaining / q).rev() {
        counts[q - 1] = n as u32;
        descend(q + 1, remaining - n * q, counts, out);
    }
    counts[q - 1] = 0;
}
