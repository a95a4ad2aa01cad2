//! Seeded random tensors.
//!
//! Generation uses `ChaCha8Rng::seed_from_u64(seed)` from `rand_chacha`, with
//! indices drawn uniformly per mode and values uniform in `[0, 1)`, so a seed
//! names the same tensor on every platform.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ordering::Ordering;
use crate::sorting::{transpose_in_place, SortStrategy, TransposeOptions, Workspace};
use crate::tensor::CooTensor;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DuplicatePolicy {
    #[default]
    Allow,
    /// Resample until every coordinate is unique.
    Distinct,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenSpec {
    pub dims: Vec<usize>,
    pub nnz: usize,
    pub seed: u64,
    pub duplicates: DuplicatePolicy,
}

impl GenSpec {
    pub fn new(dims: Vec<usize>, nnz: usize, seed: u64) -> Self {
        GenSpec { dims, nnz, seed, duplicates: DuplicatePolicy::Allow }
    }

    pub fn distinct(mut self) -> Self {
        self.duplicates = DuplicatePolicy::Distinct;
        self
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }
}

/// Uniform random tensor, sorted to the simple ordering.
pub fn generate(spec: &GenSpec) -> Result<CooTensor> {
    let r = spec.rank();
    if r == 0 || spec.dims.contains(&0) {
        return Err(Error::invalid("dimensions must be non-empty and positive"));
    }
    if let Some(&n) = spec.dims.iter().find(|&&n| n > u32::MAX as usize + 1) {
        return Err(Error::invalid(format!("dimension {n} exceeds 32-bit indexing")));
    }
    if spec.duplicates == DuplicatePolicy::Distinct {
        let cells = spec
            .dims
            .iter()
            .try_fold(1u128, |acc, &n| acc.checked_mul(n as u128))
            .unwrap_or(u128::MAX);
        if spec.nnz as u128 > cells {
            return Err(Error::invalid(format!(
                "{} distinct nonzeros do not fit in {cells} cells",
                spec.nnz
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut coords = Vec::with_capacity(spec.nnz * r);
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut row = vec![0u32; r];
    while coords.len() < spec.nnz * r {
        for (slot, &n) in row.iter_mut().zip(&spec.dims) {
            *slot = rng.random_range(0..n as u64) as u32;
        }
        if spec.duplicates == DuplicatePolicy::Distinct && !seen.insert(row.clone()) {
            continue;
        }
        coords.extend_from_slice(&row);
    }
    let values = (0..spec.nnz).map(|_| rng.random::<f64>()).collect();

    let mut tensor = CooTensor::new(spec.dims.clone(), coords, values)?;
    transpose_in_place(
        &mut tensor,
        &Ordering::simple(r),
        SortStrategy::FullRadix,
        &TransposeOptions::default(),
        &mut Workspace::new(),
    )?;
    Ok(tensor)
}
