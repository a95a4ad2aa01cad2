#![allow(dead_code)]

use quesadilla::{generate, CooTensor, GenSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The 4-mode worked example, written as 4-digit integers (1-based digits).
pub const GOLDEN_INPUT: [u32; 10] = [1218, 1224, 1274, 1421, 1437, 1456, 1472, 3216, 3283, 3286];
pub const GOLDEN_OUTPUT: [u32; 10] = [1224, 1274, 1218, 1421, 1472, 1456, 1437, 3283, 3216, 3286];

pub fn digits(x: u32) -> [u32; 4] {
    [x / 1000 % 10 - 1, x / 100 % 10 - 1, x / 10 % 10 - 1, x % 10 - 1]
}

pub fn undigits(row: &[u32]) -> u32 {
    row.iter().fold(0, |acc, &d| acc * 10 + d + 1)
}

pub fn golden_tensor() -> CooTensor {
    let rows: Vec<[u32; 4]> = GOLDEN_INPUT.iter().map(|&x| digits(x)).collect();
    let values = (0..rows.len()).map(|j| j as f64).collect();
    CooTensor::from_rows(vec![9, 9, 9, 9], &rows, values).unwrap()
}

pub fn as_numbers(t: &CooTensor) -> Vec<u32> {
    t.rows().map(undigits).collect()
}

/// A random simply ordered tensor whose values are their row positions, so
/// any reordering of equal coordinates shows up in the values.
pub fn random_tensor(rng: &mut ChaCha8Rng, max_nnz: usize, max_dim: usize) -> CooTensor {
    let r = rng.random_range(2..=5);
    let dims: Vec<usize> = (0..r).map(|_| rng.random_range(1..=max_dim)).collect();
    let nnz = rng.random_range(0..=max_nnz);
    let t = generate(&GenSpec::new(dims, nnz, rng.random())).unwrap();
    let (dims, coords, _) = t.into_parts();
    CooTensor::new(dims, coords, (0..nnz).map(|j| j as f64).collect()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
