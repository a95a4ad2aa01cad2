use std::cmp;

use crate::error::{Error, Result};
use crate::ordering::Ordering;

/// A sparse tensor in coordinate format.
///
/// Coordinates are stored row-major in one contiguous `nnz * rank` array of
/// 0-based `u32` indices; `values[j]` belongs to row `j`. Duplicate rows are
/// allowed.
#[derive(Clone, Debug, PartialEq)]
pub struct CooTensor {
    dims: Vec<usize>,
    pub(crate) coords: Vec<u32>,
    pub(crate) values: Vec<f64>,
}

impl CooTensor {
    /// Validates shape and index bounds.
    pub fn new(dims: Vec<usize>, coords: Vec<u32>, values: Vec<f64>) -> Result<Self> {
        let r = dims.len();
        if r == 0 {
            return Err(Error::invalid("tensor rank must be positive"));
        }
        if let Some(k) = dims.iter().position(|&n| n == 0) {
            return Err(Error::invalid(format!("dimension of mode {k} is zero")));
        }
        if coords.len() != values.len() * r {
            return Err(Error::invalid(format!(
                "{} coordinate entries do not form {} rows of rank {r}",
                coords.len(),
                values.len()
            )));
        }
        let t = CooTensor { dims, coords, values };
        t.check_bounds()?;
        Ok(t)
    }

    pub fn from_rows<R: AsRef<[u32]>>(dims: Vec<usize>, rows: &[R], values: Vec<f64>) -> Result<Self> {
        let r = dims.len();
        let mut coords = Vec::with_capacity(rows.len() * r);
        for (j, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != r {
                return Err(Error::invalid(format!("row {j} has {} entries, expected {r}", row.len())));
            }
            coords.extend_from_slice(row);
        }
        if rows.len() != values.len() {
            return Err(Error::invalid(format!(
                "{} rows but {} values",
                rows.len(),
                values.len()
            )));
        }
        CooTensor::new(dims, coords, values)
    }

    pub fn empty(dims: Vec<usize>) -> Result<Self> {
        CooTensor::new(dims, Vec::new(), Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, j: usize) -> &[u32] {
        let r = self.rank();
        &self.coords[j * r..(j + 1) * r]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> {
        self.coords.chunks_exact(self.rank())
    }

    pub fn into_parts(self) -> (Vec<usize>, Vec<u32>, Vec<f64>) {
        (self.dims, self.coords, self.values)
    }

    fn check_bounds(&self) -> Result<()> {
        let r = self.rank();
        for (j, row) in self.coords.chunks_exact(r).enumerate() {
            for (k, (&i, &n)) in row.iter().zip(&self.dims).enumerate() {
                if i as usize >= n {
                    return Err(Error::DataCorruption(format!(
                        "row {j}: index {i} of mode {k} exceeds dimension {n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Whether every adjacent pair of rows is non-decreasing under `ord`.
    pub fn is_sorted_under(&self, ord: &Ordering) -> Result<bool> {
        self.check_rank(ord)?;
        let r = self.rank();
        Ok(self
            .coords
            .chunks_exact(r)
            .zip(self.coords.chunks_exact(r).skip(1))
            .all(|(a, b)| compare_rows(a, b, ord.modes()) != cmp::Ordering::Greater))
    }

    /// Reorders the axes so that new mode `k` is old mode `ord[k]`.
    ///
    /// A tensor sorted under `ord` becomes simply sorted after this.
    pub fn permute_modes(&self, ord: &Ordering) -> Result<CooTensor> {
        self.check_rank(ord)?;
        let m = ord.modes();
        let dims = m.iter().map(|&k| self.dims[k]).collect();
        let coords = self
            .rows()
            .flat_map(|row| m.iter().map(move |&k| row[k]))
            .collect();
        Ok(CooTensor { dims, coords, values: self.values.clone() })
    }

    pub(crate) fn check_rank(&self, ord: &Ordering) -> Result<()> {
        if ord.rank() != self.rank() {
            return Err(Error::invalid(format!(
                "ordering {ord} has rank {}, tensor has rank {}",
                ord.rank(),
                self.rank()
            )));
        }
        Ok(())
    }
}

/// Lexicographic comparison of two coordinate rows, visiting modes in `priority` order.
#[inline]
pub fn compare_rows(a: &[u32], b: &[u32], priority: &[usize]) -> cmp::Ordering {
    for &k in priority {
        match a[k].cmp(&b[k]) {
            cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    cmp::Ordering::Equal
}
