//! Slice-level sort passes shared by the serial and parallel drivers.
//!
//! Every pass reads rows from `src` and writes the permuted rows to `dst`;
//! values travel with their coordinates.

use crate::error::{Error, Result};
use crate::tensor::compare_rows;

#[inline]
fn key_of(row: &[u32], mode: usize, dim: usize, j: usize) -> Result<usize> {
    let key = row[mode] as usize;
    if key >= dim {
        return Err(Error::DataCorruption(format!(
            "row {j}: index {key} of mode {mode} exceeds dimension {dim}"
        )));
    }
    Ok(key)
}

#[inline]
fn copy_row(rank: usize, src_c: &[u32], src_v: &[f64], from: usize, dst_c: &mut [u32], dst_v: &mut [f64], to: usize) {
    dst_c[to * rank..(to + 1) * rank].copy_from_slice(&src_c[from * rank..(from + 1) * rank]);
    dst_v[to] = src_v[from];
}

pub(crate) fn reset_count(count: &mut Vec<usize>, dim: usize) {
    count.clear();
    count.resize(dim + 1, 0);
}

/// Counts keys into `count[key + 1]`.
pub(crate) fn count_keys(rank: usize, mode: usize, dim: usize, src_c: &[u32], count: &mut [usize]) -> Result<()> {
    for (j, row) in src_c.chunks_exact(rank).enumerate() {
        count[key_of(row, mode, dim, j)? + 1] += 1;
    }
    Ok(())
}

/// Turns `count[key + 1]` tallies into `count[key]` start offsets.
pub(crate) fn prefix_sum(count: &mut [usize]) {
    for i in 1..count.len() {
        count[i] += count[i - 1];
    }
}

/// Stable counting sort of all rows on `mode`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn histogram_pass(
    rank: usize,
    mode: usize,
    dim: usize,
    src_c: &[u32],
    src_v: &[f64],
    dst_c: &mut [u32],
    dst_v: &mut [f64],
    count: &mut Vec<usize>,
) -> Result<()> {
    reset_count(count, dim);
    count_keys(rank, mode, dim, src_c, count)?;
    prefix_sum(count);
    for (j, row) in src_c.chunks_exact(rank).enumerate() {
        let key = row[mode] as usize;
        let to = count[key];
        count[key] += 1;
        copy_row(rank, src_c, src_v, j, dst_c, dst_v, to);
    }
    Ok(())
}

/// Index scratch for one bucketed pass over `n` rows.
pub(crate) struct BucketScratch<'a> {
    pub bucket: &'a mut [usize],
    pub pos: &'a mut [usize],
    pub perm: &'a mut [usize],
}

/// Stable counting sort on `mode` within each run of rows that agree on the
/// `prefix` modes. Requires `src` to be sorted on `prefix`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn bucketed_pass(
    rank: usize,
    prefix: &[usize],
    mode: usize,
    dim: usize,
    src_c: &[u32],
    src_v: &[f64],
    dst_c: &mut [u32],
    dst_v: &mut [f64],
    count: &mut Vec<usize>,
    scratch: BucketScratch<'_>,
) -> Result<()> {
    let n = src_v.len();
    if n == 0 {
        return Ok(());
    }
    let BucketScratch { bucket, pos, perm } = scratch;
    reset_count(count, dim);

    // bucket discovery, fused with counting
    let row = |j: usize| &src_c[j * rank..(j + 1) * rank];
    let mut buckets = 0;
    bucket[0] = 0;
    pos[0] = 0;
    count[key_of(row(0), mode, dim, 0)? + 1] += 1;
    for j in 1..n {
        let (cur, prev) = (row(j), row(j - 1));
        if prefix.iter().any(|&k| cur[k] != prev[k]) {
            buckets += 1;
            pos[buckets] = j;
        }
        bucket[j] = buckets;
        count[key_of(cur, mode, dim, j)? + 1] += 1;
    }

    prefix_sum(count);

    // rows in order of the sorted mode
    for j in 0..n {
        let key = row(j)[mode] as usize;
        perm[count[key]] = j;
        count[key] += 1;
    }

    // scatter back into buckets, which restores the prefix order
    for &from in perm.iter().take(n) {
        let b = bucket[from];
        let to = pos[b];
        pos[b] += 1;
        copy_row(rank, src_c, src_v, from, dst_c, dst_v, to);
    }
    Ok(())
}

/// Reusable buffers for [`sort_rows`].
#[derive(Default, Debug)]
pub(crate) struct RowSortScratch {
    idx: Vec<usize>,
    coords: Vec<u32>,
    values: Vec<f64>,
}

/// Stable comparison sort of rows under the mode priority `priority`, in place.
pub(crate) fn sort_rows(
    rank: usize,
    priority: &[usize],
    coords: &mut [u32],
    values: &mut [f64],
    scratch: &mut RowSortScratch,
) {
    let n = values.len();
    if n < 2 || priority.is_empty() {
        return;
    }
    let RowSortScratch { idx, coords: tmp_c, values: tmp_v } = scratch;
    idx.clear();
    idx.extend(0..n);
    {
        let row = |j: usize| &coords[j * rank..(j + 1) * rank];
        // slice::sort_by is a stable merge sort
        idx.sort_by(|&a, &b| compare_rows(row(a), row(b), priority));
    }
    tmp_c.clear();
    tmp_v.clear();
    for &j in idx.iter() {
        tmp_c.extend_from_slice(&coords[j * rank..(j + 1) * rank]);
        tmp_v.push(values[j]);
    }
    coords.copy_from_slice(tmp_c);
    values.copy_from_slice(tmp_v);
}

/// Start offsets of the maximal runs of rows that agree on the `prefix` modes.
pub(crate) fn run_starts(rank: usize, prefix: &[usize], coords: &[u32], from: usize, to: usize) -> Vec<usize> {
    let row = |j: usize| &coords[j * rank..(j + 1) * rank];
    let mut starts = Vec::new();
    for j in from..to {
        if j == 0 || prefix.iter().any(|&k| row(j)[k] != row(j - 1)[k]) {
            starts.push(j);
        }
    }
    starts
}
