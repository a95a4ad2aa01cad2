//! Multi-worker partial sorts that reproduce the serial output exactly.
//!
//! Non-bucketed passes split the rows into `P` contiguous chunks, count keys
//! into private histograms, and merge the histograms with an exclusive scan
//! that visits keys in the outer loop and workers in the inner loop. Rows of
//! equal key therefore land in chunk order, which keeps the sort stable.
//!
//! Bucketed passes never move a row outside its bucket, so the rows are cut
//! at bucket boundaries (each bucket goes to the worker whose chunk holds its
//! first row) and every worker runs the serial bucketed kernel on its region.
//! One very large bucket leaves the other workers idle.

use std::env;
use std::sync::Mutex;
use std::thread;

use crate::error::{Error, Result};
use crate::ordering::Ordering;
use crate::plan::{apply_transition, PlanStep};
use crate::sorting::kernels::{self, BucketScratch, RowSortScratch};
use crate::sorting::{partial_sort, sort_buckets, Workspace};
use crate::tensor::CooTensor;

/// Environment variable read by [`ParallelConfig::from_env`].
pub const WORKERS_ENV: &str = "QUESADILLA_WORKERS";

/// How the per-bucket comparison sorts of Top-K are handed out to workers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BucketSchedule {
    /// One bucket at a time.
    #[default]
    Dynamic,
    /// Chunks proportional to the remaining buckets divided by the worker count.
    Guided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParallelConfig {
    workers: usize,
    pub schedule: BucketSchedule,
}

impl ParallelConfig {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::invalid("worker count must be at least 1"));
        }
        Ok(ParallelConfig { workers, schedule: BucketSchedule::default() })
    }

    pub fn with_schedule(mut self, schedule: BucketSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Worker count from `QUESADILLA_WORKERS`, else the available hardware parallelism.
    pub fn from_env() -> Result<Self> {
        match env::var(WORKERS_ENV) {
            Ok(v) => {
                let n = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::invalid(format!("{WORKERS_ENV}={v:?} is not a count")))?;
                ParallelConfig::new(n)
            }
            Err(_) => ParallelConfig::new(thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

fn chunk_bounds(n: usize, parts: usize) -> Vec<usize> {
    (0..=parts).map(|w| w * n / parts).collect()
}

/// Raw output pointers shared by the scatter workers. Every worker writes a
/// disjoint set of rows, fixed by the exclusive scan.
#[derive(Clone, Copy)]
struct ScatterTarget {
    coords: *mut u32,
    values: *mut f64,
}

unsafe impl Send for ScatterTarget {}
unsafe impl Sync for ScatterTarget {}

fn join_all<T>(handles: Vec<thread::ScopedJoinHandle<'_, Result<T>>>) -> Result<Vec<T>> {
    handles
        .into_iter()
        .map(|h| h.join().expect("sort worker panicked"))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn histogram_pass_parallel(
    rank: usize,
    mode: usize,
    dim: usize,
    src_c: &[u32],
    src_v: &[f64],
    dst_c: &mut [u32],
    dst_v: &mut [f64],
    workers: usize,
) -> Result<()> {
    let n = src_v.len();
    let bounds = chunk_bounds(n, workers);

    let mut hists: Vec<Vec<usize>> = thread::scope(|s| {
        let handles = bounds
            .windows(2)
            .map(|w| {
                let chunk = &src_c[w[0] * rank..w[1] * rank];
                s.spawn(move || {
                    let mut count = Vec::new();
                    kernels::reset_count(&mut count, dim);
                    kernels::count_keys(rank, mode, dim, chunk, &mut count)?;
                    Ok(count)
                })
            })
            .collect();
        join_all(handles)
    })?;

    // count[key + 1] holds the tally; turn it into per-worker start offsets
    let mut running = 0;
    for key in 0..dim {
        for h in hists.iter_mut() {
            let c = h[key + 1];
            h[key] = running;
            running += c;
        }
    }
    debug_assert_eq!(running, n);

    let out = ScatterTarget { coords: dst_c.as_mut_ptr(), values: dst_v.as_mut_ptr() };
    thread::scope(|s| {
        for (w, mut offsets) in bounds.windows(2).zip(hists) {
            let (lo, hi) = (w[0], w[1]);
            s.spawn(move || {
                let out = out;
                for j in lo..hi {
                    let row = &src_c[j * rank..(j + 1) * rank];
                    let key = row[mode] as usize;
                    let to = offsets[key];
                    offsets[key] += 1;
                    // SAFETY: `to < n` and each destination row is claimed by
                    // exactly one (worker, key) slot of the scan above.
                    unsafe {
                        std::ptr::copy_nonoverlapping(row.as_ptr(), out.coords.add(to * rank), rank);
                        *out.values.add(to) = src_v[j];
                    }
                }
            });
        }
    });
    Ok(())
}

/// Region boundaries aligned to bucket starts.
fn bucket_aligned_bounds(rank: usize, prefix: &[usize], coords: &[u32], n: usize, workers: usize) -> Vec<usize> {
    let row = |j: usize| &coords[j * rank..(j + 1) * rank];
    let mut bounds = chunk_bounds(n, workers);
    for w in 1..workers {
        let mut b = bounds[w].max(bounds[w - 1]);
        while b > 0 && b < n && prefix.iter().all(|&k| row(b)[k] == row(b - 1)[k]) {
            b += 1;
        }
        bounds[w] = b;
    }
    bounds
}

#[allow(clippy::too_many_arguments)]
fn bucketed_pass_parallel(
    rank: usize,
    prefix: &[usize],
    mode: usize,
    dim: usize,
    src_c: &[u32],
    src_v: &[f64],
    ws: &mut Workspace,
    workers: usize,
) -> Result<()> {
    let n = src_v.len();
    let bounds = bucket_aligned_bounds(rank, prefix, src_c, n, workers);
    let Workspace { bucket, pos, perm, coords, values, .. } = ws;
    let (mut dst_c, mut dst_v) = (&mut coords[..], &mut values[..]);
    let (mut bucket, mut pos, mut perm) = (&mut bucket[..], &mut pos[..], &mut perm[..]);

    thread::scope(|s| {
        let mut handles = Vec::with_capacity(workers);
        for w in bounds.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let len = hi - lo;
            let (c, rest_c) = std::mem::take(&mut dst_c).split_at_mut(len * rank);
            let (v, rest_v) = std::mem::take(&mut dst_v).split_at_mut(len);
            let (b, rest_b) = std::mem::take(&mut bucket).split_at_mut(len);
            let (p, rest_p) = std::mem::take(&mut pos).split_at_mut(len);
            let (q, rest_q) = std::mem::take(&mut perm).split_at_mut(len);
            (dst_c, dst_v, bucket, pos, perm) = (rest_c, rest_v, rest_b, rest_p, rest_q);
            if len == 0 {
                continue;
            }
            let (sc, sv) = (&src_c[lo * rank..hi * rank], &src_v[lo..hi]);
            handles.push(s.spawn(move || {
                let mut count = Vec::new();
                kernels::bucketed_pass(
                    rank,
                    prefix,
                    mode,
                    dim,
                    sc,
                    sv,
                    c,
                    v,
                    &mut count,
                    BucketScratch { bucket: b, pos: p, perm: q },
                )
            }));
        }
        join_all(handles).map(|_| ())
    })
}

/// Multi-worker [`partial_sort`]; the result is identical to the serial pass.
pub fn parallel_partial_sort(
    tensor: &mut CooTensor,
    current: &Ordering,
    step: PlanStep,
    cfg: &ParallelConfig,
    ws: &mut Workspace,
) -> Result<Ordering> {
    if cfg.workers == 1 {
        return partial_sort(tensor, current, step, ws);
    }
    tensor.check_rank(current)?;
    let next = apply_transition(current, step)?;
    ws.check_input(tensor, current)?;
    let (rank, n) = (tensor.rank(), tensor.nnz());
    let dim = tensor.dims()[step.mode];
    ws.prepare_output(n, rank);
    if step.is_bucketed() {
        ws.prepare_buckets(n);
        bucketed_pass_parallel(
            rank,
            &current.modes()[..step.prefix_len],
            step.mode,
            dim,
            &tensor.coords,
            &tensor.values,
            ws,
            cfg.workers,
        )?;
    } else {
        histogram_pass_parallel(
            rank,
            step.mode,
            dim,
            &tensor.coords,
            &tensor.values,
            &mut ws.coords,
            &mut ws.values,
            cfg.workers,
        )?;
    }
    ws.swap_into(tensor);
    Ok(next)
}

type Bucket<'a> = (&'a mut [u32], &'a mut [f64]);

/// Comparison-sorts, under the rest of `target`, each run of rows that share
/// the first `k` modes of `target`. The tensor must already be sorted on
/// those `k` modes.
pub fn parallel_topk_bucket_sort(
    tensor: &mut CooTensor,
    k: usize,
    target: &Ordering,
    cfg: &ParallelConfig,
) -> Result<()> {
    tensor.check_rank(target)?;
    let (rank, n) = (tensor.rank(), tensor.nnz());
    if k == 0 || k > rank {
        return Err(Error::invalid(format!("prefix length {k} outside 1..={rank}")));
    }
    if cfg.workers == 1 {
        sort_buckets(tensor, k, target, &mut Workspace::new());
        return Ok(());
    }
    let (head, rest) = target.modes().split_at(k);
    if rest.is_empty() || n < 2 {
        return Ok(());
    }

    let bounds = chunk_bounds(n, cfg.workers);
    let coords = &tensor.coords;
    let mut starts: Vec<usize> = thread::scope(|s| {
        let handles: Vec<_> = bounds
            .windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                s.spawn(move || kernels::run_starts(rank, head, coords, lo, hi))
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bucket scan panicked")).collect()
    });
    starts.push(n);

    let mut buckets: Vec<Bucket<'_>> = Vec::with_capacity(starts.len());
    let (mut c, mut v) = (&mut tensor.coords[..], &mut tensor.values[..]);
    for w in starts.windows(2) {
        let len = w[1] - w[0];
        let (bc, rc) = std::mem::take(&mut c).split_at_mut(len * rank);
        let (bv, rv) = std::mem::take(&mut v).split_at_mut(len);
        (c, v) = (rc, rv);
        if len > 1 {
            buckets.push((bc, bv));
        }
    }

    let workers = cfg.workers;
    let schedule = cfg.schedule;
    let queue = Mutex::new(buckets.into_iter());
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| {
                let mut scratch = RowSortScratch::default();
                loop {
                    let batch: Vec<Bucket<'_>> = {
                        let mut q = queue.lock().expect("bucket queue poisoned");
                        let take = match schedule {
                            BucketSchedule::Dynamic => 1,
                            BucketSchedule::Guided => q.len().div_ceil(workers).max(1),
                        };
                        q.by_ref().take(take).collect()
                    };
                    if batch.is_empty() {
                        break;
                    }
                    for (bc, bv) in batch {
                        kernels::sort_rows(rank, rest, bc, bv, &mut scratch);
                    }
                }
            });
        }
    });
    Ok(())
}
