//! Serial sort engines and the transposition driver.

pub(crate) mod kernels;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ordering::Ordering;
use crate::parallel::{self, ParallelConfig};
use crate::plan::{apply_transition, PlanStep};
use crate::planner::{prefix_plan, quesadilla_plan};
use crate::tensor::CooTensor;

use kernels::{BucketScratch, RowSortScratch};

/// Buffers reused across passes.
///
/// Each pass writes into `coords`/`values` and then swaps them with the
/// tensor's storage. Not shareable between concurrent sorts.
#[derive(Debug, Default)]
pub struct Workspace {
    pub(crate) count: Vec<usize>,
    pub(crate) bucket: Vec<usize>,
    pub(crate) pos: Vec<usize>,
    pub(crate) perm: Vec<usize>,
    pub(crate) coords: Vec<u32>,
    pub(crate) values: Vec<f64>,
    pub(crate) rows: RowSortScratch,
    verify: bool,
}

impl Workspace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Check each pass's input ordering before sorting. Costs one extra scan.
    pub fn verifying(mut self) -> Self {
        self.verify = true;
        self
    }

    pub(crate) fn prepare_output(&mut self, n: usize, rank: usize) {
        self.coords.resize(n * rank, 0);
        self.values.resize(n, 0.0);
    }

    pub(crate) fn prepare_buckets(&mut self, n: usize) {
        self.bucket.resize(n, 0);
        self.pos.resize(n, 0);
        self.perm.resize(n, 0);
    }

    pub(crate) fn swap_into(&mut self, tensor: &mut CooTensor) {
        std::mem::swap(&mut tensor.coords, &mut self.coords);
        std::mem::swap(&mut tensor.values, &mut self.values);
    }

    pub(crate) fn check_input(&self, tensor: &CooTensor, current: &Ordering) -> Result<()> {
        if self.verify && !tensor.is_sorted_under(current)? {
            return Err(Error::Precondition(format!("input is not sorted under {current}")));
        }
        Ok(())
    }
}

/// One stable partial-sort pass.
///
/// `tensor` must be sorted under `current`. With `step.prefix_len == 0` this is
/// a plain histogram sort on `step.mode`; otherwise rows are bucketed on the
/// first `prefix_len` modes of `current` and sorted on `step.mode` within each
/// bucket. Returns the ordering the tensor is sorted under afterwards.
pub fn partial_sort(
    tensor: &mut CooTensor,
    current: &Ordering,
    step: PlanStep,
    ws: &mut Workspace,
) -> Result<Ordering> {
    tensor.check_rank(current)?;
    let next = apply_transition(current, step)?;
    ws.check_input(tensor, current)?;
    let (rank, n) = (tensor.rank(), tensor.nnz());
    let dim = tensor.dims()[step.mode];
    ws.prepare_output(n, rank);
    if step.is_bucketed() {
        ws.prepare_buckets(n);
        let Workspace { count, bucket, pos, perm, coords, values, .. } = ws;
        kernels::bucketed_pass(
            rank,
            &current.modes()[..step.prefix_len],
            step.mode,
            dim,
            &tensor.coords,
            &tensor.values,
            coords,
            values,
            count,
            BucketScratch { bucket, pos, perm },
        )?;
    } else {
        kernels::histogram_pass(
            rank,
            step.mode,
            dim,
            &tensor.coords,
            &tensor.values,
            &mut ws.coords,
            &mut ws.values,
            &mut ws.count,
        )?;
    }
    ws.swap_into(tensor);
    Ok(next)
}

/// Transposition algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SortStrategy {
    /// Pass-minimal histogram sorting.
    Quesadilla,
    /// Histogram-sort the first `K` target modes, then comparison-sort each bucket.
    TopK(usize),
    /// One non-bucketed pass per mode, least significant first.
    FullRadix,
    /// Stable comparison sort of whole rows.
    ComparisonSort,
    /// Histogram sort on the leading target mode, then comparison sort per slice.
    SplattStyle,
}

impl SortStrategy {
    /// The strategies a benchmark compares for a rank-`r` tensor.
    pub fn all_for_rank(r: usize) -> Vec<SortStrategy> {
        let mut v = vec![SortStrategy::ComparisonSort];
        v.extend((1..r).map(SortStrategy::TopK));
        v.push(SortStrategy::Quesadilla);
        v.push(SortStrategy::FullRadix);
        v
    }
}

impl fmt::Display for SortStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SortStrategy::Quesadilla => f.write_str("quesadilla"),
            SortStrategy::TopK(k) => write!(f, "top{k}"),
            SortStrategy::FullRadix => f.write_str("radix"),
            SortStrategy::ComparisonSort => f.write_str("qsort"),
            SortStrategy::SplattStyle => f.write_str("splatt"),
        }
    }
}

impl FromStr for SortStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "quesadilla" => SortStrategy::Quesadilla,
            "radix" | "full-radix" => SortStrategy::FullRadix,
            "qsort" | "comparison" => SortStrategy::ComparisonSort,
            "splatt" => SortStrategy::SplattStyle,
            other => {
                let k = other
                    .strip_prefix("top")
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|&k| k > 0)
                    .ok_or_else(|| Error::invalid(format!("unknown strategy {s:?}")))?;
                SortStrategy::TopK(k)
            }
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct TransposeOptions {
    /// Check that the input is simply ordered (and every pass's input).
    pub verify: bool,
    /// Run passes on several workers. `None` or one worker runs serially.
    pub parallel: Option<ParallelConfig>,
}

impl TransposeOptions {
    fn workers(&self) -> Option<&ParallelConfig> {
        self.parallel.as_ref().filter(|c| c.workers() > 1)
    }
}

/// Sorts a simply ordered tensor under `target` in place and returns the
/// partial-sort passes that were executed.
pub fn transpose_in_place(
    tensor: &mut CooTensor,
    target: &Ordering,
    strategy: SortStrategy,
    opts: &TransposeOptions,
    ws: &mut Workspace,
) -> Result<Vec<PlanStep>> {
    tensor.check_rank(target)?;
    if opts.verify && !tensor.is_sorted_under(&Ordering::simple(tensor.rank()))? {
        return Err(Error::Precondition("input is not simply ordered".into()));
    }
    let verify = ws.verify;
    ws.verify |= opts.verify;
    let result = dispatch(tensor, target, strategy, opts, ws);
    ws.verify = verify;
    result
}

fn dispatch(
    tensor: &mut CooTensor,
    target: &Ordering,
    strategy: SortStrategy,
    opts: &TransposeOptions,
    ws: &mut Workspace,
) -> Result<Vec<PlanStep>> {
    match strategy {
        SortStrategy::Quesadilla => run_steps(tensor, &quesadilla_plan(target).steps, opts, ws),
        SortStrategy::FullRadix => {
            let steps: Vec<_> = target.modes().iter().rev().map(|&m| PlanStep::new(0, m)).collect();
            run_steps(tensor, &steps, opts, ws)
        }
        SortStrategy::ComparisonSort => {
            sort_whole(tensor, target, ws);
            Ok(Vec::new())
        }
        SortStrategy::TopK(k) => topk(tensor, target, k, opts, ws),
        SortStrategy::SplattStyle => topk(tensor, target, 1, opts, ws),
    }
}

fn run_steps(
    tensor: &mut CooTensor,
    steps: &[PlanStep],
    opts: &TransposeOptions,
    ws: &mut Workspace,
) -> Result<Vec<PlanStep>> {
    let mut current = Ordering::simple(tensor.rank());
    for &step in steps {
        current = match opts.workers() {
            Some(cfg) => parallel::parallel_partial_sort(tensor, &current, step, cfg, ws)?,
            None => partial_sort(tensor, &current, step, ws)?,
        };
    }
    Ok(steps.to_vec())
}

fn sort_whole(tensor: &mut CooTensor, target: &Ordering, ws: &mut Workspace) {
    let rank = tensor.rank();
    kernels::sort_rows(rank, target.modes(), &mut tensor.coords, &mut tensor.values, &mut ws.rows);
}

fn topk(
    tensor: &mut CooTensor,
    target: &Ordering,
    k: usize,
    opts: &TransposeOptions,
    ws: &mut Workspace,
) -> Result<Vec<PlanStep>> {
    let plan = prefix_plan(target, k)?;
    let passes = run_steps(tensor, &plan.steps, opts, ws)?;
    match opts.workers() {
        Some(cfg) => parallel::parallel_topk_bucket_sort(tensor, k, target, cfg)?,
        None => sort_buckets(tensor, k, target, ws),
    }
    Ok(passes)
}

/// Comparison-sorts each run of rows sharing the first `k` target modes.
pub(crate) fn sort_buckets(tensor: &mut CooTensor, k: usize, target: &Ordering, ws: &mut Workspace) {
    let (rank, n) = (tensor.rank(), tensor.nnz());
    let (head, rest) = target.modes().split_at(k);
    if rest.is_empty() || n < 2 {
        return;
    }
    let mut starts = kernels::run_starts(rank, head, &tensor.coords, 0, n);
    starts.push(n);
    for w in starts.windows(2) {
        let (s, e) = (w[0], w[1]);
        if e - s > 1 {
            kernels::sort_rows(
                rank,
                rest,
                &mut tensor.coords[s * rank..e * rank],
                &mut tensor.values[s..e],
                &mut ws.rows,
            );
        }
    }
}

/// Returns a copy of `tensor` sorted under `target`.
pub fn transpose(tensor: &CooTensor, target: &Ordering, strategy: SortStrategy) -> Result<CooTensor> {
    transpose_with(tensor, target, strategy, &TransposeOptions::default())
}

pub fn transpose_with(
    tensor: &CooTensor,
    target: &Ordering,
    strategy: SortStrategy,
    opts: &TransposeOptions,
) -> Result<CooTensor> {
    let mut out = tensor.clone();
    transpose_in_place(&mut out, target, strategy, opts, &mut Workspace::new())?;
    Ok(out)
}

/// Radix sort with one non-bucketed pass per mode.
pub fn full_radix_transpose(tensor: &CooTensor, target: &Ordering) -> Result<CooTensor> {
    transpose(tensor, target, SortStrategy::FullRadix)
}

/// Stable comparison sort under `target`. This is the reference the other
/// strategies are checked against.
pub fn comparison_transpose(tensor: &CooTensor, target: &Ordering) -> Result<CooTensor> {
    transpose(tensor, target, SortStrategy::ComparisonSort)
}

/// Histogram-sorts to the first `k` modes of `target`, then comparison-sorts each bucket.
pub fn topk_transpose(tensor: &CooTensor, target: &Ordering, k: usize) -> Result<CooTensor> {
    transpose(tensor, target, SortStrategy::TopK(k))
}
