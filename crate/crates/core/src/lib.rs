//! Transposition of sparse tensors stored in coordinate (COO) format.
//!
//! A COO tensor is a list of nonzero coordinates kept in some lexicographic
//! mode order. Transposing the tensor means re-sorting that list under a
//! different mode priority. This crate does that with the fewest possible
//! stable histogram-sort passes, using two primitives:
//!
//! - a plain histogram (counting) sort on one mode, which moves that mode to
//!   the front of the ordering, and
//! - a bucketed histogram sort, which sorts one mode while keeping an already
//!   established prefix of the ordering intact.
//!
//! [`planner::quesadilla_plan`] picks the sequence of passes. The plan length
//! is the lower bound [`planner::required_sort_count`], and among plans of that
//! length it uses the fewest bucketed passes.
//!
//! ```
//! use quesadilla::{CooTensor, Ordering, SortStrategy, transpose};
//!
//! let t = CooTensor::from_rows(vec![2, 2], &[[0, 1], [1, 0]], vec![1.0, 2.0]).unwrap();
//! let target = Ordering::new(vec![1, 0]).unwrap();
//! let out = transpose(&t, &target, SortStrategy::Quesadilla).unwrap();
//! assert_eq!(out.row(0), &[1, 0]);
//! assert!(out.is_sorted_under(&target).unwrap());
//! ```

mod error;
pub mod gen;
pub mod io;
pub mod ordering;
pub mod parallel;
pub mod plan;
pub mod planner;
pub mod sorting;
pub mod tensor;

pub use error::{Error, Result};
pub use gen::{generate, DuplicatePolicy, GenSpec};
pub use io::{read_tns, read_tns_with, write_tns, ParseStats, TnsOptions};
pub use ordering::Ordering;
pub use parallel::{BucketSchedule, ParallelConfig};
pub use plan::{apply_transition, PlanCost, PlanStep, SortPlan};
pub use planner::{
    min_plan_bruteforce, pass_histogram, plan_between, prefix_plan, quesadilla_plan,
    required_sort_count,
};
pub use sorting::{
    comparison_transpose, full_radix_transpose, partial_sort, topk_transpose, transpose,
    transpose_in_place, transpose_with, SortStrategy, TransposeOptions, Workspace,
};
pub use tensor::CooTensor;
