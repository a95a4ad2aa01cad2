use std::fmt;

use crate::error::{Error, Result};
use crate::ordering::Ordering;

/// One partial-sort pass: stably sort on `mode` while keeping the first
/// `prefix_len` modes of the current ordering in place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlanStep {
    pub prefix_len: usize,
    pub mode: usize,
}

impl PlanStep {
    pub fn new(prefix_len: usize, mode: usize) -> Self {
        PlanStep { prefix_len, mode }
    }

    /// Passes with a non-empty prefix need the bucketed histogram sort.
    pub fn is_bucketed(&self) -> bool {
        self.prefix_len > 0
    }
}

impl fmt::Display for PlanStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sort mode {} keeping prefix of {} ({})",
            self.mode,
            self.prefix_len,
            if self.is_bucketed() { "bucketed" } else { "non-bucketed" }
        )
    }
}

/// Pass counts, ordered lexicographically: fewer passes first, then fewer
/// bucketed passes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanCost {
    pub total_passes: usize,
    pub bucketed_passes: usize,
}

impl PlanCost {
    pub fn of_steps(steps: &[PlanStep]) -> Self {
        PlanCost {
            total_passes: steps.len(),
            bucketed_passes: steps.iter().filter(|s| s.is_bucketed()).count(),
        }
    }

    pub(crate) fn add_step(self, step: PlanStep) -> Self {
        PlanCost {
            total_passes: self.total_passes + 1,
            bucketed_passes: self.bucketed_passes + step.is_bucketed() as usize,
        }
    }
}

/// A sequence of passes that takes a simply ordered tensor to `target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SortPlan {
    pub target: Ordering,
    pub steps: Vec<PlanStep>,
}

impl SortPlan {
    pub fn cost(&self) -> PlanCost {
        PlanCost::of_steps(&self.steps)
    }

    /// Ordering reached by running the steps from `start`.
    pub fn simulate_from(&self, start: &Ordering) -> Result<Ordering> {
        self.steps
            .iter()
            .try_fold(start.clone(), |cur, &step| apply_transition(&cur, step))
    }

    /// Ordering the tensor is in just before step `i`, starting from simple.
    pub fn ordering_before(&self, i: usize) -> Result<Ordering> {
        self.steps[..i.min(self.steps.len())]
            .iter()
            .try_fold(Ordering::simple(self.target.rank()), |cur, &step| apply_transition(&cur, step))
    }

    pub fn simulate(&self) -> Result<Ordering> {
        self.simulate_from(&Ordering::simple(self.target.rank()))
    }
}

/// Ordering produced by one partial sort.
///
/// With `current = (t0, .., t_{r-1})`, `step.prefix_len = l` and `step.mode`
/// at position `p >= l`, the result is
/// `(t0, .., t_{l-1}, t_p, t_l, .., t_{p-1}, t_{p+1}, .., t_{r-1})`.
/// With `l == 0` the sorted mode simply moves to the front.
pub fn apply_transition(current: &Ordering, step: PlanStep) -> Result<Ordering> {
    let pos = current.position(step.mode).ok_or_else(|| {
        Error::invalid(format!("mode {} not in ordering {current}", step.mode))
    })?;
    if pos < step.prefix_len {
        return Err(Error::invalid(format!(
            "mode {} lies inside the kept prefix of length {} of {current}",
            step.mode, step.prefix_len
        )));
    }
    let mut modes = current.modes().to_vec();
    modes[step.prefix_len..=pos].rotate_right(1);
    Ordering::new(modes)
}
