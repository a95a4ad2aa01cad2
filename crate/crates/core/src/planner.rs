//! Pass planning: the follow-set lower bound, the pass-minimal planner, and
//! an exhaustive search used to check the planner.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::ordering::Ordering;
use crate::plan::{apply_transition, PlanCost, PlanStep, SortPlan};

/// Largest rank [`min_plan_bruteforce`] will search (`r!` states).
pub const MAX_BRUTEFORCE_RANK: usize = 6;

/// Largest rank [`pass_histogram`] will enumerate.
pub const MAX_HISTOGRAM_RANK: usize = 9;

/// Modes `target[i]` whose follow set in `target` is not contained in their
/// follow set in `source`. Each of them has to be sorted on at least once.
fn must_sort(source: &Ordering, target: &Ordering) -> Vec<bool> {
    target
        .modes()
        .iter()
        .map(|&m| {
            let want = target.follow_set(m).expect("mode of target");
            let have = source.follow_set(m).expect("same mode set");
            !want.is_subset(&have)
        })
        .collect()
}

fn check_same_rank(a: &Ordering, b: &Ordering) -> Result<()> {
    if a.rank() != b.rank() {
        return Err(Error::invalid(format!(
            "orderings {a} and {b} have different ranks"
        )));
    }
    Ok(())
}

/// Lower bound on the number of partial sorts taking a `source`-ordered
/// tensor to `target` order.
pub fn required_sort_count(source: &Ordering, target: &Ordering) -> Result<usize> {
    check_same_rank(source, target)?;
    Ok(must_sort(source, target).into_iter().filter(|&b| b).count())
}

/// Pass-minimal plan from the simple ordering to `target`.
///
/// The target is consumed in phases. Each phase starts with an established
/// prefix of length `l`, scans forward over the run of modes that must be
/// sorted, then sorts that run from its last mode back to its first, each
/// pass keeping the prefix of length `l`. The mode that ended the scan is
/// already in place afterwards, so the next phase starts just past it.
pub fn quesadilla_plan(target: &Ordering) -> SortPlan {
    let r = target.rank();
    let sigma = target.modes();
    let needs = must_sort(&Ordering::simple(r), target);
    let mut steps = Vec::new();
    let mut l = 0;
    while l < r {
        let mut k = l;
        while k + 1 < r && needs[k] {
            k += 1;
        }
        let next = k + 1;
        while k > l {
            steps.push(PlanStep::new(l, sigma[k - 1]));
            k -= 1;
        }
        l = next;
    }
    SortPlan { target: target.clone(), steps }
}

/// `target` truncated to its first `k` modes, with the remaining modes
/// appended in ascending order.
pub fn prefix_target(target: &Ordering, k: usize) -> Result<Ordering> {
    let r = target.rank();
    if k == 0 || k > r {
        return Err(Error::invalid(format!("prefix length {k} outside 1..={r}")));
    }
    let head = &target.modes()[..k];
    let mut modes = head.to_vec();
    modes.extend((0..r).filter(|m| !head.contains(m)));
    Ordering::new(modes)
}

/// Plan that establishes only the first `k` modes of `target`.
///
/// The returned plan's `target` is [`prefix_target`]`(target, k)`, whose
/// first `k` modes agree with `target`.
pub fn prefix_plan(target: &Ordering, k: usize) -> Result<SortPlan> {
    Ok(quesadilla_plan(&prefix_target(target, k)?))
}

/// Plan for a tensor currently sorted under `source` rather than the simple
/// ordering. Modes are relabeled by their position in `source`, planned, and
/// mapped back.
pub fn plan_between(source: &Ordering, target: &Ordering) -> Result<SortPlan> {
    check_same_rank(source, target)?;
    let pos = source.inverse();
    let relabeled = Ordering::new(target.modes().iter().map(|&m| pos.modes()[m]).collect())?;
    let plan = quesadilla_plan(&relabeled);
    let steps = plan
        .steps
        .into_iter()
        .map(|s| PlanStep::new(s.prefix_len, source.modes()[s.mode]))
        .collect();
    Ok(SortPlan { target: target.clone(), steps })
}

/// Cheapest `(total, bucketed)` pass count from the simple ordering to
/// `target`, found by exhaustive shortest-path search over all `r!`
/// orderings using every legal `(prefix_len, mode)` pass.
pub fn min_plan_bruteforce(target: &Ordering) -> Result<PlanCost> {
    let r = target.rank();
    if r > MAX_BRUTEFORCE_RANK {
        return Err(Error::Unsupported(format!(
            "exhaustive search limited to rank {MAX_BRUTEFORCE_RANK}, got {r}"
        )));
    }
    let start = Ordering::simple(r);
    let mut best: HashMap<Ordering, PlanCost> = HashMap::from([(start.clone(), PlanCost::default())]);
    let mut heap = BinaryHeap::from([Reverse((PlanCost::default(), start))]);
    while let Some(Reverse((cost, cur))) = heap.pop() {
        if cur == *target {
            return Ok(cost);
        }
        if best.get(&cur).is_some_and(|&c| c < cost) {
            continue;
        }
        for (pos, &mode) in cur.modes().iter().enumerate() {
            for l in 0..=pos {
                let step = PlanStep::new(l, mode);
                let next = apply_transition(&cur, step)?;
                let next_cost = cost.add_step(step);
                if best.get(&next).is_none_or(|&c| next_cost < c) {
                    best.insert(next.clone(), next_cost);
                    heap.push(Reverse((next_cost, next)));
                }
            }
        }
    }
    unreachable!("every ordering is reachable by non-bucketed passes")
}

/// Number of target orderings of rank `r` that need each pass count.
pub fn pass_histogram(r: usize) -> Result<BTreeMap<usize, usize>> {
    if r == 0 || r > MAX_HISTOGRAM_RANK {
        return Err(Error::invalid(format!(
            "rank {r} outside 1..={MAX_HISTOGRAM_RANK}"
        )));
    }
    let mut hist = BTreeMap::new();
    for target in Ordering::all(r) {
        *hist.entry(quesadilla_plan(&target).steps.len()).or_insert(0) += 1;
    }
    Ok(hist)
}
