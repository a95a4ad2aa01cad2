mod common;

use common::*;
use proptest::prelude::*;
use quesadilla::parallel::{parallel_partial_sort, parallel_topk_bucket_sort};
use quesadilla::{
    comparison_transpose, partial_sort, prefix_plan, quesadilla_plan, transpose, transpose_in_place,
    transpose_with, BucketSchedule, CooTensor, Ordering, ParallelConfig, PlanStep, SortStrategy,
    TransposeOptions, Workspace,
};

/// Reference sort written independently of the library: key tuples through
/// `target`, ties broken by original position.
fn reference(t: &CooTensor, target: &Ordering) -> (Vec<u32>, Vec<f64>) {
    let mut idx: Vec<usize> = (0..t.nnz()).collect();
    idx.sort_by_key(|&j| {
        let row = t.row(j);
        (target.modes().iter().map(|&k| row[k]).collect::<Vec<_>>(), j)
    });
    let coords = idx.iter().flat_map(|&j| t.row(j).to_vec()).collect();
    let values = idx.iter().map(|&j| t.values()[j]).collect();
    (coords, values)
}

fn strategies(r: usize) -> Vec<SortStrategy> {
    let mut v = SortStrategy::all_for_rank(r);
    v.push(SortStrategy::TopK(r));
    v.push(SortStrategy::SplattStyle);
    v
}

#[test]
fn comparison_sort_matches_reference() {
    let mut rng = rng(11);
    for _ in 0..200 {
        let t = random_tensor(&mut rng, 300, 6);
        for target in Ordering::all(t.rank()) {
            let out = comparison_transpose(&t, &target).unwrap();
            let (c, v) = reference(&t, &target);
            assert_eq!(out.coords(), c.as_slice());
            assert_eq!(out.values(), v.as_slice());
        }
    }
}

#[test]
fn every_strategy_matches_comparison_sort() {
    let mut rng = rng(12);
    for case in 0..150 {
        let t = random_tensor(&mut rng, 500, 16);
        for target in Ordering::all(t.rank()) {
            let expect = comparison_transpose(&t, &target).unwrap();
            for s in strategies(t.rank()) {
                let out = transpose(&t, &target, s).unwrap();
                assert_eq!(out, expect, "case {case} {target} {s}");
            }
        }
    }
}

#[test]
fn passes_follow_the_plan() {
    let mut rng = rng(13);
    let mut ws = Workspace::new().verifying();
    for _ in 0..50 {
        let t = random_tensor(&mut rng, 200, 8);
        for target in Ordering::all(t.rank()) {
            let mut out = t.clone();
            let passes =
                transpose_in_place(&mut out, &target, SortStrategy::Quesadilla, &TransposeOptions::default(), &mut ws)
                    .unwrap();
            assert_eq!(passes, quesadilla_plan(&target).steps);
            let mut out = t.clone();
            let passes =
                transpose_in_place(&mut out, &target, SortStrategy::FullRadix, &TransposeOptions::default(), &mut ws)
                    .unwrap();
            assert_eq!(passes.len(), t.rank());
            for k in 1..=t.rank() {
                let mut out = t.clone();
                let passes = transpose_in_place(
                    &mut out,
                    &target,
                    SortStrategy::TopK(k),
                    &TransposeOptions::default(),
                    &mut ws,
                )
                .unwrap();
                assert_eq!(passes, prefix_plan(&target, k).unwrap().steps);
            }
        }
    }
}

#[test]
fn identity_target_is_a_no_op() {
    let mut rng = rng(14);
    for _ in 0..20 {
        let t = random_tensor(&mut rng, 500, 10);
        let simple = Ordering::simple(t.rank());
        let mut out = t.clone();
        let passes = transpose_in_place(
            &mut out,
            &simple,
            SortStrategy::Quesadilla,
            &TransposeOptions::default(),
            &mut Workspace::new(),
        )
        .unwrap();
        assert!(passes.is_empty());
        assert_eq!(out, t);
        for s in strategies(t.rank()) {
            assert_eq!(transpose(&t, &simple, s).unwrap(), t);
        }
    }
}

#[test]
fn duplicates_keep_their_order() {
    // every coordinate appears several times
    let rows: Vec<[u32; 3]> = (0..40).map(|j| [j % 2, (j / 2) % 3, j % 5 % 2]).collect();
    let t = CooTensor::from_rows(vec![2, 3, 2], &rows, (0..40).map(f64::from).collect()).unwrap();
    let t = comparison_transpose(&t, &Ordering::simple(3)).unwrap();
    for target in Ordering::all(3) {
        let (c, v) = reference(&t, &target);
        for s in strategies(3) {
            let out = transpose(&t, &target, s).unwrap();
            assert_eq!(out.coords(), c.as_slice(), "{s}");
            assert_eq!(out.values(), v.as_slice(), "{s}");
        }
    }
}

#[test]
fn parallel_passes_match_serial() {
    let mut rng = rng(15);
    for _ in 0..100 {
        let t = random_tensor(&mut rng, 2000, 16);
        let r = t.rank();
        for target in Ordering::all(r).step_by(3) {
            let plan = quesadilla_plan(&target);
            let mut serial = t.clone();
            let mut ord = Ordering::simple(r);
            let mut ws = Workspace::new();
            for &step in &plan.steps {
                ord = partial_sort(&mut serial, &ord, step, &mut ws).unwrap();
            }
            for p in [2, 3, 4, 8] {
                let cfg = ParallelConfig::new(p).unwrap();
                let mut par = t.clone();
                let mut ord = Ordering::simple(r);
                for &step in &plan.steps {
                    ord = parallel_partial_sort(&mut par, &ord, step, &cfg, &mut ws).unwrap();
                }
                assert_eq!(par, serial, "P = {p} {target}");
            }
        }
    }
}

#[test]
fn parallel_topk_matches_serial_for_both_schedules() {
    let mut rng = rng(16);
    for _ in 0..100 {
        let t = random_tensor(&mut rng, 2000, 16);
        let r = t.rank();
        let target = Ordering::all(r).nth(rng_index(&t)).unwrap();
        for k in 1..=r {
            let serial = transpose(&t, &target, SortStrategy::TopK(k)).unwrap();
            for sched in [BucketSchedule::Dynamic, BucketSchedule::Guided] {
                for p in [1, 2, 3, 4, 8] {
                    let cfg = ParallelConfig::new(p).unwrap().with_schedule(sched);
                    let opts = TransposeOptions { verify: false, parallel: Some(cfg) };
                    let out = transpose_with(&t, &target, SortStrategy::TopK(k), &opts).unwrap();
                    assert_eq!(out, serial, "P = {p} {sched:?} K = {k}");
                }
            }
        }
    }
}

fn rng_index(t: &CooTensor) -> usize {
    (t.nnz() * 7 + t.dims().iter().sum::<usize>()) % (1..=t.rank()).product::<usize>()
}

#[test]
fn topk_bucket_phase_edge_cases() {
    let cfg = ParallelConfig::new(4).unwrap();
    // one bucket holding every row
    let rows: Vec<[u32; 2]> = (0..50).map(|j| [0, (j * 7) % 13]).collect();
    let mut t = CooTensor::from_rows(vec![1, 13], &rows, (0..50).map(f64::from).collect()).unwrap();
    let target = Ordering::simple(2);
    let expect = comparison_transpose(&t, &target).unwrap();
    parallel_topk_bucket_sort(&mut t, 1, &target, &cfg).unwrap();
    assert_eq!(t, expect);
    // all buckets of size one
    let rows: Vec<[u32; 2]> = (0..20).map(|j| [j, 19 - j]).collect();
    let t0 = CooTensor::from_rows(vec![20, 20], &rows, vec![1.0; 20]).unwrap();
    let mut t = t0.clone();
    parallel_topk_bucket_sort(&mut t, 1, &target, &cfg).unwrap();
    assert_eq!(t, t0);
    assert!(parallel_topk_bucket_sort(&mut t, 3, &target, &cfg).is_err());
}

#[test]
fn bucketed_rows_stay_in_their_bucket() {
    let mut rng = rng(17);
    for _ in 0..100 {
        let t = random_tensor(&mut rng, 2000, 6);
        let r = t.rank();
        let simple = Ordering::simple(r);
        for l in 1..r {
            for mode in l..r {
                for p in [1, 2, 4] {
                    let cfg = ParallelConfig::new(p).unwrap();
                    let mut out = t.clone();
                    parallel_partial_sort(&mut out, &simple, PlanStep::new(l, mode), &cfg, &mut Workspace::new())
                        .unwrap();
                    // values are original positions; each output row must come
                    // from the input bucket covering its own index
                    let mut start = 0;
                    while start < t.nnz() {
                        let mut end = start + 1;
                        while end < t.nnz() && t.row(end)[..l] == t.row(start)[..l] {
                            end += 1;
                        }
                        for j in start..end {
                            let from = out.values()[j] as usize;
                            assert!((start..end).contains(&from));
                        }
                        start = end;
                    }
                }
            }
        }
    }
}

#[test]
fn parallel_rejects_zero_workers_and_bad_steps() {
    assert!(ParallelConfig::new(0).is_err());
    let mut t = golden_tensor();
    let cfg = ParallelConfig::new(2).unwrap();
    assert!(parallel_partial_sort(&mut t, &Ordering::simple(4), PlanStep::new(3, 1), &cfg, &mut Workspace::new())
        .is_err());
}

fn arb_tensor() -> impl Strategy<Value = CooTensor> {
    (2usize..=4, 1usize..=5)
        .prop_flat_map(|(r, n)| {
            (Just(r), Just(n), prop::collection::vec(prop::collection::vec(0..n as u32, r), 0..60))
        })
        .prop_map(|(r, n, rows)| {
            let t = CooTensor::from_rows(vec![n; r], &rows, (0..rows.len()).map(|j| j as f64).collect()).unwrap();
            comparison_transpose(&t, &Ordering::simple(r)).unwrap()
        })
}

proptest! {
    #[test]
    fn output_is_a_sorted_permutation(t in arb_tensor(), pick in 0usize..120, which in 0usize..8) {
        let r = t.rank();
        let target = Ordering::all(r).nth(pick % (1..=r).product::<usize>()).unwrap();
        let ss = strategies(r);
        let s = ss[which % ss.len()];
        let out = transpose(&t, &target, s).unwrap();
        prop_assert!(out.is_sorted_under(&target).unwrap());
        let mut a: Vec<(Vec<u32>, u64)> = t.rows().map(<[u32]>::to_vec).zip(t.values().iter().map(|v| v.to_bits())).collect();
        let mut b: Vec<(Vec<u32>, u64)> = out.rows().map(<[u32]>::to_vec).zip(out.values().iter().map(|v| v.to_bits())).collect();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
        // relabeling the axes by the target gives a simply ordered tensor
        prop_assert!(out.permute_modes(&target).unwrap().is_sorted_under(&Ordering::simple(r)).unwrap());
    }
}
