#![allow(dead_code)]

use lincode::codebook::{gaussian_build, self_design_build};
use lincode::{Codebook, DecompositionPlan, Dyadic, Entry, Matrix64, PlanMeta, Pow2Matrix, SignedPow2, StageSchedule};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::TestRunner;

pub fn arb_coeff(exp: std::ops::RangeInclusive<i32>) -> impl Strategy<Value = SignedPow2> {
    (any::<bool>(), exp).prop_map(|(neg, e)| SignedPow2::new(neg, e))
}

/// `rows × cols` with up to `max_per_col` distinct rows per column.
pub fn arb_pow2_matrix(
    rows: usize,
    cols: usize,
    max_per_col: usize,
    exp: std::ops::RangeInclusive<i32>,
) -> impl Strategy<Value = Pow2Matrix> {
    let column = proptest::collection::btree_map(0..rows, arb_coeff(exp), 0..=max_per_col.min(rows));
    proptest::collection::vec(column, cols).prop_map(move |cols| {
        let columns = cols
            .into_iter()
            .map(|c| c.into_iter().map(|(row, coeff)| Entry { row, coeff }).collect())
            .collect();
        Pow2Matrix::new(rows, columns).expect("valid by construction")
    })
}

pub fn arb_dyadic(mantissa_bits: u32, exp: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Dyadic> {
    let m = 1i64 << mantissa_bits;
    (-m..=m, exp).prop_map(|(m, e)| Dyadic::new(m, e))
}

fn arb_codebook(max_k: usize) -> impl Strategy<Value = Codebook> {
    let mailman = (1usize..=max_k.ilog2() as usize).prop_map(|n| Codebook::mailman(n).unwrap());
    let two_sparse = (1usize..=10)
        .prop_flat_map(move |n| (Just(n), n..=max_k.min(n + n * (n - 1) * 3)))
        .prop_map(|(n, k)| Codebook::two_sparse(n, k).unwrap());
    let self_designed = (1usize..=8, any::<u64>())
        .prop_flat_map(move |(n, seed)| (Just(n), n..=max_k, Just(seed)))
        .prop_map(|(n, k, seed)| {
            let aux: Matrix64 = gaussian_build(n, k, seed);
            self_design_build(&aux, 1).unwrap()
        });
    prop_oneof![mailman, two_sparse, self_designed]
}

/// Shift-add plans with random codebooks and random sparse stages.
pub fn arb_plan(max_k: usize, max_stages: usize) -> impl Strategy<Value = DecompositionPlan> {
    (arb_codebook(max_k), 0..=max_stages, any::<u64>())
        .prop_flat_map(|(codebook, l, seed)| {
            let k = codebook.cols();
            let stages = proptest::collection::vec(arb_pow2_matrix(k, k, 3, -12..=12), l);
            (Just(codebook), stages, Just(seed))
        })
        .prop_map(|(codebook, stages, seed)| {
            let l = stages.len();
            let meta = PlanMeta {
                seed: Some(seed),
                schedule: Some(StageSchedule::fixed(vec![1; l])),
                target_hash: Some(format!("{seed:016x}")),
                ..PlanMeta::default()
            };
            DecompositionPlan::new(codebook, stages, meta).unwrap()
        })
}

/// Deterministic draw from a strategy, for fixed-size randomized checks.
pub fn sample<S: Strategy>(strategy: &S, runner: &mut TestRunner) -> S::Value {
    strategy.new_tree(runner).expect("strategy generates").current()
}
