//! Monte Carlo estimate of the probability that a random symmetric
//! polynomial vanishes on a family of disjoint pairs.

use std::sync::Arc;

use algturan::analysis::{lemma2_calibration, VanishingInstance};
use algturan::construction::Budget;
use algturan::{BlockShape, FieldCtx};

fn main() {
    let shape = BlockShape::new(2, 1, 2).unwrap();
    for q in [5u64, 7, 11] {
        let ctx = Arc::new(FieldCtx::with_order(q).unwrap());
        for sets in 1..=2 {
            let inst = VanishingInstance::disjoint(shape, &ctx, sets).unwrap();
            let res = lemma2_calibration(shape, &ctx, &inst, 20_000, 0, &Budget::default()).unwrap();
            println!(
                "q = {q:2}, |U| = {sets}: {:.5} vs {:.5} (z = {:+.2}, {})",
                res.empirical, res.exact, res.z_score, res.label
            );
        }
    }
}
