//! Upper-set family of a four-element partial order and the dominance
//! verdicts it gives on three distributions.
//!
//! `cargo run --example weak_order`

use prefplan::order::{dominates_weak_stochastic, OutcomeDistribution, PartialOrder};

fn main() -> prefplan::Result<()> {
    // a is best, d is worst, b and c are incomparable.
    let order = PartialOrder::from_pairs(["a", "b", "c", "d"], &[("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])?;
    let family = order.weak_order_family()?;
    println!("upper sets: {:?}", family.named_sets());

    let dists = [
        ("P1", OutcomeDistribution::new([("a", 0.5), ("b", 0.5)])),
        ("P2", OutcomeDistribution::new([("a", 0.5), ("c", 0.5)])),
        ("P3", OutcomeDistribution::new([("a", 0.5), ("d", 0.5)])),
    ];
    for (name, p) in &dists {
        println!("{name} -> {:?}", family.project(p)?);
    }
    for (n1, p1) in &dists {
        for (n2, p2) in &dists {
            if n1 < n2 {
                let d = dominates_weak_stochastic(p1, p2, &order, 0.0)?;
                println!("{n1} vs {n2}: {d:?}");
            }
        }
    }
    Ok(())
}
