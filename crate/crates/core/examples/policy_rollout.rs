//! Solves the 3x3 garden for one weight, then samples paths under the
//! policy and tallies where they end.
//!
//! `cargo run --example policy_rollout [samples]`

use prefplan::mdp::{rollout, TransitionSystem};
use prefplan::momdp::{solve_scalarized, Momdp, SolverOptions, WeightVector};
use prefplan::product::build_product;
use prefplan::scenarios::build_garden_mini;

fn main() -> prefplan::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let (mdp, pdfa) = build_garden_mini("3x3")?;
    let momdp = Momdp::new(build_product(&mdp, &pdfa)?);
    let w = WeightVector::new(vec![0.5, 0.2, 0.2, 0.1])?;
    let sol = solve_scalarized(&momdp, &w, &SolverOptions::default())?;
    let p = momdp.product();

    let first = rollout(p, &sol.policy, 0, 100);
    println!("sample path:");
    for w in first.states.windows(2) {
        let a = sol.policy.action_at(w[0]).map(|a| p.actions(w[0])[a].name.clone()).unwrap_or_default();
        let (s, q) = &p.state_names()[w[0]];
        println!("  {s} [{q}] --{a}-->");
    }
    let (s, q) = &p.state_names()[*first.states.last().unwrap()];
    println!("  {s} [{q}]");

    let mut counts = vec![0u64; p.num_classes()];
    for seed in 0..n {
        let path = rollout(p, &sol.policy, seed, 1000);
        if let Some(c) = p.class_of(*path.states.last().unwrap()) {
            counts[c] += 1;
        }
    }
    for (i, c) in p.classes().iter().enumerate() {
        println!(
            "{}: sampled {:.4}, exact {:.4}",
            c.name,
            counts[i] as f64 / n as f64,
            sol.outcome_probs[i]
        );
    }
    Ok(())
}
