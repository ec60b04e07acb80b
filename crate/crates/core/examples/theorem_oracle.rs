//! Exhaustive policy enumeration on random instances, checking that Pareto
//! nondominance of value vectors and weak-stochastic nondominance of
//! outcome distributions agree.
//!
//! `cargo run --release --example theorem_oracle [instances]`

use prefplan::mdp::TransitionSystem;
use prefplan::momdp::Momdp;
use prefplan::oracle::{check_theorem1, enumerate_solutions, random_instance, OracleCap};
use prefplan::product::build_product;
use prefplan::scenarios::build_garden_mini;

fn main() -> prefplan::Result<()> {
    let n: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let (mut policies, mut forward, mut mismatches) = (0, 0, 0);
    for seed in 0..n {
        let m = random_instance(seed, 6)?;
        let e = enumerate_solutions(&m, OracleCap::default())?;
        let r = check_theorem1(&m, &e)?;
        policies += r.policies;
        forward += r.forward_violations.len();
        mismatches += r.route_mismatches;
        if seed < 3 {
            println!(
                "seed {seed}: {} states, {} policies, {} nondominated",
                m.product().num_states(),
                r.policies,
                r.pareto_nondominated
            );
        }
    }
    println!("{n} random instances: {policies} policies, {forward} forward violations, {mismatches} mismatches");

    let (mdp, pdfa) = build_garden_mini("3x3")?;
    let m = Momdp::new(build_product(&mdp, &pdfa)?);
    let e = enumerate_solutions(&m, OracleCap::default())?;
    println!("3x3 garden:\n{}", check_theorem1(&m, &e)?);
    for v in e.nondominated_values(1e-9) {
        println!("  nondominated value {:?}", v.0);
    }
    Ok(())
}
