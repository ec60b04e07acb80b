//! Full-size garden: build, then solve for sampled weights.
//!
//! `cargo run --release --example full_garden [full|full-stochastic] [weights]`

use std::time::Instant;

use prefplan::mdp::TransitionSystem;
use prefplan::momdp::{pareto_front, sample_weights, Momdp, SolverOptions, WeightScheme};
use prefplan::product::build_product;
use prefplan::scenarios::{build_garden, preset};

fn main() -> prefplan::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "full-stochastic".into());
    let count: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(100);

    let t = Instant::now();
    let (mdp, pdfa) = build_garden(&preset(&name)?)?;
    let product = build_product(&mdp, &pdfa)?;
    println!(
        "{name}: mdp {} states / {} transitions, product {} states / {} transitions ({:.2}s)",
        mdp.num_states(),
        mdp.num_transitions(),
        product.num_states(),
        product.num_transitions(),
        t.elapsed().as_secs_f64()
    );

    let momdp = Momdp::new(product);
    let t = Instant::now();
    let weights = sample_weights(count, momdp.num_objectives(), 0, WeightScheme::Dirichlet);
    let front = pareto_front(&momdp, &weights, &SolverOptions::default(), 1e-9)?;
    println!(
        "{count} weights -> {} distinct vectors, mutually nondominated: {} ({:.2}s)",
        front.solutions.len(),
        front.is_mutually_nondominated(),
        t.elapsed().as_secs_f64()
    );
    for s in front.solutions.iter().take(10) {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.2}")).collect::<Vec<_>>().join(", ");
        println!("  value [{}]  outcomes [{}]", fmt(&s.value.0), fmt(&s.outcome_probs));
    }
    Ok(())
}
