//! Scalarized solves over sampled weights on a mini garden, printed as the
//! CSV report.
//!
//! `cargo run --example mini_front [preset] [weights] [seed]`

use prefplan::momdp::{pareto_front, sample_weights, Momdp, SolverOptions, WeightScheme};
use prefplan::product::build_product;
use prefplan::report::{compare_rows, SolutionReport};
use prefplan::scenarios::build_garden_mini;

fn main() -> prefplan::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "4x4".into());
    let count: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);

    let (mdp, pdfa) = build_garden_mini(&name)?;
    let momdp = Momdp::new(build_product(&mdp, &pdfa)?);
    let weights = sample_weights(count, momdp.num_objectives(), seed, WeightScheme::Dirichlet);
    let front = pareto_front(&momdp, &weights, &SolverOptions::default(), 1e-9)?;

    let classes = momdp.product().classes().iter().map(|c| c.name.clone()).collect();
    let report = SolutionReport::from_front(classes, &front);
    print!("{}", report.to_csv_string());
    println!();
    println!("{}", compare_rows(&report, None, 1e-9)?);
    Ok(())
}
