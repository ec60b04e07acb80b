//! Builds the product of a small garden with its preference automaton and
//! prints the lifted classes.
//!
//! `cargo run --example product_construction [3x3|4x4]`

use prefplan::mdp::TransitionSystem;
use prefplan::product::{build_product, class_upper_closures};
use prefplan::scenarios::build_garden_mini;

fn main() -> prefplan::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "3x3".into());
    let (mdp, pdfa) = build_garden_mini(&name)?;
    let report = mdp.validate();
    println!("mdp: {} states, {} transitions", mdp.num_states(), mdp.num_transitions());
    print!("{report}");

    let p = build_product(&mdp, &pdfa)?;
    println!("product: {} states, {} transitions", p.num_states(), p.num_transitions());
    let (s, q) = &p.state_names()[p.initial()];
    println!("initial: ({s}, {q})");
    for c in p.classes() {
        println!("class {}: {} terminal states", c.name, c.states.len());
    }
    let z = class_upper_closures(&p);
    for (i, c) in p.classes().iter().enumerate() {
        let reach: Vec<&str> = (0..p.num_classes())
            .filter(|&j| p.reachability().reaches(i, j))
            .map(|j| p.classes()[j].name.as_str())
            .collect();
        println!("Z_{}: union of {reach:?}", c.name);
    }
    assert_eq!(z.len(), p.num_classes());
    Ok(())
}
