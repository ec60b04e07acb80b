//! The garden preference automaton: run a few words and compare them.
//!
//! `cargo run --example preference_automaton`

use prefplan::pdfa::Symbol;
use prefplan::scenarios::garden_pdfa;

fn word(flowers: &[&str]) -> Vec<Symbol> {
    flowers.iter().map(|f| Symbol::new([*f])).collect()
}

fn main() -> prefplan::Result<()> {
    let pdfa = garden_pdfa()?;
    for b in pdfa.blocks() {
        println!("block {}: {:?}", b.name, b.states.iter().map(|&q| &pdfa.states()[q]).collect::<Vec<_>>());
    }
    println!("reachability:");
    for row in pdfa.reachability().matrix() {
        println!("  {row:?}");
    }

    let words = [
        vec!["tulip", "daisy"],
        vec!["tulip"],
        vec!["daisy", "orchid"],
        vec!["orchid"],
        vec![],
    ];
    for w in &words {
        let q = pdfa.run(&word(w))?;
        println!("{w:?} ends in {} (class {})", pdfa.states()[q], pdfa.blocks()[pdfa.class_of_index(q)].name);
    }
    for (i, a) in words.iter().enumerate() {
        for b in &words[i + 1..] {
            println!("{a:?} vs {b:?}: {:?}", pdfa.compare_words(&word(a), &word(b))?);
        }
    }
    for w in pdfa.warnings() {
        println!("warning: {w}");
    }
    Ok(())
}
