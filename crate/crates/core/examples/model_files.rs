//! Writes a hand-built model and automaton to JSON, reads them back and
//! shows the error for a corrupted file.
//!
//! `cargo run --example model_files`

use prefplan::files;
use prefplan::mdp::{Tlmdp, TransitionSystem};
use prefplan::pdfa::{Pdfa, Symbol};
use prefplan::product::build_product;

fn main() -> prefplan::Result<()> {
    let mdp = Tlmdp::builder()
        .states(["home", "shop", "park", "bed"])
        .initial("home")
        .sink("bed")
        .propositions(["food", "walk"])
        .label("home", Symbol::empty())
        .label("shop", Symbol::new(["food"]))
        .label("park", Symbol::new(["walk"]))
        .transition("home", "errand", "shop", 0.8)
        .transition("home", "errand", "home", 0.2)
        .transition("home", "stroll", "park", 1.0)
        .transition("shop", "rest", "bed", 1.0)
        .transition("park", "rest", "bed", 1.0)
        .build()?;
    let pdfa = Pdfa::builder()
        .states(["idle", "fed", "walked"])
        .propositions(["food", "walk"])
        .full_alphabet()
        .initial("idle")
        .transition("idle", Symbol::new(["food"]), "fed")
        .transition("idle", Symbol::new(["walk"]), "walked")
        .default_state("idle")
        .transition("fed", Symbol::empty(), "fed")
        .transition("fed", Symbol::new(["food"]), "fed")
        .transition("fed", Symbol::new(["walk"]), "fed")
        .transition("fed", Symbol::new(["food", "walk"]), "fed")
        .transition("walked", Symbol::empty(), "walked")
        .transition("walked", Symbol::new(["food"]), "walked")
        .transition("walked", Symbol::new(["walk"]), "walked")
        .transition("walked", Symbol::new(["food", "walk"]), "walked")
        .block("nothing", ["idle"])
        .block("fed", ["fed"])
        .block("walked", ["walked"])
        .edge("nothing", "fed")
        .edge("nothing", "walked")
        .build()?;

    let dir = std::env::temp_dir().join("prefplan-model-files");
    std::fs::create_dir_all(&dir)?;
    let (mp, ap, pp) = (dir.join("mdp.json"), dir.join("pdfa.json"), dir.join("product.json"));
    files::write_mdp(&mp, &mdp)?;
    files::write_pdfa(&ap, &pdfa)?;
    let mdp2 = files::read_mdp(&mp)?;
    let pdfa2 = files::read_pdfa(&ap)?;
    println!("mdp round trip equal: {}", mdp2 == mdp);
    println!("pdfa round trip equal: {}", pdfa2 == pdfa);

    let product = build_product(&mdp2, &pdfa2)?;
    files::write_product(&pp, &product)?;
    let back = files::read_product(&pp)?;
    println!("product: {} states, reread {} states", product.num_states(), back.num_states());

    let text = std::fs::read_to_string(&mp)?.replace("\"initial\"", "\"start\"");
    let bad = dir.join("bad.json");
    std::fs::write(&bad, text)?;
    match files::read_mdp(&bad) {
        Ok(_) => println!("corrupted file accepted?"),
        Err(e) => println!("corrupted file: {e}"),
    }
    Ok(())
}
