//! Parse a model file, report its shape, and run the validator.
//!
//!     cargo run -p vibronic --example parse_and_validate

use vibronic::model::{parse_model, validate_model};
use vibronic::units::EV_PER_HARTREE;

fn main() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/models/no4_anth.json");
    let text = std::fs::read_to_string(path).expect("model file ships with the crate");
    let model = parse_model(&text).expect("shipped model parses");

    println!("states: {} (padded to {})", model.n_states_logical, model.n_states);
    println!("modes:  {}", model.mode_count());
    println!("degree: {}", model.max_degree);
    let n_terms: usize = model
        .couplings
        .iter()
        .filter(|((j, i), _)| j <= i)
        .map(|(_, block)| block.len())
        .sum();
    println!("terms:  {n_terms}");
    let (lo, hi) = model
        .frequencies
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &w| (lo.min(w), hi.max(w)));
    println!(
        "frequency range: {:.4} - {:.4} eV",
        lo * EV_PER_HARTREE,
        hi * EV_PER_HARTREE
    );

    let diagnostics = validate_model(&model);
    if diagnostics.is_empty() {
        println!("validation: clean");
    } else {
        for d in diagnostics {
            println!("validation: {d}");
        }
    }

    // Round trip: serialize to the same format and parse back.
    let again = parse_model(&model.to_document()).expect("round trip");
    assert_eq!(model, again);
    println!("round trip: exact");
}
