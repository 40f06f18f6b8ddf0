//! Compile a second-order step and inspect the gate list and its cost.
//!
//!     cargo run -p vibronic --example compile_gatelist

use vibronic::circuit::{build_trotter_step, CompileOptions};
use vibronic::model::parse_model;
use vibronic::grid::GridConfig;
use vibronic::resources::{count_toffoli, CostModel};

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/models/rabi.json"
    ))
    .unwrap();
    let model = parse_model(&text).unwrap();
    let g = GridConfig::new(3).unwrap();
    let opts = CompileOptions::default();
    let list = build_trotter_step(&model, g, 0.25, 2, &opts).unwrap();

    println!(
        "layout: {} simulated qubits (system {}, coeff/gradient width {}, {} fractional bits)",
        list.layout.arithmetic_bits(),
        list.layout.system_bits(),
        list.layout.format.width,
        list.layout.format.frac_bits
    );
    println!("gates: {}", list.len());
    println!("toffoli: {}", count_toffoli(&list, &CostModel::default()));
    println!("\nfirst lines of the export:");
    let mut text = Vec::new();
    list.export_text(&mut text).unwrap();
    for line in String::from_utf8(text).unwrap().lines().take(14) {
        println!("  {line}");
    }
}
