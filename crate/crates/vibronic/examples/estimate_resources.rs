//! Qubit and Toffoli estimates for the four shipped screening models at a
//! supplied step count (the empirical selection is exercised by the
//! step_selection example and the acceptance suite — it probes a proxy model
//! and takes a minute or two).
//!
//!     cargo run -p vibronic --example estimate_resources

use vibronic::circuit::CompileOptions;
use vibronic::grid::GridConfig;
use vibronic::model::parse_model;
use vibronic::resources::{estimate_total, CostModel, StepChoice, NOMINAL_WIDTH};
use vibronic::units;

fn main() {
    let g = GridConfig::new(4).unwrap();
    let opts = CompileOptions::default();
    let cost = CostModel::default();
    println!(
        "{:<18} {:>7} {:>8} {:>9} {:>14} {:>14}",
        "model", "states", "modes", "qubits", "toffoli/step", "total (r=100)"
    );
    for name in [
        "no4_anth.json",
        "no4_anth_dimer.json",
        "anth_c60_m11.json",
        "anth_c60_m246.json",
    ] {
        let path = format!("{}/models/{name}", env!("CARGO_MANIFEST_DIR"));
        let model = parse_model(&std::fs::read_to_string(path).unwrap()).unwrap();
        let report = estimate_total(
            &model,
            g,
            units::fs_to_au(100.0),
            &StepChoice::Supplied(100),
            2,
            NOMINAL_WIDTH,
            &opts,
            &cost,
        )
        .unwrap();
        println!(
            "{:<18} {:>7} {:>8} {:>9} {:>14} {:>14.3e}",
            name.trim_end_matches(".json"),
            model.n_states_logical,
            model.mode_count(),
            report.total_qubits,
            report.toffoli_per_step,
            report.total_toffoli as f64
        );
    }
}
