//! Empirical step-count selection: probe a small model at a few step counts,
//! fit the power law, and close the loop against the dense propagator.
//!
//!     cargo run -p vibronic --example step_selection

use vibronic::circuit::{evolution_error, select_step_count, CompileOptions};
use vibronic::grid::GridConfig;
use vibronic::model::{MultiIndex, VibronicModel};
use vibronic::observables::prepare_vertical_excitation;

fn main() {
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.5);
    model.set_coupling(0, 0, MultiIndex::linear(0), 0.45);
    model.set_coupling(1, 1, MultiIndex::linear(0), -0.35);
    let g = GridConfig::new(3).unwrap();
    let opts = CompileOptions::default();
    let order = 2;
    let t = 6.0;

    for epsilon in [1e-2, 1e-3, 5e-4] {
        let sel = select_step_count(&model, g, t, epsilon, order, 2, &opts).unwrap();
        let psi0 = prepare_vertical_excitation(&model, g, 1).unwrap();
        let measured = evolution_error(&model, g, &psi0, t, sel.steps, order, &opts).unwrap();
        println!(
            "target {epsilon:.0e}: selected r = {:>3} (fit a = {:.3e}), measured error {measured:.2e}",
            sel.steps, sel.fit_coefficient
        );
        for (r, e) in &sel.probes {
            println!("    probe r = {r:>3}: error {e:.3e}");
        }
    }
}
