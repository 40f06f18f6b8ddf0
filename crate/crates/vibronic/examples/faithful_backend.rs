//! Cross-check the two execution backends on a width-reduced compilation:
//! the gate-faithful run carries every register as physical qubits with the
//! phase-gradient resource state, and must agree with the semantic run.
//!
//!     cargo run -p vibronic --example faithful_backend

use num_complex::Complex64;
use vibronic::circuit::{build_trotter_step, CompileOptions};
use vibronic::grid::GridConfig;
use vibronic::model::{MultiIndex, VibronicModel};
use vibronic::simulator::{apply_gates, Backend, StateVector};

fn main() {
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.3);
    model.set_coupling(0, 0, MultiIndex::linear(0), 0.25);
    model.set_coupling(1, 1, MultiIndex::linear(0), -0.15);
    let g = GridConfig::new(2).unwrap();
    let opts = CompileOptions {
        frac_bits: 6,
        pinned_width: Some(6),
        ..Default::default()
    };
    let list = build_trotter_step(&model, g, 0.5, 2, &opts).unwrap();
    println!(
        "compiled step at width 6: {} gates over {} simulated qubits",
        list.len(),
        list.layout.arithmetic_bits()
    );

    let mut input = StateVector::zeroed(&model, g);
    for (i, a) in input.amps.iter_mut().enumerate() {
        *a = Complex64::new(1.0 + (i as f64).sin(), (i as f64 * 0.4).cos());
    }
    input.normalize();

    let semantic = apply_gates(&input, &list, Backend::Semantic).unwrap();
    let faithful = apply_gates(&input, &list, Backend::GateFaithful).unwrap();
    println!("ancilla return overlap: {:.12}", faithful.ancilla_fidelity);
    println!(
        "cross-backend fidelity: {:.12}",
        semantic.state.fidelity(&faithful.state)
    );
}
