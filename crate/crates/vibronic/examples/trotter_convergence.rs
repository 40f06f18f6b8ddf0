//! Global error of compiled evolutions vs step count for orders 1, 2, 4,
//! against the dense propagator.
//!
//!     cargo run -p vibronic --example trotter_convergence

use vibronic::circuit::{build_evolution, CompileOptions};
use vibronic::grid::GridConfig;
use vibronic::model::{MultiIndex, VibronicModel};
use vibronic::observables::prepare_vertical_excitation;
use vibronic::simulator::oracle::ExactPropagator;
use vibronic::simulator::{apply_gates, Backend};

fn main() {
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.45);
    model.set_coupling(0, 0, MultiIndex::linear(0), 0.4);
    model.set_coupling(1, 1, MultiIndex::linear(0), -0.3);
    let g = GridConfig::new(3).unwrap();
    let t = 1.5;
    let opts = CompileOptions { frac_bits: 40, ..Default::default() };

    let psi0 = prepare_vertical_excitation(&model, g, 0).unwrap();
    let reference = ExactPropagator::new(&model, g, true).unwrap().evolve(&psi0, t);

    println!("{:>6} {:>14} {:>14} {:>14}", "steps", "order 1", "order 2", "order 4");
    for r in [2usize, 4, 8, 16, 32] {
        let mut row = format!("{r:>6}");
        for order in [1u32, 2, 4] {
            let list = build_evolution(&model, g, t, r, order, &opts).unwrap();
            let out = apply_gates(&psi0, &list, Backend::Semantic).unwrap().state;
            let overlap = out.fidelity(&reference);
            let err = (1.0 - overlap * overlap).max(0.0).sqrt();
            row.push_str(&format!(" {err:>14.3e}"));
        }
        println!("{row}");
    }
    println!("\neach column drops by ~2^order per doubling of the step count");
}
