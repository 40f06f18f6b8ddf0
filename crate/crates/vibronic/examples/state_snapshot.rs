//! Evolve a state, write the binary snapshot format, and read it back.
//!
//!     cargo run -p vibronic --example state_snapshot

use vibronic::circuit::CompileOptions;
use vibronic::grid::GridConfig;
use vibronic::model::{MultiIndex, VibronicModel};
use vibronic::observables::prepare_vertical_excitation;
use vibronic::simulator::oracle::exact_evolve;
use vibronic::simulator::StateVector;

fn main() {
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::linear(0), 0.3);
    let g = GridConfig::new(3).unwrap();
    let opts = CompileOptions::default();
    let init = prepare_vertical_excitation(&model, g, 0).unwrap();
    let state = exact_evolve(&model, g, 2.5, &init, opts.include_v0).unwrap();

    let path = std::env::temp_dir().join("vibronic_snapshot.bin");
    let mut file = std::fs::File::create(&path).unwrap();
    state.write_snapshot(&mut file).unwrap();
    let size = std::fs::metadata(&path).unwrap().len();
    println!("wrote {} ({} bytes: JSON header line + {} amplitudes)", path.display(), size, state.dim());

    let back = StateVector::read_snapshot(std::fs::File::open(&path).unwrap()).unwrap();
    println!("read back: dim {}, fidelity {:.15}", back.dim(), back.fidelity(&state));
}
