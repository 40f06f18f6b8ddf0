//! Two-state constant-coupling dynamics: the excited population follows
//! sin²(λt), and the compiled evolution reproduces the oracle.
//!
//!     cargo run -p vibronic --example rabi_populations

use vibronic::circuit::CompileOptions;
use vibronic::grid::GridConfig;
use vibronic::model::{parse_model, MultiIndex};
use vibronic::observables::{population_trace, prepare_vertical_excitation, Method};
use vibronic::units;

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/models/rabi.json"
    ))
    .unwrap();
    let model = parse_model(&text).unwrap();
    let g = GridConfig::new(3).unwrap();
    let lambda = model.coupling(0, 1, &MultiIndex::constant());
    let opts = CompileOptions::default();
    let init = prepare_vertical_excitation(&model, g, 0).unwrap();
    let t_fs = 40.0;

    let oracle = population_trace(&model, g, &init, t_fs, 9, Method::Oracle, &opts).unwrap();
    let compiled = population_trace(
        &model,
        g,
        &init,
        t_fs,
        9,
        Method::Compiled { order: 2, steps: 64 },
        &opts,
    )
    .unwrap();

    println!(
        "{:>8} {:>12} {:>12} {:>12}",
        "t (fs)", "sin^2(λt)", "oracle p1", "compiled p1"
    );
    for i in 0..oracle.times_fs.len() {
        let t_au = units::fs_to_au(oracle.times_fs[i]);
        println!(
            "{:>8.2} {:>12.6} {:>12.6} {:>12.6}",
            oracle.times_fs[i],
            (lambda * t_au).sin().powi(2),
            oracle.populations[i][1],
            compiled.populations[i][1],
        );
    }
}
