//! Grid geometry: signed labels, DFT-conjugated momentum, and the harmonic
//! zero point converging with the register width.
//!
//!     cargo run -p vibronic --example grid_discretization

use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use vibronic::grid::{
    build_kinetic_matrix, build_potential_matrix, momentum_matrix, signed_value, GridConfig,
};
use vibronic::model::VibronicModel;

fn main() {
    let g = GridConfig::new(4).unwrap();
    println!("k = {}, K = {}, spacing = {:.6}", g.bits(), g.points(), g.spacing());
    println!("signed positions of a few labels:");
    for x in [0usize, 1, 7, 8, 15] {
        println!("  |{x:2}> -> {:+.4}", signed_value(g, x).unwrap());
    }

    // Momentum shares the position spectrum: the DFT conjugation with the
    // top-bit flip is a unitary relabeling.
    let p = momentum_matrix(g).unwrap();
    let (evals, _) = p.eigh(UPLO::Lower).unwrap();
    println!(
        "momentum eigenvalues span [{:+.4}, {:+.4}] (position grid: [{:+.4}, {:+.4}])",
        evals[0],
        evals[evals.len() - 1],
        signed_value(g, g.points() / 2).unwrap(),
        signed_value(g, g.points() / 2 - 1).unwrap(),
    );

    // Harmonic zero point approaches ω/2 as the register grows.
    let model = VibronicModel::new(1, vec![1.0], 0);
    println!("harmonic ground energy vs register width (exact 0.5):");
    for k in 2..=5 {
        let gk = GridConfig::new(k).unwrap();
        let t = build_kinetic_matrix(&model, gk).unwrap();
        let v = build_potential_matrix(&model, gk, true).unwrap();
        let h = &t + &v.mapv(|x| Complex64::new(x, 0.0));
        let (e, _) = h.eigh(UPLO::Lower).unwrap();
        println!("  k = {k}: E0 = {:.8} (error {:.2e})", e[0], (e[0] - 0.5).abs());
    }
}
