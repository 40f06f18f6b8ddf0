//! Absorption spectrum of the displaced-oscillator toy: a vibronic
//! progression spaced by the mode frequency.
//!
//!     cargo run -p vibronic --example absorption_spectrum

use vibronic::circuit::CompileOptions;
use vibronic::grid::GridConfig;
use vibronic::model::parse_model;
use vibronic::observables::{autocorrelation, spectrum, Method};
use vibronic::units::{self, EV_PER_HARTREE};

fn main() {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/models/displaced.json"
    ))
    .unwrap();
    let model = parse_model(&text).unwrap();
    let g = GridConfig::new(3).unwrap();
    let mu = model.dipole.clone().unwrap();
    let opts = CompileOptions::default();

    let t_max_au = 8000.0;
    let n = 2048;
    let c = autocorrelation(
        &model,
        g,
        &mu,
        units::au_to_fs(t_max_au),
        n,
        Method::Oracle,
        &opts,
    )
    .unwrap();
    let dt = t_max_au / (n - 1) as f64;
    let spec = spectrum(&c, dt, 5.0 / t_max_au).unwrap();

    let omega_mode = model.frequencies[0];
    println!("mode frequency: {:.4} eV", omega_mode * EV_PER_HARTREE);
    println!("strongest peaks:");
    let mut peaks = spec.peaks.clone();
    peaks.truncate(6);
    peaks.sort_by(|a, b| a.omega_au.partial_cmp(&b.omega_au).unwrap());
    let mut last: Option<f64> = None;
    for p in &peaks {
        let spacing = last.map(|prev| (p.omega_au - prev) * EV_PER_HARTREE);
        last = Some(p.omega_au);
        match spacing {
            Some(s) => println!(
                "  {:>8.4} eV  intensity {:>9.3e}   spacing to previous {s:.4} eV",
                p.omega_au * EV_PER_HARTREE,
                p.intensity
            ),
            None => println!(
                "  {:>8.4} eV  intensity {:>9.3e}",
                p.omega_au * EV_PER_HARTREE,
                p.intensity
            ),
        }
    }
    println!("(progression spacing tracks the mode frequency)");
}
