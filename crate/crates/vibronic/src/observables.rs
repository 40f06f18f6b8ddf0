//! Initial-state preparation and observable extraction: diabatic populations,
//! the dipole autocorrelation function, and absorption spectra.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{build_evolution, CompileError, CompileOptions};
use crate::grid::GridConfig;
use crate::model::{DipoleMatrix, VibronicModel};
use crate::simulator::oracle::ExactPropagator;
use crate::simulator::{apply_gates, Backend, SimError, StateVector};
use crate::units;

#[derive(Debug, Error)]
pub enum ObsError {
    #[error("electronic state {state} out of range ({n_states_logical} logical states)")]
    StateOutOfRange { state: usize, n_states_logical: usize },
    #[error("dipole operator annihilates the ground state (zero column)")]
    ZeroDipoleColumn,
    #[error("damping must be positive, got {0}")]
    BadDamping(f64),
    #[error("need at least two time samples")]
    TooFewSamples,
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

/// Amplitudes of the discretized vibrational ground Gaussian on one mode
/// register, in the signed-label convention (peaked at label 0).
pub fn gaussian_mode_amplitudes(g: GridConfig) -> Vec<f64> {
    let points = g.points();
    let mut amps: Vec<f64> = (0..points)
        .map(|x| {
            let s = g.signed_int(x) as f64;
            (-PI * s * s / points as f64).exp()
        })
        .collect();
    let norm: f64 = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    amps
}

fn product_state(
    model: &VibronicModel,
    g: GridConfig,
    electronic: &[Complex64],
) -> StateVector {
    let chi = gaussian_mode_amplitudes(g);
    let mut state = StateVector::zeroed(model, g);
    let n = model.electronic_bits();
    let k = g.bits();
    let points = g.points();
    for idx in 0..state.dim() {
        let e = idx & ((1usize << n).wrapping_sub(1));
        let e = if n == 0 { 0 } else { e };
        let el = electronic[e];
        if el == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut vib = 1.0;
        for r in 0..model.mode_count() {
            let x = (idx >> (n + k * r as u32)) & (points - 1);
            vib *= chi[x];
        }
        state.amps[idx] = el * vib;
    }
    state
}

/// Vertical excitation: electronic basis state `j` with every mode in the
/// discretized vibrational ground Gaussian.
pub fn prepare_vertical_excitation(
    model: &VibronicModel,
    g: GridConfig,
    j: usize,
) -> Result<StateVector, ObsError> {
    if j >= model.n_states_logical {
        return Err(ObsError::StateOutOfRange {
            state: j,
            n_states_logical: model.n_states_logical,
        });
    }
    let mut electronic = vec![Complex64::new(0.0, 0.0); model.n_states];
    electronic[j] = Complex64::new(1.0, 0.0);
    Ok(product_state(model, g, &electronic))
}

/// Dipole-prepared reference: the ground electronic state acted on by μ and
/// normalized, with every mode in the ground Gaussian.
pub fn prepare_dipole_state(
    model: &VibronicModel,
    g: GridConfig,
    mu: &DipoleMatrix,
) -> Result<StateVector, ObsError> {
    let n_raw = model.n_states_logical;
    let mut electronic = vec![Complex64::new(0.0, 0.0); model.n_states];
    let mut norm = 0.0;
    for j in 0..n_raw {
        let v = mu.get(j, 0);
        electronic[j] = Complex64::new(v, 0.0);
        norm += v * v;
    }
    if norm <= 0.0 {
        return Err(ObsError::ZeroDipoleColumn);
    }
    let norm = norm.sqrt();
    for e in &mut electronic {
        *e /= norm;
    }
    Ok(product_state(model, g, &electronic))
}

/// Apply the (Condon) dipole operator on the electronic register.
pub fn apply_dipole(model: &VibronicModel, mu: &DipoleMatrix, state: &StateVector) -> StateVector {
    let n_raw = model.n_states_logical;
    let n_states = model.n_states;
    let mut out = state.clone();
    for a in &mut out.amps {
        *a = Complex64::new(0.0, 0.0);
    }
    let vib_blocks = state.dim() / n_states;
    for block in 0..vib_blocks {
        let base = block * n_states;
        for e_out in 0..n_raw {
            let mut acc = Complex64::new(0.0, 0.0);
            for e_in in 0..n_raw {
                acc += state.amps[base + e_in] * mu.get(e_out, e_in);
            }
            out.amps[base + e_out] = acc;
        }
    }
    out
}

/// Exact diabatic populations: the marginal of the electronic register over
/// the logical states.
pub fn populations(model: &VibronicModel, state: &StateVector) -> Vec<f64> {
    let n_states = model.n_states;
    let mut p = vec![0.0; n_states];
    for (idx, a) in state.amps.iter().enumerate() {
        p[idx % n_states] += a.norm_sqr();
    }
    p.truncate(model.n_states_logical);
    p
}

/// Finite-shot estimate of the populations: measure the electronic register
/// in the computational basis `shots` times.
pub fn sample_populations(
    model: &VibronicModel,
    state: &StateVector,
    shots: usize,
    seed: u64,
) -> Vec<f64> {
    let n_states = model.n_states;
    let mut marginal = vec![0.0; n_states];
    for (idx, a) in state.amps.iter().enumerate() {
        marginal[idx % n_states] += a.norm_sqr();
    }
    let total: f64 = marginal.iter().sum();
    let mut cumulative = Vec::with_capacity(n_states);
    let mut acc = 0.0;
    for &m in &marginal {
        acc += m / total;
        cumulative.push(acc);
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut counts = vec![0usize; n_states];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let j = cumulative.partition_point(|&c| c < u).min(n_states - 1);
        counts[j] += 1;
    }
    counts
        .into_iter()
        .take(model.n_states_logical)
        .map(|c| c as f64 / shots as f64)
        .collect()
}

/// How a trace or autocorrelation is propagated.
#[derive(Debug, Clone, Copy)]
pub enum Method {
    /// Dense eigendecomposition (desk-scale cap).
    Oracle,
    /// Compiled product-formula evolution with this order and total step count.
    Compiled { order: u32, steps: usize },
}

/// Diabatic populations on a uniform time grid.
#[derive(Debug, Clone, Serialize)]
pub struct PopulationTrace {
    pub times_fs: Vec<f64>,
    pub populations: Vec<Vec<f64>>,
}

impl PopulationTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }

    pub fn to_csv(&self) -> String {
        let n = self.populations.first().map(|p| p.len()).unwrap_or(0);
        let mut out = String::from("time_fs");
        for j in 0..n {
            out.push_str(&format!(",p_{j}"));
        }
        out.push('\n');
        for (t, p) in self.times_fs.iter().zip(&self.populations) {
            out.push_str(&t.to_string());
            for v in p {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Population trace of an initial state under the model Hamiltonian.
pub fn population_trace(
    model: &VibronicModel,
    g: GridConfig,
    initial: &StateVector,
    t_max_fs: f64,
    n_samples: usize,
    method: Method,
    opts: &CompileOptions,
) -> Result<PopulationTrace, ObsError> {
    if n_samples < 2 {
        return Err(ObsError::TooFewSamples);
    }
    let t_max = units::fs_to_au(t_max_fs);
    let dt = t_max / (n_samples - 1) as f64;
    let sign = opts.angle_sign();
    let mut times_fs = Vec::with_capacity(n_samples);
    let mut pops = Vec::with_capacity(n_samples);
    match method {
        Method::Oracle => {
            let prop = ExactPropagator::new(model, g, opts.include_v0)?;
            for i in 0..n_samples {
                let t = dt * i as f64;
                let state = prop.evolve(initial, sign * t);
                times_fs.push(units::au_to_fs(t));
                pops.push(populations(model, &state));
            }
        }
        Method::Compiled { order, steps } => {
            let seg_steps = steps.div_ceil(n_samples - 1).max(1);
            let list = build_evolution(model, g, dt, seg_steps, order, opts)?;
            let mut state = initial.clone();
            times_fs.push(0.0);
            pops.push(populations(model, &state));
            for i in 1..n_samples {
                state = apply_gates(&state, &list, Backend::Semantic)?.state;
                times_fs.push(units::au_to_fs(dt * i as f64));
                pops.push(populations(model, &state));
            }
        }
    }
    Ok(PopulationTrace { times_fs, populations: pops })
}

/// Dipole autocorrelation `C(t_i) = ⟨ψ| e^{iHt} μ e^{−iHt} μ |ψ⟩` on a
/// uniform grid from 0 to `t_max_fs`, with `ψ` the dipole-prepared reference.
pub fn autocorrelation(
    model: &VibronicModel,
    g: GridConfig,
    mu: &DipoleMatrix,
    t_max_fs: f64,
    n_samples: usize,
    method: Method,
    opts: &CompileOptions,
) -> Result<Vec<Complex64>, ObsError> {
    if n_samples < 2 {
        return Err(ObsError::TooFewSamples);
    }
    let psi = prepare_dipole_state(model, g, mu)?;
    let mu_psi = apply_dipole(model, mu, &psi);
    let t_max = units::fs_to_au(t_max_fs);
    let dt = t_max / (n_samples - 1) as f64;
    let sign = opts.angle_sign();
    let mut out = Vec::with_capacity(n_samples);
    match method {
        Method::Oracle => {
            let prop = ExactPropagator::new(model, g, opts.include_v0)?;
            for i in 0..n_samples {
                let t = dt * i as f64;
                let phi1 = prop.evolve(&psi, -sign * t);
                let phi2 = prop.evolve(&mu_psi, -sign * t);
                out.push(phi1.overlap(&apply_dipole(model, mu, &phi2)));
            }
        }
        Method::Compiled { order, steps } => {
            let seg_steps = steps.div_ceil(n_samples - 1).max(1);
            // Backward evolution: flip the sign convention for the segments.
            let mut seg_opts = *opts;
            seg_opts.physics_sign = !opts.physics_sign;
            let list = build_evolution(model, g, dt, seg_steps, order, &seg_opts)?;
            let mut phi1 = psi.clone();
            let mut phi2 = mu_psi.clone();
            out.push(phi1.overlap(&apply_dipole(model, mu, &phi2)));
            for _ in 1..n_samples {
                phi1 = apply_gates(&phi1, &list, Backend::Semantic)?.state;
                phi2 = apply_gates(&phi2, &list, Backend::Semantic)?.state;
                out.push(phi1.overlap(&apply_dipole(model, mu, &phi2)));
            }
        }
    }
    Ok(out)
}

/// One absorption line found in the transformed correlation function.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Peak {
    pub omega_au: f64,
    pub intensity: f64,
}

/// Discrete transform of a damped, Hermitian-extended correlation function.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumResult {
    /// Angular frequencies (Hartree), ascending.
    pub omega_au: Vec<f64>,
    pub intensities: Vec<f64>,
    pub damping: f64,
    pub peaks: Vec<Peak>,
}

/// Transform correlation samples (uniform grid, spacing `dt_au`, starting at
/// t = 0) into a spectrum. The two-sided series comes from the Hermitian
/// extension `C(−t) = C(t)*`; `damping` multiplies by `e^{−η|t|}` before the
/// transform.
pub fn spectrum(samples: &[Complex64], dt_au: f64, damping: f64) -> Result<SpectrumResult, ObsError> {
    if damping <= 0.0 {
        return Err(ObsError::BadDamping(damping));
    }
    if samples.len() < 2 {
        return Err(ObsError::TooFewSamples);
    }
    let n = samples.len();
    let len = 2 * n - 1;
    // Two-sided damped series, index j ∈ [0, len) maps to t = (j − (n−1))·dt.
    let mut series = vec![Complex64::new(0.0, 0.0); len];
    for j in 0..len {
        let offset = j as isize - (n as isize - 1);
        let t = offset as f64 * dt_au;
        let c = if offset >= 0 {
            samples[offset as usize]
        } else {
            samples[(-offset) as usize].conj()
        };
        series[j] = c * (-damping * t.abs()).exp();
    }
    // C̃(ω_b) = (dt/2π)·Σ_j e^{−i·ω_b·t_j}·C(t_j), ω_b = 2π·b/(len·dt).
    let mut omega_au = Vec::with_capacity(len);
    let mut intensities = Vec::with_capacity(len);
    let b_min = -(n as isize - 1);
    for b in b_min..=(n as isize - 1) {
        let omega = TAU * b as f64 / (len as f64 * dt_au);
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in series.iter().enumerate() {
            let t = (j as isize - (n as isize - 1)) as f64 * dt_au;
            acc += c * Complex64::from_polar(1.0, -omega * t);
        }
        let value = acc * dt_au / TAU;
        omega_au.push(omega);
        intensities.push(value.re);
    }
    let d_omega = TAU / (len as f64 * dt_au);
    let peaks = find_peaks(&omega_au, &intensities, d_omega);
    Ok(SpectrumResult { omega_au, intensities, damping, peaks })
}

fn find_peaks(omega: &[f64], intensity: &[f64], d_omega: f64) -> Vec<Peak> {
    let max_intensity = intensity.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let floor = 1e-6 * max_intensity;
    let mut peaks = Vec::new();
    for i in 1..intensity.len() - 1 {
        if intensity[i] > floor
            && intensity[i] >= intensity[i - 1]
            && intensity[i] > intensity[i + 1]
        {
            // Quadratic interpolation around the bin maximum.
            let denom = intensity[i - 1] - 2.0 * intensity[i] + intensity[i + 1];
            let shift = if denom.abs() > 1e-300 {
                0.5 * (intensity[i - 1] - intensity[i + 1]) / denom
            } else {
                0.0
            };
            peaks.push(Peak {
                omega_au: omega[i] + shift.clamp(-0.5, 0.5) * d_omega,
                intensity: intensity[i],
            });
        }
    }
    peaks.sort_by(|a, b| b.intensity.partial_cmp(&a.intensity).unwrap());
    peaks
}

impl SpectrumResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serialization cannot fail")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega_ev,intensity\n");
        for (w, i) in self.omega_au.iter().zip(&self.intensities) {
            out.push_str(&format!("{},{}\n", w * units::EV_PER_HARTREE, i));
        }
        out
    }

    /// Frequency-bin width of the transform.
    pub fn bin_width(&self) -> f64 {
        if self.omega_au.len() > 1 {
            self.omega_au[1] - self.omega_au[0]
        } else {
            0.0
        }
    }
}
