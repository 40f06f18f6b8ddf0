//! Compiled gate lists against direct phase computation and the dense
//! propagator: arithmetic faithfulness, ancilla hygiene, cache equivalence,
//! backend agreement, and product-formula convergence.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};

use vibronic::circuit::{
    build_evolution, build_trotter_step, compile_diagonal_fragment, CompileOptions,
    FixedPointFormat, Gate, GateList, Reg, RegisterLayout, TagGen,
};
use vibronic::fragmentation::fragments;
use vibronic::grid::{self, GridConfig};
use vibronic::model::{MultiIndex, VibronicModel};
use vibronic::simulator::oracle::ExactPropagator;
use vibronic::simulator::{apply_gates, Backend, SimError, StateVector};

fn random_state(model: &VibronicModel, g: GridConfig, seed: u64) -> StateVector {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut s = StateVector::zeroed(model, g);
    for a in &mut s.amps {
        *a = Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    }
    s.normalize();
    s
}

#[test]
fn single_linear_term_phases() {
    // One state, one mode, single linear term: the compiled list must phase
    // each grid label by θ·c·Δ·s(x) within the fixed-point resolution.
    let theta = 0.8;
    let c = 0.37;
    let mut model = VibronicModel::new(1, vec![1.0], 1);
    model.set_coupling(0, 0, MultiIndex::linear(0), c);
    let g = GridConfig::new(3).unwrap();
    let format = FixedPointFormat::new(8, 8).unwrap();
    let layout = RegisterLayout::new(&model, g, format, 1);
    let opts = CompileOptions { include_v0: false, ..Default::default() };
    let mut tags = TagGen::default();
    let frags = fragments(&model);
    let gates =
        compile_diagonal_fragment(&frags[0], &model, g, theta, &layout, &opts, &mut tags).unwrap();
    let list = GateList { layout, gates };

    // Per-term phase error: coefficient rounding (half an lsb in revolutions)
    // times the largest monomial magnitude.
    let tol = std::f64::consts::TAU * 0.5 / 256.0 * (g.points() / 2) as f64;
    for x in 0..g.points() {
        let input = StateVector::basis(&model, g, x);
        let out = apply_gates(&input, &list, Backend::Semantic).unwrap();
        let expect = theta * c * grid::signed_value(g, x).unwrap();
        let got = out.state.amps[x].arg();
        let diff = (Complex64::from_polar(1.0, expect - got) - Complex64::new(1.0, 0.0)).norm();
        assert!(diff < tol, "x={x}: expect {expect}, got {got}");
        assert!((out.state.amps[x].norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn cross_term_gate_shape_and_phase() {
    // Two modes, one cross term per electronic state: multiply the mode
    // registers, load, accumulate, unload, release.
    let mut model = VibronicModel::new(2, vec![1.0, 1.0], 2);
    model.set_coupling(0, 0, MultiIndex::new(vec![(0, 1), (1, 1)]).unwrap(), 0.21);
    model.set_coupling(1, 1, MultiIndex::new(vec![(0, 1), (1, 1)]).unwrap(), -0.13);
    let g = GridConfig::new(3).unwrap();
    let format = FixedPointFormat::new(24, 24).unwrap();
    let layout = RegisterLayout::new(&model, g, format, 2);
    let opts = CompileOptions { include_v0: false, ..Default::default() };
    let mut tags = TagGen::default();
    let frags = fragments(&model);
    let gates =
        compile_diagonal_fragment(&frags[0], &model, g, 1.0, &layout, &opts, &mut tags).unwrap();

    let kinds: Vec<&str> = gates
        .iter()
        .map(|gate| match gate {
            Gate::Mult { .. } => "mult",
            Gate::Load { .. } => "load",
            Gate::MultAddPhase { .. } => "multaddphase",
            Gate::Uncompute { .. } => "uncompute",
            other => panic!("unexpected gate {other:?}"),
        })
        .collect();
    assert_eq!(kinds, vec!["mult", "load", "multaddphase", "uncompute", "uncompute"]);

    // Basis state e=1, x0=3, x1=2 picks up exp(i·Δ²·c^{(1,1)}·3·2).
    let list = GateList { layout, gates };
    let idx = 1 | (3 << 1) | (2 << 4);
    let input = StateVector::basis(&model, g, idx);
    let out = apply_gates(&input, &list, Backend::Semantic).unwrap().state;
    let expect = g.spacing().powi(2) * (-0.13) * 3.0 * 2.0;
    let got = out.amps[idx].arg();
    assert!(
        (Complex64::from_polar(1.0, expect - got) - Complex64::new(1.0, 0.0)).norm() < 1e-5,
        "expect {expect} got {got}"
    );
}

#[test]
fn zero_angle_compiles_to_identity() {
    let mut model = VibronicModel::new(2, vec![0.9], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.4);
    model.set_coupling(0, 0, MultiIndex::linear(0), 0.2);
    let g = GridConfig::new(3).unwrap();
    let list = build_trotter_step(&model, g, 0.0, 2, &CompileOptions::default()).unwrap();
    let input = random_state(&model, g, 3);
    let out = apply_gates(&input, &list, Backend::Semantic).unwrap();
    assert!((out.state.fidelity(&input) - 1.0).abs() < 1e-12);
}

#[test]
fn kinetic_block_matches_dense_exponential() {
    let model = VibronicModel::new(1, vec![1.0], 0);
    let g = GridConfig::new(4).unwrap();
    let theta = 0.4;
    let opts = CompileOptions { include_v0: false, frac_bits: 30, ..Default::default() };
    // Kinetic-only model: the full step is just the kinetic sweep plus an
    // empty diagonal fragment.
    let list = build_trotter_step(&model, g, theta, 1, &opts).unwrap();
    let psi = {
        let mut s = StateVector::zeroed(&model, g);
        let chi = vibronic::observables::gaussian_mode_amplitudes(g);
        for (x, a) in s.amps.iter_mut().enumerate() {
            *a = Complex64::new(chi[x], 0.0);
        }
        s
    };
    let compiled = apply_gates(&psi, &list, Backend::Semantic).unwrap().state;
    let exact = ExactPropagator::new(&model, g, false)
        .unwrap()
        .evolve(&psi, theta);
    assert!(
        compiled.fidelity(&exact) > 1.0 - 1e-6,
        "fidelity {}",
        compiled.fidelity(&exact)
    );
}

#[test]
fn kinetic_mode_blocks_commute() {
    let model = VibronicModel::new(1, vec![0.7, 1.3], 0);
    let g = GridConfig::new(2).unwrap();
    let opts = CompileOptions { include_v0: false, ..Default::default() };
    let list = build_trotter_step(&model, g, 0.6, 1, &opts).unwrap();
    // The kinetic sweep is one block of gates per mode; swap the two blocks.
    let gates = list.gates.clone();
    let boundary = gates
        .iter()
        .position(|g| matches!(g, Gate::QftConj { mode: 1, .. }))
        .unwrap();
    let mut swapped: Vec<Gate> = gates[boundary..].to_vec();
    swapped.extend_from_slice(&gates[..boundary]);
    let reordered = GateList { layout: list.layout.clone(), gates: swapped };

    let input = random_state(&model, g, 11);
    let a = apply_gates(&input, &list, Backend::Semantic).unwrap().state;
    let b = apply_gates(&input, &reordered, Backend::Semantic).unwrap().state;
    assert!((a.fidelity(&b) - 1.0).abs() < 1e-12);
}

#[test]
fn cache_on_off_same_unitary_fewer_toffolis() {
    let mut model = VibronicModel::new(2, vec![1.0, 1.0, 1.0], 3);
    for (j, scale) in [(0usize, 1.0f64), (1, -0.6)] {
        model.set_coupling(j, j, MultiIndex::linear(0), 0.11 * scale);
        model.set_coupling(j, j, MultiIndex::linear(1), 0.07 * scale);
        model.set_coupling(j, j, MultiIndex::new(vec![(0, 1), (1, 1)]).unwrap(), 0.05 * scale);
        model.set_coupling(
            j,
            j,
            MultiIndex::new(vec![(0, 1), (1, 1), (2, 1)]).unwrap(),
            0.03 * scale,
        );
        model.set_coupling(j, j, MultiIndex::power(0, 2), 0.02 * scale);
    }
    let g = GridConfig::new(2).unwrap();
    let cached_opts = CompileOptions { include_v0: false, ..Default::default() };
    let uncached_opts = CompileOptions { caching: false, ..cached_opts };
    let with = build_trotter_step(&model, g, 0.9, 1, &cached_opts).unwrap();
    let without = build_trotter_step(&model, g, 0.9, 1, &uncached_opts).unwrap();

    let cost = vibronic::resources::CostModel::default();
    let t_with = vibronic::resources::count_toffoli(&with, &cost);
    let t_without = vibronic::resources::count_toffoli(&without, &cost);
    assert!(t_with < t_without, "{t_with} vs {t_without}");

    for seed in 0..20 {
        let input = random_state(&model, g, 100 + seed);
        let a = apply_gates(&input, &with, Backend::Semantic).unwrap().state;
        let b = apply_gates(&input, &without, Backend::Semantic).unwrap().state;
        assert!((a.fidelity(&b) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn faithful_and_semantic_agree_on_full_step() {
    // Small enough for the faithful backend: N=2, M=1, k=2, width 6 plus the
    // degree-2 cache = 19 simulated qubits.
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
    assert!(list.layout.arithmetic_bits() <= 24);

    let input = random_state(&model, g, 21);
    let sem = apply_gates(&input, &list, Backend::Semantic).unwrap();
    let faith = apply_gates(&input, &list, Backend::GateFaithful).unwrap();
    assert!(faith.ancilla_fidelity > 1.0 - 1e-10, "hygiene {}", faith.ancilla_fidelity);
    let fid = sem.state.fidelity(&faith.state);
    assert!((fid - 1.0).abs() < 1e-9, "fidelity {fid}");
}

#[test]
fn palindrome_orders_invert_with_negated_angle() {
    let mut model = VibronicModel::new(2, vec![1.1], 1);
    model.set_coupling(0, 1, MultiIndex::linear(0), 0.2);
    model.set_coupling(0, 0, MultiIndex::constant(), 0.3);
    let g = GridConfig::new(3).unwrap();
    let opts = CompileOptions::default();
    for order in [2u32, 4] {
        let forward = build_trotter_step(&model, g, 0.7, order, &opts).unwrap();
        let backward = build_trotter_step(&model, g, -0.7, order, &opts).unwrap();
        let input = random_state(&model, g, 31);
        let mid = apply_gates(&input, &forward, Backend::Semantic).unwrap().state;
        let back = apply_gates(&mid, &backward, Backend::Semantic).unwrap().state;
        assert!(
            (back.fidelity(&input) - 1.0).abs() < 1e-10,
            "order {order}: fidelity {}",
            back.fidelity(&input)
        );
    }
}

#[test]
fn physics_sign_flips_the_evolution() {
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.25);
    let g = GridConfig::new(2).unwrap();
    let forward = CompileOptions::default();
    let phys = CompileOptions { physics_sign: true, ..forward };
    let fwd = build_evolution(&model, g, 0.9, 4, 2, &forward).unwrap();
    let bwd = build_evolution(&model, g, 0.9, 4, 2, &phys).unwrap();
    let input = random_state(&model, g, 5);
    let a = apply_gates(&input, &fwd, Backend::Semantic).unwrap().state;
    let b = apply_gates(&a, &bwd, Backend::Semantic).unwrap().state;
    assert!((b.fidelity(&input) - 1.0).abs() < 1e-10);
}

#[test]
fn per_step_error_orders() {
    // Local error of one step: O(θ²) at first order, O(θ³) at second.
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.6);
    model.set_coupling(0, 0, MultiIndex::linear(0), 0.4);
    model.set_coupling(1, 1, MultiIndex::linear(0), -0.3);
    let g = GridConfig::new(2).unwrap();
    let opts = CompileOptions { frac_bits: 34, ..Default::default() };
    let prop = ExactPropagator::new(&model, g, true).unwrap();
    let input = random_state(&model, g, 47);

    for (order, expect_slope, tol) in [(1u32, 2.0, 0.25), (2, 3.0, 0.25)] {
        let thetas = [0.2, 0.1, 0.05, 0.025];
        let mut errs = Vec::new();
        for &theta in &thetas {
            let list = build_trotter_step(&model, g, theta, order, &opts).unwrap();
            let stepped = apply_gates(&input, &list, Backend::Semantic).unwrap().state;
            let exact = prop.evolve(&input, theta);
            let overlap = stepped.fidelity(&exact);
            errs.push((1.0 - overlap * overlap).max(0.0).sqrt());
        }
        let slope = fit_slope(&thetas, &errs);
        assert!(
            (slope - expect_slope).abs() < tol,
            "order {order}: slope {slope}, errors {errs:?}"
        );
    }
}

fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

#[test]
fn ancilla_misuse_is_detected() {
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 0, MultiIndex::linear(0), 0.2);
    let g = GridConfig::new(2).unwrap();
    let format = FixedPointFormat::new(8, 8).unwrap();
    let layout = RegisterLayout::new(&model, g, format, 2);

    // Load without unload: dirty at the end.
    let dirty = GateList {
        layout: layout.clone(),
        gates: vec![Gate::Load { tag: 0, target: Reg::Coeff, table: vec![3, 5] }],
    };
    let input = StateVector::basis(&model, g, 0);
    match apply_gates(&input, &dirty, Backend::Semantic) {
        Err(SimError::UnmatchedUncompute { .. }) | Err(SimError::DirtyAncilla { .. }) => {}
        other => panic!("expected dirty-ancilla failure, got {other:?}"),
    }

    // Hadamard between load and unload: superposition over a dirty register.
    let entangling = GateList {
        layout: layout.clone(),
        gates: vec![
            Gate::Load { tag: 0, target: Reg::Coeff, table: vec![3, 5] },
            Gate::Hadamard { qubit: 0 },
            Gate::Uncompute { tag: 0 },
        ],
    };
    match apply_gates(&input, &entangling, Backend::Semantic) {
        Err(SimError::DirtyAncilla { .. }) => {}
        other => panic!("expected dirty-ancilla failure, got {other:?}"),
    }

    // Uncompute of the wrong tag.
    let crossed = GateList {
        layout,
        gates: vec![
            Gate::Load { tag: 0, target: Reg::Coeff, table: vec![3, 5] },
            Gate::Load { tag: 1, target: Reg::Coeff, table: vec![1, 1] },
            Gate::Uncompute { tag: 0 },
            Gate::Uncompute { tag: 1 },
        ],
    };
    match apply_gates(&input, &crossed, Backend::Semantic) {
        Err(SimError::UnmatchedUncompute { tag: 0 }) => {}
        other => panic!("expected unmatched uncompute, got {other:?}"),
    }
}

#[test]
fn semantic_amplitude_cap_is_enforced() {
    // 2 states on five 4-bit modes: 2·16⁵ amplitudes, past the 2²⁰ cap.
    let model = VibronicModel::new(2, vec![1.0; 5], 0);
    let g = GridConfig::new(4).unwrap();
    let opts = CompileOptions::default();
    let list = build_trotter_step(&model, g, 0.1, 1, &opts).unwrap();
    let input = StateVector::basis(&model, g, 0);
    match apply_gates(&input, &list, Backend::Semantic) {
        Err(SimError::SizeCap { .. }) => {}
        other => panic!("expected the semantic size cap, got {other:?}"),
    }
}

#[test]
fn pauli_x_gate_runs_on_both_backends() {
    // Not emitted by the current compilers, but part of the IR surface.
    let model = VibronicModel::new(2, vec![1.0], 1);
    let g = GridConfig::new(2).unwrap();
    let format = FixedPointFormat::new(6, 6).unwrap();
    let layout = RegisterLayout::new(&model, g, format, 1);
    let list = GateList {
        layout,
        gates: vec![Gate::PauliX { qubit: 0 }, Gate::PauliX { qubit: 2 }],
    };
    let input = StateVector::basis(&model, g, 0);
    let expect_idx = 1 | (1 << 2); // electronic bit 0 and mode bit 1 flipped
    for backend in [Backend::Semantic, Backend::GateFaithful] {
        let out = apply_gates(&input, &list, backend).unwrap().state;
        assert!((out.amps[expect_idx].re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn step_count_scales_with_time_as_the_power_law_predicts() {
    // With the target error fixed, doubling the evolution time raises the
    // selected step count by about 2^{1+1/p}.
    let mut model = VibronicModel::new(2, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.5);
    model.set_coupling(0, 0, MultiIndex::linear(0), 0.45);
    model.set_coupling(1, 1, MultiIndex::linear(0), -0.35);
    let g = GridConfig::new(2).unwrap();
    let opts = CompileOptions::default();
    let order = 2;
    let eps = 1e-4;
    let r1 = vibronic::circuit::select_step_count(&model, g, 4.0, eps, order, 2, &opts)
        .unwrap()
        .steps;
    let r2 = vibronic::circuit::select_step_count(&model, g, 8.0, eps, order, 2, &opts)
        .unwrap()
        .steps;
    let ratio = r2 as f64 / r1 as f64;
    let ideal = 2f64.powf(1.0 + 1.0 / order as f64);
    assert!(
        (ratio - ideal).abs() <= 0.2 * ideal,
        "ratio {ratio:.3} vs {ideal:.3} (r1={r1}, r2={r2})"
    );
}

#[test]
fn evolution_norm_and_padding_preserved() {
    // Padded electronic states stay empty through a compiled evolution.
    let mut model = VibronicModel::new(3, vec![1.0], 1);
    model.set_coupling(0, 1, MultiIndex::constant(), 0.3);
    model.set_coupling(1, 2, MultiIndex::linear(0), 0.2);
    let g = GridConfig::new(2).unwrap();
    assert_eq!(model.n_states, 4);
    let opts = CompileOptions::default();
    let list = build_evolution(&model, g, 1.5, 8, 2, &opts).unwrap();
    let init = vibronic::observables::prepare_vertical_excitation(&model, g, 0).unwrap();
    let out = apply_gates(&init, &list, Backend::Semantic).unwrap().state;
    assert!((out.norm() - 1.0).abs() < 1e-12);
    let mut padded = 0.0;
    for (idx, a) in out.amps.iter().enumerate() {
        if idx % 4 == 3 {
            padded += a.norm_sqr();
        }
    }
    assert!(padded < 1e-12, "padded population {padded}");
}
