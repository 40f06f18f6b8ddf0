//! Product-formula planning: fragment sequences for orders 1, 2, and 4,
//! compiled step/evolution builders, and the empirical step-count selector.
//!
//! One step covers the potential fragments in ascending offset order with the
//! kinetic sweep last. The second-order step is the symmetric palindrome with
//! half angles; the repeated middle factor and the factors meeting at step
//! boundaries are fused into single exponentials with summed angles, which
//! changes nothing semantically and is how the costs are counted. Order 4 is
//! the recursive symmetric construction with `u = 1/(4 − 4^{1/3})`.

use crate::circuit::compile::{compile_diagonal_fragment, compile_kinetic, CompileOptions};
use crate::circuit::layout::{resolve_format, RegisterLayout};
use crate::circuit::{CompileError, FitError, GateList, TagGen};
use crate::fragmentation::fragments;
use crate::grid::{self, GridConfig};
use crate::model::VibronicModel;
use crate::observables::prepare_vertical_excitation;
use crate::simulator::{apply_gates, oracle::ExactPropagator, Backend, StateVector};

/// One exponential in a product formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FragTag {
    Potential(usize),
    Kinetic,
}

/// Fragment sequence of a single step (angles already include θ).
pub fn step_sequence(
    n_potential: usize,
    order: u32,
    theta: f64,
) -> Result<Vec<(FragTag, f64)>, CompileError> {
    let forward = |angle: f64| -> Vec<(FragTag, f64)> {
        (0..n_potential)
            .map(|m| (FragTag::Potential(m), angle))
            .chain(std::iter::once((FragTag::Kinetic, angle)))
            .collect()
    };
    let second = |angle: f64| -> Vec<(FragTag, f64)> {
        let mut seq = forward(angle / 2.0);
        let mut back = seq.clone();
        back.reverse();
        seq.extend(back);
        fuse(seq)
    };
    match order {
        1 => Ok(forward(theta)),
        2 => Ok(second(theta)),
        4 => {
            let u = 1.0 / (4.0 - 4f64.powf(1.0 / 3.0));
            let mut seq = Vec::new();
            for c in [u, u, 1.0 - 4.0 * u, u, u] {
                seq.extend(second(c * theta));
            }
            Ok(fuse(seq))
        }
        other => Err(CompileError::InvalidOrder(other)),
    }
}

/// `n_steps` repetitions of the step with θ = t / n_steps, fused across step
/// boundaries.
pub fn evolution_sequence(
    n_potential: usize,
    order: u32,
    t: f64,
    n_steps: usize,
) -> Result<Vec<(FragTag, f64)>, CompileError> {
    if n_steps == 0 {
        return Err(CompileError::ZeroSteps);
    }
    let step = step_sequence(n_potential, order, t / n_steps as f64)?;
    let mut seq = Vec::with_capacity(step.len() * n_steps);
    for _ in 0..n_steps {
        seq.extend(step.iter().copied());
    }
    Ok(fuse(seq))
}

fn fuse(seq: Vec<(FragTag, f64)>) -> Vec<(FragTag, f64)> {
    let mut out: Vec<(FragTag, f64)> = Vec::with_capacity(seq.len());
    for (tag, angle) in seq {
        match out.last_mut() {
            Some((last_tag, last_angle)) if *last_tag == tag => *last_angle += angle,
            _ => out.push((tag, angle)),
        }
    }
    out
}

/// A planned evolution: the per-step sequence and the fused full sequence.
#[derive(Debug, Clone)]
pub struct TrotterPlan {
    pub order: u32,
    pub step_angle: f64,
    pub n_steps: usize,
    pub step: Vec<(FragTag, f64)>,
    pub evolution: Vec<(FragTag, f64)>,
}

impl TrotterPlan {
    pub fn new(
        n_potential: usize,
        order: u32,
        t: f64,
        n_steps: usize,
    ) -> Result<Self, CompileError> {
        if n_steps == 0 {
            return Err(CompileError::ZeroSteps);
        }
        let theta = t / n_steps as f64;
        Ok(Self {
            order,
            step_angle: theta,
            n_steps,
            step: step_sequence(n_potential, order, theta)?,
            evolution: evolution_sequence(n_potential, order, t, n_steps)?,
        })
    }
}

fn compile_sequence(
    model: &VibronicModel,
    g: GridConfig,
    seq: &[(FragTag, f64)],
    opts: &CompileOptions,
) -> Result<GateList, CompileError> {
    let max_angle = seq.iter().map(|&(_, a)| a.abs()).fold(0.0f64, f64::max);
    let format = resolve_format(
        model,
        g,
        max_angle,
        opts.include_v0,
        true,
        opts.frac_bits,
        opts.pinned_width,
    )?;
    let layout = RegisterLayout::for_evolution(model, g, format);
    let frags = fragments(model);
    let mut tags = TagGen::default();
    let mut gates = Vec::new();
    for &(tag, angle) in seq {
        match tag {
            FragTag::Potential(m) => gates.extend(compile_diagonal_fragment(
                &frags[m], model, g, angle, &layout, opts, &mut tags,
            )?),
            FragTag::Kinetic => {
                gates.extend(compile_kinetic(model, g, angle, &layout, &mut tags)?)
            }
        }
    }
    Ok(GateList { layout, gates })
}

/// Compile one product-formula step of angle θ.
pub fn build_trotter_step(
    model: &VibronicModel,
    g: GridConfig,
    theta: f64,
    order: u32,
    opts: &CompileOptions,
) -> Result<GateList, CompileError> {
    let seq = step_sequence(model.n_states, order, opts.angle_sign() * theta)?;
    compile_sequence(model, g, &seq, opts)
}

/// Compile the full evolution `exp(i·H·t)` as `n_steps` fused steps.
pub fn build_evolution(
    model: &VibronicModel,
    g: GridConfig,
    t: f64,
    n_steps: usize,
    order: u32,
    opts: &CompileOptions,
) -> Result<GateList, CompileError> {
    let seq = evolution_sequence(model.n_states, order, opts.angle_sign() * t, n_steps)?;
    compile_sequence(model, g, &seq, opts)
}

/// Upper limit for proxy-model probe simulations. Probing needs many full
/// evolutions, so the proxy is kept well under the semantic-backend cap.
pub const PROXY_DIM_LIMIT: usize = 1 << 15;

/// Reduce a model to its strongest-coupled modes until the Hilbert space fits
/// `dim_limit`. Returns the proxy and the kept (original) mode indices.
pub fn proxy_model(
    model: &VibronicModel,
    g: GridConfig,
    dim_limit: usize,
) -> (VibronicModel, Vec<usize>) {
    let k = g.bits() as usize;
    let mut m_max = 0usize;
    while m_max < model.mode_count()
        && (model.n_states as u128) << (k * (m_max + 1)) <= dim_limit as u128
    {
        m_max += 1;
    }
    if m_max >= model.mode_count() {
        return (model.clone(), (0..model.mode_count()).collect());
    }

    // Rank modes by total coupling weight.
    let mut weight = vec![0.0f64; model.mode_count()];
    for block in model.couplings.values() {
        for (index, &c) in block {
            for &(r, _) in index.exponents() {
                weight[r] += c.abs();
            }
        }
    }
    let mut order: Vec<usize> = (0..model.mode_count()).collect();
    order.sort_by(|&a, &b| {
        weight[b]
            .partial_cmp(&weight[a])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut kept: Vec<usize> = order.into_iter().take(m_max.max(1)).collect();
    kept.sort_unstable();
    let remap: std::collections::BTreeMap<usize, usize> =
        kept.iter().enumerate().map(|(new, &old)| (old, new)).collect();

    let mut proxy = VibronicModel::new(
        model.n_states_logical,
        kept.iter().map(|&r| model.frequencies[r]).collect(),
        model.max_degree,
    );
    for (&(j, i), block) in &model.couplings {
        if j > i {
            continue;
        }
        for (index, &c) in block {
            if index.exponents().iter().all(|(r, _)| remap.contains_key(r)) {
                let new_index = crate::model::MultiIndex::new(
                    index.exponents().iter().map(|&(r, a)| (remap[&r], a)).collect(),
                )
                .expect("remapped index stays valid");
                proxy.set_coupling(j, i, new_index, c);
            }
        }
    }
    (proxy, kept)
}

/// Trace distance between pure states.
pub fn state_distance(a: &StateVector, b: &StateVector) -> f64 {
    let overlap = a.overlap(b).norm();
    (1.0 - (overlap * overlap).min(1.0)).max(0.0).sqrt()
}

/// Result of the empirical step-count fit `error(r) = a·r^{−p}`.
#[derive(Debug, Clone)]
pub struct StepSelection {
    pub steps: usize,
    /// Fitted coefficient `a` (conservative: the largest probe estimate).
    pub fit_coefficient: f64,
    /// `(step count, measured error)` pairs used for the fit.
    pub probes: Vec<(usize, f64)>,
    /// Original indices of the proxy's modes.
    pub proxy_modes: Vec<usize>,
}

/// Fit `error(r) = a·r^{−p}` and return the smallest step count whose
/// predicted error meets the target. Probe errors must decrease with r.
pub fn fit_power_law(probes: &[(usize, f64)], order: u32, epsilon: f64) -> Result<(usize, f64), FitError> {
    if probes.len() < 2 {
        return Err(FitError::TooFewProbes(probes.len()));
    }
    for w in probes.windows(2) {
        let floor = 1e-12;
        if w[1].1 >= w[0].1 && w[0].1 > floor {
            return Err(FitError::NonMonotone(probes.to_vec()));
        }
    }
    let a = probes
        .iter()
        .map(|&(r, e)| e * (r as f64).powi(order as i32))
        .fold(0.0f64, f64::max);
    let steps = if a <= epsilon {
        1
    } else {
        (a / epsilon).powf(1.0 / order as f64).ceil() as usize
    };
    Ok((steps.max(1), a))
}

/// Evolution error of a compiled run against the dense oracle. Needs the
/// oracle-size model; used by the closed-loop checks.
pub fn evolution_error(
    model: &VibronicModel,
    g: GridConfig,
    psi0: &StateVector,
    t: f64,
    n_steps: usize,
    order: u32,
    opts: &CompileOptions,
) -> Result<f64, FitError> {
    let list = build_evolution(model, g, t, n_steps, order, opts)?;
    let run = apply_gates(psi0, &list, Backend::Semantic)
        .map_err(|e| FitError::Simulation(e.to_string()))?;
    let prop = ExactPropagator::new(model, g, opts.include_v0)
        .map_err(|e| FitError::Simulation(e.to_string()))?;
    let reference = prop.evolve(psi0, opts.angle_sign() * t);
    Ok(state_distance(&run.state, &reference))
}

/// Pick the number of steps for a target error by probing a desk-scale proxy.
///
/// Probes escalate geometrically until the measured error leaves the
/// saturated regime, then at least two step counts feed the power-law fit.
/// The reference is the dense oracle when the proxy fits it, otherwise a
/// compiled run at four times the largest probe count.
pub fn select_step_count(
    model: &VibronicModel,
    g: GridConfig,
    t: f64,
    epsilon: f64,
    order: u32,
    probe_budget: usize,
    opts: &CompileOptions,
) -> Result<StepSelection, FitError> {
    let (proxy, kept) = proxy_model(model, g, PROXY_DIM_LIMIT);
    let j0 = 1.min(proxy.n_states_logical - 1);
    let psi0 = prepare_vertical_excitation(&proxy, g, j0)
        .map_err(|e| FitError::Simulation(e.to_string()))?;
    let dim = grid::hilbert_dim(&proxy, g);

    let evolve = |r: usize| -> Result<StateVector, FitError> {
        let list = build_evolution(&proxy, g, t, r, order, opts)?;
        Ok(apply_gates(&psi0, &list, Backend::Semantic)
            .map_err(|e| FitError::Simulation(e.to_string()))?
            .state)
    };

    // Escalate until successive runs stop moving much: the step count has
    // entered the power-law regime.
    let mut r = 4usize;
    let mut psi_r = evolve(r)?;
    loop {
        let psi_2r = evolve(2 * r)?;
        let defect = state_distance(&psi_r, &psi_2r);
        if defect <= 0.2 || r >= (1 << 14) {
            psi_r = psi_2r;
            break;
        }
        r *= 2;
        psi_r = psi_2r;
    }
    let base = r;
    let n_probes = probe_budget.max(2);
    let mut probe_states: Vec<(usize, StateVector)> = vec![(2 * base, psi_r)];
    for i in 0..n_probes - 1 {
        let rp = base << (2 + i);
        probe_states.push((rp, evolve(rp)?));
    }

    let r_max = probe_states.last().unwrap().0;
    let reference = if dim <= crate::grid::DENSE_SIDE_CAP {
        let prop = ExactPropagator::new(&proxy, g, opts.include_v0)
            .map_err(|e| FitError::Simulation(e.to_string()))?;
        prop.evolve(&psi0, opts.angle_sign() * t)
    } else {
        // Fine-step reference: its own error is a factor 16 below the last
        // probe's, a few percent of bias on the fit.
        evolve(4 * r_max)?
    };

    let probes: Vec<(usize, f64)> = probe_states
        .iter()
        .map(|(rp, psi)| (*rp, state_distance(psi, &reference)))
        .collect();
    let (steps, a) = fit_power_law(&probes, order, epsilon)?;
    Ok(StepSelection { steps, fit_coefficient: a, probes, proxy_modes: kept })
}
