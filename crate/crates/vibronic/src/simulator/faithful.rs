//! Gate-faithful backend: every simulated register is explicit in the
//! statevector. The phase-gradient register is initialized once to the
//! resource state `R[g] = 2^{-w/2}·e^{−2πi g/2^w}`; modular addition into it
//! kicks back exactly the phase the semantic backend applies directly.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circuit::sign_extend;
use crate::circuit::{Gate, GateList, Reg, RegSpan, RegisterLayout, Tag};
use crate::simulator::semantic::apply_dft;
use crate::simulator::{
    SimError, SimOutput, StateVector, FAITHFUL_QUBIT_CAP, FAITHFUL_WIDTH_CAP,
};

fn value(layout: &RegisterLayout, idx: usize, reg: Reg) -> i64 {
    let span = layout.span(reg);
    sign_extend((idx as u64 >> span.offset) & span.mask(), span.bits)
}

fn for_each_base(total: usize, span: RegSpan, mut f: impl FnMut(usize)) {
    let stride = 1usize << span.offset;
    let block = stride << span.bits;
    for block_base in (0..total).step_by(block) {
        for low in 0..stride {
            f(block_base + low);
        }
    }
}

/// XOR a per-base constant into the register: swap paired slice entries.
fn xor_register(
    amps: &mut [Complex64],
    span: RegSpan,
    constant: impl Fn(usize) -> u64,
) {
    let stride = 1usize << span.offset;
    let points = 1usize << span.bits;
    for_each_base(amps.len(), span, |base| {
        let c = constant(base) as usize & (points - 1);
        if c == 0 {
            return;
        }
        for v in 0..points {
            let w = v ^ c;
            if v < w {
                amps.swap(base + v * stride, base + w * stride);
            }
        }
    });
}

/// Add a per-base shift into the register: rotate the slice.
fn shift_register(
    amps: &mut [Complex64],
    scratch: &mut Vec<Complex64>,
    span: RegSpan,
    shift: impl Fn(usize) -> u64,
) {
    let stride = 1usize << span.offset;
    let points = 1usize << span.bits;
    scratch.resize(points, Complex64::new(0.0, 0.0));
    for_each_base(amps.len(), span, |base| {
        let s = shift(base) as usize & (points - 1);
        if s == 0 {
            return;
        }
        for (v, sc) in scratch.iter_mut().enumerate() {
            *sc = amps[base + v * stride];
        }
        for v in 0..points {
            amps[base + ((v + s) & (points - 1)) * stride] = scratch[v];
        }
    });
}

pub fn run(state: &StateVector, list: &GateList) -> Result<SimOutput, SimError> {
    let layout = &list.layout;
    let total_bits = layout.arithmetic_bits();
    if total_bits > FAITHFUL_QUBIT_CAP {
        return Err(SimError::SizeCap {
            what: "gate-faithful backend",
            needed: 1usize << total_bits,
            cap: 1usize << FAITHFUL_QUBIT_CAP,
        });
    }
    if layout.format.width > FAITHFUL_WIDTH_CAP {
        return Err(SimError::WidthCap { width: layout.format.width, cap: FAITHFUL_WIDTH_CAP });
    }

    let grad = layout.span(Reg::Gradient);
    let grad_points = 1usize << grad.bits;
    let resource: Vec<Complex64> = (0..grad_points)
        .map(|g| {
            Complex64::from_polar(
                1.0 / (grad_points as f64).sqrt(),
                -TAU * g as f64 / grad_points as f64,
            )
        })
        .collect();

    let total = 1usize << total_bits;
    let mut amps = vec![Complex64::new(0.0, 0.0); total];
    for (sys, &a) in state.amps.iter().enumerate() {
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (g, &r) in resource.iter().enumerate() {
            amps[sys | (g << grad.offset)] = a * r;
        }
    }

    let mut stack: Vec<(Tag, Gate)> = Vec::new();
    let mut scratch = Vec::new();
    for gate in &list.gates {
        apply(gate, layout, &mut amps, &mut stack, &mut scratch, false)?;
    }
    if let Some((tag, _)) = stack.last() {
        return Err(SimError::UnmatchedUncompute { tag: *tag });
    }

    // Project onto (ancillas = 0) ⊗ R and measure how much survived.
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    for (sys, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (g, &r) in resource.iter().enumerate() {
            acc += r.conj() * amps[sys | (g << grad.offset)];
        }
        *o = acc;
    }
    let in_norm: f64 = state.amps.iter().map(|a| a.norm_sqr()).sum();
    let out_norm: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    let hygiene = if in_norm > 0.0 { out_norm / in_norm } else { 1.0 };

    Ok(SimOutput {
        state: StateVector {
            amps: out,
            electronic_bits: state.electronic_bits,
            mode_bits: state.mode_bits,
            mode_count: state.mode_count,
        },
        ancilla_fidelity: hygiene,
    })
}

fn apply(
    gate: &Gate,
    layout: &RegisterLayout,
    amps: &mut [Complex64],
    stack: &mut Vec<(Tag, Gate)>,
    scratch: &mut Vec<Complex64>,
    inverting: bool,
) -> Result<(), SimError> {
    match gate {
        Gate::Load { tag, target, table } => {
            let span = layout.span(*target);
            let emask = if layout.electronic_bits == 0 {
                0usize
            } else {
                (1usize << layout.electronic_bits) - 1
            };
            xor_register(amps, span, |base| table[base & emask]);
            if !inverting {
                stack.push((*tag, gate.clone()));
            }
            Ok(())
        }
        Gate::LoadImmediate { tag, target, value } => {
            let span = layout.span(*target);
            let value = *value;
            xor_register(amps, span, |_| value);
            if !inverting {
                stack.push((*tag, gate.clone()));
            }
            Ok(())
        }
        Gate::Mult { tag, src_a, src_b, dst } => {
            let span = layout.span(*dst);
            let sign: i128 = if inverting { -1 } else { 1 };
            let modulus = 1i128 << span.bits;
            shift_register(amps, scratch, span, |base| {
                let a = value(layout, base, *src_a) as i128;
                let b = value(layout, base, *src_b) as i128;
                (sign * a * b).rem_euclid(modulus) as u64
            });
            if !inverting {
                stack.push((*tag, gate.clone()));
            }
            Ok(())
        }
        Gate::MultAddPhase { src_a, src_b } => {
            let span = layout.span(Reg::Gradient);
            let int_bits = layout.format.int_bits();
            let modulus = 1i128 << span.bits;
            shift_register(amps, scratch, span, |base| {
                let a = value(layout, base, *src_a) as i128;
                let b = value(layout, base, *src_b) as i128;
                ((a * b) << int_bits).rem_euclid(modulus) as u64
            });
            Ok(())
        }
        Gate::AddPhase { src } => {
            let span = layout.span(Reg::Gradient);
            let int_bits = layout.format.int_bits();
            let modulus = 1i128 << span.bits;
            shift_register(amps, scratch, span, |base| {
                let v = value(layout, base, *src) as i128;
                (v << int_bits).rem_euclid(modulus) as u64
            });
            Ok(())
        }
        Gate::Uncompute { tag } => match stack.pop() {
            Some((top, original)) if top == *tag => {
                apply(&original, layout, amps, stack, scratch, true)
            }
            Some(other) => {
                stack.push(other);
                Err(SimError::UnmatchedUncompute { tag: *tag })
            }
            None => Err(SimError::UnmatchedUncompute { tag: *tag }),
        },
        Gate::Hadamard { qubit } => {
            let bit = 1usize << qubit;
            let s = std::f64::consts::FRAC_1_SQRT_2;
            for idx in 0..amps.len() {
                if idx & bit == 0 {
                    let lo = amps[idx];
                    let hi = amps[idx | bit];
                    amps[idx] = (lo + hi) * s;
                    amps[idx | bit] = (lo - hi) * s;
                }
            }
            Ok(())
        }
        Gate::PauliX { qubit } => {
            let bit = 1usize << qubit;
            for idx in 0..amps.len() {
                if idx & bit == 0 {
                    amps.swap(idx, idx | bit);
                }
            }
            Ok(())
        }
        Gate::Cnot { control, target } => {
            let cbit = 1usize << control;
            let tbit = 1usize << target;
            for idx in 0..amps.len() {
                if idx & cbit != 0 && idx & tbit == 0 {
                    amps.swap(idx, idx | tbit);
                }
            }
            Ok(())
        }
        Gate::QftConj { mode, inverse } => {
            let span = layout.span(Reg::Mode(*mode));
            apply_dft(amps, span.offset, span.bits, *inverse != inverting);
            Ok(())
        }
    }
}
