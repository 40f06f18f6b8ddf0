//! Semantic backend: amplitudes over the system registers, arithmetic side
//! registers tracked as exact integers per basis label.
//!
//! Every arithmetic gate is diagonal on the system basis, so its effect per
//! label is an integer update plus (for the phase adders) a phase factor
//! `exp(2πi·v / 2^frac)` computed from the exact product. Superposition-
//! creating gates are only legal while the side registers are all zero;
//! applying one to a dirty register would entangle state the backend does not
//! represent, and is reported as an error.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::circuit::{Gate, GateList, Reg, RegisterLayout, Tag};
use crate::circuit::sign_extend;
use crate::simulator::{par_chunks, SimError, SimOutput, StateVector, SEMANTIC_DIM_CAP};

struct RegVals {
    bits: u32,
    values: Vec<u64>,
    nonzero: usize,
}

struct Env {
    dim: usize,
    regs: BTreeMap<Reg, RegVals>,
    stack: Vec<(Tag, Gate)>,
}

impl Env {
    fn new(dim: usize) -> Self {
        Self { dim, regs: BTreeMap::new(), stack: Vec::new() }
    }

    fn take(&mut self, reg: Reg, bits: u32) -> RegVals {
        self.regs.remove(&reg).unwrap_or_else(|| RegVals {
            bits,
            values: vec![0u64; self.dim],
            nonzero: 0,
        })
    }

    fn put(&mut self, reg: Reg, mut vals: RegVals) {
        vals.nonzero = vals.values.iter().filter(|&&v| v != 0).count();
        self.regs.insert(reg, vals);
    }

    fn assert_clean(&self, context: &'static str) -> Result<(), SimError> {
        for (reg, vals) in &self.regs {
            if vals.nonzero != 0 {
                return Err(SimError::DirtyAncilla { reg: reg.to_string(), context });
            }
        }
        Ok(())
    }

    /// Signed value of a register at one basis label.
    fn value(&self, layout: &RegisterLayout, idx: usize, reg: Reg) -> i64 {
        match reg {
            Reg::Mode(_) => {
                let span = layout.span(reg);
                sign_extend((idx as u64 >> span.offset) & span.mask(), span.bits)
            }
            _ => match self.regs.get(&reg) {
                Some(vals) => sign_extend(vals.values[idx], vals.bits),
                None => 0,
            },
        }
    }
}

fn reg_bits(layout: &RegisterLayout, reg: Reg) -> u32 {
    layout.span(reg).bits
}

fn phase_factor(product: i128, frac_bits: u32) -> Complex64 {
    let modulus = 1i128 << frac_bits;
    let frac = product.rem_euclid(modulus) as u64;
    Complex64::from_polar(1.0, TAU * frac as f64 / modulus as f64)
}

pub fn run(state: &StateVector, list: &GateList) -> Result<SimOutput, SimError> {
    let dim = state.dim();
    if dim > SEMANTIC_DIM_CAP {
        return Err(SimError::SizeCap { what: "semantic backend", needed: dim, cap: SEMANTIC_DIM_CAP });
    }
    let layout = &list.layout;
    let mut amps = state.amps.clone();
    let mut env = Env::new(dim);

    for gate in &list.gates {
        apply(gate, layout, &mut amps, &mut env, false)?;
    }

    if let Some((tag, _)) = env.stack.last() {
        return Err(SimError::UnmatchedUncompute { tag: *tag });
    }
    env.assert_clean("end of gate list")?;
    Ok(SimOutput {
        state: StateVector {
            amps,
            electronic_bits: state.electronic_bits,
            mode_bits: state.mode_bits,
            mode_count: state.mode_count,
        },
        ancilla_fidelity: 1.0,
    })
}

fn apply(
    gate: &Gate,
    layout: &RegisterLayout,
    amps: &mut [Complex64],
    env: &mut Env,
    inverting: bool,
) -> Result<(), SimError> {
    match gate {
        Gate::Load { tag, target, table } => {
            let emask = if layout.electronic_bits == 0 {
                0u64
            } else {
                (1u64 << layout.electronic_bits) - 1
            };
            let bits = reg_bits(layout, *target);
            let mut reg = env.take(*target, bits);
            par_chunks(&mut reg.values, |chunk, off| {
                for (i, v) in chunk.iter_mut().enumerate() {
                    let e = ((off + i) as u64 & emask) as usize;
                    *v ^= table[e];
                }
            });
            env.put(*target, reg);
            if !inverting {
                env.stack.push((*tag, gate.clone()));
            }
            Ok(())
        }
        Gate::LoadImmediate { tag, target, value } => {
            let bits = reg_bits(layout, *target);
            let mut reg = env.take(*target, bits);
            let value = *value;
            par_chunks(&mut reg.values, |chunk, _| {
                for v in chunk.iter_mut() {
                    *v ^= value;
                }
            });
            env.put(*target, reg);
            if !inverting {
                env.stack.push((*tag, gate.clone()));
            }
            Ok(())
        }
        Gate::Mult { tag, src_a, src_b, dst } => {
            assert!(*src_a != *dst && *src_b != *dst, "multiplier writes a source register");
            let bits = reg_bits(layout, *dst);
            let mask = ((1u128 << bits) - 1) as u64;
            let mut reg = env.take(*dst, bits);
            let sign: i128 = if inverting { -1 } else { 1 };
            {
                let env_ref = &*env;
                par_chunks(&mut reg.values, |chunk, off| {
                    for (i, v) in chunk.iter_mut().enumerate() {
                        let idx = off + i;
                        let a = env_ref.value(layout, idx, *src_a) as i128;
                        let b = env_ref.value(layout, idx, *src_b) as i128;
                        let cur = *v as i128;
                        *v = ((cur + sign * a * b).rem_euclid(1i128 << bits)) as u64 & mask;
                    }
                });
            }
            env.put(*dst, reg);
            if !inverting {
                env.stack.push((*tag, gate.clone()));
            }
            Ok(())
        }
        Gate::MultAddPhase { src_a, src_b } => {
            let frac = layout.format.frac_bits;
            let env_ref = &*env;
            par_chunks(amps, |chunk, off| {
                for (i, amp) in chunk.iter_mut().enumerate() {
                    let idx = off + i;
                    let a = env_ref.value(layout, idx, *src_a) as i128;
                    let b = env_ref.value(layout, idx, *src_b) as i128;
                    *amp *= phase_factor(a * b, frac);
                }
            });
            Ok(())
        }
        Gate::AddPhase { src } => {
            let frac = layout.format.frac_bits;
            let env_ref = &*env;
            par_chunks(amps, |chunk, off| {
                for (i, amp) in chunk.iter_mut().enumerate() {
                    let idx = off + i;
                    let v = env_ref.value(layout, idx, *src) as i128;
                    *amp *= phase_factor(v, frac);
                }
            });
            Ok(())
        }
        Gate::Uncompute { tag } => {
            match env.stack.pop() {
                Some((top_tag, original)) if top_tag == *tag => {
                    apply(&original, layout, amps, env, true)
                }
                Some(other) => {
                    env.stack.push(other);
                    Err(SimError::UnmatchedUncompute { tag: *tag })
                }
                None => Err(SimError::UnmatchedUncompute { tag: *tag }),
            }
        }
        Gate::Hadamard { qubit } => {
            env.assert_clean("Hadamard on a dirty environment")?;
            check_system_qubit(layout, *qubit)?;
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
            env.assert_clean("X on a dirty environment")?;
            check_system_qubit(layout, *qubit)?;
            let bit = 1usize << qubit;
            for idx in 0..amps.len() {
                if idx & bit == 0 {
                    amps.swap(idx, idx | bit);
                }
            }
            Ok(())
        }
        Gate::Cnot { control, target } => {
            env.assert_clean("CNOT on a dirty environment")?;
            check_system_qubit(layout, *control)?;
            check_system_qubit(layout, *target)?;
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
            env.assert_clean("DFT on a dirty environment")?;
            let span = layout.span(Reg::Mode(*mode));
            apply_dft(amps, span.offset, span.bits, *inverse != inverting);
            Ok(())
        }
    }
}

fn check_system_qubit(layout: &RegisterLayout, qubit: u32) -> Result<(), SimError> {
    if qubit >= layout.system_bits() {
        return Err(SimError::UnsupportedQubit { qubit });
    }
    Ok(())
}

/// Dense DFT on one contiguous `bits`-qubit register:
/// `F|x⟩ = K^{-1/2} Σ_y e^{+2πi·x·y/K}|y⟩` (conjugated when `inverse`).
pub(crate) fn apply_dft(amps: &mut [Complex64], offset: u32, bits: u32, inverse: bool) {
    let points = 1usize << bits;
    let norm = 1.0 / (points as f64).sqrt();
    let sign = if inverse { -1.0 } else { 1.0 };
    let mut f = vec![Complex64::new(0.0, 0.0); points * points];
    for y in 0..points {
        for x in 0..points {
            let angle = sign * TAU * (x as f64) * (y as f64) / points as f64;
            f[y * points + x] = Complex64::from_polar(norm, angle);
        }
    }
    let stride = 1usize << offset;
    let block = stride * points;
    let mut scratch = vec![Complex64::new(0.0, 0.0); points];
    for block_base in (0..amps.len()).step_by(block) {
        for low in 0..stride {
            let base = block_base + low;
            for (x, s) in scratch.iter_mut().enumerate() {
                *s = amps[base + x * stride];
            }
            for y in 0..points {
                let mut acc = Complex64::new(0.0, 0.0);
                for (x, s) in scratch.iter().enumerate() {
                    acc += f[y * points + x] * *s;
                }
                amps[base + y * stride] = acc;
            }
        }
    }
}
