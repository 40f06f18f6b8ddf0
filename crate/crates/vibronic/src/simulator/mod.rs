//! Desk-scale statevector execution of compiled gate lists, plus the dense
//! exact propagator used as the verification oracle.
//!
//! Two backends execute the same IR:
//!
//! * **Semantic** — amplitudes over the system registers only (electronic ⊗
//!   modes, up to 2²⁰). Arithmetic gates act through exact integer side
//!   registers tracked per basis label; phases are applied directly. Gates
//!   that create superposition (Hadamard, CNOT, X, the DFT) are legal only
//!   while every side register is zero, which compiled lists guarantee.
//! * **Gate-faithful** — amplitudes over every simulated qubit including the
//!   coefficient, cache, and phase-gradient registers (≤ 24 qubits, width ≤
//!   12). The gradient register physically holds the repeated-use resource
//!   state and phases arise from modular addition into it.
//!
//! Both backends compute identical integers, so where both run they agree to
//! floating-point rounding.

pub mod faithful;
pub mod oracle;
pub mod semantic;

use std::io::{self, Read, Write};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::GateList;
use crate::grid::{GridConfig, GridError};
use crate::model::VibronicModel;

/// Semantic-backend amplitude cap.
pub const SEMANTIC_DIM_CAP: usize = 1 << 20;
/// Gate-faithful qubit cap.
pub const FAITHFUL_QUBIT_CAP: u32 = 24;
/// Gate-faithful fixed-point width cap.
pub const FAITHFUL_WIDTH_CAP: u32 = 12;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{what} needs dimension {needed}, cap is {cap}")]
    SizeCap {
        what: &'static str,
        needed: usize,
        cap: usize,
    },
    #[error("state has dimension {got}, layout expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("uncompute of tag {tag} does not match the computation stack")]
    UnmatchedUncompute { tag: u32 },
    #[error("ancilla register {reg} is not clean: {context}")]
    DirtyAncilla { reg: String, context: &'static str },
    #[error("gate addresses qubit {qubit} outside the simulated system registers")]
    UnsupportedQubit { qubit: u32 },
    #[error("gate-faithful backend supports width ≤ {cap}, layout uses {width}")]
    WidthCap { width: u32, cap: u32 },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("eigendecomposition failed: {0}")]
    Eig(String),
    #[error("snapshot I/O failed: {0}")]
    Io(#[from] io::Error),
    #[error("snapshot header invalid: {0}")]
    Snapshot(String),
}

/// Dense complex amplitudes over the system registers. The electronic label
/// occupies the low bits; mode `r` occupies the next `k`-bit field.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amps: Vec<Complex64>,
    pub electronic_bits: u32,
    pub mode_bits: u32,
    pub mode_count: usize,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
struct SnapshotHeader {
    format: String,
    electronic_bits: u32,
    mode_bits: u32,
    mode_count: usize,
    dim: usize,
}

impl StateVector {
    pub fn system_bits(&self) -> u32 {
        self.electronic_bits + self.mode_bits * self.mode_count as u32
    }

    pub fn dim(&self) -> usize {
        1usize << self.system_bits()
    }

    /// Zero state of the right shape for a model on a grid.
    pub fn zeroed(model: &VibronicModel, g: GridConfig) -> Self {
        let mut s = Self {
            amps: Vec::new(),
            electronic_bits: model.electronic_bits(),
            mode_bits: g.bits(),
            mode_count: model.mode_count(),
        };
        s.amps = vec![Complex64::new(0.0, 0.0); s.dim()];
        s
    }

    /// Computational basis state.
    pub fn basis(model: &VibronicModel, g: GridConfig, index: usize) -> Self {
        let mut s = Self::zeroed(model, g);
        s.amps[index] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_amplitudes(
        model: &VibronicModel,
        g: GridConfig,
        amps: Vec<Complex64>,
    ) -> Result<Self, SimError> {
        let s = Self {
            amps,
            electronic_bits: model.electronic_bits(),
            mode_bits: g.bits(),
            mode_count: model.mode_count(),
        };
        if s.amps.len() != s.dim() {
            return Err(SimError::DimensionMismatch {
                expected: s.dim(),
                got: s.amps.len(),
            });
        }
        Ok(s)
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    pub fn overlap(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.overlap(other).norm()
    }

    /// Write a snapshot: one JSON header line, then little-endian interleaved
    /// `(re, im)` doubles.
    pub fn write_snapshot<W: Write>(&self, mut out: W) -> Result<(), SimError> {
        let header = SnapshotHeader {
            format: "vibronic-state-v1".into(),
            electronic_bits: self.electronic_bits,
            mode_bits: self.mode_bits,
            mode_count: self.mode_count,
            dim: self.dim(),
        };
        serde_json::to_writer(&mut out, &header).map_err(|e| SimError::Snapshot(e.to_string()))?;
        out.write_all(b"\n")?;
        for a in &self.amps {
            out.write_all(&a.re.to_le_bytes())?;
            out.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_snapshot<R: Read>(mut input: R) -> Result<Self, SimError> {
        let mut bytes = Vec::new();
        input.read_to_end(&mut bytes)?;
        let newline = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| SimError::Snapshot("missing header line".into()))?;
        let header: SnapshotHeader = serde_json::from_slice(&bytes[..newline])
            .map_err(|e| SimError::Snapshot(e.to_string()))?;
        let body = &bytes[newline + 1..];
        if body.len() != header.dim * 16 {
            return Err(SimError::Snapshot(format!(
                "expected {} amplitude bytes, found {}",
                header.dim * 16,
                body.len()
            )));
        }
        let amps = body
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(Self {
            amps,
            electronic_bits: header.electronic_bits,
            mode_bits: header.mode_bits,
            mode_count: header.mode_count,
        })
    }
}

/// Which executor to run a gate list on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Semantic,
    GateFaithful,
}

/// Result of running a gate list: the system state and how cleanly the
/// ancilla registers returned to zero (exactly 1.0 on the semantic backend,
/// measured overlap on the faithful one).
#[derive(Debug)]
pub struct SimOutput {
    pub state: StateVector,
    pub ancilla_fidelity: f64,
}

/// Execute a compiled gate list on a system state.
pub fn apply_gates(
    state: &StateVector,
    list: &GateList,
    backend: Backend,
) -> Result<SimOutput, SimError> {
    let expected = 1usize << list.layout.system_bits();
    if state.dim() != expected {
        return Err(SimError::DimensionMismatch {
            expected,
            got: state.dim(),
        });
    }
    match backend {
        Backend::Semantic => semantic::run(state, list),
        Backend::GateFaithful => faithful::run(state, list),
    }
}

/// Worker cap for the amplitude loops, from `VIBRONIC_THREADS` or the
/// available parallelism. Results do not depend on the count.
pub(crate) fn max_threads() -> usize {
    static CACHE: OnceLock<usize> = OnceLock::new();
    *CACHE.get_or_init(|| {
        std::env::var("VIBRONIC_THREADS")
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or_else(|| {
                std::thread::available_parallelism()
                    .map(|n| n.get())
                    .unwrap_or(1)
            })
            .clamp(1, 64)
    })
}

/// Run `f` on disjoint chunks of `data`, in parallel when the slice is large.
/// `f` receives the chunk and the global index of its first element.
pub(crate) fn par_chunks<T: Send>(data: &mut [T], f: impl Fn(&mut [T], usize) + Sync) {
    let threads = max_threads();
    let len = data.len();
    if threads <= 1 || len < (1 << 13) {
        f(data, 0);
        return;
    }
    let chunk = len.div_ceil(threads);
    std::thread::scope(|scope| {
        let mut rest = data;
        let mut offset = 0usize;
        let f = &f;
        while !rest.is_empty() {
            let take = chunk.min(rest.len());
            let (head, tail) = rest.split_at_mut(take);
            scope.spawn(move || f(head, offset));
            offset += take;
            rest = tail;
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshot_round_trip() {
        let m = VibronicModel::new(2, vec![1.0], 1);
        let g = GridConfig::new(2).unwrap();
        let mut s = StateVector::zeroed(&m, g);
        for (i, a) in s.amps.iter_mut().enumerate() {
            *a = Complex64::new(i as f64, -(i as f64) / 3.0);
        }
        let mut buf = Vec::new();
        s.write_snapshot(&mut buf).unwrap();
        let back = StateVector::read_snapshot(buf.as_slice()).unwrap();
        assert_eq!(back.dim(), s.dim());
        for (a, b) in s.amps.iter().zip(&back.amps) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn par_chunks_matches_serial() {
        let mut a: Vec<f64> = (0..100_000).map(|i| i as f64).collect();
        let mut b = a.clone();
        par_chunks(&mut a, |chunk, off| {
            for (i, x) in chunk.iter_mut().enumerate() {
                *x += (off + i) as f64;
            }
        });
        for (i, x) in b.iter_mut().enumerate() {
            *x += i as f64;
        }
        assert_eq!(a, b);
    }
}
