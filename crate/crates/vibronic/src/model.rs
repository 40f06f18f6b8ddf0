//! Vibronic model data types and the JSON model-file parser.
//!
//! A model is an `N`-state, `M`-mode Hamiltonian `H = I ⊗ (T + V₀) + W` where
//! `W` collects polynomial couplings between diabatic electronic states. Each
//! coupling block is a multivariate polynomial in the dimensionless normal-mode
//! coordinates, keyed by a [`MultiIndex`]. Coupling coefficients are stored in
//! Hartree exactly as parsed; grid-spacing factors are applied at compile time
//! so one model can be reused across grid sizes.
//!
//! The electronic dimension is padded to the next power of two on ingest.
//! Padded states carry no couplings and never acquire population.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::EnergyUnit;

/// Exponent pattern of one monomial in the mode coordinates.
///
/// Stored as `(mode, exponent)` pairs with strictly increasing mode indices
/// and no zero exponents. The empty list is the constant monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex {
    exps: Vec<(usize, u32)>,
}

impl MultiIndex {
    /// The constant (degree-zero) monomial.
    pub fn constant() -> Self {
        Self { exps: Vec::new() }
    }

    /// Build from `(mode, exponent)` pairs. Pairs are sorted; duplicate modes
    /// and zero exponents are rejected.
    pub fn new(mut pairs: Vec<(usize, u32)>) -> Result<Self, ModelError> {
        pairs.sort_unstable();
        for win in pairs.windows(2) {
            if win[0].0 == win[1].0 {
                return Err(ModelError::BadMultiIndex(format!(
                    "mode {} listed twice",
                    win[0].0
                )));
            }
        }
        if pairs.iter().any(|&(_, a)| a == 0) {
            return Err(ModelError::BadMultiIndex("zero exponent".into()));
        }
        Ok(Self { exps: pairs })
    }

    /// Single mode raised to a power.
    pub fn power(mode: usize, exp: u32) -> Self {
        Self::new(vec![(mode, exp)]).expect("single power is always valid")
    }

    /// Linear monomial `Q_mode`.
    pub fn linear(mode: usize) -> Self {
        Self::power(mode, 1)
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&(_, a)| a).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.exps
    }

    /// Highest mode index appearing, if any.
    pub fn top_mode(&self) -> Option<usize> {
        self.exps.last().map(|&(r, _)| r)
    }

    /// Strip one unit of exponent from the highest mode: the degree-(L−1)
    /// prefix this monomial is built from, together with the stripped mode.
    /// Returns `None` for degree ≤ 1.
    pub fn parent_and_factor(&self) -> Option<(MultiIndex, usize)> {
        if self.degree() <= 1 {
            return None;
        }
        let mut exps = self.exps.clone();
        let (mode, a) = *exps.last().unwrap();
        if a > 1 {
            exps.last_mut().unwrap().1 = a - 1;
        } else {
            exps.pop();
        }
        Some((Self { exps }, mode))
    }

    /// Evaluate `∏ v_r^{α_r}` for real per-mode values.
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.exps
            .iter()
            .map(|&(r, a)| values[r].powi(a as i32))
            .product()
    }

    /// Evaluate `∏ x_r^{α_r}` for integer per-mode values, exactly.
    pub fn eval_int(&self, values: &[i64]) -> i128 {
        let mut acc: i128 = 1;
        for &(r, a) in &self.exps {
            for _ in 0..a {
                acc *= values[r] as i128;
            }
        }
        acc
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return write!(f, "1");
        }
        for (i, &(r, a)) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if a == 1 {
                write!(f, "Q{r}")?;
            } else {
                write!(f, "Q{r}^{a}")?;
            }
        }
        Ok(())
    }
}

/// Transition-dipole matrix on the electronic register (Condon form:
/// coordinate independent). Symmetric, `N_raw × N_raw`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DipoleMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DipoleMatrix {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self, ModelError> {
        if entries.len() != n * n {
            return Err(ModelError::BadDipole { expected: n });
        }
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for j in 0..n {
            for i in 0..j {
                if (entries[j * n + i] - entries[i * n + j]).abs() > 1e-12 * (1.0 + scale) {
                    return Err(ModelError::BadDipole { expected: n });
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, i: usize) -> f64 {
        self.entries[j * self.n + i]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|j| self.entries[j * self.n..(j + 1) * self.n].to_vec())
            .collect()
    }
}

/// Polynomial vibronic Hamiltonian: mode frequencies plus the sparse coupling
/// tensor `c_α^{(j,i)}`. All energies in Hartree.
#[derive(Debug, Clone, PartialEq)]
pub struct VibronicModel {
    /// Number of physical diabatic states before padding.
    pub n_states_logical: usize,
    /// Electronic dimension padded to a power of two.
    pub n_states: usize,
    /// Harmonic frequencies ω_r, one per mode.
    pub frequencies: Vec<f64>,
    /// Coupling coefficients keyed by `(bra, ket)` block, then monomial.
    /// Off-diagonal blocks are stored in both orders with equal values.
    pub couplings: BTreeMap<(usize, usize), BTreeMap<MultiIndex, f64>>,
    /// Declared maximum polynomial degree.
    pub max_degree: u32,
    /// Optional transition-dipole matrix from the model file.
    pub dipole: Option<DipoleMatrix>,
}

impl VibronicModel {
    /// Empty model with `n_states_logical` states (padded) and the given
    /// frequencies in Hartree.
    pub fn new(n_states_logical: usize, frequencies: Vec<f64>, max_degree: u32) -> Self {
        let n_states = n_states_logical.max(1).next_power_of_two();
        Self {
            n_states_logical,
            n_states,
            frequencies,
            couplings: BTreeMap::new(),
            max_degree,
            dipole: None,
        }
    }

    pub fn mode_count(&self) -> usize {
        self.frequencies.len()
    }

    /// Electronic register width: log₂ of the padded state count.
    pub fn electronic_bits(&self) -> u32 {
        self.n_states.trailing_zeros()
    }

    /// Insert a coupling, mirroring off-diagonal entries.
    pub fn set_coupling(&mut self, bra: usize, ket: usize, index: MultiIndex, value: f64) {
        self.couplings
            .entry((bra, ket))
            .or_default()
            .insert(index.clone(), value);
        if bra != ket {
            self.couplings
                .entry((ket, bra))
                .or_default()
                .insert(index, value);
        }
    }

    /// Coefficient for `(bra, ket, index)`, zero when absent.
    pub fn coupling(&self, bra: usize, ket: usize, index: &MultiIndex) -> f64 {
        self.couplings
            .get(&(bra, ket))
            .and_then(|b| b.get(index))
            .copied()
            .unwrap_or(0.0)
    }

    /// Terms of one coupling block, sorted by monomial.
    pub fn block(&self, bra: usize, ket: usize) -> impl Iterator<Item = (&MultiIndex, f64)> {
        self.couplings
            .get(&(bra, ket))
            .into_iter()
            .flat_map(|b| b.iter().map(|(k, &v)| (k, v)))
    }

    /// Largest degree actually present among the stored couplings.
    pub fn observed_degree(&self) -> u32 {
        self.couplings
            .values()
            .flat_map(|b| b.keys())
            .map(|k| k.degree())
            .max()
            .unwrap_or(0)
    }

    /// Serialize back to the model-file format (values in Hartree).
    pub fn to_document(&self) -> String {
        let mut couplings = Vec::new();
        for (&(j, i), block) in &self.couplings {
            if j > i {
                continue; // mirrored entry
            }
            for (index, &value) in block {
                couplings.push(RawCoupling {
                    bra: j,
                    ket: i,
                    powers: index.exponents().iter().map(|&(r, a)| (r, a)).collect(),
                    value,
                });
            }
        }
        let doc = RawDocument {
            name: None,
            description: None,
            states: self.n_states_logical,
            modes: self.frequencies.clone(),
            unit: "au".into(),
            max_degree: self.max_degree,
            couplings,
            dipole: self.dipole.as_ref().map(|d| d.rows()),
        };
        serde_json::to_string_pretty(&doc).expect("model serialization cannot fail")
    }
}

/// Errors from parsing or building models.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("model must declare at least one state")]
    NoStates,
    #[error("unknown unit {0:?} (expected au, eV, or cm-1)")]
    UnknownUnit(String),
    #[error("mode {mode}: frequency must be positive, got {value}")]
    NonpositiveFrequency { mode: usize, value: f64 },
    #[error("coupling ({bra},{ket}): state index out of range, model has {n_states} states")]
    StateOutOfRange {
        bra: usize,
        ket: usize,
        n_states: usize,
    },
    #[error("coupling ({bra},{ket},{index}): mode index {mode} out of range, model has {n_modes} modes")]
    ModeOutOfRange {
        bra: usize,
        ket: usize,
        index: String,
        mode: usize,
        n_modes: usize,
    },
    #[error("coupling ({bra},{ket},{index}): degree {degree} exceeds declared maximum {max_degree}")]
    DegreeExceeded {
        bra: usize,
        ket: usize,
        index: String,
        degree: u32,
        max_degree: u32,
    },
    #[error("duplicate coupling key ({bra},{ket},{index})")]
    DuplicateCoupling {
        bra: usize,
        ket: usize,
        index: String,
    },
    #[error("coupling ({bra},{ket},{index}): value {value} conflicts with mirror entry {mirror}")]
    MirrorConflict {
        bra: usize,
        ket: usize,
        index: String,
        value: f64,
        mirror: f64,
    },
    #[error("coupling ({bra},{ket},{index}): value is not finite")]
    NonFinite {
        bra: usize,
        ket: usize,
        index: String,
    },
    #[error("invalid multi-index: {0}")]
    BadMultiIndex(String),
    #[error("dipole matrix must be {expected}x{expected} and symmetric")]
    BadDipole { expected: usize },
}

#[derive(Debug, Serialize, Deserialize)]
struct RawCoupling {
    bra: usize,
    ket: usize,
    powers: Vec<(usize, u32)>,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    description: Option<String>,
    states: usize,
    modes: Vec<f64>,
    unit: String,
    max_degree: u32,
    couplings: Vec<RawCoupling>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dipole: Option<Vec<Vec<f64>>>,
}

/// Parse a UTF-8 model document, validate it, convert to Hartree, and pad the
/// electronic dimension to a power of two.
///
/// One-sided off-diagonal couplings are symmetrized automatically; entries
/// given on both sides must agree. Duplicate keys are rejected.
pub fn parse_model(text: &str) -> Result<VibronicModel, ModelError> {
    let raw: RawDocument = serde_json::from_str(text).map_err(|e| ModelError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;

    if raw.states == 0 {
        return Err(ModelError::NoStates);
    }
    let unit = EnergyUnit::parse(&raw.unit).ok_or_else(|| ModelError::UnknownUnit(raw.unit.clone()))?;

    let mut frequencies = Vec::with_capacity(raw.modes.len());
    for (mode, &f) in raw.modes.iter().enumerate() {
        let f_au = unit.to_au(f);
        if !(f_au > 0.0) {
            return Err(ModelError::NonpositiveFrequency { mode, value: f });
        }
        frequencies.push(f_au);
    }

    let mut model = VibronicModel::new(raw.states, frequencies, raw.max_degree);
    let n_raw = raw.states;
    let n_modes = model.mode_count();

    for c in &raw.couplings {
        let index = MultiIndex::new(c.powers.clone())?;
        let index_str = index.to_string();
        if c.bra >= n_raw || c.ket >= n_raw {
            return Err(ModelError::StateOutOfRange {
                bra: c.bra,
                ket: c.ket,
                n_states: n_raw,
            });
        }
        if let Some(&(mode, _)) = index.exponents().iter().find(|&&(r, _)| r >= n_modes) {
            return Err(ModelError::ModeOutOfRange {
                bra: c.bra,
                ket: c.ket,
                index: index_str,
                mode,
                n_modes,
            });
        }
        if index.degree() > raw.max_degree {
            return Err(ModelError::DegreeExceeded {
                bra: c.bra,
                ket: c.ket,
                index: index_str,
                degree: index.degree(),
                max_degree: raw.max_degree,
            });
        }
        if !c.value.is_finite() {
            return Err(ModelError::NonFinite {
                bra: c.bra,
                ket: c.ket,
                index: index_str,
            });
        }
        let value = unit.to_au(c.value);

        // Reject exact duplicates; allow a mirrored entry only when it agrees.
        if let Some(existing) = model
            .couplings
            .get(&(c.bra, c.ket))
            .and_then(|b| b.get(&index))
        {
            let mirrored = c.bra != c.ket
                && model
                    .couplings
                    .get(&(c.ket, c.bra))
                    .map(|b| b.contains_key(&index))
                    .unwrap_or(false);
            if mirrored && (existing - value).abs() <= f64::EPSILON * (1.0 + value.abs()) {
                continue;
            }
            if mirrored {
                return Err(ModelError::MirrorConflict {
                    bra: c.bra,
                    ket: c.ket,
                    index: index_str,
                    value,
                    mirror: *existing,
                });
            }
            return Err(ModelError::DuplicateCoupling {
                bra: c.bra,
                ket: c.ket,
                index: index_str,
            });
        }
        model.set_coupling(c.bra, c.ket, index, value);
    }

    if let Some(rows) = &raw.dipole {
        if rows.len() != n_raw || rows.iter().any(|r| r.len() != n_raw) {
            return Err(ModelError::BadDipole { expected: n_raw });
        }
        let entries: Vec<f64> = rows.iter().flatten().copied().collect();
        model.dipole = Some(DipoleMatrix::new(n_raw, entries)?);
    }

    Ok(model)
}

/// One validation finding. Diagnostics are data, not errors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub invariant: &'static str,
    pub detail: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.invariant, self.detail)
    }
}

/// Check every structural invariant of a model. Returns an empty list iff the
/// model is well formed.
pub fn validate_model(model: &VibronicModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    if !model.n_states.is_power_of_two() || model.n_states < model.n_states_logical {
        out.push(Diagnostic {
            invariant: "state padding",
            detail: format!(
                "padded count {} invalid for {} logical states",
                model.n_states, model.n_states_logical
            ),
        });
    }
    for (mode, &f) in model.frequencies.iter().enumerate() {
        if !(f > 0.0) {
            out.push(Diagnostic {
                invariant: "frequency nonpositive",
                detail: format!("mode {mode}"),
            });
        }
    }
    for (&(j, i), block) in &model.couplings {
        if j >= model.n_states || i >= model.n_states {
            out.push(Diagnostic {
                invariant: "state index out of range",
                detail: format!("block ({j},{i})"),
            });
            continue;
        }
        if (j >= model.n_states_logical || i >= model.n_states_logical)
            && block.values().any(|&v| v != 0.0)
        {
            out.push(Diagnostic {
                invariant: "padded block not empty",
                detail: format!("block ({j},{i})"),
            });
        }
        for (index, &value) in block {
            if index.degree() > model.max_degree {
                out.push(Diagnostic {
                    invariant: "degree exceeds declared maximum",
                    detail: format!("({j},{i},{index})"),
                });
            }
            if index
                .exponents()
                .iter()
                .any(|&(r, _)| r >= model.mode_count())
            {
                out.push(Diagnostic {
                    invariant: "mode index out of range",
                    detail: format!("({j},{i},{index})"),
                });
            }
            let mirror = model.coupling(i, j, index);
            if mirror != value {
                out.push(Diagnostic {
                    invariant: "asymmetric coupling",
                    detail: format!("({j},{i},{index}): {value} vs {mirror}"),
                });
            }
        }
    }
    out
}
