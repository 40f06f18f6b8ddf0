//! Gate-list compilers for diagonal-fragment exponentials and the kinetic
//! sweep.
//!
//! A fragment exponential is bracketed by its block-diagonalizing Clifford.
//! The diagonal body walks the cache schedule; each term loads its
//! electronic-state-selected coefficient, adds the coefficient × monomial
//! product into the phase gradient, and unloads. Coefficients carry the
//! conjugation sign of the fragment, the evolution angle, and the grid
//! spacing factor `Δ^{|α|}`, so the monomial registers stay pure integers.
//!
//! The kinetic sweep conjugates each mode register by the DFT, squares the
//! signed label into the degree-2 cache, and adds `θ·ω_r/2·Δ²·s²` into the
//! gradient the same way. Reading the transformed label as a signed integer
//! already performs the top-bit flip that relates the offset and signed
//! conventions, so no explicit X appears around the square.

use std::collections::BTreeSet;
use std::f64::consts::TAU;

use crate::circuit::{CompileError, Gate, Reg, RegisterLayout, TagGen};
use crate::circuit::schedule::{schedule_monomials, ScheduleOp, ValueSource};
use crate::fragmentation::Fragment;
use crate::grid::GridConfig;
use crate::model::{MultiIndex, VibronicModel};

/// Knobs shared by every compile entry point.
#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Fold the harmonic ground-surface potential into the diagonal fragment.
    pub include_v0: bool,
    /// Reuse monomial prefixes across terms.
    pub caching: bool,
    /// Fractional bits of the fixed-point coefficients.
    pub frac_bits: u32,
    /// Pin the total register width instead of auto-sizing the integer field.
    pub pinned_width: Option<u32>,
    /// Evolve with `e^{-iHt}` instead of the default `e^{+iHt}`.
    pub physics_sign: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        Self {
            include_v0: true,
            caching: true,
            frac_bits: 24,
            pinned_width: None,
            physics_sign: false,
        }
    }
}

impl CompileOptions {
    pub fn angle_sign(&self) -> f64 {
        if self.physics_sign {
            -1.0
        } else {
            1.0
        }
    }
}

/// Terms a fragment exponentiates: its coupling monomials, plus the harmonic
/// squares when this is the diagonal fragment and `include_v0` is on.
pub fn fragment_terms(
    fragment: &Fragment,
    model: &VibronicModel,
    include_v0: bool,
) -> BTreeSet<MultiIndex> {
    let mut terms = fragment.term_set(model);
    if fragment.offset == 0 && include_v0 {
        for r in 0..model.mode_count() {
            terms.insert(MultiIndex::power(r, 2));
        }
    }
    terms
}

fn value_reg(source: ValueSource) -> Reg {
    match source {
        ValueSource::Mode(r) => Reg::Mode(r),
        ValueSource::Cache(l) => Reg::Cache(l),
        ValueSource::Unit => unreachable!("constant terms add the coefficient directly"),
    }
}

/// Coefficient table for one term: entry `e` carries the conjugation sign of
/// electronic label `e`, the evolution angle, and the spacing factor, encoded
/// in revolutions.
fn coefficient_table(
    fragment: &Fragment,
    model: &VibronicModel,
    grid: GridConfig,
    theta: f64,
    term: &MultiIndex,
    include_v0: bool,
    layout: &RegisterLayout,
) -> Vec<u64> {
    let delta_pow = grid.spacing().powi(term.degree() as i32);
    let mut v0_extra = 0.0;
    if fragment.offset == 0 && include_v0 {
        if let [(r, 2)] = term.exponents() {
            v0_extra = 0.5 * model.frequencies[*r];
        }
    }
    (0..model.n_states)
        .map(|e| {
            let (sign, (j, i)) = fragment.sign_and_pair(e);
            let c = model.coupling(j, i, term) + v0_extra;
            layout.format.encode(sign * theta * delta_pow * c / TAU)
        })
        .collect()
}

/// Compile `exp(i·θ·H_m)` for one fragment against a fixed layout.
pub fn compile_diagonal_fragment(
    fragment: &Fragment,
    model: &VibronicModel,
    grid: GridConfig,
    theta: f64,
    layout: &RegisterLayout,
    opts: &CompileOptions,
    tags: &mut TagGen,
) -> Result<Vec<Gate>, CompileError> {
    let mut gates = Vec::new();

    if let Some(recipe) = &fragment.clifford {
        for &(c, t) in &recipe.cnots {
            gates.push(Gate::Cnot { control: c, target: t });
        }
        gates.push(Gate::Hadamard { qubit: recipe.control_qubit });
    }

    let terms = fragment_terms(fragment, model, opts.include_v0);
    let schedule = schedule_monomials(&terms, opts.caching);
    let mut live_mults: Vec<(u32, u32)> = Vec::new(); // (degree, tag)

    for op in &schedule {
        match op {
            ScheduleOp::Compute { degree, parent, factor } => {
                let tag = tags.next();
                gates.push(Gate::Mult {
                    tag,
                    src_a: value_reg(*parent),
                    src_b: Reg::Mode(*factor),
                    dst: Reg::Cache(*degree),
                });
                live_mults.push((*degree, tag));
            }
            ScheduleOp::Release { degree } => {
                let (d, tag) = live_mults.pop().expect("release without compute");
                debug_assert_eq!(d, *degree);
                gates.push(Gate::Uncompute { tag });
            }
            ScheduleOp::Emit { term, source } => {
                let table = coefficient_table(
                    fragment,
                    model,
                    grid,
                    theta,
                    term,
                    opts.include_v0,
                    layout,
                );
                let tag = tags.next();
                gates.push(Gate::Load { tag, target: Reg::Coeff, table });
                match source {
                    ValueSource::Unit => gates.push(Gate::AddPhase { src: Reg::Coeff }),
                    other => gates.push(Gate::MultAddPhase {
                        src_a: Reg::Coeff,
                        src_b: value_reg(*other),
                    }),
                }
                gates.push(Gate::Uncompute { tag });
            }
        }
    }

    if let Some(recipe) = &fragment.clifford {
        gates.push(Gate::Hadamard { qubit: recipe.control_qubit });
        for &(c, t) in recipe.cnots.iter().rev() {
            gates.push(Gate::Cnot { control: c, target: t });
        }
    }
    Ok(gates)
}

/// Compile `exp(i·θ·T)`: every mode conjugated to the momentum frame, squared,
/// and phased with `θ·ω_r/2·Δ²`.
pub fn compile_kinetic(
    model: &VibronicModel,
    grid: GridConfig,
    theta: f64,
    layout: &RegisterLayout,
    tags: &mut TagGen,
) -> Result<Vec<Gate>, CompileError> {
    assert!(
        layout.cache_degrees >= 2,
        "kinetic compilation needs the degree-2 cache register"
    );
    let mut gates = Vec::new();
    let delta2 = grid.spacing() * grid.spacing();
    for (r, &w) in model.frequencies.iter().enumerate() {
        gates.push(Gate::QftConj { mode: r, inverse: false });
        let sq_tag = tags.next();
        gates.push(Gate::Mult {
            tag: sq_tag,
            src_a: Reg::Mode(r),
            src_b: Reg::Mode(r),
            dst: Reg::Cache(2),
        });
        let coeff_tag = tags.next();
        gates.push(Gate::LoadImmediate {
            tag: coeff_tag,
            target: Reg::Coeff,
            value: layout.format.encode(theta * 0.5 * w * delta2 / TAU),
        });
        gates.push(Gate::MultAddPhase { src_a: Reg::Coeff, src_b: Reg::Cache(2) });
        gates.push(Gate::Uncompute { tag: coeff_tag });
        gates.push(Gate::Uncompute { tag: sq_tag });
        gates.push(Gate::QftConj { mode: r, inverse: true });
    }
    Ok(gates)
}
