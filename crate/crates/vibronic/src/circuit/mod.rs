//! Circuit intermediate representation and the compiler from fragments to
//! gate lists: register layout, fixed-point formats, the monomial cache
//! scheduler, the diagonal-fragment and kinetic compilers, and the product
//! formula planner.

mod compile;
mod ir;
mod layout;
mod schedule;
mod trotter;

pub use compile::{compile_diagonal_fragment, compile_kinetic, fragment_terms, CompileOptions};
pub use ir::{Gate, GateList, Reg, Tag, TagGen};
pub use layout::{
    required_int_bits, resolve_format, sign_extend, FixedPointFormat, RegSpan, RegisterLayout,
};
pub use schedule::{compute_count, schedule_monomials, ScheduleOp, ValueSource};
pub use trotter::{
    build_evolution, build_trotter_step, evolution_error, evolution_sequence, fit_power_law,
    proxy_model, select_step_count, state_distance, step_sequence, FragTag, StepSelection,
    TrotterPlan, PROXY_DIM_LIMIT,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error(
        "fixed-point overflow: term ({bra},{ket},{index}) reaches magnitude {magnitude:.3e} \
         but the integer field holds only {int_bits} bits at width {width}"
    )]
    FixedPointOverflow {
        bra: usize,
        ket: usize,
        index: String,
        magnitude: f64,
        int_bits: u32,
        width: u32,
    },
    #[error("fixed-point width {0} exceeds the supported maximum of 62 bits")]
    WidthTooLarge(u32),
    #[error("unsupported product formula order {0} (expected 1, 2, or 4)")]
    InvalidOrder(u32),
    #[error("step count must be at least 1")]
    ZeroSteps,
}

/// Errors from the empirical step-count selector.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("probe errors are not monotonically decreasing in the step count: {0:?}")]
    NonMonotone(Vec<(usize, f64)>),
    #[error("need at least two probe step counts, got {0}")]
    TooFewProbes(usize),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("probe simulation failed: {0}")]
    Simulation(String),
}
