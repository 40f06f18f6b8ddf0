//! Compilation, fault-tolerant resource estimation, and desk-scale
//! verification of Trotterized real-space dynamics for polynomial vibronic
//! Hamiltonians.
//!
//! The pipeline: parse an `N`-state, `M`-mode model ([`model`]), discretize
//! each mode on a `2^k`-point grid ([`grid`]), split the potential into XOR
//! fragments with Clifford block-diagonalizations ([`fragmentation`]),
//! compile product-formula evolution into an arithmetic gate list with
//! prefix-product caching ([`circuit`]), count Toffolis and qubits
//! ([`resources`]), and check everything against a dense exact propagator
//! ([`simulator`]) including population and spectrum observables
//! ([`observables`]).
//!
//! Conventions used throughout:
//!
//! * Hartree atomic units internally; model files declare `au`, `eV`, or
//!   `cm-1` and convert on ingest. Times cross the API in femtoseconds only
//!   at the outermost layer.
//! * Grid labels are read as `k`-bit two's-complement integers; the label `x`
//!   carries position `Δ·s(x)` with `Δ = √(2π/K)`.
//! * The forward propagator is `e^{+iHt}`; the `physics_sign` option flips it.
//! * Amplitude indexing puts the electronic register in the low bits and mode
//!   `r` in the next `k`-bit field.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod circuit;
pub mod fragmentation;
pub mod grid;
pub mod model;
pub mod observables;
pub mod resources;
pub mod simulator;
pub mod units;
