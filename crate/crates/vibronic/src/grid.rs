//! Real-space grid discretization of position and momentum, plus the dense
//! operator builders used by the exact oracle and the verification tests.
//!
//! Each mode lives on `K = 2^k` grid points with spacing `Δ = √(2π/K)`, which
//! makes the position and momentum grids congruent: the momentum operator is
//! the position operator conjugated by the discrete Fourier transform with an
//! X on the register's most significant qubit.
//!
//! Basis-label convention: throughout the crate a `k`-bit label `x` carries
//! the position eigenvalue `Δ·s(x)` where `s(x)` is the two's-complement
//! (signed) reading of `x`. The offset-binary reading `Δ·(x − K/2)` is exposed
//! by [`position_value`]; the two assign the same eigenvalue multiset to
//! relabeled basis states (`x ↔ x XOR K/2`). The compiler's signed arithmetic
//! and the dense oracle both use the signed convention, so compiled phases and
//! dense matrix elements line up label for label.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use thiserror::Error;

use crate::model::VibronicModel;

/// Side cap for dense operator construction (matrices are square of this).
pub const DENSE_SIDE_CAP: usize = 1 << 12;

/// Grid geometry for one mode register.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridConfig {
    k: u32,
}

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid needs at least one qubit per mode")]
    TooFewBits,
    #[error("grid index {x} out of range for K={points}")]
    IndexOutOfRange { x: usize, points: usize },
    #[error("dense construction of dimension {dim} exceeds the cap {cap}")]
    SizeCap { dim: usize, cap: usize },
}

impl GridConfig {
    pub fn new(k: u32) -> Result<Self, GridError> {
        if k == 0 {
            return Err(GridError::TooFewBits);
        }
        Ok(Self { k })
    }

    /// Qubits per mode.
    pub fn bits(&self) -> u32 {
        self.k
    }

    /// Number of grid points `K = 2^k`.
    pub fn points(&self) -> usize {
        1 << self.k
    }

    /// Grid spacing `Δ = √(2π/K)`.
    pub fn spacing(&self) -> f64 {
        (2.0 * std::f64::consts::PI / self.points() as f64).sqrt()
    }

    /// Largest magnitude of a signed grid label, `K/2`.
    pub fn half_points(&self) -> i64 {
        (self.points() / 2) as i64
    }

    /// Two's-complement reading of a `k`-bit label.
    pub fn signed_int(&self, x: usize) -> i64 {
        let k = self.points() as i64;
        let x = x as i64;
        if x < k / 2 {
            x
        } else {
            x - k
        }
    }
}

/// Offset-binary position eigenvalue `Δ·(x − K/2)` of the label `x`.
pub fn position_value(g: GridConfig, x: usize) -> Result<f64, GridError> {
    if x >= g.points() {
        return Err(GridError::IndexOutOfRange { x, points: g.points() });
    }
    Ok(g.spacing() * (x as f64 - g.points() as f64 / 2.0))
}

/// Signed position eigenvalue `Δ·s(x)` with `s` the two's-complement reading.
pub fn signed_value(g: GridConfig, x: usize) -> Result<f64, GridError> {
    if x >= g.points() {
        return Err(GridError::IndexOutOfRange { x, points: g.points() });
    }
    Ok(g.spacing() * g.signed_int(x) as f64)
}

/// Unitary DFT on one mode register: `F|x⟩ = K^{-1/2} Σ_y e^{+2πi·x·y/K}|y⟩`.
pub fn dft_matrix(g: GridConfig) -> Array2<Complex64> {
    let n = g.points();
    let norm = 1.0 / (n as f64).sqrt();
    let mut f = Array2::zeros((n, n));
    for y in 0..n {
        for x in 0..n {
            let phase = 2.0 * std::f64::consts::PI * (x as f64) * (y as f64) / n as f64;
            f[[y, x]] = Complex64::from_polar(norm, phase);
        }
    }
    f
}

fn msb_flip_conjugate(g: GridConfig, diag: &Array1<f64>, f: &Array2<Complex64>) -> Array2<Complex64> {
    // F† · X_{k−1} · diag · X_{k−1} · F, with X the flip of the top bit.
    let n = g.points();
    let half = n / 2;
    let mut m = Array2::<Complex64>::zeros((n, n));
    for a in 0..n {
        for b in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..n {
                let yf = y ^ half;
                acc += f[[y, a]].conj() * diag[yf] * f[[y, b]];
            }
            m[[a, b]] = acc;
        }
    }
    m
}

/// Dense momentum operator of one mode: the offset-binary position diagonal
/// conjugated by the DFT with an X on the most significant qubit. Flipping
/// the top bit turns the offset reading into the signed one, so this equals
/// `F† · diag(Δ·s(y)) · F` — momentum labels are read exactly like position
/// labels, and the compiled kinetic block needs no explicit X once its
/// arithmetic is signed.
pub fn momentum_matrix(g: GridConfig) -> Result<Array2<Complex64>, GridError> {
    let n = g.points();
    if n > DENSE_SIDE_CAP {
        return Err(GridError::SizeCap { dim: n, cap: DENSE_SIDE_CAP });
    }
    let q: Array1<f64> = Array1::from_iter((0..n).map(|x| position_value(g, x).unwrap()));
    Ok(msb_flip_conjugate(g, &q, &dft_matrix(g)))
}

/// Dense `P²` of one mode: the DFT conjugation of the squared signed
/// diagonal, matching the compiled kinetic block label for label.
pub fn momentum_squared_matrix(g: GridConfig) -> Result<Array2<Complex64>, GridError> {
    let n = g.points();
    if n > DENSE_SIDE_CAP {
        return Err(GridError::SizeCap { dim: n, cap: DENSE_SIDE_CAP });
    }
    let q2: Array1<f64> =
        Array1::from_iter((0..n).map(|x| position_value(g, x).unwrap().powi(2)));
    Ok(msb_flip_conjugate(g, &q2, &dft_matrix(g)))
}

/// Total Hilbert-space dimension `N·K^M` of a model on a grid.
pub fn hilbert_dim(model: &VibronicModel, g: GridConfig) -> usize {
    model.n_states << (g.bits() as usize * model.mode_count())
}

/// Amplitude-index helpers. The electronic register occupies the low
/// `n` bits; mode `r` occupies bits `[n + r·k, n + (r+1)·k)`.
pub fn index_of(model: &VibronicModel, g: GridConfig, e: usize, xs: &[usize]) -> usize {
    let n = model.electronic_bits();
    let k = g.bits();
    let mut idx = e;
    for (r, &x) in xs.iter().enumerate() {
        idx |= x << (n + k * r as u32);
    }
    idx
}

/// Split an amplitude index into the electronic label and per-mode labels.
pub fn split_index(model: &VibronicModel, g: GridConfig, idx: usize) -> (usize, Vec<usize>) {
    let n = model.electronic_bits();
    let k = g.bits();
    let e = idx & ((1 << n) - 1);
    let xs = (0..model.mode_count())
        .map(|r| (idx >> (n + k * r as u32)) & ((1 << k) - 1))
        .collect();
    (e, xs)
}

/// Evaluate one coupling block `V_{ji}` at a grid point in sorted monomial
/// order. The signed positions already carry Δ, so each term picks up the
/// `Δ^{|α|}` spacing factor.
pub fn eval_block_at(
    model: &VibronicModel,
    bra: usize,
    ket: usize,
    signed_positions: &[f64],
) -> f64 {
    let mut acc = 0.0;
    for (index, value) in model.block(bra, ket) {
        acc += value * index.eval(signed_positions);
    }
    acc
}

fn signed_positions(g: GridConfig, xs: &[usize]) -> Vec<f64> {
    xs.iter().map(|&x| signed_value(g, x).unwrap()).collect()
}

/// Harmonic ground-surface potential `½·Σ ω_r Q_r²` at a grid point.
pub fn v0_at(model: &VibronicModel, positions: &[f64]) -> f64 {
    model
        .frequencies
        .iter()
        .zip(positions)
        .map(|(&w, &q)| 0.5 * w * q * q)
        .sum()
}

/// Dense potential matrix on the full `N·K^M` space. Diagonal in the grid
/// labels, dense over the electronic block structure. `include_v0` folds the
/// harmonic ground-surface potential into every diagonal block.
pub fn build_potential_matrix(
    model: &VibronicModel,
    g: GridConfig,
    include_v0: bool,
) -> Result<Array2<f64>, GridError> {
    let dim = hilbert_dim(model, g);
    if dim > DENSE_SIDE_CAP {
        return Err(GridError::SizeCap { dim, cap: DENSE_SIDE_CAP });
    }
    let n_states = model.n_states;
    let n_points = dim / n_states;
    let mut v = Array2::<f64>::zeros((dim, dim));
    // Grid labels are packed above the electronic bits, so iterate the grid
    // part and fill each N×N electronic block.
    for grid_part in 0..n_points {
        let base = grid_part << model.electronic_bits();
        // Recover per-mode labels from the packed grid part.
        let k = g.bits();
        let xs: Vec<usize> = (0..model.mode_count())
            .map(|r| (grid_part >> (k * r as u32)) & ((1 << k) - 1))
            .collect();
        let pos = signed_positions(g, &xs);
        for j in 0..n_states {
            for i in 0..n_states {
                let mut val = eval_block_at(model, j, i, &pos);
                if include_v0 && j == i {
                    val += v0_at(model, &pos);
                }
                if val != 0.0 {
                    v[[base + j, base + i]] = val;
                }
            }
        }
    }
    Ok(v)
}

/// Dense kinetic matrix `I_el ⊗ Σ_r (ω_r/2)·P_r²` on the full space.
pub fn build_kinetic_matrix(
    model: &VibronicModel,
    g: GridConfig,
) -> Result<Array2<Complex64>, GridError> {
    let dim = hilbert_dim(model, g);
    if dim > DENSE_SIDE_CAP {
        return Err(GridError::SizeCap { dim, cap: DENSE_SIDE_CAP });
    }
    let n_bits = model.electronic_bits();
    let k = g.bits();
    let points = g.points();
    let p2 = momentum_squared_matrix(g)?;
    let mut t = Array2::<Complex64>::zeros((dim, dim));
    for (r, &w) in model.frequencies.iter().enumerate() {
        let shift = n_bits + k * r as u32;
        let mode_mask = (points - 1) << shift;
        // For each pair of labels differing only in mode r.
        for row in 0..dim {
            let xr = (row & mode_mask) >> shift;
            let rest = row & !mode_mask;
            for yr in 0..points {
                let col = rest | (yr << shift);
                let val = p2[[xr, yr]] * (0.5 * w);
                if val.norm_sqr() != 0.0 {
                    t[[row, col]] += val;
                }
            }
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MultiIndex, VibronicModel};
    use ndarray_linalg::{Eigh, UPLO};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn spacing_invariant() {
        for k in 1..=10 {
            let g = GridConfig::new(k).unwrap();
            let d = g.spacing();
            assert!((d * d * g.points() as f64 - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        }
    }

    #[test]
    fn position_values() {
        let g = GridConfig::new(4).unwrap();
        assert_eq!(position_value(g, 8).unwrap(), 0.0);
        assert!((position_value(g, 0).unwrap() + 5.013_257).abs() < 1e-5);
        let g4 = GridConfig::new(2).unwrap();
        assert!((position_value(g4, 3).unwrap() - 1.253_314).abs() < 1e-5);
        assert!(position_value(g4, 4).is_err());
    }

    #[test]
    fn signed_values() {
        let g = GridConfig::new(4).unwrap();
        let d = g.spacing();
        assert!((signed_value(g, 0b1111).unwrap() + d).abs() < 1e-15);
        assert!((signed_value(g, 0b0111).unwrap() - 7.0 * d).abs() < 1e-14);
    }

    #[test]
    fn signed_is_msb_flipped_offset() {
        // Exhaustively: s(x)·Δ == offset value of (x XOR K/2).
        for k in 1..=6 {
            let g = GridConfig::new(k).unwrap();
            let half = g.points() / 2;
            for x in 0..g.points() {
                let s = signed_value(g, x).unwrap();
                let o = position_value(g, x ^ half).unwrap();
                assert!((s - o).abs() < 1e-13, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn momentum_is_hermitian_with_position_spectrum() {
        let g = GridConfig::new(4).unwrap();
        let p = momentum_matrix(g).unwrap();
        let n = g.points();
        for a in 0..n {
            for b in 0..n {
                let diff = p[[a, b]] - p[[b, a]].conj();
                assert!(diff.norm() < 1e-12);
            }
        }
        let (mut evals, _) = p.eigh(UPLO::Lower).unwrap();
        let mut expected: Vec<f64> = (0..n).map(|x| position_value(g, x).unwrap()).collect();
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let evals_vec = evals.as_slice_mut().unwrap();
        for (ev, ex) in evals_vec.iter().zip(&expected) {
            assert!((ev - ex).abs() < 1e-10);
        }
    }

    #[test]
    fn momentum_variance_of_gaussian() {
        // ⟨χ₀|P²|χ₀⟩ = 1/2 for the discretized unit-frequency ground state.
        let g = GridConfig::new(4).unwrap();
        let n = g.points();
        let mut chi = Array1::<Complex64>::zeros(n);
        let mut norm = 0.0;
        for x in 0..n {
            let s = g.signed_int(x) as f64;
            let a = (-std::f64::consts::PI * s * s / n as f64).exp();
            chi[x] = c(a);
            norm += a * a;
        }
        chi.mapv_inplace(|z| z / norm.sqrt());
        let p2 = momentum_squared_matrix(g).unwrap();
        let expect: Complex64 = chi
            .iter()
            .enumerate()
            .map(|(a, za)| {
                za.conj()
                    * (0..n)
                        .map(|b| p2[[a, b]] * chi[b])
                        .sum::<Complex64>()
            })
            .sum();
        assert!((expect.re - 0.5).abs() < 1e-3);
        assert!(expect.im.abs() < 1e-10);
    }

    #[test]
    fn potential_constant_off_diagonal_block() {
        // Single constant interstate coupling: V = X ⊗ 0.3·I.
        let mut m = VibronicModel::new(2, vec![1.0], 0);
        m.set_coupling(0, 1, MultiIndex::constant(), 0.3);
        let g = GridConfig::new(2).unwrap();
        let v = build_potential_matrix(&m, g, false).unwrap();
        for grid_part in 0..4 {
            let b = grid_part << 1;
            assert_eq!(v[[b, b + 1]], 0.3);
            assert_eq!(v[[b + 1, b]], 0.3);
            assert_eq!(v[[b, b]], 0.0);
        }
    }

    #[test]
    fn potential_linear_diagonal_block() {
        let mut m = VibronicModel::new(2, vec![1.0], 1);
        m.set_coupling(0, 0, MultiIndex::linear(0), 0.2);
        let g = GridConfig::new(2).unwrap();
        let v = build_potential_matrix(&m, g, false).unwrap();
        for x in 0..4 {
            let b = x << 1;
            let expect = 0.2 * signed_value(g, x).unwrap();
            assert!((v[[b, b]] - expect).abs() < 1e-15);
            assert_eq!(v[[b + 1, b + 1]], 0.0);
        }
    }

    #[test]
    fn empty_potential_without_v0_is_zero() {
        let m = VibronicModel::new(2, vec![1.0], 0);
        let g = GridConfig::new(2).unwrap();
        let v = build_potential_matrix(&m, g, false).unwrap();
        assert!(v.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn harmonic_ground_energy_on_grid() {
        // Lowest eigenvalue of T + V0 at ω = 1 approaches 1/2.
        let m = VibronicModel::new(1, vec![1.0], 0);
        let g = GridConfig::new(4).unwrap();
        let t = build_kinetic_matrix(&m, g).unwrap();
        let v = build_potential_matrix(&m, g, true).unwrap();
        let h = &t + &v.mapv(c);
        let (evals, _) = h.eigh(UPLO::Lower).unwrap();
        assert!((evals[0] - 0.5).abs() < 1e-3, "got {}", evals[0]);
    }

    #[test]
    fn harmonic_ground_energy_converges_with_bits() {
        let m = VibronicModel::new(1, vec![1.0], 0);
        let mut errors = Vec::new();
        for k in 3..=5 {
            let g = GridConfig::new(k).unwrap();
            let t = build_kinetic_matrix(&m, g).unwrap();
            let v = build_potential_matrix(&m, g, true).unwrap();
            let h = &t + &v.mapv(c);
            let (evals, _) = h.eigh(UPLO::Lower).unwrap();
            errors.push((evals[0] - 0.5).abs());
        }
        assert!(errors[0] > errors[1] && errors[1] > errors[2], "{errors:?}");
    }

    #[test]
    fn kinetic_commutes_with_momentum_diagonal() {
        let m = VibronicModel::new(1, vec![1.0], 0);
        let g = GridConfig::new(3).unwrap();
        let t = build_kinetic_matrix(&m, g).unwrap();
        // An operator diagonal in the momentum basis: F† X D X F.
        let diag = Array1::from_iter((0..g.points()).map(|x| (x as f64).sin() + 2.0));
        let d = msb_flip_conjugate(g, &diag, &dft_matrix(g));
        let td = t.dot(&d);
        let dt = d.dot(&t);
        let max = td
            .iter()
            .zip(dt.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0f64, f64::max);
        assert!(max < 1e-10);
    }

    #[test]
    fn two_mode_kinetic_kronecker_structure() {
        let m = VibronicModel::new(1, vec![0.7, 1.3], 0);
        let g = GridConfig::new(2).unwrap();
        let t = build_kinetic_matrix(&m, g).unwrap();
        let p2 = momentum_squared_matrix(g).unwrap();
        let n = g.points();
        // T[(x0,x1),(y0,y1)] = 0.35·P²[x0,y0]·δ(x1,y1) + 0.65·P²[x1,y1]·δ(x0,y0)
        for x0 in 0..n {
            for x1 in 0..n {
                for y0 in 0..n {
                    for y1 in 0..n {
                        let row = x0 | (x1 << 2);
                        let col = y0 | (y1 << 2);
                        let mut expect = Complex64::new(0.0, 0.0);
                        if x1 == y1 {
                            expect += p2[[x0, y0]] * 0.35;
                        }
                        if x0 == y0 {
                            expect += p2[[x1, y1]] * 0.65;
                        }
                        assert!((t[[row, col]] - expect).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn size_cap_enforced() {
        let m = VibronicModel::new(2, vec![1.0, 1.0, 1.0, 1.0], 0);
        let g = GridConfig::new(4).unwrap();
        assert!(matches!(
            build_potential_matrix(&m, g, true),
            Err(GridError::SizeCap { .. })
        ));
        let g13 = GridConfig::new(13).unwrap();
        assert!(matches!(momentum_matrix(g13), Err(GridError::SizeCap { .. })));
    }
}
