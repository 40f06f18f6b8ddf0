//! XOR fragmentation of the potential and the Clifford recipes that
//! block-diagonalize each fragment.
//!
//! Fragment `m` collects every coupling block `(j, m⊕j)`: the electronic
//! labels of a pair differ exactly in the set bits of `m`. CNOTs from one set
//! bit of `m` (the control) to the others collapse the mismatch onto the
//! control qubit, and a Hadamard there turns the remaining X structure into Z.
//! After conjugation the fragment is diagonal in the electronic basis: the
//! block seen by electronic label `e` is `±V_{j, m⊕j}` with `j` equal to `e`
//! with the control bit cleared and the sign given by that bit.

use ndarray::Array2;
use thiserror::Error;

use crate::grid::{self, GridConfig, GridError};
use crate::model::VibronicModel;
use std::collections::BTreeSet;

#[derive(Debug, Error)]
pub enum FragmentError {
    #[error("fragment 0 is already diagonal, no recipe needed")]
    AlreadyDiagonal,
    #[error("offset {offset} out of range for {qubits} electronic qubits")]
    OffsetOutOfRange { offset: usize, qubits: u32 },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Clifford conjugation that block-diagonalizes one fragment: CNOTs from the
/// control to every other set bit of the offset, then a Hadamard on the
/// control. The control is the lowest set bit, which keeps circuits
/// reproducible.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalizerRecipe {
    pub control_qubit: u32,
    /// `(control, target)` pairs; control is always `control_qubit`.
    pub cnots: Vec<(u32, u32)>,
}

impl DiagonalizerRecipe {
    /// Dense electronic-space unitary `U = Had_c · ∏ CNOT`.
    pub fn matrix(&self, n_qubits: u32) -> Array2<f64> {
        let dim = 1usize << n_qubits;
        let mut u = Array2::<f64>::zeros((dim, dim));
        let c_mask = 1usize << self.control_qubit;
        let flip: usize = self.cnots.iter().map(|&(_, t)| 1usize << t).sum();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        for j in 0..dim {
            // CNOT layer first.
            let after_cnots = if j & c_mask != 0 { j ^ flip } else { j };
            // Hadamard on the control.
            let base = after_cnots & !c_mask;
            let bit = (after_cnots & c_mask) != 0;
            // |0⟩ → (|0⟩+|1⟩)/√2 ; |1⟩ → (|0⟩−|1⟩)/√2
            u[[base, j]] += inv_sqrt2;
            u[[base | c_mask, j]] += if bit { -inv_sqrt2 } else { inv_sqrt2 };
        }
        u
    }
}

/// One additive piece of the potential: the coupling blocks pairing `j` with
/// `m⊕j`, plus the recipe that diagonalizes them (`None` for the already
/// diagonal `m = 0`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    /// XOR offset `m` in `[0, N)`.
    pub offset: usize,
    /// Index pairs `(j, m⊕j)` with `j < m⊕j`; singletons `(j, j)` for `m=0`.
    pub pairs: Vec<(usize, usize)>,
    pub clifford: Option<DiagonalizerRecipe>,
}

impl Fragment {
    /// Sign and `(bra, ket)` block selected by electronic label `e` after
    /// conjugation: `j` is `e` with the control bit cleared, the sign is
    /// `(−1)^{e_c}`. For the diagonal fragment the block is `(e, e)`.
    pub fn sign_and_pair(&self, e: usize) -> (f64, (usize, usize)) {
        match &self.clifford {
            None => (1.0, (e, e)),
            Some(recipe) => {
                let c_mask = 1usize << recipe.control_qubit;
                let j = e & !c_mask;
                let sign = if e & c_mask != 0 { -1.0 } else { 1.0 };
                (sign, (j, self.offset ^ j))
            }
        }
    }

    /// Union of the monomials appearing in this fragment's blocks.
    pub fn term_set(&self, model: &VibronicModel) -> BTreeSet<crate::model::MultiIndex> {
        let mut set = BTreeSet::new();
        for &(j, i) in &self.pairs {
            for (index, _) in model.block(j, i) {
                set.insert(index.clone());
            }
        }
        set
    }
}

/// The lowest-set-bit diagonalizer for offset `m` on `n_qubits` qubits.
pub fn diagonalizer_for(m: usize, n_qubits: u32) -> Result<DiagonalizerRecipe, FragmentError> {
    if m == 0 {
        return Err(FragmentError::AlreadyDiagonal);
    }
    if m >= (1usize << n_qubits) {
        return Err(FragmentError::OffsetOutOfRange { offset: m, qubits: n_qubits });
    }
    let control = m.trailing_zeros();
    let cnots = (0..n_qubits)
        .filter(|&t| t != control && (m >> t) & 1 == 1)
        .map(|t| (control, t))
        .collect();
    Ok(DiagonalizerRecipe { control_qubit: control, cnots })
}

/// Split the potential into its `N` XOR fragments.
pub fn fragments(model: &VibronicModel) -> Vec<Fragment> {
    let n = model.n_states;
    let n_qubits = model.electronic_bits();
    (0..n)
        .map(|m| {
            let pairs = if m == 0 {
                (0..n).map(|j| (j, j)).collect()
            } else {
                (0..n).filter(|&j| j < m ^ j).map(|j| (j, m ^ j)).collect()
            };
            Fragment {
                offset: m,
                pairs,
                clifford: diagonalizer_for(m, n_qubits).ok(),
            }
        })
        .collect()
}

/// Dense matrix of one fragment on the full `N·K^M` space. `include_v0` adds
/// the harmonic ground-surface potential to the diagonal fragment.
pub fn dense_fragment(
    f: &Fragment,
    model: &VibronicModel,
    g: GridConfig,
    include_v0: bool,
) -> Result<Array2<f64>, GridError> {
    let dim = grid::hilbert_dim(model, g);
    if dim > grid::DENSE_SIDE_CAP {
        return Err(GridError::SizeCap { dim, cap: grid::DENSE_SIDE_CAP });
    }
    let n_bits = model.electronic_bits();
    let k = g.bits();
    let n_points = dim >> n_bits;
    let mut h = Array2::<f64>::zeros((dim, dim));
    for grid_part in 0..n_points {
        let base = grid_part << n_bits;
        let xs: Vec<usize> = (0..model.mode_count())
            .map(|r| (grid_part >> (k * r as u32)) & ((1 << k) - 1))
            .collect();
        let pos: Vec<f64> = xs
            .iter()
            .map(|&x| grid::signed_value(g, x).unwrap())
            .collect();
        for &(j, i) in &f.pairs {
            let mut val = grid::eval_block_at(model, j, i, &pos);
            if f.offset == 0 && include_v0 {
                val += grid::v0_at(model, &pos);
            }
            if val != 0.0 {
                h[[base + j, base + i]] = val;
                if j != i {
                    h[[base + i, base + j]] = val;
                }
            } else if f.offset == 0 && include_v0 {
                // v0_at can legitimately be zero at the origin point.
                h[[base + j, base + i]] = val;
            }
        }
    }
    Ok(h)
}

/// Conjugate a fragment by its recipe and return the largest magnitude found
/// outside the electronic-diagonal block pattern. Zero for the diagonal
/// fragment (no conjugation applied).
pub fn verify_block_diagonal(
    f: &Fragment,
    model: &VibronicModel,
    g: GridConfig,
) -> Result<f64, FragmentError> {
    let Some(recipe) = &f.clifford else {
        return Ok(0.0);
    };
    let dim = grid::hilbert_dim(model, g);
    if dim > grid::DENSE_SIDE_CAP {
        return Err(GridError::SizeCap { dim, cap: grid::DENSE_SIDE_CAP }.into());
    }
    let h = dense_fragment(f, model, g, false)?;
    let u_el = recipe.matrix(model.electronic_bits());
    let conj = conjugate_electronic(&h, &u_el, model.n_states);
    let n = model.n_states;
    let mut max_off = 0.0f64;
    for row in 0..dim {
        for col in 0..dim {
            // In-pattern entries keep the electronic label fixed.
            if row % n != col % n {
                max_off = max_off.max(conj[[row, col]].abs());
            }
        }
    }
    Ok(max_off)
}

/// `(U_el ⊗ I) · H · (U_el ⊗ I)†` without materializing the Kronecker factor.
pub fn conjugate_electronic(
    h: &Array2<f64>,
    u_el: &Array2<f64>,
    n_states: usize,
) -> Array2<f64> {
    let dim = h.nrows();
    let blocks = dim / n_states;
    let mut tmp = Array2::<f64>::zeros((dim, dim));
    // tmp = (U ⊗ I) · H
    for gb in 0..blocks {
        for e in 0..n_states {
            let row = gb * n_states + e;
            for ep in 0..n_states {
                let coeff = u_el[[e, ep]];
                if coeff == 0.0 {
                    continue;
                }
                let src = gb * n_states + ep;
                for col in 0..dim {
                    tmp[[row, col]] += coeff * h[[src, col]];
                }
            }
        }
    }
    // result = tmp · (U ⊗ I)†
    let mut out = Array2::<f64>::zeros((dim, dim));
    for gb in 0..blocks {
        for e in 0..n_states {
            let col = gb * n_states + e;
            for ep in 0..n_states {
                let coeff = u_el[[e, ep]];
                if coeff == 0.0 {
                    continue;
                }
                let src = gb * n_states + ep;
                for row in 0..dim {
                    out[[row, col]] += tmp[[row, src]] * coeff;
                }
            }
        }
    }
    out
}
