//! Exact dense propagation via Hermitian eigendecomposition. The classical
//! baseline every compiled evolution is checked against.
//!
//! The eigendecomposition is done once and reused across evolution times,
//! which keeps autocorrelation sweeps cheap.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::grid::{self, GridConfig};
use crate::model::VibronicModel;
use crate::simulator::{SimError, StateVector};

/// Dense Hamiltonian `T + V` on the full space (complex Hermitian).
pub fn dense_hamiltonian(
    model: &VibronicModel,
    g: GridConfig,
    include_v0: bool,
) -> Result<Array2<Complex64>, SimError> {
    let t = grid::build_kinetic_matrix(model, g)?;
    let v = grid::build_potential_matrix(model, g, include_v0)?;
    Ok(&t + &v.mapv(|x| Complex64::new(x, 0.0)))
}

/// Cached eigendecomposition of the dense Hamiltonian.
pub struct ExactPropagator {
    evals: Array1<f64>,
    evecs: Array2<Complex64>,
}

impl ExactPropagator {
    pub fn new(model: &VibronicModel, g: GridConfig, include_v0: bool) -> Result<Self, SimError> {
        let h = dense_hamiltonian(model, g, include_v0)?;
        let (evals, evecs) = h
            .eigh(UPLO::Lower)
            .map_err(|e| SimError::Eig(e.to_string()))?;
        Ok(Self { evals, evecs })
    }

    pub fn dim(&self) -> usize {
        self.evals.len()
    }

    /// Apply `exp(+i·H·t)`; pass a negative `t` for the opposite convention.
    pub fn evolve(&self, state: &StateVector, t: f64) -> StateVector {
        let dim = self.dim();
        assert_eq!(state.dim(), dim, "state does not match the propagator");
        // coefficients in the eigenbasis
        let mut coeffs = vec![Complex64::new(0.0, 0.0); dim];
        for (n, c) in coeffs.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &a) in state.amps.iter().enumerate() {
                acc += self.evecs[[i, n]].conj() * a;
            }
            *c = acc * Complex64::from_polar(1.0, self.evals[n] * t);
        }
        let mut out = StateVector {
            amps: vec![Complex64::new(0.0, 0.0); dim],
            electronic_bits: state.electronic_bits,
            mode_bits: state.mode_bits,
            mode_count: state.mode_count,
        };
        for (i, amp) in out.amps.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (n, &c) in coeffs.iter().enumerate() {
                acc += self.evecs[[i, n]] * c;
            }
            *amp = acc;
        }
        out
    }

    /// Dense unitary `exp(+i·H·t)` for operator-norm comparisons.
    pub fn unitary(&self, t: f64) -> Array2<Complex64> {
        let dim = self.dim();
        let mut phased = self.evecs.clone();
        for n in 0..dim {
            let p = Complex64::from_polar(1.0, self.evals[n] * t);
            for i in 0..dim {
                phased[[i, n]] *= p;
            }
        }
        let vdag = self.evecs.t().mapv(|z| z.conj());
        phased.dot(&vdag)
    }

    pub fn eigenvalues(&self) -> &Array1<f64> {
        &self.evals
    }

    pub fn eigenvectors(&self) -> &Array2<Complex64> {
        &self.evecs
    }
}

/// One-shot exact evolution.
pub fn exact_evolve(
    model: &VibronicModel,
    g: GridConfig,
    t: f64,
    state: &StateVector,
    include_v0: bool,
) -> Result<StateVector, SimError> {
    Ok(ExactPropagator::new(model, g, include_v0)?.evolve(state, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MultiIndex;

    #[test]
    fn zero_time_is_identity() {
        let m = VibronicModel::new(2, vec![1.0], 0);
        let g = GridConfig::new(2).unwrap();
        let s = StateVector::basis(&m, g, 3);
        let out = exact_evolve(&m, g, 0.0, &s, true).unwrap();
        assert!((out.fidelity(&s) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn composition_property() {
        let mut m = VibronicModel::new(2, vec![1.0], 1);
        m.set_coupling(0, 1, MultiIndex::constant(), 0.3);
        m.set_coupling(0, 0, MultiIndex::linear(0), 0.2);
        let g = GridConfig::new(3).unwrap();
        let prop = ExactPropagator::new(&m, g, true).unwrap();
        let mut s = StateVector::basis(&m, g, 1);
        s.amps[4] = Complex64::new(0.6, 0.2);
        s.normalize();
        let once = prop.evolve(&prop.evolve(&s, 0.7), 0.5);
        let direct = prop.evolve(&s, 1.2);
        let dist: f64 = once
            .amps
            .iter()
            .zip(&direct.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-10);
    }

    #[test]
    fn evolution_is_unitary() {
        let mut m = VibronicModel::new(2, vec![0.8], 1);
        m.set_coupling(0, 1, MultiIndex::linear(0), 0.1);
        let g = GridConfig::new(3).unwrap();
        let prop = ExactPropagator::new(&m, g, true).unwrap();
        let mut s = StateVector::basis(&m, g, 0);
        s.amps[5] = Complex64::new(0.3, 0.1);
        s.normalize();
        let out = prop.evolve(&s, 2.0);
        assert!((out.norm() - 1.0).abs() < 1e-11);
    }
}
