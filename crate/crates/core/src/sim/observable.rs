use num_traits::Zero;

use crate::error::{Error, Result};
use crate::pauli::{i_pow, PauliMasks, PauliSum};
use crate::scalar::{Real, C};

/// A Hermitian Pauli sum with precomputed bit masks, ready for repeated
/// expectation evaluations.
#[derive(Clone, Debug)]
pub struct Observable<T> {
    n_qubits: usize,
    terms: Vec<(PauliMasks, C<T>)>,
}

impl<T: Real> Observable<T> {
    pub fn new(sum: &PauliSum<T>) -> Result<Self> {
        let dev = sum.hermiticity_deviation();
        let tol = T::structural_tol() * num_traits::Float::max(T::one(), Self::norm_of(sum));
        if dev > tol {
            return Err(Error::NotHermitian {
                deviation: dev.as_f64(),
            });
        }
        Ok(Self {
            n_qubits: sum.n_qubits(),
            terms: sum.terms().iter().map(|(p, w)| (p.masks(), *w)).collect(),
        })
    }

    fn norm_of(sum: &PauliSum<T>) -> T {
        sum.terms().iter().map(|(_, w)| w.norm()).sum()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Sum of coefficient magnitudes.
    pub fn one_norm(&self) -> T {
        self.terms.iter().map(|(_, w)| w.norm()).sum()
    }

    /// `⟨ψ|O|ψ⟩` without the Hermiticity check on the result.
    pub fn expectation_raw(&self, amps: &[C<T>]) -> C<T> {
        let support: Vec<usize> = (0..amps.len())
            .filter(|&b| !(amps[b].re.is_zero() && amps[b].im.is_zero()))
            .collect();
        let mut total = C::zero();
        for (m, w) in &self.terms {
            let mut acc = C::zero();
            for &b in &support {
                let (t, k) = m.apply(b);
                acc += amps[t].conj() * amps[b] * i_pow::<T>(k);
            }
            total += *w * acc;
        }
        total
    }

    /// `Tr(ρ O)` for a vectorized density matrix (`ρ[r + (c << n)]`).
    pub fn trace_raw(&self, rho: &[C<T>], n: usize) -> C<T> {
        let dim = 1usize << n;
        let mut total = C::zero();
        for (m, w) in &self.terms {
            let mut acc = C::zero();
            for b in 0..dim {
                let (t, k) = m.apply(b);
                // Tr(ρP) = Σ_b ⟨b|ρ P|b⟩ = Σ_b i^k ρ[b, t]
                acc += rho[b + (t << n)] * i_pow::<T>(k);
            }
            total += *w * acc;
        }
        total
    }
}
