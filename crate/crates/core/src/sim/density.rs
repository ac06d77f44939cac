use num_traits::{One, Zero};
use rand::Rng;

use super::gate::{apply_conjugate_shifted, apply_gate_raw, apply_single, GateOp};
use super::noise::{NoiseModel, ScaledNoise};
use super::observable::Observable;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::scalar::{c_re, Real, C};

pub const DEFAULT_DENSITY_CAP: usize = 8;

/// Mixed state stored as `ρ[r + (c << n)]`, so row qubit `q` is bit `q` and
/// column qubit `q` is bit `q + n`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    n_qubits: usize,
    data: Vec<C<T>>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn from_pure(psi: &StateVector<T>) -> Self {
        let n = psi.n_qubits();
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = vec![C::zero(); dim * dim];
        for col in 0..dim {
            for row in 0..dim {
                data[row + (col << n)] = a[row] * a[col].conj();
            }
        }
        Self { n_qubits: n, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> C<T> {
        self.data[row + (col << self.n_qubits)]
    }

    pub fn trace(&self) -> C<T> {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn purity(&self) -> T {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<T> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, psi: &StateVector<T>) -> T {
        let a = psi.amplitudes();
        let mut acc = C::zero();
        for (col, &ac) in a.iter().enumerate() {
            for (row, &ar) in a.iter().enumerate() {
                acc += ar.conj() * self.get(row, col) * ac;
            }
        }
        acc.re
    }

    pub fn apply(&mut self, gate: &GateOp<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_gate_raw(&mut self.data, gate);
        apply_conjugate_shifted(&mut self.data, gate, self.n_qubits);
        Ok(())
    }

    /// `ρ ↦ (1-p)ρ + p·I/2 ⊗ Tr_q ρ`.
    pub fn depolarize(&mut self, q: usize, p: T) {
        if p.is_zero() {
            return;
        }
        let n = self.n_qubits;
        let (rb, cb) = (1usize << q, 1usize << (q + n));
        let keep = T::one() - p;
        let half = p / T::lit(2.0);
        for i in 0..self.data.len() {
            if i & (rb | cb) != 0 {
                continue;
            }
            let (d0, d1) = (self.data[i], self.data[i | rb | cb]);
            let mix = (d0 + d1).scale(half);
            self.data[i] = d0.scale(keep) + mix;
            self.data[i | rb | cb] = d1.scale(keep) + mix;
            self.data[i | rb] = self.data[i | rb].scale(keep);
            self.data[i | cb] = self.data[i | cb].scale(keep);
        }
    }

    /// Amplitude damping toward `|0⟩` with Kraus operators
    /// `K0 = diag(1, √(1-p))`, `K1 = √p |0⟩⟨1|`.
    pub fn amplitude_damp(&mut self, q: usize, p: T) {
        if p.is_zero() {
            return;
        }
        let n = self.n_qubits;
        let (rb, cb) = (1usize << q, 1usize << (q + n));
        let s = (T::one() - p).sqrt();
        for i in 0..self.data.len() {
            if i & (rb | cb) != 0 {
                continue;
            }
            let d1 = self.data[i | rb | cb];
            self.data[i] += d1.scale(p);
            self.data[i | rb | cb] = d1.scale(T::one() - p);
            self.data[i | rb] = self.data[i | rb].scale(s);
            self.data[i | cb] = self.data[i | cb].scale(s);
        }
    }

    /// Applies a general single-qubit Kraus channel. Used as a test oracle.
    pub fn apply_kraus(&mut self, q: usize, kraus: &[[C<T>; 4]]) {
        let n = self.n_qubits;
        let mut out = vec![C::zero(); self.data.len()];
        for k in kraus {
            let mut tmp = self.data.clone();
            apply_single(&mut tmp, q, k);
            let kc = [k[0].conj(), k[1].conj(), k[2].conj(), k[3].conj()];
            apply_single(&mut tmp, q + n, &kc);
            out.iter_mut().zip(&tmp).for_each(|(o, t)| *o += *t);
        }
        self.data = out;
    }

    pub fn expectation(&self, obs: &PauliSum<T>) -> Result<T> {
        let compiled = Observable::new(obs)?;
        Ok(compiled.trace_raw(&self.data, self.n_qubits).re)
    }

    pub fn expectation_compiled(&self, obs: &Observable<T>) -> T {
        obs.trace_raw(&self.data, self.n_qubits).re
    }
}

fn check_cap(n_qubits: usize, cap: usize) -> Result<()> {
    if n_qubits > cap {
        return Err(Error::DensityMatrixCap { n_qubits, cap });
    }
    Ok(())
}

/// Runs `circuit` on `initial` with each gate followed by depolarizing and
/// then amplitude damping on every qubit the gate touches.
pub fn run_noisy<T: Real>(
    circuit: &[GateOp<T>],
    noise: &NoiseModel,
    initial: &StateVector<T>,
) -> Result<DensityMatrix<T>> {
    run_noisy_capped(circuit, noise, initial, DEFAULT_DENSITY_CAP)
}

pub fn run_noisy_capped<T: Real>(
    circuit: &[GateOp<T>],
    noise: &NoiseModel,
    initial: &StateVector<T>,
    cap: usize,
) -> Result<DensityMatrix<T>> {
    let n = initial.n_qubits();
    check_cap(n, cap)?;
    noise.validate(n)?;
    let scaled = noise.scaled();
    let mut rho = DensityMatrix::from_pure(initial);
    for gate in circuit {
        rho.apply(gate)?;
        for q in gate.qubits() {
            rho.depolarize(q, T::lit(scaled.depolarizing[q]));
            rho.amplitude_damp(q, T::lit(scaled.amplitude_damping[q]));
        }
    }
    Ok(rho)
}

/// One stochastic trajectory of the same channel sequence as [`run_noisy`];
/// averaging `|ψ⟩⟨ψ|` over trajectories reproduces the density matrix.
pub fn run_trajectory<T: Real, R: Rng>(
    circuit: &[GateOp<T>],
    noise: &ScaledNoise,
    initial: &StateVector<T>,
    rng: &mut R,
) -> Result<StateVector<T>> {
    let mut psi = initial.clone();
    for gate in circuit {
        psi.apply(gate)?;
        for q in gate.qubits() {
            let p = noise.depolarizing[q];
            if p > 0.0 && rng.random::<f64>() < p {
                // maximally mixing the qubit = uniformly random Pauli
                let (o, z, i) = (C::one(), C::zero(), C::i());
                let m = match rng.random_range(0..4u8) {
                    0 => [o, z, z, o],
                    1 => [z, o, o, z],
                    2 => [z, -i, i, z],
                    _ => [o, z, z, -o],
                };
                apply_single(psi.amplitudes_mut(), q, &m);
            }
            let p = noise.amplitude_damping[q];
            if p > 0.0 {
                let bit = 1usize << q;
                let p1: f64 = psi
                    .amplitudes()
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| b & bit != 0)
                    .map(|(_, a)| a.norm_sqr().as_f64())
                    .sum();
                let (z, o) = (C::zero(), C::one());
                let m = if rng.random::<f64>() < p * p1 {
                    [z, c_re(T::one()), z, z]
                } else {
                    [o, z, z, c_re(T::lit((1.0 - p).sqrt()))]
                };
                apply_single(psi.amplitudes_mut(), q, &m);
                psi.normalize();
            }
        }
    }
    Ok(psi)
}
