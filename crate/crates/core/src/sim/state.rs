use std::io::{Read, Write};

use num_traits::{Float, One, Zero};

use super::gate::{apply_gate_raw, GateOp};
use super::observable::Observable;
use super::sampling::{sample_distribution, Counts};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::scalar::{Real, C};

/// Largest register the state-vector engine will allocate.
pub const MAX_STATE_QUBITS: usize = 26;

/// Pure state of `n` qubits; qubit `q` is bit `q` of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    n_qubits: usize,
    amps: Vec<C<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits > MAX_STATE_QUBITS {
            return Err(Error::DimensionCap {
                dim: n_qubits,
                cap: MAX_STATE_QUBITS,
            });
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, len: dim });
        }
        let mut amps = vec![C::zero(); dim];
        amps[index] = C::one();
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes; the buffer length must be `2^n_qubits`. The state
    /// is not renormalized.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<C<T>>) -> Result<Self> {
        let dim = 1usize << n_qubits;
        if amps.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                got: amps.len(),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C<T>> {
        self.amps
    }

    pub fn norm(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            let inv = n.recip();
            self.amps.iter_mut().for_each(|a| *a = a.scale(inv));
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    pub fn apply(&mut self, gate: &GateOp<T>) -> Result<()> {
        gate.validate(self.n_qubits)?;
        apply_gate_raw(&mut self.amps, gate);
        Ok(())
    }

    pub fn apply_all<'a, I>(&mut self, gates: I) -> Result<()>
    where
        I: IntoIterator<Item = &'a GateOp<T>>,
    {
        for g in gates {
            self.apply(g)?;
        }
        Ok(())
    }

    /// `⟨ψ|O|ψ⟩` for a Hermitian observable.
    pub fn expectation(&self, obs: &PauliSum<T>) -> Result<T> {
        let compiled = Observable::new(obs)?;
        self.expectation_compiled(&compiled)
    }

    pub fn expectation_compiled(&self, obs: &Observable<T>) -> Result<T> {
        if obs.n_qubits() > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: obs.n_qubits() - 1,
                n_qubits: self.n_qubits,
            });
        }
        let v = obs.expectation_raw(&self.amps);
        let tol = T::lit(1e-10) * Float::max(T::one(), obs.one_norm());
        if v.im.abs() > tol {
            return Err(Error::NotHermitian {
                deviation: v.im.as_f64(),
            });
        }
        Ok(v.re)
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies `basis_change` to a copy of the state and draws `shots`
    /// computational-basis samples.
    pub fn sample_counts(&self, basis_change: &[GateOp<T>], shots: u64, seed: u64) -> Result<Counts> {
        let mut psi = self.clone();
        psi.apply_all(basis_change)?;
        let probs: Vec<f64> = psi.amps.iter().map(|a| a.norm_sqr().as_f64()).collect();
        sample_distribution(self.n_qubits, &probs, shots, seed)
    }

    /// Writes `qubits=<n>\n` then the amplitudes as little-endian `f64`
    /// `(re, im)` pairs.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "qubits={}", self.n_qubits)?;
        for a in &self.amps {
            w.write_all(&a.re.as_f64().to_le_bytes())?;
            w.write_all(&a.im.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let nl = bytes
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| parse_err("missing header line"))?;
        let header = std::str::from_utf8(&bytes[..nl]).map_err(|_| parse_err("header not UTF-8"))?;
        let n: usize = header
            .strip_prefix("qubits=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| parse_err("expected qubits=<n>"))?;
        if n > MAX_STATE_QUBITS {
            return Err(Error::DimensionCap {
                dim: n,
                cap: MAX_STATE_QUBITS,
            });
        }
        let body = &bytes[nl + 1..];
        let dim = 1usize << n;
        if body.len() != dim * 16 {
            return Err(Error::LengthMismatch {
                expected: dim * 16,
                got: body.len(),
            });
        }
        let f = |chunk: &[u8]| f64::from_le_bytes(chunk.try_into().expect("8 bytes"));
        let amps = body
            .chunks_exact(16)
            .map(|ch| C::new(T::lit(f(&ch[..8])), T::lit(f(&ch[8..]))))
            .collect();
        Ok(Self { n_qubits: n, amps })
    }
}


fn parse_err(msg: &str) -> Error {
    Error::Parse {
        line: 1,
        msg: msg.to_string(),
    }
}
