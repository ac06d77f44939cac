use crate::error::{Error, Result};

/// Readout flips of one qubit: `p01 = p(read 1 | 0)`, `p10 = p(read 0 | 1)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ReadoutError {
    pub p01: f64,
    pub p10: f64,
}

impl ReadoutError {
    pub fn symmetric(p: f64) -> Self {
        Self { p01: p, p10: p }
    }

    /// Column-stochastic confusion matrix `[[1-p01, p10], [p01, 1-p10]]`.
    pub fn confusion(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p01, self.p10], [self.p01, 1.0 - self.p10]]
    }
}

/// Per-qubit error rates plus a global scale `λ` applied to all of them.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    /// Depolarizing probability after each gate touching the qubit.
    pub depolarizing: Vec<f64>,
    /// Amplitude-damping probability after each gate touching the qubit.
    pub amplitude_damping: Vec<f64>,
    pub readout: Vec<ReadoutError>,
    pub lambda: f64,
}

/// Probabilities after scaling by `λ` and clamping to `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledNoise {
    pub depolarizing: Vec<f64>,
    pub amplitude_damping: Vec<f64>,
    pub readout: Vec<ReadoutError>,
}

impl NoiseModel {
    pub fn noiseless(n_qubits: usize) -> Self {
        Self::uniform(n_qubits, 0.0, 0.0, ReadoutError::default())
    }

    pub fn uniform(n_qubits: usize, depolarizing: f64, damping: f64, readout: ReadoutError) -> Self {
        Self {
            depolarizing: vec![depolarizing; n_qubits],
            amplitude_damping: vec![damping; n_qubits],
            readout: vec![readout; n_qubits],
            lambda: 1.0,
        }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.depolarizing.len()
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for len in [
            self.depolarizing.len(),
            self.amplitude_damping.len(),
            self.readout.len(),
        ] {
            if len != n_qubits {
                return Err(Error::LengthMismatch {
                    expected: n_qubits,
                    got: len,
                });
            }
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "noise scale must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        let all = self
            .depolarizing
            .iter()
            .chain(&self.amplitude_damping)
            .chain(self.readout.iter().flat_map(|r| [&r.p01, &r.p10]));
        for &p in all {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidModel(format!("error probability {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    pub fn scaled(&self) -> ScaledNoise {
        let lambda = self.lambda;
        let scale = |p: f64| {
            let s = p * lambda;
            if s > 1.0 {
                log::warn!("scaled error probability {s} clamped to 1");
                1.0
            } else if s < 0.0 {
                log::warn!("scaled error probability {s} clamped to 0");
                0.0
            } else {
                s
            }
        };
        ScaledNoise {
            depolarizing: self.depolarizing.iter().map(|&p| scale(p)).collect(),
            amplitude_damping: self.amplitude_damping.iter().map(|&p| scale(p)).collect(),
            readout: self
                .readout
                .iter()
                .map(|r| ReadoutError {
                    p01: scale(r.p01),
                    p10: scale(r.p10),
                })
                .collect(),
        }
    }
}

impl ScaledNoise {
    pub fn is_gate_noiseless(&self) -> bool {
        self.depolarizing.iter().chain(&self.amplitude_damping).all(|&p| p == 0.0)
    }

    pub fn is_readout_noiseless(&self) -> bool {
        self.readout.iter().all(|r| r.p01 == 0.0 && r.p10 == 0.0)
    }
}
