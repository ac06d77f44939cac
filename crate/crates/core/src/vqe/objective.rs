use crate::ansatz::AnsatzCircuit;
use crate::error::{Error, Result};
use crate::model::DickeModel;
use crate::pauli::{qubitwise_groups, Pauli, PauliSum};
use crate::scalar::Real;
use crate::ses::{encode_hamiltonian, QubitLayout};
use super::subspace::SubspaceEnergy;
use crate::sim::{
    apply_readout_error, corrupt_counts, mitigate_readout, run_noisy, sample_distribution,
    DensityMatrix, Distribution, GateOp, NoiseModel, Observable, StateVector,
};

/// How expectation values are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimator {
    /// Probabilities taken directly from the simulated state.
    Exact,
    /// `shots` samples per measurement group.
    Shots(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ObjectiveOptions {
    pub estimator: Estimator,
    /// Gate and readout noise; `None` is the ideal device.
    pub noise: Option<NoiseModel>,
    pub mitigate_readout: bool,
    pub postselect: bool,
}

impl Default for ObjectiveOptions {
    fn default() -> Self {
        Self {
            estimator: Estimator::Exact,
            noise: None,
            mitigate_readout: false,
            postselect: false,
        }
    }
}

/// One objective value with its shot-noise standard error and the fraction
/// of outcomes kept by postselection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub energy: f64,
    pub std_error: f64,
    pub retention: f64,
}

#[derive(Clone, Debug)]
struct Group {
    basis_change: Vec<(usize, Pauli)>,
    /// `(support mask, coefficient)` per term.
    terms: Vec<(usize, f64)>,
    /// Every register qubit is read in the Z basis, so SES membership of the
    /// outcome can be checked.
    checks_ses: bool,
}

/// `E(θ) = ⟨ṽac|U†(θ) H̃ U(θ)|ṽac⟩` in any of the supported estimation modes.
#[derive(Clone, Debug)]
pub struct EnergyObjective<T> {
    circuit: AnsatzCircuit<T>,
    hamiltonian: PauliSum<T>,
    observable: Observable<T>,
    constant: f64,
    groups: Vec<Group>,
    options: ObjectiveOptions,
    subspace: Option<SubspaceEnergy<T>>,
}

fn register_qubits(layout: &QubitLayout) -> usize {
    (0..layout.n_modes()).fold(0, |m, k| m | layout.register_mask(k))
}

impl<T: Real> EnergyObjective<T> {
    pub fn new(model: &DickeModel<T>, circuit: AnsatzCircuit<T>, options: ObjectiveOptions) -> Result<Self> {
        let hamiltonian = encode_hamiltonian(model, circuit.layout())?;
        Self::with_hamiltonian(hamiltonian, circuit, options)
    }

    pub fn with_hamiltonian(
        hamiltonian: PauliSum<T>,
        circuit: AnsatzCircuit<T>,
        options: ObjectiveOptions,
    ) -> Result<Self> {
        let n = circuit.n_qubits();
        if hamiltonian.n_qubits() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: hamiltonian.n_qubits(),
            });
        }
        if let Some(noise) = &options.noise {
            noise.validate(n)?;
        }
        if let Estimator::Shots(0) = options.estimator {
            return Err(Error::Empty("shot budget"));
        }
        let observable = Observable::new(&hamiltonian)?;
        let subspace = SubspaceEnergy::new(&circuit, &hamiltonian)?;
        let reg_mask = register_qubits(circuit.layout());
        let constant = hamiltonian
            .terms()
            .iter()
            .filter(|(p, _)| p.is_identity())
            .map(|(_, w)| w.re.as_f64())
            .sum();
        // all diagonal strings share one Z-basis group so that postselection
        // always has a full view of the registers
        let (diag, offdiag): (Vec<usize>, Vec<usize>) = (0..hamiltonian.len())
            .filter(|&i| !hamiltonian.terms()[i].0.is_identity())
            .partition(|&i| hamiltonian.terms()[i].0.ops().iter().all(|&(_, l)| l == Pauli::Z));
        let rest = PauliSum::from_terms(n, offdiag.iter().map(|&i| hamiltonian.terms()[i].clone()).collect());
        let mut index_groups: Vec<Vec<usize>> = Vec::new();
        if !diag.is_empty() {
            index_groups.push(diag);
        }
        index_groups.extend(
            qubitwise_groups(&rest)
                .into_iter()
                .map(|g| g.into_iter().map(|j| offdiag[j]).collect()),
        );
        let groups = index_groups
            .into_iter()
            .map(|idx| {
                let mut basis = std::collections::BTreeMap::new();
                let mut terms = Vec::new();
                for i in idx {
                    let (p, w) = &hamiltonian.terms()[i];
                    let mut support = 0usize;
                    for &(q, l) in p.ops() {
                        support |= 1 << q;
                        if l != Pauli::Z {
                            basis.insert(q, l);
                        }
                    }
                    terms.push((support, w.re.as_f64()));
                }
                let rotated = basis.keys().fold(0usize, |m, &q| m | (1 << q));
                Group {
                    basis_change: basis.into_iter().collect(),
                    terms,
                    checks_ses: rotated & reg_mask == 0,
                }
            })
            .collect();
        Ok(Self {
            circuit,
            hamiltonian,
            observable,
            constant,
            groups,
            options,
            subspace,
        })
    }

    pub fn circuit(&self) -> &AnsatzCircuit<T> {
        &self.circuit
    }

    pub fn hamiltonian(&self) -> &PauliSum<T> {
        &self.hamiltonian
    }

    pub fn options(&self) -> &ObjectiveOptions {
        &self.options
    }

    pub fn parameter_count(&self) -> usize {
        self.circuit.parameter_count()
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    fn theta_t(theta: &[f64]) -> Vec<T> {
        theta.iter().map(|&x| T::lit(x)).collect()
    }

    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector<T>> {
        self.circuit.prepare(&Self::theta_t(theta))
    }

    /// Noiseless exact energy, regardless of the configured mode.
    pub fn exact_energy(&self, theta: &[f64]) -> Result<f64> {
        if let Some(sub) = &self.subspace {
            let program = self.circuit.bind_parameters(&Self::theta_t(theta))?;
            return Ok(sub.energy(&program));
        }
        let psi = self.prepare(theta)?;
        Ok(psi.expectation_compiled(&self.observable)?.as_f64())
    }

    fn gate_noise(&self) -> Option<&NoiseModel> {
        self.options
            .noise
            .as_ref()
            .filter(|n| !n.scaled().is_gate_noiseless())
    }

    /// Evaluates the objective; `seed` drives all sampling in this call.
    pub fn evaluate(&self, theta: &[f64], seed: u64) -> Result<Estimate> {
        let trivial = self.options.estimator == Estimator::Exact
            && self.options.noise.is_none()
            && !self.options.postselect;
        if trivial {
            return Ok(Estimate {
                energy: self.exact_energy(theta)?,
                std_error: 0.0,
                retention: 1.0,
            });
        }
        let th = Self::theta_t(theta);
        let source = match self.gate_noise() {
            Some(noise) => {
                let program = self.circuit.bind_parameters(&th)?;
                let init = self.circuit.reference_state()?;
                Source::Mixed(run_noisy(&program, noise, &init)?)
            }
            None => Source::Pure(self.circuit.prepare(&th)?),
        };
        self.estimate_from(&source, seed)
    }

    fn estimate_from(&self, source: &Source<T>, seed: u64) -> Result<Estimate> {
        let layout = self.circuit.layout();
        let n = self.circuit.n_qubits();
        let readout = self
            .options
            .noise
            .as_ref()
            .map(|m| m.scaled())
            .filter(|s| !s.is_readout_noiseless())
            .map(|s| s.readout);
        let mut results = Vec::with_capacity(self.groups.len());
        for (gi, group) in self.groups.iter().enumerate() {
            let gseed = mix_seed(seed, gi as u64);
            let probs = source.measured_probabilities(&group.basis_change)?;
            let clean = Distribution::new(n, probs)?;
            let mut dist = match (self.options.estimator, &readout) {
                (Estimator::Exact, None) => clean,
                (Estimator::Exact, Some(r)) => apply_readout_error(&clean, r)?,
                (Estimator::Shots(shots), r) => {
                    let mut counts = sample_distribution(n, clean.probs(), shots, gseed)?;
                    if let Some(r) = r {
                        counts = corrupt_counts(&counts, r, gseed ^ 0x5eed)?;
                    }
                    counts.to_distribution()?
                }
            };
            if self.options.mitigate_readout {
                if let Some(r) = &readout {
                    dist = mitigate_readout(&dist, r)?;
                }
            }
            let mut retention = 1.0;
            if self.options.postselect && group.checks_ses {
                let p = dist.probs_mut();
                let mut kept = 0.0;
                for (b, x) in p.iter_mut().enumerate() {
                    if layout.in_ses(b) {
                        kept += *x;
                    } else {
                        *x = 0.0;
                    }
                }
                if kept <= 0.0 {
                    return Err(Error::NoRetainedShots);
                }
                p.iter_mut().for_each(|x| *x /= kept);
                retention = kept;
            }
            let (mean, second) = dist.probs().iter().enumerate().fold((0.0, 0.0), |(m, s), (b, &p)| {
                if p == 0.0 {
                    return (m, s);
                }
                let v: f64 = group
                    .terms
                    .iter()
                    .map(|&(mask, w)| if (b & mask).count_ones() & 1 == 0 { w } else { -w })
                    .sum();
                (m + p * v, s + p * v * v)
            });
            results.push((mean, second - mean * mean, retention, group.checks_ses));
        }
        // groups that cannot see the SES are rescaled by the retention seen
        // by the ones that can
        let ses_retention = if self.options.postselect {
            let checked: Vec<f64> = results.iter().filter(|r| r.3).map(|r| r.2).collect();
            if checked.is_empty() {
                1.0
            } else {
                checked.iter().sum::<f64>() / checked.len() as f64
            }
        } else {
            1.0
        };
        let mut energy = self.constant;
        let mut var = 0.0;
        for (mean, v, retention, checked) in results {
            let scale = if checked { 1.0 } else { 1.0 / ses_retention };
            energy += mean * scale;
            if let Estimator::Shots(shots) = self.options.estimator {
                let eff = (shots as f64 * retention).max(1.0);
                var += v.max(0.0) * scale * scale / eff;
            }
        }
        Ok(Estimate {
            energy,
            std_error: var.sqrt(),
            retention: ses_retention,
        })
    }
}

enum Source<T> {
    Pure(StateVector<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Real> Source<T> {
    fn measured_probabilities(&self, basis: &[(usize, Pauli)]) -> Result<Vec<f64>> {
        let gates: Vec<GateOp<T>> = basis
            .iter()
            .flat_map(|&(q, l)| match l {
                Pauli::X => vec![GateOp::h(q)],
                Pauli::Y => vec![GateOp::s_dag(q), GateOp::h(q)],
                Pauli::Z => vec![],
            })
            .collect();
        Ok(match self {
            Source::Pure(psi) => {
                let mut psi = psi.clone();
                psi.apply_all(&gates)?;
                psi.probabilities().into_iter().map(|p| p.as_f64()).collect()
            }
            Source::Mixed(rho) => {
                let mut rho = rho.clone();
                for g in &gates {
                    rho.apply(g)?;
                }
                rho.probabilities().into_iter().map(|p| p.as_f64().max(0.0)).collect()
            }
        })
    }
}

/// Derives an independent stream seed.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
