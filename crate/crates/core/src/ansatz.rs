//! Trotterized polaron circuit and its parameter table.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{DickeModel, FockTruncation};
use crate::scalar::Real;
use crate::ses::QubitLayout;
use crate::sim::{GateOp, StateVector};

const OMEGA_FIXED_POINT_TOL: f64 = 1e-10;
const OMEGA_FIXED_POINT_ITERS: usize = 10_000;

/// Shape of the variational circuit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    n_atoms: usize,
    trunc: FockTruncation,
    /// `depths[i][k]` Trotter steps for atom `i` and mode `k`.
    depths: Vec<Vec<usize>>,
    per_photon: bool,
    atom_layer: bool,
}

impl AnsatzSpec {
    pub fn new(n_atoms: usize, trunc: FockTruncation, depths: Vec<Vec<usize>>) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::InvalidModel("ansatz needs at least one atom".into()));
        }
        if depths.len() != n_atoms {
            return Err(Error::LengthMismatch {
                expected: n_atoms,
                got: depths.len(),
            });
        }
        for row in &depths {
            if row.len() != trunc.n_modes() {
                return Err(Error::LengthMismatch {
                    expected: trunc.n_modes(),
                    got: row.len(),
                });
            }
            if row.contains(&0) {
                return Err(Error::InvalidModel("Trotter depth must be at least 1".into()));
            }
        }
        Ok(Self {
            n_atoms,
            trunc,
            depths,
            per_photon: false,
            atom_layer: n_atoms > 1,
        })
    }

    /// Same depth `d` for every atom-mode pair.
    pub fn uniform(n_atoms: usize, trunc: FockTruncation, d: usize) -> Result<Self> {
        let m = trunc.n_modes();
        Self::new(n_atoms, trunc, vec![vec![d; m]; n_atoms])
    }

    pub fn with_per_photon(mut self, on: bool) -> Self {
        self.per_photon = on;
        self
    }

    pub fn with_atom_layer(mut self, on: bool) -> Self {
        self.atom_layer = on;
        self
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_modes(&self) -> usize {
        self.trunc.n_modes()
    }

    pub fn truncation(&self) -> &FockTruncation {
        &self.trunc
    }

    pub fn depth(&self, atom: usize, mode: usize) -> usize {
        self.depths[atom][mode]
    }

    pub fn per_photon(&self) -> bool {
        self.per_photon
    }

    pub fn atom_layer(&self) -> bool {
        self.atom_layer
    }

    pub fn layout(&self) -> QubitLayout {
        QubitLayout::new(self.n_atoms, &self.trunc)
    }

    fn slots_per_step(&self, mode: usize) -> usize {
        if self.per_photon {
            self.trunc.max_photons[mode]
        } else {
            1
        }
    }

    pub fn polaron_parameter_count(&self) -> usize {
        (0..self.n_atoms)
            .flat_map(|i| (0..self.n_modes()).map(move |k| (i, k)))
            .map(|(i, k)| self.depths[i][k] * self.slots_per_step(k))
            .sum()
    }

    pub fn atom_parameter_count(&self) -> usize {
        if self.atom_layer {
            2 * self.n_atoms
        } else {
            0
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.polaron_parameter_count() + self.atom_parameter_count()
    }

    /// `Σ_ik n_k^max · d_ik`.
    pub fn controlled_bond_count(&self) -> usize {
        (0..self.n_atoms)
            .flat_map(|i| (0..self.n_modes()).map(move |k| (i, k)))
            .map(|(i, k)| self.depths[i][k] * self.trunc.max_photons[k])
            .sum()
    }

    /// Index of the polaron slot `(atom, mode, step, bond)`; `bond` is
    /// ignored unless per-photon parameters are on.
    pub fn slot(&self, atom: usize, mode: usize, step: usize, bond: usize) -> usize {
        let mut offset = 0;
        for i in 0..self.n_atoms {
            for k in 0..self.n_modes() {
                let per = self.slots_per_step(k);
                if (i, k) == (atom, mode) {
                    let b = if self.per_photon { bond } else { 0 };
                    return offset + step * per + b;
                }
                offset += self.depths[i][k] * per;
            }
        }
        unreachable!("slot outside the spec")
    }
}

/// Gate template; angles are resolved from the parameter vector on binding.
#[derive(Clone, Debug, PartialEq)]
pub enum GateTemplate<T> {
    Fixed(GateOp<T>),
    /// `exp(θ[slot]·weight · X_control ⊗ K_bond)`.
    Bond {
        control: usize,
        low: usize,
        high: usize,
        slot: usize,
        weight: T,
    },
    /// `R_y(θ[slot])` on an atom qubit.
    AtomRy { qubit: usize, slot: usize },
}

/// Reference state the circuit acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialState {
    /// `|g…g⟩ ⊗ |0̃…0̃⟩`.
    Vacuum,
    /// Same register state, but the circuit opens with the atom layer.
    AtomLayerVacuum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzCircuit<T> {
    spec: AnsatzSpec,
    layout: QubitLayout,
    gates: Vec<GateTemplate<T>>,
    initial: InitialState,
}

/// Atom layer: `R_y` on every atom, a CZ chain, `R_y` again. Slots start at
/// `first_slot`; the first layer uses `first_slot..first_slot+N`.
pub fn build_atom_layer<T: Real>(layout: &QubitLayout, first_slot: usize) -> Vec<GateTemplate<T>> {
    let n = layout.n_atoms();
    let mut out = Vec::with_capacity(3 * n);
    for i in 0..n {
        out.push(GateTemplate::AtomRy {
            qubit: layout.atom_qubit(i),
            slot: first_slot + i,
        });
    }
    for i in 1..n {
        out.push(GateTemplate::Fixed(GateOp::cz(
            layout.atom_qubit(i - 1),
            layout.atom_qubit(i),
        )));
    }
    for i in 0..n {
        out.push(GateTemplate::AtomRy {
            qubit: layout.atom_qubit(i),
            slot: first_slot + n + i,
        });
    }
    out
}

/// Builds the circuit. Within one Trotter step the atoms are interleaved:
/// step `s` applies the even then odd bond block of every `(i, k)` pair
/// before step `s + 1` starts.
pub fn build_ansatz<T: Real>(spec: &AnsatzSpec) -> Result<AnsatzCircuit<T>> {
    if spec.n_atoms > 1 && !spec.atom_layer {
        return Err(Error::InvalidModel(
            "more than one atom requires the atom initialization layer".into(),
        ));
    }
    let layout = spec.layout();
    let mut gates = Vec::with_capacity(spec.controlled_bond_count() + 3 * spec.n_atoms);
    if spec.atom_layer {
        gates.extend(build_atom_layer(&layout, spec.polaron_parameter_count()));
    }
    let max_depth = spec.depths.iter().flatten().copied().max().unwrap_or(0);
    for s in 0..max_depth {
        for i in 0..spec.n_atoms {
            for k in 0..spec.n_modes() {
                let d = spec.depths[i][k];
                if s >= d {
                    continue;
                }
                let reg = layout.register(k);
                let n_max = layout.n_max(k);
                for parity in [0, 1] {
                    for n in (parity..n_max).step_by(2) {
                        gates.push(GateTemplate::Bond {
                            control: layout.atom_qubit(i),
                            low: reg.start + n,
                            high: reg.start + n + 1,
                            slot: spec.slot(i, k, s, n),
                            weight: T::lit(((n + 1) as f64).sqrt() / d as f64),
                        });
                    }
                }
            }
        }
    }
    let initial = if spec.atom_layer {
        InitialState::AtomLayerVacuum
    } else {
        InitialState::Vacuum
    };
    Ok(AnsatzCircuit {
        spec: spec.clone(),
        layout,
        gates,
        initial,
    })
}

impl<T: Real> AnsatzCircuit<T> {
    pub fn spec(&self) -> &AnsatzSpec {
        &self.spec
    }

    pub fn layout(&self) -> &QubitLayout {
        &self.layout
    }

    pub fn templates(&self) -> &[GateTemplate<T>] {
        &self.gates
    }

    pub fn initial_state(&self) -> InitialState {
        self.initial
    }

    pub fn n_qubits(&self) -> usize {
        self.layout.total_qubits()
    }

    pub fn parameter_count(&self) -> usize {
        self.spec.parameter_count()
    }

    pub fn controlled_bond_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, GateTemplate::Bond { .. }))
            .count()
    }

    /// Resolves every angle from `theta`.
    pub fn bind_parameters(&self, theta: &[T]) -> Result<Vec<GateOp<T>>> {
        if theta.len() != self.parameter_count() {
            return Err(Error::LengthMismatch {
                expected: self.parameter_count(),
                got: theta.len(),
            });
        }
        Ok(self
            .gates
            .iter()
            .map(|g| match g {
                GateTemplate::Fixed(op) => op.clone(),
                GateTemplate::Bond {
                    control,
                    low,
                    high,
                    slot,
                    weight,
                } => GateOp::controlled_bond(*control, *low, *high, theta[*slot] * *weight),
                GateTemplate::AtomRy { qubit, slot } => GateOp::ry(*qubit, theta[*slot]),
            })
            .collect())
    }

    /// `|ṽac⟩`.
    pub fn reference_state(&self) -> Result<StateVector<T>> {
        StateVector::basis(self.n_qubits(), self.layout.vacuum_index())
    }

    /// `U(θ)|ṽac⟩`.
    pub fn prepare(&self, theta: &[T]) -> Result<StateVector<T>> {
        let program = self.bind_parameters(theta)?;
        let mut psi = self.reference_state()?;
        psi.apply_all(&program)?;
        Ok(psi)
    }

    /// One gate per line: `kind qubits slot weight`, with `-` for fixed
    /// entries.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            match g {
                GateTemplate::Bond {
                    control,
                    low,
                    high,
                    slot,
                    weight,
                } => writeln!(out, "cbond {control},{low},{high} {slot} {weight}"),
                GateTemplate::AtomRy { qubit, slot } => writeln!(out, "ry {qubit} {slot} 1"),
                GateTemplate::Fixed(op) => {
                    let qs: Vec<String> = op.qubits().iter().map(|q| q.to_string()).collect();
                    let kind = match op {
                        GateOp::Unitary { targets, .. } if targets.len() == 2 => "cz",
                        _ => "fixed",
                    };
                    writeln!(out, "{kind} {} - -", qs.join(","))
                }
            }
            .expect("write to String");
        }
        out
    }
}

/// Displacement amplitudes `f_ik = g_ik / (ω_k + ω′_i)` with the
/// renormalized atom frequency from `ω′ ← ω_q exp(−2 Σ_k f_k²)`.
///
/// Returns the `N × M` matrix of `f` values.
pub fn polaron_displacements<T: Real>(model: &DickeModel<T>) -> Vec<Vec<T>> {
    let ws: Vec<f64> = model.mode_freqs().iter().map(|w| w.as_f64()).collect();
    (0..model.n_atoms())
        .map(|i| {
            let wq = model.atom_freqs()[i].as_f64();
            let gs: Vec<f64> = (0..model.n_modes())
                .map(|k| model.coupling(i, k).as_f64())
                .collect();
            let wp = renormalized_frequency(wq, &gs, &ws).unwrap_or_else(|| {
                log::warn!("renormalized atom frequency did not converge; using the bare value");
                wq
            });
            displacement_amplitudes(&gs, &ws, wp)
                .into_iter()
                .map(T::lit)
                .collect()
        })
        .collect()
}

/// `f_k = g_k / (ω_k + ω′)`.
pub fn displacement_amplitudes(gs: &[f64], ws: &[f64], omega_prime: f64) -> Vec<f64> {
    gs.iter().zip(ws).map(|(g, w)| g / (w + omega_prime)).collect()
}

/// Damped fixed point of `ω′ = ω_q exp(−2 Σ_k f_k(ω′)²)`; `None` if it does
/// not settle.
pub fn renormalized_frequency(wq: f64, gs: &[f64], ws: &[f64]) -> Option<f64> {
    let mut wp = wq;
    for _ in 0..OMEGA_FIXED_POINT_ITERS {
        let s: f64 = displacement_amplitudes(gs, ws, wp).iter().map(|f| f * f).sum();
        let next = 0.5 * wp + 0.5 * wq * (-2.0 * s).exp();
        if !next.is_finite() {
            return None;
        }
        if (next - wp).abs() < OMEGA_FIXED_POINT_TOL {
            return Some(next);
        }
        wp = next;
    }
    None
}

/// Maps parameters of `from` onto the deeper `to` so that both circuits are
/// identical: existing steps are rescaled by `d_to / d_from`, added steps get
/// zero angles, atom-layer angles are copied.
pub fn pad_parameters<T: Real>(from: &AnsatzSpec, theta: &[T], to: &AnsatzSpec) -> Result<Vec<T>> {
    let same_shape = from.n_atoms() == to.n_atoms()
        && from.truncation() == to.truncation()
        && from.per_photon() == to.per_photon()
        && from.atom_layer() == to.atom_layer();
    if !same_shape {
        return Err(Error::InvalidModel("padding needs equal registers and flags".into()));
    }
    if theta.len() != from.parameter_count() {
        return Err(Error::LengthMismatch {
            expected: from.parameter_count(),
            got: theta.len(),
        });
    }
    let mut out = vec![T::zero(); to.parameter_count()];
    for i in 0..from.n_atoms() {
        for k in 0..from.n_modes() {
            let (df, dt) = (from.depth(i, k), to.depth(i, k));
            if dt < df {
                return Err(Error::InvalidModel("padding cannot reduce depth".into()));
            }
            let scale = T::lit(dt as f64 / df as f64);
            let bonds = if from.per_photon() { from.truncation().max_photons[k] } else { 1 };
            for s in 0..df {
                for n in 0..bonds {
                    out[to.slot(i, k, s, n)] = theta[from.slot(i, k, s, n)] * scale;
                }
            }
        }
    }
    let (pf, pt) = (from.polaron_parameter_count(), to.polaron_parameter_count());
    out[pt..].copy_from_slice(&theta[pf..]);
    Ok(out)
}

/// Warm-start parameter vector: every Trotter step of pair `(i, k)` gets
/// `f_ik`, atom-layer angles are zero.
pub fn polaron_displacement_params<T: Real>(model: &DickeModel<T>, spec: &AnsatzSpec) -> Result<Vec<T>> {
    if model.n_atoms() != spec.n_atoms() || model.n_modes() != spec.n_modes() {
        return Err(Error::InvalidModel("model and ansatz disagree on N or M".into()));
    }
    let f = polaron_displacements(model);
    let mut theta = vec![T::zero(); spec.parameter_count()];
    for (i, row) in f.iter().enumerate() {
        for (k, &fk) in row.iter().enumerate() {
            for s in 0..spec.depth(i, k) {
                let bonds = if spec.per_photon() {
                    spec.truncation().max_photons[k]
                } else {
                    1
                };
                for n in 0..bonds {
                    theta[spec.slot(i, k, s, n)] = fk;
                }
            }
        }
    }
    Ok(theta)
}
