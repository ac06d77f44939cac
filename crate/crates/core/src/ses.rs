//! Single-excitation-subspace (one-hot) encoding of bosonic modes.
//!
//! Qubit layout: atom `i` sits on qubit `i`; mode `k` owns the contiguous
//! register of `n_k^max + 1` qubits that follows. Register qubit `n` set to
//! `|1⟩` means "photon number n". Basis-state indices are little-endian
//! (qubit `q` is bit `q`).
//!
//! Atom mapping: `|g⟩ ↦ |1⟩` and `|e⟩ ↦ |0⟩`, so σᶻ, σˣ and σʸ of the atom are
//! the plain qubit Paulis Z, X and Y.

use std::collections::HashMap;
use std::ops::Range;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::{DickeModel, FockBasis, FockLabel, FockTruncation};
use crate::pauli::{i_pow, Pauli, PauliString, PauliSum};
use crate::scalar::{c, c_re, Real, C};
use crate::sim::StateVector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitLayout {
    n_atoms: usize,
    registers: Vec<Range<usize>>,
}

impl QubitLayout {
    pub fn new(n_atoms: usize, trunc: &FockTruncation) -> Self {
        let mut start = n_atoms;
        let registers = trunc
            .max_photons
            .iter()
            .map(|&n| {
                let r = start..start + n + 1;
                start = r.end;
                r
            })
            .collect();
        Self { n_atoms, registers }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_modes(&self) -> usize {
        self.registers.len()
    }

    pub fn total_qubits(&self) -> usize {
        self.registers.last().map_or(self.n_atoms, |r| r.end)
    }

    pub fn atom_qubit(&self, atom: usize) -> usize {
        assert!(atom < self.n_atoms, "atom index out of range");
        atom
    }

    pub fn register(&self, mode: usize) -> Range<usize> {
        self.registers[mode].clone()
    }

    pub fn n_max(&self, mode: usize) -> usize {
        self.registers[mode].len() - 1
    }

    pub fn truncation(&self) -> FockTruncation {
        FockTruncation {
            max_photons: (0..self.n_modes()).map(|k| self.n_max(k)).collect(),
        }
    }

    pub fn register_mask(&self, mode: usize) -> usize {
        self.registers[mode].clone().fold(0, |m, q| m | (1 << q))
    }

    /// One-hot position inside register `mode`, or `None` outside the SES.
    pub fn photon_number(&self, mode: usize, index: usize) -> Option<usize> {
        let r = &self.registers[mode];
        let bits = (index >> r.start) & ((1 << r.len()) - 1);
        (bits.count_ones() == 1).then(|| bits.trailing_zeros() as usize)
    }

    /// True iff every mode register of `index` holds exactly one excitation.
    pub fn in_ses(&self, index: usize) -> bool {
        (0..self.n_modes()).all(|k| self.photon_number(k, index).is_some())
    }

    /// Encoded basis index of a Fock label.
    pub fn encode_label(&self, label: &FockLabel) -> Result<usize> {
        encode_state(&label.photons, &label.excited, self)
    }

    /// Decodes an SES basis index into a Fock label.
    pub fn decode(&self, index: usize) -> Option<FockLabel> {
        let photons = (0..self.n_modes())
            .map(|k| self.photon_number(k, index))
            .collect::<Option<Vec<_>>>()?;
        let excited = (0..self.n_atoms).map(|i| index >> i & 1 == 0).collect();
        Some(FockLabel { excited, photons })
    }

    /// Encoded indices of every Fock basis state, in Fock order.
    pub fn ses_indices(&self) -> Vec<usize> {
        let basis = FockBasis::new(self.n_atoms, &self.truncation());
        (0..basis.dim())
            .map(|i| self.encode_label(&basis.label(i)).expect("in range"))
            .collect()
    }

    /// `|ṽac⟩`: all atoms in `|g⟩`, every register in `|0̃⟩`.
    pub fn vacuum_index(&self) -> usize {
        let atoms = vec![false; self.n_atoms];
        let photons = vec![0; self.n_modes()];
        encode_state(&photons, &atoms, self).expect("vacuum in range")
    }
}

/// Computational-basis index of the encoded state `|atoms⟩ ⊗_k |ñ_k⟩`.
pub fn encode_state(photons: &[usize], excited: &[bool], layout: &QubitLayout) -> Result<usize> {
    if photons.len() != layout.n_modes() {
        return Err(Error::LengthMismatch {
            expected: layout.n_modes(),
            got: photons.len(),
        });
    }
    if excited.len() != layout.n_atoms() {
        return Err(Error::LengthMismatch {
            expected: layout.n_atoms(),
            got: excited.len(),
        });
    }
    let mut idx = 0usize;
    for (i, &e) in excited.iter().enumerate() {
        if !e {
            idx |= 1 << layout.atom_qubit(i);
        }
    }
    for (k, &n) in photons.iter().enumerate() {
        if n > layout.n_max(k) {
            return Err(Error::OccupationOutOfRange {
                mode: k,
                occupation: n,
                max: layout.n_max(k),
            });
        }
        idx |= 1 << (layout.register(k).start + n);
    }
    Ok(idx)
}

/// Embeds a Fock-basis vector (ordering of [`FockBasis`]) into the qubit
/// register; all amplitude lands inside the SES.
pub fn encode_fock_vector<T: Real>(fock: &[C<T>], layout: &QubitLayout) -> Result<StateVector<T>> {
    let idx = layout.ses_indices();
    if fock.len() != idx.len() {
        return Err(Error::LengthMismatch {
            expected: idx.len(),
            got: fock.len(),
        });
    }
    let mut amps = vec![C::zero(); 1usize << layout.total_qubits()];
    for (&q, &a) in idx.iter().zip(fock) {
        amps[q] = a;
    }
    StateVector::from_amplitudes(layout.total_qubits(), amps)
}

/// Excitation raising `|1⟩⟨0| = (X − iY)/2` on `qubit`.
fn raise<T: Real>(n_qubits: usize, qubit: usize) -> PauliSum<T> {
    let h = T::lit(0.5);
    PauliSum::from_terms(
        n_qubits,
        vec![
            (PauliString::single(qubit, Pauli::X), c_re(h)),
            (PauliString::single(qubit, Pauli::Y), c(T::zero(), -h)),
        ],
    )
}

/// Excitation lowering `|0⟩⟨1| = (X + iY)/2` on `qubit`.
fn lower<T: Real>(n_qubits: usize, qubit: usize) -> PauliSum<T> {
    raise::<T>(n_qubits, qubit).adjoint()
}

/// `ã_k = Σ_n √(n+1) σ⁺_n σ⁻_{n+1}` on the register of mode `k`, where σ⁺
/// adds and σ⁻ removes the register excitation.
pub fn encode_annihilation<T: Real>(mode: usize, layout: &QubitLayout) -> Result<PauliSum<T>> {
    if mode >= layout.n_modes() {
        return Err(Error::IndexOutOfRange {
            index: mode,
            len: layout.n_modes(),
        });
    }
    let nq = layout.total_qubits();
    let r = layout.register(mode);
    let mut acc = PauliSum::zero(nq);
    for n in 0..layout.n_max(mode) {
        let bond = raise::<T>(nq, r.start + n).mul(&lower::<T>(nq, r.start + n + 1));
        acc = acc.add(&bond.scale_re(T::lit(((n + 1) as f64).sqrt())));
    }
    Ok(acc)
}

pub fn encode_creation<T: Real>(mode: usize, layout: &QubitLayout) -> Result<PauliSum<T>> {
    Ok(encode_annihilation::<T>(mode, layout)?.adjoint())
}

/// `ñ_k = Σ_n n (I − Z_n)/2`.
pub fn encode_number<T: Real>(mode: usize, layout: &QubitLayout) -> PauliSum<T> {
    let nq = layout.total_qubits();
    let r = layout.register(mode);
    let half = T::lit(0.5);
    let mut terms = Vec::new();
    for (n, q) in r.enumerate() {
        let w = half * T::lit(n as f64);
        terms.push((PauliString::identity(), c_re(w)));
        terms.push((PauliString::single(q, Pauli::Z), c_re(-w)));
    }
    PauliSum::from_terms(nq, terms)
}

/// Encoded Hamiltonian
/// `H̃ = Σ ω_qi/2 Z_i + Σ ω_k ñ_k + Σ g_ik X_i (ã_k + ã†_k)`.
///
/// Every string has weight ≤ 3; the coupling part expands into the
/// `X_i X_n X_{n+1}` and `X_i Y_n Y_{n+1}` strings with weight `g √(n+1)/2`.
pub fn encode_hamiltonian<T: Real>(
    model: &DickeModel<T>,
    layout: &QubitLayout,
) -> Result<PauliSum<T>> {
    if model.n_atoms() != layout.n_atoms() || model.n_modes() != layout.n_modes() {
        return Err(Error::InvalidModel(
            "model and qubit layout disagree on N or M".into(),
        ));
    }
    let nq = layout.total_qubits();
    let half = T::lit(0.5);
    let mut h = PauliSum::zero(nq);
    for (i, &w) in model.atom_freqs().iter().enumerate() {
        h = h.add(&PauliSum::term(
            nq,
            c_re(half * w),
            &[(layout.atom_qubit(i), Pauli::Z)],
        ));
    }
    for (k, &w) in model.mode_freqs().iter().enumerate() {
        h = h.add(&encode_number::<T>(k, layout).scale_re(w));
    }
    for k in 0..model.n_modes() {
        let a = encode_annihilation::<T>(k, layout)?;
        let quad = a.add(&a.adjoint());
        for i in 0..model.n_atoms() {
            let g = model.coupling(i, k);
            if g == T::zero() {
                continue;
            }
            let x = PauliSum::term(nq, c_re(g), &[(layout.atom_qubit(i), Pauli::X)]);
            h = h.add(&x.mul(&quad));
        }
    }
    Ok(h)
}

/// Restriction `P_SES O P_SES` of an encoded operator, expressed in the
/// Fock basis ordering (dense, row-major).
pub fn restrict_to_ses<T: Real>(op: &PauliSum<T>, layout: &QubitLayout) -> Vec<C<T>> {
    let idx = layout.ses_indices();
    let dim = idx.len();
    let pos: HashMap<usize, usize> = idx.iter().enumerate().map(|(f, &q)| (q, f)).collect();
    let mut m = vec![C::zero(); dim * dim];
    for (p, w) in op.terms() {
        let masks = p.masks();
        for (col, &q) in idx.iter().enumerate() {
            let (tgt, k) = masks.apply(q);
            if let Some(&row) = pos.get(&tgt) {
                m[row * dim + col] += *w * i_pow::<T>(k);
            }
        }
    }
    m
}

/// SES membership predicate, usable as a postselection filter.
pub fn ses_projector(layout: &QubitLayout) -> impl Fn(usize) -> bool + '_ {
    move |index| layout.in_ses(index)
}
