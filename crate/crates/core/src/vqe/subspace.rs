use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::ansatz::AnsatzCircuit;
use crate::error::Result;
use crate::pauli::{i_pow, PauliSum};
use crate::scalar::{Real, C};
use crate::sim::GateOp;

/// Amplitudes of one gate's action grouped by the bits outside the gate:
/// `(local index, position in the subspace)`.
type Blocks = Vec<Vec<(usize, usize)>>;

/// Noiseless energies evaluated inside the single-excitation subspace only.
/// Built only when every gate of the circuit maps the subspace into itself.
#[derive(Clone, Debug)]
pub(crate) struct SubspaceEnergy<T> {
    start: usize,
    dim: usize,
    blocks: Vec<Blocks>,
    /// Sparse `P H P`: `(row, col, value)`.
    h: Vec<(usize, usize, C<T>)>,
}

fn local_index(q: usize, qubits: &[usize]) -> usize {
    qubits.iter().enumerate().fold(0, |l, (bit, &qb)| l | ((q >> qb) & 1) << bit)
}

impl<T: Real> SubspaceEnergy<T> {
    pub(crate) fn new(circuit: &AnsatzCircuit<T>, hamiltonian: &PauliSum<T>) -> Result<Option<Self>> {
        let index = circuit.layout().ses_indices();
        let pos: HashMap<usize, usize> = index.iter().enumerate().map(|(p, &q)| (q, p)).collect();
        // any generic angle exposes a gate that leaks out of the subspace
        let probe: Vec<T> = (0..circuit.parameter_count())
            .map(|i| T::lit(0.37 + 0.11 * i as f64))
            .collect();
        let program = circuit.bind_parameters(&probe)?;
        let mut blocks = Vec::with_capacity(program.len());
        for gate in &program {
            let qubits = gate.qubits();
            let mask = qubits.iter().fold(0usize, |m, &q| m | 1 << q);
            let mut by_base: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
            for (p, &q) in index.iter().enumerate() {
                by_base.entry(q & !mask).or_default().push((local_index(q, &qubits), p));
            }
            let m = gate.local_matrix();
            let dim = 1 << qubits.len();
            for block in by_base.values() {
                for col in block.iter().map(|&(l, _)| l) {
                    for row in 0..dim {
                        let inside = block.iter().any(|&(l, _)| l == row);
                        if !inside && m[row * dim + col].norm() > T::lit(1e-12) {
                            return Ok(None);
                        }
                    }
                }
            }
            blocks.push(by_base.into_values().collect());
        }
        let mut h: BTreeMap<(usize, usize), C<T>> = BTreeMap::new();
        for (p, w) in hamiltonian.terms() {
            let masks = p.masks();
            for (col, &q) in index.iter().enumerate() {
                let (tgt, k) = masks.apply(q);
                if let Some(&row) = pos.get(&tgt) {
                    *h.entry((row, col)).or_insert_with(C::zero) += *w * i_pow::<T>(k);
                }
            }
        }
        let start = pos[&circuit.layout().vacuum_index()];
        Ok(Some(Self {
            start,
            dim: index.len(),
            blocks,
            h: h.into_iter().filter(|(_, v)| !v.is_zero()).map(|((r, c), v)| (r, c, v)).collect(),
        }))
    }

    pub(crate) fn energy(&self, program: &[GateOp<T>]) -> f64 {
        let mut psi = vec![C::<T>::zero(); self.dim];
        psi[self.start] = C::new(T::one(), T::zero());
        let mut buf = Vec::new();
        for (gate, blocks) in program.iter().zip(&self.blocks) {
            let m = gate.local_matrix();
            let dim = 1 << gate.qubits().len();
            for block in blocks {
                buf.clear();
                buf.extend(block.iter().map(|&(_, p)| psi[p]));
                for &(row, p) in block {
                    psi[p] = block
                        .iter()
                        .zip(&buf)
                        .map(|(&(col, _), &a)| m[row * dim + col] * a)
                        .sum();
                }
            }
        }
        let e: C<T> = self.h.iter().map(|&(r, c, v)| psi[r].conj() * v * psi[c]).sum();
        e.re.as_f64()
    }
}
