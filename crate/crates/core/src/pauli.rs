//! Sparse Pauli strings and weighted sums of them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{c, c_re, Real, C};

/// Coefficients smaller than this (in modulus) are pruned on canonicalization.
pub const PRUNE_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// `self · other = phase · result` (result `None` for identity).
    fn mul(self, other: Pauli) -> ((i8, i8), Option<Pauli>) {
        use Pauli::*;
        // phase as (re, im) of ±1 or ±i
        match (self, other) {
            (a, b) if a == b => ((1, 0), None),
            (X, Y) => ((0, 1), Some(Z)),
            (Y, X) => ((0, -1), Some(Z)),
            (Y, Z) => ((0, 1), Some(X)),
            (Z, Y) => ((0, -1), Some(X)),
            (Z, X) => ((0, 1), Some(Y)),
            (X, Z) => ((0, -1), Some(Y)),
            _ => unreachable!(),
        }
    }
}

/// A tensor product of single-qubit Paulis, stored as `(qubit, label)` pairs
/// sorted by qubit with identities omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    ops: Vec<(usize, Pauli)>,
}

/// Bit-mask form of a Pauli string: `P|b⟩ = phase(b) |b ⊕ flip⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PauliMasks {
    /// Qubits carrying X or Y.
    pub flip: u64,
    /// Qubits carrying Z or Y.
    pub phase: u64,
    pub n_y: u32,
}

impl PauliMasks {
    /// Returns `(target, phase)` with `P|b⟩ = phase · |target⟩`, phase as `i^k`.
    #[inline]
    pub fn apply(&self, b: usize) -> (usize, u32) {
        // Y = i X Z, so P = i^{n_y} X^{flip} Z^{phase}.
        let sign = ((b as u64) & self.phase).count_ones() & 1;
        (b ^ self.flip as usize, (self.n_y + 2 * sign) % 4)
    }
}

/// `i^k` as a complex number.
#[inline]
pub fn i_pow<T: Real>(k: u32) -> C<T> {
    match k % 4 {
        0 => c(T::one(), T::zero()),
        1 => c(T::zero(), T::one()),
        2 => c(-T::one(), T::zero()),
        _ => c(T::zero(), -T::one()),
    }
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, p: Pauli) -> Self {
        Self {
            ops: vec![(qubit, p)],
        }
    }

    /// Builds from arbitrary `(qubit, label)` pairs; duplicate qubits are
    /// multiplied together and the accumulated phase is returned.
    pub fn from_pairs(pairs: &[(usize, Pauli)]) -> (C<f64>, Self) {
        let mut acc = (C::one(), PauliString::identity());
        for &(q, p) in pairs {
            let (ph, s) = acc.1.mul(&PauliString::single(q, p));
            acc = (acc.0 * ph, s);
        }
        acc
    }

    pub fn ops(&self) -> &[(usize, Pauli)] {
        &self.ops
    }

    pub fn weight(&self) -> usize {
        self.ops.len()
    }

    pub fn is_identity(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Option<Pauli> {
        self.ops
            .binary_search_by_key(&qubit, |&(q, _)| q)
            .ok()
            .map(|i| self.ops[i].1)
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.ops.last().map(|&(q, _)| q)
    }

    pub fn masks(&self) -> PauliMasks {
        let mut m = PauliMasks {
            flip: 0,
            phase: 0,
            n_y: 0,
        };
        for &(q, p) in &self.ops {
            let bit = 1u64 << q;
            match p {
                Pauli::X => m.flip |= bit,
                Pauli::Z => m.phase |= bit,
                Pauli::Y => {
                    m.flip |= bit;
                    m.phase |= bit;
                    m.n_y += 1;
                }
            }
        }
        m
    }

    /// Operator product `self · other = phase · string`.
    pub fn mul(&self, other: &PauliString) -> (C<f64>, PauliString) {
        let (mut re, mut im) = (1i8, 0i8);
        let mut ops = Vec::with_capacity(self.ops.len() + other.ops.len());
        let (mut i, mut j) = (0, 0);
        while i < self.ops.len() || j < other.ops.len() {
            let a = self.ops.get(i);
            let b = other.ops.get(j);
            match (a, b) {
                (Some(&(qa, pa)), Some(&(qb, pb))) if qa == qb => {
                    let ((pr, pi), r) = pa.mul(pb);
                    let (nr, ni) = (re * pr - im * pi, re * pi + im * pr);
                    re = nr;
                    im = ni;
                    if let Some(r) = r {
                        ops.push((qa, r));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(qa, pa)), Some(&(qb, _))) if qa < qb => {
                    ops.push((qa, pa));
                    i += 1;
                }
                (Some(&(qa, pa)), None) => {
                    ops.push((qa, pa));
                    i += 1;
                }
                (_, Some(&(qb, pb))) => {
                    ops.push((qb, pb));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        (C::new(re as f64, im as f64), PauliString { ops })
    }

    /// Qubit-wise commutation: on every shared qubit the labels agree.
    pub fn qubitwise_commutes(&self, other: &PauliString) -> bool {
        self.ops
            .iter()
            .all(|&(q, p)| other.get(q).is_none_or(|o| o == p))
    }

    /// Dense label string of length `n_qubits`, qubit 0 first.
    pub fn to_label(&self, n_qubits: usize) -> String {
        let mut s = vec!['I'; n_qubits];
        for &(q, p) in &self.ops {
            s[q] = p.as_char();
        }
        s.into_iter().collect()
    }

    pub fn from_label(label: &str) -> Option<Self> {
        let mut ops = Vec::new();
        for (q, ch) in label.chars().enumerate() {
            match ch {
                'I' => {}
                'X' => ops.push((q, Pauli::X)),
                'Y' => ops.push((q, Pauli::Y)),
                'Z' => ops.push((q, Pauli::Z)),
                _ => return None,
            }
        }
        Some(Self { ops })
    }
}

/// Weighted sum of Pauli strings over `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum<T> {
    n_qubits: usize,
    terms: Vec<(PauliString, C<T>)>,
}

impl<T: Real> PauliSum<T> {
    pub fn zero(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: T) -> Self {
        Self::from_terms(n_qubits, vec![(PauliString::identity(), c_re(coeff))])
    }

    /// Builds and canonicalizes a sum.
    pub fn from_terms(n_qubits: usize, terms: Vec<(PauliString, C<T>)>) -> Self {
        Self { n_qubits, terms }.canonicalize()
    }

    pub fn term(n_qubits: usize, coeff: C<T>, pairs: &[(usize, Pauli)]) -> Self {
        let (ph, s) = PauliString::from_pairs(pairs);
        Self::from_terms(n_qubits, vec![(s, coeff * c(T::lit(ph.re), T::lit(ph.im)))])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(PauliString, C<T>)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sorts strings, merges duplicates and prunes coefficients below [`PRUNE_TOL`].
    pub fn canonicalize(self) -> Self {
        let mut map: BTreeMap<PauliString, C<T>> = BTreeMap::new();
        for (s, w) in self.terms {
            *map.entry(s).or_insert_with(C::zero) += w;
        }
        let tol = T::lit(PRUNE_TOL);
        let terms = map.into_iter().filter(|(_, w)| w.norm() > tol).collect();
        Self {
            n_qubits: self.n_qubits,
            terms,
        }
    }

    pub fn add(&self, other: &PauliSum<T>) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(self.n_qubits.max(other.n_qubits), terms)
    }

    pub fn scale(&self, s: C<T>) -> Self {
        Self::from_terms(
            self.n_qubits,
            self.terms.iter().map(|(p, w)| (p.clone(), *w * s)).collect(),
        )
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(c_re(s))
    }

    pub fn mul(&self, other: &PauliSum<T>) -> Self {
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for (a, wa) in &self.terms {
            for (b, wb) in &other.terms {
                let (ph, s) = a.mul(b);
                terms.push((s, *wa * *wb * c(T::lit(ph.re), T::lit(ph.im))));
            }
        }
        Self::from_terms(self.n_qubits.max(other.n_qubits), terms)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_terms(
            self.n_qubits,
            self.terms.iter().map(|(p, w)| (p.clone(), w.conj())).collect(),
        )
    }

    /// Largest imaginary part among the (canonical) coefficients; a canonical
    /// sum is Hermitian iff this vanishes.
    pub fn hermiticity_deviation(&self) -> T {
        self.terms
            .iter()
            .fold(T::zero(), |m, (_, w)| m.max(w.im.abs()))
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_deviation() <= tol
    }

    pub fn max_weight(&self) -> usize {
        self.terms.iter().map(|(p, _)| p.weight()).max().unwrap_or(0)
    }

    pub fn coefficient(&self, s: &PauliString) -> C<T> {
        self.terms
            .binary_search_by(|(p, _)| p.cmp(s))
            .map_or(C::zero(), |i| self.terms[i].1)
    }

    /// `⟨row|O|col⟩` for computational basis states.
    pub fn matrix_element(&self, row: usize, col: usize) -> C<T> {
        let mut acc = C::zero();
        for (p, w) in &self.terms {
            let (tgt, k) = p.masks().apply(col);
            if tgt == row {
                acc += *w * i_pow::<T>(k);
            }
        }
        acc
    }

    /// Dense `2^n × 2^n` matrix, row-major. Intended for small oracles.
    pub fn to_dense(&self) -> Vec<C<T>> {
        let dim = 1usize << self.n_qubits;
        let mut m = vec![C::zero(); dim * dim];
        for (p, w) in &self.terms {
            let masks = p.masks();
            for col in 0..dim {
                let (row, k) = masks.apply(col);
                m[row * dim + col] += *w * i_pow::<T>(k);
            }
        }
        m
    }

    /// Writes one `coeff_re coeff_im label` line per term.
    pub fn write_text<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        for (p, coeff) in &self.terms {
            writeln!(w, "{} {} {}", coeff.re, coeff.im, p.to_label(self.n_qubits))?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("ascii")
    }

    /// Parses the text format written by [`PauliSum::write_text`]. Blank lines
    /// and `#` comments are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut n_qubits = None;
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            let mut it = line.split_whitespace();
            let re: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad real part"))?;
            let im: f64 = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| err("bad imaginary part"))?;
            let label = it.next().ok_or_else(|| err("missing Pauli label"))?;
            if it.next().is_some() {
                return Err(err("trailing tokens"));
            }
            let p = PauliString::from_label(label).ok_or_else(|| err("invalid Pauli label"))?;
            match n_qubits {
                None => n_qubits = Some(label.len()),
                Some(n) if n != label.len() => return Err(err("inconsistent label length")),
                _ => {}
            }
            terms.push((p, c(T::lit(re), T::lit(im))));
        }
        let n = n_qubits.ok_or(Error::Empty("Pauli sum"))?;
        Ok(Self::from_terms(n, terms))
    }
}

impl<T: Real> fmt::Display for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Greedy partition of the term indices into qubit-wise commuting groups.
pub fn qubitwise_groups<T: Real>(sum: &PauliSum<T>) -> Vec<Vec<usize>> {
    let mut groups: Vec<(Vec<usize>, BTreeMap<usize, Pauli>)> = Vec::new();
    for (idx, (p, _)) in sum.terms().iter().enumerate() {
        if p.is_identity() {
            continue;
        }
        let slot = groups.iter().position(|(_, basis)| {
            p.ops()
                .iter()
                .all(|(q, l)| basis.get(q).is_none_or(|b| b == l))
        });
        match slot {
            Some(g) => {
                groups[g].0.push(idx);
                groups[g].1.extend(p.ops().iter().copied());
            }
            None => groups.push((vec![idx], p.ops().iter().copied().collect())),
        }
    }
    groups.into_iter().map(|(g, _)| g).collect()
}
