//! The multimode Dicke model and its truncated-Fock-space references.
//!
//! Basis ordering used throughout the crate: the Fock tensor basis is
//! `atom_1 ⊗ … ⊗ atom_N ⊗ mode_1 ⊗ … ⊗ mode_M`, first factor most
//! significant. Atom level 0 is the ground state `|g⟩` (σᶻ = −1) and level 1
//! is `|e⟩`. Mode factor `k` holds photon numbers `0..=n_k^max`.

use nalgebra::{DMatrix, RealField};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, SparseRows, DENSE_EIGEN_LIMIT, DENSE_GROUNDSTATE_LIMIT};
use crate::scalar::{c, c_re, Real, C};

/// Default cap on the reference Hilbert-space dimension.
pub const DEFAULT_DIM_CAP: usize = 16_384;

/// Physical parameters of `H = Σ ω_qi/2 σᶻ_i + Σ ω_k a†_k a_k + Σ g_ik σˣ_i (a_k + a†_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DickeModel<T> {
    atom_freqs: Vec<T>,
    mode_freqs: Vec<T>,
    /// Row `i` holds the couplings of atom `i` to every mode.
    couplings: Vec<Vec<T>>,
}

impl<T: Real> DickeModel<T> {
    pub fn new(atom_freqs: Vec<T>, mode_freqs: Vec<T>, couplings: Vec<Vec<T>>) -> Result<Self> {
        if atom_freqs.is_empty() {
            return Err(Error::InvalidModel("at least one atom is required".into()));
        }
        if mode_freqs.is_empty() {
            return Err(Error::InvalidModel("at least one mode is required".into()));
        }
        if atom_freqs.iter().chain(&mode_freqs).any(|&w| !(w > T::zero()) || !w.is_finite()) {
            return Err(Error::InvalidModel("frequencies must be finite and positive".into()));
        }
        if couplings.len() != atom_freqs.len()
            || couplings.iter().any(|row| row.len() != mode_freqs.len())
        {
            return Err(Error::InvalidModel(format!(
                "coupling matrix must be {}x{}",
                atom_freqs.len(),
                mode_freqs.len()
            )));
        }
        if couplings.iter().flatten().any(|g| !g.is_finite()) {
            return Err(Error::InvalidModel("couplings must be finite".into()));
        }
        Ok(Self {
            atom_freqs,
            mode_freqs,
            couplings,
        })
    }

    /// Resonant model with every frequency equal to `omega` and every coupling `g`.
    pub fn resonant(n_atoms: usize, n_modes: usize, omega: T, g: T) -> Result<Self> {
        Self::new(
            vec![omega; n_atoms],
            vec![omega; n_modes],
            vec![vec![g; n_modes]; n_atoms],
        )
    }

    /// Single atom, single mode.
    pub fn rabi(omega_q: T, omega_c: T, g: T) -> Result<Self> {
        Self::new(vec![omega_q], vec![omega_c], vec![vec![g]])
    }

    pub fn n_atoms(&self) -> usize {
        self.atom_freqs.len()
    }

    pub fn n_modes(&self) -> usize {
        self.mode_freqs.len()
    }

    pub fn atom_freqs(&self) -> &[T] {
        &self.atom_freqs
    }

    pub fn mode_freqs(&self) -> &[T] {
        &self.mode_freqs
    }

    pub fn coupling(&self, atom: usize, mode: usize) -> T {
        self.couplings[atom][mode]
    }

    pub fn couplings(&self) -> &[Vec<T>] {
        &self.couplings
    }

    /// Copy of the model with column `mode` of the coupling matrix negated.
    pub fn with_flipped_mode_sign(&self, mode: usize) -> Self {
        let mut m = self.clone();
        for row in &mut m.couplings {
            row[mode] = -row[mode];
        }
        m
    }

    /// `−Σ ω_qi / 2`, the energy of the uncoupled vacuum.
    pub fn vacuum_energy(&self) -> T {
        -self.atom_freqs.iter().copied().sum::<T>() / T::lit(2.0)
    }
}

/// Per-mode photon-number cutoffs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FockTruncation {
    pub max_photons: Vec<usize>,
}

impl FockTruncation {
    pub fn new(max_photons: Vec<usize>) -> Result<Self> {
        if max_photons.is_empty() {
            return Err(Error::Empty("truncation"));
        }
        if max_photons.contains(&0) {
            return Err(Error::InvalidModel("n_max must be at least 1".into()));
        }
        Ok(Self { max_photons })
    }

    pub fn uniform(n_modes: usize, n_max: usize) -> Self {
        Self::new(vec![n_max; n_modes]).expect("valid uniform truncation")
    }

    pub fn n_modes(&self) -> usize {
        self.max_photons.len()
    }

    pub fn mode_dim(&self, mode: usize) -> usize {
        self.max_photons[mode] + 1
    }

    pub fn fock_dim(&self) -> usize {
        self.max_photons.iter().map(|n| n + 1).product()
    }
}

/// Mixed-radix index over the tensor basis (atoms first, then modes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockBasis {
    n_atoms: usize,
    mode_dims: Vec<usize>,
}

/// A decoded basis label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockLabel {
    pub excited: Vec<bool>,
    pub photons: Vec<usize>,
}

impl FockBasis {
    pub fn new(n_atoms: usize, trunc: &FockTruncation) -> Self {
        Self {
            n_atoms,
            mode_dims: trunc.max_photons.iter().map(|n| n + 1).collect(),
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn mode_block(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn dim(&self) -> usize {
        (1usize << self.n_atoms) * self.mode_block()
    }

    pub fn index(&self, label: &FockLabel) -> usize {
        let mut idx = 0;
        for &e in &label.excited {
            idx = idx * 2 + usize::from(e);
        }
        for (&n, &d) in label.photons.iter().zip(&self.mode_dims) {
            idx = idx * d + n;
        }
        idx
    }

    pub fn label(&self, mut idx: usize) -> FockLabel {
        let mut photons = vec![0; self.mode_dims.len()];
        for (p, &d) in photons.iter_mut().zip(&self.mode_dims).rev() {
            *p = idx % d;
            idx /= d;
        }
        let mut excited = vec![false; self.n_atoms];
        for e in excited.iter_mut().rev() {
            *e = idx % 2 == 1;
            idx /= 2;
        }
        FockLabel { excited, photons }
    }

    /// Stride of mode `k` in the flat index.
    pub fn mode_stride(&self, mode: usize) -> usize {
        self.mode_dims[mode + 1..].iter().product()
    }

    /// Stride of atom `i` in the flat index.
    pub fn atom_stride(&self, atom: usize) -> usize {
        (1usize << (self.n_atoms - 1 - atom)) * self.mode_block()
    }
}

/// Reference operator over the truncated Fock basis, stored row-sparse.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator<T> {
    pub basis: FockBasis,
    pub matrix: SparseRows<T>,
}

impl<T: Real> FockOperator<T> {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.matrix.get(row, col)
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        self.matrix.to_dense()
    }

    pub fn hermiticity_deviation(&self) -> T {
        self.matrix.asymmetry()
    }
}

/// Builds the truncated Hamiltonian `H/ħ` with the default dimension cap.
pub fn build_fock_hamiltonian<T: Real>(
    model: &DickeModel<T>,
    trunc: &FockTruncation,
) -> Result<FockOperator<T>> {
    build_fock_hamiltonian_capped(model, trunc, DEFAULT_DIM_CAP)
}

pub fn build_fock_hamiltonian_capped<T: Real>(
    model: &DickeModel<T>,
    trunc: &FockTruncation,
    dim_cap: usize,
) -> Result<FockOperator<T>> {
    if trunc.n_modes() != model.n_modes() {
        return Err(Error::LengthMismatch {
            expected: model.n_modes(),
            got: trunc.n_modes(),
        });
    }
    let basis = FockBasis::new(model.n_atoms(), trunc);
    let dim = basis.dim();
    if dim > dim_cap {
        return Err(Error::DimensionCap { dim, cap: dim_cap });
    }
    let half = T::lit(0.5);
    let mut h = SparseRows::zeros(dim);
    for idx in 0..dim {
        let label = basis.label(idx);
        let mut diag = T::zero();
        for (i, &e) in label.excited.iter().enumerate() {
            let sz = if e { T::one() } else { -T::one() };
            diag += half * model.atom_freqs[i] * sz;
        }
        for (k, &n) in label.photons.iter().enumerate() {
            diag += model.mode_freqs[k] * T::lit(n as f64);
        }
        h.add(idx, idx, diag);

        for i in 0..model.n_atoms() {
            let flip = if label.excited[i] {
                idx - basis.atom_stride(i)
            } else {
                idx + basis.atom_stride(i)
            };
            for k in 0..model.n_modes() {
                let g = model.couplings[i][k];
                if g == T::zero() {
                    continue;
                }
                let n = label.photons[k];
                let stride = basis.mode_stride(k);
                // a† raises n -> n+1 with amplitude sqrt(n+1); the Hermitian
                // partner entry is produced when visiting the other index.
                if n < trunc.max_photons[k] {
                    h.add(flip + stride, idx, g * T::lit(((n + 1) as f64).sqrt()));
                }
                if n > 0 {
                    h.add(flip - stride, idx, g * T::lit((n as f64).sqrt()));
                }
            }
        }
    }
    h.sort_rows();
    Ok(FockOperator { basis, matrix: h })
}

/// Lowest eigenpair of a reference Hamiltonian.
///
/// Dense diagonalization up to [`DENSE_GROUNDSTATE_LIMIT`], restarted Lanczos above.
pub fn exact_groundstate<T: Real + RealField>(h: &FockOperator<T>) -> Result<(T, Vec<T>)> {
    let dev = h.hermiticity_deviation();
    if dev > T::structural_tol() {
        return Err(Error::NotHermitian {
            deviation: dev.as_f64(),
        });
    }
    let (e, mut v) = if h.dim() <= DENSE_GROUNDSTATE_LIMIT {
        linalg::dense_lowest(&h.to_dense())
    } else {
        let tol = T::lit(1e-10) * Float::max(h.matrix.max_abs(), T::one());
        linalg::lanczos_lowest(&h.matrix, tol, 400)?
    };
    // Fix the sign so the largest component is positive.
    let (imax, _) = v
        .iter()
        .enumerate()
        .fold((0, T::zero()), |(bi, bv), (i, &x)| {
            if Float::abs(x) > bv {
                (i, Float::abs(x))
            } else {
                (bi, bv)
            }
        });
    if v[imax] < T::zero() {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok((e, v))
}

/// Full ascending spectrum (dense only).
pub fn spectrum<T: Real + RealField>(h: &FockOperator<T>) -> Result<Vec<T>> {
    if h.dim() > DENSE_EIGEN_LIMIT {
        return Err(Error::DimensionCap {
            dim: h.dim(),
            cap: DENSE_EIGEN_LIMIT,
        });
    }
    Ok(linalg::symmetric_eigenvalues(&h.to_dense()))
}

/// Convenience: groundstate energy of `model` at truncation `trunc`.
pub fn groundstate_energy<T: Real + RealField>(
    model: &DickeModel<T>,
    trunc: &FockTruncation,
) -> Result<T> {
    Ok(exact_groundstate(&build_fock_hamiltonian(model, trunc)?)?.0)
}

/// Truncated single-mode annihilation operator, `⟨n|a|n+1⟩ = √(n+1)`.
pub fn annihilation_matrix<T: Real>(n_max: usize) -> DMatrix<T> {
    let mut a = DMatrix::from_element(n_max + 1, n_max + 1, T::zero());
    for n in 0..n_max {
        a[(n, n + 1)] = T::lit(((n + 1) as f64).sqrt());
    }
    a
}

/// `D(α) = exp(α a† − α* a)` in a space truncated at `n_max`.
pub fn displacement_matrix<T: Real + RealField>(alpha: C<T>, n_max: usize) -> DMatrix<C<T>> {
    let a = annihilation_matrix::<T>(n_max);
    let gen = DMatrix::from_fn(n_max + 1, n_max + 1, |i, j| {
        // (α a† − α* a)_{ij} = α a_{ji} − α* a_{ij}
        alpha * c_re(a[(j, i)]) - alpha.conj() * c_re(a[(i, j)])
    });
    gen.exp()
}

/// Atom operator label for joint Wigner functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtomLabel {
    I,
    X,
    Y,
    Z,
}

impl AtomLabel {
    /// Matrix element `⟨row|σ|col⟩` in the `{g, e}` atom basis.
    pub fn element<T: Real>(self, row: usize, col: usize) -> C<T> {
        let (o, z) = (T::one(), T::zero());
        match (self, row, col) {
            (AtomLabel::I, r, cc) if r == cc => c(o, z),
            (AtomLabel::X, r, cc) if r != cc => c(o, z),
            // σʸ = [[0, −i], [i, 0]] with |g⟩ = lower level ↔ |1⟩ of the spin,
            // i.e. σʸ|g⟩ = −i|e⟩ in this ordering.
            (AtomLabel::Y, 1, 0) => c(z, -o),
            (AtomLabel::Y, 0, 1) => c(z, o),
            (AtomLabel::Z, 0, 0) => c(-o, z),
            (AtomLabel::Z, 1, 1) => c(o, z),
            _ => c(z, z),
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch.to_ascii_lowercase() {
            '0' | 'i' => Some(AtomLabel::I),
            'x' => Some(AtomLabel::X),
            'y' => Some(AtomLabel::Y),
            'z' => Some(AtomLabel::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            AtomLabel::I => '0',
            AtomLabel::X => 'x',
            AtomLabel::Y => 'y',
            AtomLabel::Z => 'z',
        }
    }
}

/// Truncation-leakage threshold for [`exact_wigner`].
pub const WIGNER_LEAKAGE_TOL: f64 = 1e-6;

/// Extra Fock levels used as a leakage detector around the state's truncation.
const WIGNER_PAD: usize = 24;

/// Applies a single-mode matrix to factor `mode` of a tensor state.
fn apply_mode_matrix<T: Real>(
    state: &[C<T>],
    dims: &[usize],
    mode_factor: usize,
    m: &DMatrix<C<T>>,
) -> Vec<C<T>> {
    let d = dims[mode_factor];
    let inner: usize = dims[mode_factor + 1..].iter().product();
    let outer: usize = dims[..mode_factor].iter().product();
    let mut out = vec![C::new(T::zero(), T::zero()); state.len()];
    for o in 0..outer {
        for r in 0..d {
            for col in 0..d {
                let coef = m[(r, col)];
                if coef.re == T::zero() && coef.im == T::zero() {
                    continue;
                }
                let (src, dst) = ((o * d + col) * inner, (o * d + r) * inner);
                for i in 0..inner {
                    out[dst + i] += coef * state[src + i];
                }
            }
        }
    }
    out
}

/// Joint Wigner function `W_l(α) = Tr[ρ σ^{l_1}…σ^{l_N} (2/π)^M D(α) Π D†(α)]`
/// of the pure state `state` (in the Fock basis of `trunc`).
///
/// The displaced state `D†(α)|ψ⟩` is computed by matrix exponential in a
/// padded space; if more than [`WIGNER_LEAKAGE_TOL`] of its norm lies above
/// the state's own truncation a [`Error::TruncationLeakage`] is returned.
pub fn exact_wigner<T: Real + RealField>(
    state: &[C<T>],
    trunc: &FockTruncation,
    labels: &[AtomLabel],
    alpha: &[C<T>],
) -> Result<T> {
    let n_atoms = labels.len();
    let basis = FockBasis::new(n_atoms, trunc);
    if state.len() != basis.dim() {
        return Err(Error::LengthMismatch {
            expected: basis.dim(),
            got: state.len(),
        });
    }
    if alpha.len() != trunc.n_modes() {
        return Err(Error::LengthMismatch {
            expected: trunc.n_modes(),
            got: alpha.len(),
        });
    }
    // Embed in the padded space.
    let padded_trunc = FockTruncation::new(
        trunc.max_photons.iter().map(|n| n + WIGNER_PAD).collect(),
    )?;
    let padded = FockBasis::new(n_atoms, &padded_trunc);
    let mut psi = vec![C::new(T::zero(), T::zero()); padded.dim()];
    for (idx, &amp) in state.iter().enumerate() {
        psi[padded.index(&basis.label(idx))] = amp;
    }
    let mut dims = vec![2usize; n_atoms];
    dims.extend(padded.mode_dims());
    for (k, &a) in alpha.iter().enumerate() {
        if a.re == T::zero() && a.im == T::zero() {
            continue;
        }
        let d = displacement_matrix(-a, padded_trunc.max_photons[k]);
        psi = apply_mode_matrix(&psi, &dims, n_atoms + k, &d);
    }

    let mut leak = T::zero();
    let mut tail_by_mode = vec![T::zero(); trunc.n_modes()];
    for (idx, amp) in psi.iter().enumerate() {
        let label = padded.label(idx);
        let p = amp.norm_sqr();
        let mut outside = false;
        for (k, &n) in label.photons.iter().enumerate() {
            if n > trunc.max_photons[k] {
                outside = true;
                tail_by_mode[k] += p;
            }
        }
        if outside {
            leak += p;
        }
    }
    if leak > T::lit(WIGNER_LEAKAGE_TOL) {
        let worst = trunc
            .max_photons
            .iter()
            .zip(&tail_by_mode)
            .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite"))
            .map_or(0, |(&n, _)| n);
        return Err(Error::TruncationLeakage {
            leakage: leak.as_f64(),
            suggested_n_max: worst + WIGNER_PAD,
        });
    }

    // Σ over basis: parity · ⟨ψ'| σ^l ⊗ |n⟩⟨n| |ψ'⟩.
    let block = padded.mode_block();
    let mut acc = C::new(T::zero(), T::zero());
    for atom_row in 0..(1usize << n_atoms) {
        for atom_col in 0..(1usize << n_atoms) {
            let mut coef = C::new(T::one(), T::zero());
            for (i, l) in labels.iter().enumerate() {
                let shift = n_atoms - 1 - i;
                coef = coef * l.element::<T>((atom_row >> shift) & 1, (atom_col >> shift) & 1);
                if coef.re == T::zero() && coef.im == T::zero() {
                    break;
                }
            }
            if coef.re == T::zero() && coef.im == T::zero() {
                continue;
            }
            for m in 0..block {
                let photons: usize = padded.label(m).photons.iter().sum();
                let parity = if photons % 2 == 0 { T::one() } else { -T::one() };
                let bra = psi[atom_row * block + m].conj();
                let ket = psi[atom_col * block + m];
                acc += bra * coef * ket * c_re(parity);
            }
        }
    }
    let m = trunc.n_modes() as i32;
    let norm = Float::powi(T::lit(2.0) / T::PI(), m);
    Ok(acc.re * norm)
}

/// Casts a real state to complex amplitudes.
pub fn to_complex<T: Real>(v: &[T]) -> Vec<C<T>> {
    v.iter().map(|&x| c_re(x)).collect()
}
