use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{c, c_re, Real, C};

/// Which quadrature generator an uncontrolled exchange rotation uses.
///
/// On a bond `(low, high)` write `|v⟩` for the excitation on `low` and `|u⟩`
/// for the excitation on `high`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quadrature {
    /// `G = |u⟩⟨v| − |v⟩⟨u|`, the bond part of `a† − a`.
    Real,
    /// `G = i(|u⟩⟨v| + |v⟩⟨u|)`, the bond part of `i(a† + a)`.
    Imag,
}

/// A gate acting on at most three qubits.
#[derive(Clone, Debug, PartialEq)]
pub enum GateOp<T> {
    /// Single-qubit unitary, row-major `[m00, m01, m10, m11]`.
    Single { target: usize, matrix: [C<T>; 4] },
    /// `exp(angle · X_control ⊗ K)` with `K = |v⟩⟨u| − |u⟩⟨v|` on the bond
    /// `(low, high)`, i.e. the bond part of `ã − ã†` conditioned on the
    /// control's X eigenvalue. Real for real `angle`.
    ControlledBond {
        control: usize,
        low: usize,
        high: usize,
        angle: T,
    },
    /// Uncontrolled `exp(angle · G)` on the bond `(low, high)`.
    Exchange {
        low: usize,
        high: usize,
        angle: T,
        quadrature: Quadrature,
    },
    /// Explicit unitary on `targets` (1 ≤ k ≤ 3), row-major `2^k × 2^k`;
    /// `targets[0]` is the least significant bit of the local index.
    Unitary { targets: Vec<usize>, matrix: Vec<C<T>> },
}

fn max_unitarity_deviation<T: Real>(m: &[C<T>], dim: usize) -> T {
    let mut worst = T::zero();
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = C::zero();
            for k in 0..dim {
                acc += m[k * dim + i].conj() * m[k * dim + j];
            }
            if i == j {
                acc -= C::one();
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}

impl<T: Real> GateOp<T> {
    pub fn single(target: usize, matrix: [C<T>; 4]) -> Result<Self> {
        let dev = max_unitarity_deviation(&matrix, 2);
        if dev > T::structural_tol() {
            return Err(Error::NotUnitary {
                deviation: dev.as_f64(),
            });
        }
        Ok(GateOp::Single { target, matrix })
    }

    pub fn unitary(targets: Vec<usize>, matrix: Vec<C<T>>) -> Result<Self> {
        let k = targets.len();
        if k == 0 || k > 3 {
            return Err(Error::LengthMismatch {
                expected: 3,
                got: k,
            });
        }
        let dim = 1 << k;
        if matrix.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        check_distinct(&targets)?;
        let dev = max_unitarity_deviation(&matrix, dim);
        if dev > T::structural_tol() {
            return Err(Error::NotUnitary {
                deviation: dev.as_f64(),
            });
        }
        Ok(GateOp::Unitary { targets, matrix })
    }

    pub fn controlled_bond(control: usize, low: usize, high: usize, angle: T) -> Self {
        GateOp::ControlledBond {
            control,
            low,
            high,
            angle,
        }
    }

    pub fn exchange(low: usize, high: usize, angle: T, quadrature: Quadrature) -> Self {
        GateOp::Exchange {
            low,
            high,
            angle,
            quadrature,
        }
    }

    pub fn identity(target: usize) -> Self {
        let (o, z) = (C::one(), C::zero());
        GateOp::Single {
            target,
            matrix: [o, z, z, o],
        }
    }

    pub fn x(target: usize) -> Self {
        let (o, z) = (C::one(), C::zero());
        GateOp::Single {
            target,
            matrix: [z, o, o, z],
        }
    }

    pub fn h(target: usize) -> Self {
        let s = c_re(T::FRAC_1_SQRT_2());
        GateOp::Single {
            target,
            matrix: [s, s, s, -s],
        }
    }

    /// `S† = diag(1, −i)`.
    pub fn s_dag(target: usize) -> Self {
        GateOp::Single {
            target,
            matrix: [C::one(), C::zero(), C::zero(), c(T::zero(), -T::one())],
        }
    }

    /// `R_y(θ) = exp(−iθY/2)`.
    pub fn ry(target: usize, theta: T) -> Self {
        let half = theta / T::lit(2.0);
        let (s, co) = (c_re(half.sin()), c_re(half.cos()));
        GateOp::Single {
            target,
            matrix: [co, -s, s, co],
        }
    }

    pub fn cz(a: usize, b: usize) -> Self {
        let mut m = vec![C::zero(); 16];
        for i in 0..4 {
            m[i * 4 + i] = if i == 3 { -C::one() } else { C::one() };
        }
        GateOp::Unitary {
            targets: vec![a, b],
            matrix: m,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            GateOp::Single { target, .. } => vec![*target],
            GateOp::ControlledBond {
                control, low, high, ..
            } => vec![*control, *low, *high],
            GateOp::Exchange { low, high, .. } => vec![*low, *high],
            GateOp::Unitary { targets, .. } => targets.clone(),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= n_qubits) {
            return Err(Error::QubitOutOfRange { index: q, n_qubits });
        }
        check_distinct(&qs)
    }

    /// The inverse gate.
    pub fn inverse(&self) -> Self {
        match self {
            GateOp::Single { target, matrix } => GateOp::Single {
                target: *target,
                matrix: [
                    matrix[0].conj(),
                    matrix[2].conj(),
                    matrix[1].conj(),
                    matrix[3].conj(),
                ],
            },
            GateOp::ControlledBond {
                control,
                low,
                high,
                angle,
            } => GateOp::controlled_bond(*control, *low, *high, -*angle),
            GateOp::Exchange {
                low,
                high,
                angle,
                quadrature,
            } => GateOp::exchange(*low, *high, -*angle, *quadrature),
            GateOp::Unitary { targets, matrix } => {
                let dim = 1 << targets.len();
                let mut m = vec![C::zero(); dim * dim];
                for i in 0..dim {
                    for j in 0..dim {
                        m[i * dim + j] = matrix[j * dim + i].conj();
                    }
                }
                GateOp::Unitary {
                    targets: targets.clone(),
                    matrix: m,
                }
            }
        }
    }

    /// Explicit matrix over `qubits()` (first listed qubit = least significant
    /// local bit). Used by oracles and by the density-matrix engine.
    pub fn local_matrix(&self) -> Vec<C<T>> {
        match self {
            GateOp::Single { matrix, .. } => matrix.to_vec(),
            GateOp::Unitary { matrix, .. } => matrix.clone(),
            GateOp::ControlledBond { angle, .. } => {
                // local bits: 0 = control, 1 = low, 2 = high
                let (co, s) = (angle.cos(), angle.sin());
                let mut m = vec![C::zero(); 64];
                for b in 0..8usize {
                    let (low, high) = (b >> 1 & 1, b >> 2 & 1);
                    if low == high {
                        m[b * 8 + b] = C::one();
                    }
                }
                for cbit in 0..2usize {
                    let v = cbit | 0b010;
                    let u = cbit | 0b100;
                    let (vf, uf) = (v ^ 1, u ^ 1);
                    m[v * 8 + v] = c_re(co);
                    m[u * 8 + u] = c_re(co);
                    m[v * 8 + uf] = c_re(s);
                    m[u * 8 + vf] = c_re(-s);
                }
                m
            }
            GateOp::Exchange {
                angle, quadrature, ..
            } => {
                // local bits: 0 = low, 1 = high; v = 0b01, u = 0b10
                let (co, s) = (angle.cos(), angle.sin());
                let mut m = vec![C::zero(); 16];
                m[0] = C::one();
                m[15] = C::one();
                m[5] = c_re(co);
                m[10] = c_re(co);
                match quadrature {
                    Quadrature::Real => {
                        m[2 * 4 + 1] = c_re(s); // v → +s u
                        m[4 + 2] = c_re(-s);
                    }
                    Quadrature::Imag => {
                        m[2 * 4 + 1] = c(T::zero(), s);
                        m[4 + 2] = c(T::zero(), s);
                    }
                }
                m
            }
        }
    }
}

fn check_distinct(qs: &[usize]) -> Result<()> {
    for (i, a) in qs.iter().enumerate() {
        if qs[i + 1..].contains(a) {
            return Err(Error::DuplicateTargets(qs.to_vec()));
        }
    }
    Ok(())
}

fn is_zero<T: Real>(a: C<T>) -> bool {
    a.re.is_zero() && a.im.is_zero()
}

/// Indices below `len` with every bit of `mask` clear, ascending.
fn bases(len: usize, mask: usize) -> impl Iterator<Item = usize> {
    std::iter::successors(Some(0usize), move |&x| Some(((x | mask) + 1) & !mask)).take_while(move |&x| x < len)
}

/// Applies a `2^k × 2^k` matrix (not necessarily unitary) to `targets` of an
/// amplitude buffer over `n_qubits` qubits.
pub(crate) fn apply_matrix<T: Real>(amps: &mut [C<T>], targets: &[usize], m: &[C<T>]) {
    let k = targets.len();
    let dim = 1usize << k;
    let mask: usize = targets.iter().fold(0, |m, &q| m | (1 << q));
    let offsets: Vec<usize> = (0..dim)
        .map(|local| {
            targets
                .iter()
                .enumerate()
                .fold(0, |o, (bit, &q)| o | (((local >> bit) & 1) << q))
        })
        .collect();
    let mut buf = [C::<T>::zero(); 8];
    let mut out = [C::<T>::zero(); 8];
    for base in bases(amps.len(), mask) {
        for (b, &o) in buf.iter_mut().zip(&offsets) {
            *b = amps[base | o];
        }
        for (r, o) in out.iter_mut().enumerate().take(dim) {
            let row = &m[r * dim..(r + 1) * dim];
            *o = row.iter().zip(&buf[..dim]).map(|(&a, &b)| a * b).sum();
        }
        for (o, &off) in out.iter().zip(&offsets) {
            amps[base | off] = *o;
        }
    }
}

pub(crate) fn apply_single<T: Real>(amps: &mut [C<T>], q: usize, m: &[C<T>; 4]) {
    let bit = 1usize << q;
    for i in bases(amps.len(), bit) {
        let (a, b) = (amps[i], amps[i | bit]);
        amps[i] = m[0] * a + m[1] * b;
        amps[i | bit] = m[2] * a + m[3] * b;
    }
}

pub(crate) fn apply_controlled_bond<T: Real>(
    amps: &mut [C<T>],
    control: usize,
    low: usize,
    high: usize,
    angle: T,
) {
    let (cb, lb, hb) = (1usize << control, 1usize << low, 1usize << high);
    let mask = cb | lb | hb;
    let (co, s) = (angle.cos(), angle.sin());
    for base in bases(amps.len(), mask) {
        // v: excitation on low; u: excitation on high; suffix = control bit
        let (v0, u0) = (base | lb, base | hb);
        let (v1, u1) = (v0 | cb, u0 | cb);
        let (pv0, pu0, pv1, pu1) = (amps[v0], amps[u0], amps[v1], amps[u1]);
        if is_zero(pv0) && is_zero(pu0) && is_zero(pv1) && is_zero(pu1) {
            continue;
        }
        amps[v0] = pv0 * co + pu1 * s;
        amps[u0] = pu0 * co - pv1 * s;
        amps[v1] = pv1 * co + pu0 * s;
        amps[u1] = pu1 * co - pv0 * s;
    }
}

pub(crate) fn apply_exchange<T: Real>(
    amps: &mut [C<T>],
    low: usize,
    high: usize,
    angle: T,
    quadrature: Quadrature,
) {
    let (lb, hb) = (1usize << low, 1usize << high);
    let mask = lb | hb;
    let co = c_re(angle.cos());
    let s = match quadrature {
        Quadrature::Real => c_re(angle.sin()),
        Quadrature::Imag => c(T::zero(), angle.sin()),
    };
    for base in bases(amps.len(), mask) {
        let (v, u) = (base | lb, base | hb);
        let (pv, pu) = (amps[v], amps[u]);
        if is_zero(pv) && is_zero(pu) {
            continue;
        }
        match quadrature {
            // exp(θ(|u⟩⟨v| − |v⟩⟨u|))
            Quadrature::Real => {
                amps[u] = co * pu + s * pv;
                amps[v] = co * pv - s * pu;
            }
            // exp(iθ(|u⟩⟨v| + |v⟩⟨u|))
            Quadrature::Imag => {
                amps[u] = co * pu + s * pv;
                amps[v] = co * pv + s * pu;
            }
        }
    }
}

/// Applies `gate` to a raw amplitude buffer. Indices must already be valid.
pub(crate) fn apply_gate_raw<T: Real>(amps: &mut [C<T>], gate: &GateOp<T>) {
    match gate {
        GateOp::Single { target, matrix } => apply_single(amps, *target, matrix),
        GateOp::ControlledBond {
            control,
            low,
            high,
            angle,
        } => apply_controlled_bond(amps, *control, *low, *high, *angle),
        GateOp::Exchange {
            low,
            high,
            angle,
            quadrature,
        } => apply_exchange(amps, *low, *high, *angle, *quadrature),
        GateOp::Unitary { targets, matrix } => apply_matrix(amps, targets, matrix),
    }
}

/// Applies the complex conjugate of `gate`, with every qubit index shifted
/// by `shift`. Used for the column side of `ρ ↦ U ρ U†`.
pub(crate) fn apply_conjugate_shifted<T: Real>(amps: &mut [C<T>], gate: &GateOp<T>, shift: usize) {
    match gate {
        GateOp::Single { target, matrix } => {
            let m = [
                matrix[0].conj(),
                matrix[1].conj(),
                matrix[2].conj(),
                matrix[3].conj(),
            ];
            apply_single(amps, target + shift, &m)
        }
        GateOp::ControlledBond {
            control,
            low,
            high,
            angle,
        } => apply_controlled_bond(amps, control + shift, low + shift, high + shift, *angle),
        GateOp::Exchange {
            low,
            high,
            angle,
            quadrature,
        } => match quadrature {
            Quadrature::Real => apply_exchange(amps, low + shift, high + shift, *angle, Quadrature::Real),
            // conj(exp(iθA)) = exp(−iθA) for real symmetric A
            Quadrature::Imag => {
                apply_exchange(amps, low + shift, high + shift, -*angle, Quadrature::Imag)
            }
        },
        GateOp::Unitary { targets, matrix } => {
            let t: Vec<usize> = targets.iter().map(|q| q + shift).collect();
            let m: Vec<C<T>> = matrix.iter().map(|x| x.conj()).collect();
            apply_matrix(amps, &t, &m)
        }
    }
}
