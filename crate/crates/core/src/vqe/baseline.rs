use nalgebra::{DMatrix, RealField};

use super::refine::{refine_coordinates, RefinerConfig};
use crate::ansatz::polaron_displacements;
use crate::error::{Error, Result};
use crate::model::{build_fock_hamiltonian, DickeModel, FockBasis, FockOperator, FockTruncation};
use crate::scalar::Real;

/// Polaron reference energy and the displacements that achieve it.
#[derive(Clone, Debug, PartialEq)]
pub struct PolaronBaseline {
    pub energy: f64,
    /// `f[i][k]`.
    pub f: Vec<Vec<f64>>,
}

/// `exp(x (a − a†))` on `n_max + 1` levels, first column only.
fn displaced_vacuum<T: Real + RealField>(x: T, n_max: usize) -> Vec<T> {
    let dim = n_max + 1;
    let mut g = DMatrix::<T>::zeros(dim, dim);
    for n in 0..n_max {
        let s = T::lit(((n + 1) as f64).sqrt());
        g[(n, n + 1)] = x * s;
        g[(n + 1, n)] = -(x * s);
    }
    let e = g.exp();
    (0..dim).map(|n| e[(n, 0)]).collect()
}

/// `P|vac⟩` with `P = exp[Σ_ik f_ik σˣ_i (a_k − a_k†)]`, in the Fock basis.
///
/// `|g…g⟩` is expanded in the σˣ eigenbasis, where every branch `s ∈ {±1}^N`
/// displaces mode `k` by `Σ_i s_i f_ik`.
pub fn polaron_state<T: Real + RealField>(
    n_atoms: usize,
    trunc: &FockTruncation,
    f: &[Vec<T>],
) -> Vec<T> {
    let basis = FockBasis::new(n_atoms, trunc);
    let m = trunc.n_modes();
    let mut psi = vec![T::zero(); basis.dim()];
    let norm = T::lit(0.5f64.powi(n_atoms as i32));
    for s in 0..(1usize << n_atoms) {
        let sign = |i: usize| if s >> i & 1 == 0 { T::one() } else { -T::one() };
        let columns: Vec<Vec<T>> = (0..m)
            .map(|k| {
                let x = (0..n_atoms).fold(T::zero(), |acc, i| acc + sign(i) * f[i][k]);
                displaced_vacuum(x, trunc.max_photons[k])
            })
            .collect();
        for (idx, amp) in psi.iter_mut().enumerate() {
            let label = basis.label(idx);
            // ⟨g|±⟩ = 1/√2, ⟨e|±⟩ = ±1/√2; the two 1/√2 factors give 1/2
            let mut a = norm;
            for (i, &e) in label.excited.iter().enumerate() {
                if e {
                    a *= sign(i);
                }
            }
            for (k, &n) in label.photons.iter().enumerate() {
                a *= columns[k][n];
            }
            *amp += a;
        }
    }
    psi
}

/// `⟨vac|P†HP|vac⟩` within the truncation.
pub fn polaron_energy<T: Real + RealField>(
    model: &DickeModel<T>,
    trunc: &FockTruncation,
    f: &[Vec<T>],
) -> Result<T> {
    if f.len() != model.n_atoms() || f.iter().any(|r| r.len() != model.n_modes()) {
        return Err(Error::LengthMismatch {
            expected: model.n_atoms() * model.n_modes(),
            got: f.iter().map(|r| r.len()).sum(),
        });
    }
    let h = build_fock_hamiltonian(model, trunc)?;
    Ok(energy_with(&h, model.n_atoms(), trunc, f))
}

fn energy_with<T: Real + RealField>(
    h: &FockOperator<T>,
    n_atoms: usize,
    trunc: &FockTruncation,
    f: &[Vec<T>],
) -> T {
    let psi = polaron_state(n_atoms, trunc, f);
    let mut hpsi = vec![T::zero(); psi.len()];
    h.matrix.matvec(&psi, &mut hpsi);
    let num: T = psi.iter().zip(&hpsi).map(|(a, b)| *a * *b).sum();
    let den: T = psi.iter().map(|a| *a * *a).sum();
    num / den
}

/// Polaron energy minimized over the displacement amplitudes, starting from
/// the renormalized-frequency warm start.
pub fn polaron_baseline<T: Real + RealField>(
    model: &DickeModel<T>,
    trunc: &FockTruncation,
) -> Result<PolaronBaseline> {
    if model.n_modes() != trunc.n_modes() {
        return Err(Error::InvalidModel("model and truncation disagree on M".into()));
    }
    let (n, m) = (model.n_atoms(), model.n_modes());
    let start: Vec<f64> = polaron_displacements(model)
        .into_iter()
        .flatten()
        .map(|x| x.as_f64())
        .collect();
    let unflat = |x: &[f64]| -> Vec<Vec<T>> {
        (0..n)
            .map(|i| (0..m).map(|k| T::lit(x[i * m + k])).collect())
            .collect()
    };
    let cfg = RefinerConfig {
        energy_tol: 1e-13,
        x_tol: 1e-8,
        ..RefinerConfig::default()
    };
    let h = build_fock_hamiltonian(model, trunc)?;
    let res = refine_coordinates(
        |x| Ok(energy_with(&h, n, trunc, &unflat(x)).as_f64()),
        &start,
        &cfg,
    )?;
    Ok(PolaronBaseline {
        energy: res.energy,
        f: (0..n)
            .map(|i| res.theta[i * m..(i + 1) * m].to_vec())
            .collect(),
    })
}
