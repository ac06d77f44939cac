use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};

use super::noise::ReadoutError;
use super::sampling::{Counts, Distribution};
use crate::error::{Error, Result};

const SINGULAR_DET: f64 = 1e-12;
const SIMPLEX_TOL: f64 = 1e-13;
const SIMPLEX_MAX_ITERS: usize = 20_000;

fn check_len(dist: &Distribution, errors: &[ReadoutError]) -> Result<()> {
    if errors.len() != dist.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: dist.n_qubits(),
            got: errors.len(),
        });
    }
    Ok(())
}

/// Applies a 2×2 matrix to qubit `q` of a dense probability vector.
fn apply_2x2(v: &mut [f64], q: usize, m: &[[f64; 2]; 2]) {
    let bit = 1usize << q;
    for i in 0..v.len() {
        if i & bit != 0 {
            continue;
        }
        let (a, b) = (v[i], v[i | bit]);
        v[i] = m[0][0] * a + m[0][1] * b;
        v[i | bit] = m[1][0] * a + m[1][1] * b;
    }
}

fn apply_confusion(v: &mut [f64], errors: &[ReadoutError], transpose: bool) {
    for (q, e) in errors.iter().enumerate() {
        let mut m = e.confusion();
        if transpose {
            m = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        }
        apply_2x2(v, q, &m);
    }
}

/// Pushes a true outcome distribution through the tensor-product confusion
/// matrix.
pub fn apply_readout_error(dist: &Distribution, errors: &[ReadoutError]) -> Result<Distribution> {
    check_len(dist, errors)?;
    let mut v = dist.probs().to_vec();
    apply_confusion(&mut v, errors, false);
    Distribution::new(dist.n_qubits(), v)
}

/// Flips every recorded bit independently, shot by shot.
pub fn corrupt_counts(counts: &Counts, errors: &[ReadoutError], seed: u64) -> Result<Counts> {
    if errors.len() != counts.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: counts.n_qubits(),
            got: errors.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut layer = counts.clone();
    for (q, e) in errors.iter().enumerate() {
        let bit = 1usize << q;
        let mut next = Counts::new(counts.n_qubits());
        for (b, k) in layer.iter() {
            let p = if b & bit == 0 { e.p01 } else { e.p10 };
            let flipped = if p > 0.0 {
                Binomial::new(k, p).expect("p in [0, 1]").sample(&mut rng)
            } else {
                0
            };
            next.add(b, k - flipped);
            next.add(b ^ bit, flipped);
        }
        layer = next;
    }
    Ok(layer)
}

/// Inverts the confusion matrix. If the unconstrained solution leaves the
/// probability simplex, solves `min ‖A x − b‖²` over the simplex instead.
pub fn mitigate_readout(dist: &Distribution, errors: &[ReadoutError]) -> Result<Distribution> {
    check_len(dist, errors)?;
    let mut v = dist.probs().to_vec();
    for (q, e) in errors.iter().enumerate() {
        let m = e.confusion();
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if det.abs() < SINGULAR_DET {
            return Err(Error::SingularConfusion { qubit: q });
        }
        let inv = [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]];
        apply_2x2(&mut v, q, &inv);
    }
    if v.iter().all(|&x| x >= 0.0) {
        return Distribution::new(dist.n_qubits(), v);
    }
    let x = simplex_least_squares(dist.probs(), errors, &v);
    Distribution::new(dist.n_qubits(), x)
}

/// Euclidean projection onto `{x ≥ 0, Σx = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|&x| (x - tau).max(0.0)).collect()
}

/// FISTA on `½‖A x − b‖²` with `A` the tensor-product confusion matrix.
fn simplex_least_squares(b: &[f64], errors: &[ReadoutError], start: &[f64]) -> Vec<f64> {
    // ‖A‖₂ ≤ Π ‖A_q‖₂ ≤ Π max column-sum·row-sum bound
    let lip: f64 = errors
        .iter()
        .map(|e| {
            let m = e.confusion();
            let r = (m[0][0] + m[0][1]).max(m[1][0] + m[1][1]);
            r.max(1.0)
        })
        .product::<f64>()
        .powi(2);
    let step = 1.0 / lip;
    let mut x = project_simplex(start);
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..SIMPLEX_MAX_ITERS {
        let mut r = y.clone();
        apply_confusion(&mut r, errors, false);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri -= bi);
        apply_confusion(&mut r, errors, true);
        let trial: Vec<f64> = y.iter().zip(&r).map(|(yi, gi)| yi - step * gi).collect();
        let next = project_simplex(&trial);
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let shift = (t - 1.0) / t_next;
        let delta: f64 = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        y = next.iter().zip(&x).map(|(n, o)| n + shift * (n - o)).collect();
        x = next;
        t = t_next;
        if delta < SIMPLEX_TOL {
            break;
        }
    }
    x
}
