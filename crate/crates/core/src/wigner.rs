//! Joint Wigner tomography on the encoded register: Trotterized displacement,
//! displaced-parity sampling and the disc error metric.

use log::warn;
use nalgebra::RealField;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{exact_wigner, AtomLabel, FockTruncation};
use crate::scalar::{Real, C};
use crate::ses::QubitLayout;
use crate::sim::{GateOp, Quadrature, StateVector};
use crate::vqe::mix_seed;

/// Grid points below this retention are flagged.
pub const RETENTION_FLAG: f64 = 0.5;

/// Rectangular grid of `α_k` for one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis {
    pub re: (f64, f64),
    pub im: (f64, f64),
    pub step: f64,
}

impl GridAxis {
    /// `[-extent, extent]²` with `points` per side.
    pub fn square(extent: f64, points: usize) -> Self {
        let step = if points > 1 {
            2.0 * extent / (points - 1) as f64
        } else {
            1.0
        };
        Self {
            re: (-extent, extent),
            im: (-extent, extent),
            step,
        }
    }

    fn count(lo: f64, hi: f64, step: f64) -> usize {
        ((hi - lo) / step + 1e-9).floor() as usize + 1
    }

    fn values(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        (0..Self::count(lo, hi, step)).map(|i| lo + i as f64 * step).collect()
    }

    /// Points in row-major order: `Im α` outer, `Re α` inner.
    pub fn points(&self) -> Vec<C<f64>> {
        let re = Self::values(self.re.0, self.re.1, self.step);
        Self::values(self.im.0, self.im.1, self.step)
            .into_iter()
            .flat_map(|y| re.iter().map(move |&x| C::new(x, y)))
            .collect()
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.re.0, self.re.1, self.im.0, self.im.1, self.step]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.step <= 0.0 || self.re.0 > self.re.1 || self.im.0 > self.im.1 {
            return Err(Error::InvalidModel(format!("bad Wigner grid axis {self:?}")));
        }
        Ok(())
    }
}

/// Phase-space grid (one axis per mode) and the atom-operator labels `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub axes: Vec<GridAxis>,
    pub labels: Vec<AtomLabel>,
}

impl WignerGrid {
    pub fn new(axes: Vec<GridAxis>, labels: Vec<AtomLabel>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Empty("Wigner grid"));
        }
        for a in &axes {
            a.validate()?;
        }
        Ok(Self { axes, labels })
    }

    pub fn n_modes(&self) -> usize {
        self.axes.len()
    }

    /// Cartesian product of the per-mode grids; mode 0 varies slowest.
    pub fn points(&self) -> Vec<Vec<C<f64>>> {
        let mut out: Vec<Vec<C<f64>>> = vec![Vec::new()];
        for axis in &self.axes {
            let pts = axis.points();
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    pts.iter().map(move |&p| {
                        let mut v = prefix.clone();
                        v.push(p);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// Phase-space volume per grid point.
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|a| a.step * a.step).product()
    }

    fn check_against(&self, layout: &QubitLayout) -> Result<()> {
        if self.axes.len() != layout.n_modes() {
            return Err(Error::LengthMismatch {
                expected: layout.n_modes(),
                got: self.axes.len(),
            });
        }
        if self.labels.len() != layout.n_atoms() {
            return Err(Error::LengthMismatch {
                expected: layout.n_atoms(),
                got: self.labels.len(),
            });
        }
        Ok(())
    }
}

/// Trotterized `D̃(α)` on the register of one mode.
#[derive(Clone, Debug, PartialEq)]
pub struct DisplacementCircuit<T> {
    pub mode: usize,
    pub alpha: C<f64>,
    pub depth: usize,
    pub gates: Vec<GateOp<T>>,
}

impl<T: Real> DisplacementCircuit<T> {
    /// `D̃†(α)`: reversed gate order with inverted gates.
    pub fn adjoint_gates(&self) -> Vec<GateOp<T>> {
        self.gates.iter().rev().map(|g| g.inverse()).collect()
    }
}

/// Per Trotter step: the `Re α (a† − a)` block, then the `i Im α (a† + a)`
/// block, each as even bonds followed by odd bonds. A vanishing component
/// contributes no gates.
pub fn build_displacement<T: Real>(
    mode: usize,
    alpha: C<f64>,
    depth: usize,
    layout: &QubitLayout,
) -> Result<DisplacementCircuit<T>> {
    if depth == 0 {
        return Err(Error::InvalidModel("displacement needs at least one Trotter step".into()));
    }
    if mode >= layout.n_modes() {
        return Err(Error::LengthMismatch {
            expected: layout.n_modes(),
            got: mode + 1,
        });
    }
    let reg = layout.register(mode);
    let n_max = layout.n_max(mode);
    let mut gates = Vec::new();
    for _ in 0..depth {
        for (comp, quad) in [(alpha.re, Quadrature::Real), (alpha.im, Quadrature::Imag)] {
            if comp == 0.0 {
                continue;
            }
            for parity in 0..2 {
                for n in (parity..n_max).step_by(2) {
                    let angle = comp * ((n + 1) as f64).sqrt() / depth as f64;
                    gates.push(GateOp::exchange(reg.start + n, reg.start + n + 1, T::lit(angle), quad));
                }
            }
        }
    }
    Ok(DisplacementCircuit {
        mode,
        alpha,
        depth,
        gates,
    })
}

/// How outcome probabilities are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WignerSampling {
    Exact,
    Shots(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerPoint {
    pub alpha: Vec<C<f64>>,
    pub value: f64,
    /// Fraction of outcomes inside the SES.
    pub retention: f64,
    pub flagged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WignerField {
    pub points: Vec<WignerPoint>,
    pub cell_volume: f64,
}

impl WignerField {
    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn flagged(&self) -> usize {
        self.points.iter().filter(|p| p.flagged).count()
    }
}

fn atom_basis_change<T: Real>(labels: &[AtomLabel], layout: &QubitLayout) -> Vec<GateOp<T>> {
    labels
        .iter()
        .enumerate()
        .flat_map(|(i, l)| {
            let q = layout.atom_qubit(i);
            match l {
                AtomLabel::X => vec![GateOp::h(q)],
                AtomLabel::Y => vec![GateOp::s_dag(q), GateOp::h(q)],
                AtomLabel::I | AtomLabel::Z => vec![],
            }
        })
        .collect()
}

/// `(−1)^{Σ ñ_k} · Π_{l_i ≠ 0} z_i` for an SES outcome, `None` outside.
fn outcome_weight(b: usize, labels: &[AtomLabel], layout: &QubitLayout) -> Option<f64> {
    let mut photons = 0;
    for k in 0..layout.n_modes() {
        photons += layout.photon_number(k, b)?;
    }
    let mut w = if photons % 2 == 0 { 1.0 } else { -1.0 };
    for (i, l) in labels.iter().enumerate() {
        if *l != AtomLabel::I && b >> layout.atom_qubit(i) & 1 == 1 {
            w = -w;
        }
    }
    Some(w)
}

fn sample_point<T: Real>(
    state: &StateVector<T>,
    layout: &QubitLayout,
    labels: &[AtomLabel],
    alpha: &[C<f64>],
    depth: usize,
    sampling: WignerSampling,
    seed: u64,
) -> Result<WignerPoint> {
    let mut psi = state.clone();
    for (k, &a) in alpha.iter().enumerate() {
        let disp = build_displacement::<T>(k, a, depth, layout)?;
        psi.apply_all(&disp.adjoint_gates())?;
    }
    let basis = atom_basis_change::<T>(labels, layout);
    let probs: Vec<f64> = match sampling {
        WignerSampling::Exact => {
            psi.apply_all(&basis)?;
            psi.probabilities().into_iter().map(|p| p.as_f64()).collect()
        }
        WignerSampling::Shots(shots) => psi.sample_counts(&basis, shots, seed)?.to_distribution()?.into_probs(),
    };
    let (mut kept, mut acc) = (0.0, 0.0);
    for (b, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        if let Some(w) = outcome_weight(b, labels, layout) {
            kept += p;
            acc += w * p;
        }
    }
    let norm = (2.0 / std::f64::consts::PI).powi(layout.n_modes() as i32);
    let value = if kept > 0.0 { norm * acc / kept } else { f64::NAN };
    let flagged = kept < RETENTION_FLAG;
    if flagged {
        warn!("Wigner point {alpha:?}: retention {kept:.3} below {RETENTION_FLAG}");
    }
    Ok(WignerPoint {
        alpha: alpha.to_vec(),
        value,
        retention: kept,
        flagged,
    })
}

/// Encoded joint Wigner function `W̃_l(α)` of `state` on every grid point.
/// Points are evaluated in parallel; results are in grid order and do not
/// depend on the thread count.
pub fn sample_wigner<T: Real>(
    state: &StateVector<T>,
    layout: &QubitLayout,
    grid: &WignerGrid,
    depth: usize,
    sampling: WignerSampling,
    seed: u64,
) -> Result<WignerField> {
    grid.check_against(layout)?;
    if state.n_qubits() != layout.total_qubits() {
        return Err(Error::LengthMismatch {
            expected: layout.total_qubits(),
            got: state.n_qubits(),
        });
    }
    if let WignerSampling::Shots(0) = sampling {
        return Err(Error::Empty("shot budget"));
    }
    let points = grid.points();
    let field: Result<Vec<WignerPoint>> = points
        .par_iter()
        .enumerate()
        .map(|(i, a)| sample_point(state, layout, &grid.labels, a, depth, sampling, mix_seed(seed, i as u64)))
        .collect();
    Ok(WignerField {
        points: field?,
        cell_volume: grid.cell_volume(),
    })
}

/// Exact `W_l(α)` of a Fock-basis state on every grid point.
pub fn exact_wigner_field<T: Real + RealField>(
    fock_state: &[C<T>],
    trunc: &FockTruncation,
    grid: &WignerGrid,
) -> Result<Vec<f64>> {
    grid.points()
        .par_iter()
        .map(|a| {
            let alpha: Vec<C<T>> = a.iter().map(|z| C::new(T::lit(z.re), T::lit(z.im))).collect();
            exact_wigner(fock_state, trunc, &grid.labels, &alpha).map(|w| w.as_f64())
        })
        .collect()
}

/// `ΔW(|α|) = sqrt(Σ_{|α′| ≤ |α|} (W̃ − W)² · cell) / (√π |α|)`.
pub fn wigner_error(sampled: &WignerField, exact: &[f64], cutoff: f64) -> Result<f64> {
    if exact.len() != sampled.points.len() {
        return Err(Error::LengthMismatch {
            expected: sampled.points.len(),
            got: exact.len(),
        });
    }
    if !(cutoff > 0.0) {
        return Err(Error::Empty("Wigner error disc"));
    }
    let mut sum = 0.0;
    let mut inside = 0usize;
    for (p, &w) in sampled.points.iter().zip(exact) {
        let r = p.alpha.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if r <= cutoff + 1e-9 {
            inside += 1;
            sum += (p.value - w).powi(2);
        }
    }
    if inside == 0 {
        return Err(Error::Empty("Wigner error disc"));
    }
    Ok((sum * sampled.cell_volume).sqrt() / (std::f64::consts::PI.sqrt() * cutoff))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Empty("log-log fit"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if !(sxx > 0.0) || !sxy.is_finite() {
        return Err(Error::UndefinedMetric(sxx));
    }
    Ok(sxy / sxx)
}
