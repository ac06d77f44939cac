//! Variational loop: objective, optimizers, reference energies and metrics.

mod baseline;
mod objective;
mod refine;
mod spsa;
mod subspace;

pub use baseline::{polaron_baseline, polaron_energy, polaron_state, PolaronBaseline};
pub use objective::{mix_seed, EnergyObjective, Estimate, Estimator, ObjectiveOptions};
pub use refine::{refine_coordinates, RefineResult, RefinerConfig};
pub use spsa::{spsa_minimize, SpsaConfig, SpsaResult};

use nalgebra::RealField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{build_fock_hamiltonian, exact_groundstate, groundstate_energy, DickeModel, FockTruncation};
use crate::scalar::Real;
use crate::ses::{encode_hamiltonian, restrict_to_ses, QubitLayout};
use crate::sim::Counts;

/// Largest Fock dimension for which the SES route is diagonalized as a
/// cross-check of the Fock route.
const CROSS_CHECK_DIM: usize = 1024;
const METRIC_FLOOR: f64 = 1e-12;

/// `Δ_en = |(E_vqe − E_en)/E_en|`, `Δ_ex = |(E_en − E_ex)/E_ex|`.
pub fn error_metrics(e_vqe: f64, e_en: f64, e_ex: f64) -> Result<(f64, f64)> {
    if e_en.abs() < METRIC_FLOOR {
        return Err(Error::UndefinedMetric(e_en));
    }
    if e_ex.abs() < METRIC_FLOOR {
        return Err(Error::UndefinedMetric(e_ex));
    }
    Ok((((e_vqe - e_en) / e_en).abs(), ((e_en - e_ex) / e_ex).abs()))
}

/// Lowest eigenvalue of the truncated Hamiltonian (`E_en`). For small spaces
/// the SES-restricted encoded Hamiltonian is diagonalized as well and the two
/// results must agree.
pub fn encoded_groundstate_energy<T: Real + RealField>(
    model: &DickeModel<T>,
    trunc: &FockTruncation,
) -> Result<f64> {
    let e = groundstate_energy(model, trunc)?.as_f64();
    if trunc.fock_dim() << model.n_atoms() <= CROSS_CHECK_DIM {
        let layout = QubitLayout::new(model.n_atoms(), trunc);
        let h = encode_hamiltonian(model, &layout)?;
        let m = restrict_to_ses(&h, &layout);
        let dim = layout.ses_indices().len();
        let real = nalgebra::DMatrix::from_fn(dim, dim, |r, c| m[r * dim + c].re);
        let e_ses = crate::linalg::dense_lowest(&real).0.as_f64();
        if (e_ses - e).abs() > 1e-8 * e.abs().max(1.0) {
            return Err(Error::NoConvergence(format!(
                "encoded ({e_ses}) and Fock ({e}) groundstate energies disagree"
            )));
        }
    }
    Ok(e)
}

/// Groundstate of the truncated Hamiltonian in the Fock basis.
pub fn encoded_groundstate<T: Real + RealField>(
    model: &DickeModel<T>,
    trunc: &FockTruncation,
) -> Result<(T, Vec<T>)> {
    exact_groundstate(&build_fock_hamiltonian(model, trunc)?)
}

/// Drops outcomes in which any mode register is outside the SES; returns the
/// kept histogram and the retained fraction.
pub fn postselect(counts: &Counts, layout: &QubitLayout) -> Result<(Counts, f64)> {
    let total = counts.shots();
    let kept = counts.filter(|b| layout.in_ses(b));
    if kept.shots() == 0 {
        return Err(Error::NoRetainedShots);
    }
    let frac = kept.shots() as f64 / total as f64;
    Ok((kept, frac))
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeConfig {
    /// Stochastic stage; skipped if `None`.
    pub spsa: Option<SpsaConfig>,
    /// Deterministic stage on the exact objective; skipped if `None`.
    pub refiner: Option<RefinerConfig>,
    /// Restart 0 is the warm start, the others perturb it.
    pub restarts: usize,
    pub restart_spread: f64,
    pub seed: u64,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self {
            spsa: Some(SpsaConfig::default()),
            refiner: Some(RefinerConfig::default()),
            restarts: 3,
            restart_spread: 0.3,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VqeResult {
    pub theta: Vec<f64>,
    /// Final energy as the configured estimator reports it.
    pub energy: f64,
    pub std_error: f64,
    /// Noiseless exact energy at `theta`.
    pub exact_energy: f64,
    pub trace: Vec<f64>,
    pub trials: usize,
    pub refiner_sweeps: Option<usize>,
    pub retention: f64,
    pub restart: usize,
    pub seed: u64,
}

impl VqeResult {
    pub fn metrics(&self, e_en: f64, e_ex: f64) -> Result<(f64, f64)> {
        error_metrics(self.energy, e_en, e_ex)
    }
}

fn run_single<T: Real>(
    objective: &EnergyObjective<T>,
    theta0: &[f64],
    cfg: &VqeConfig,
    restart: usize,
) -> Result<VqeResult> {
    let seed = mix_seed(cfg.seed, restart as u64);
    let mut theta = theta0.to_vec();
    let mut trace = Vec::new();
    let mut trials = 0;
    if let Some(spsa) = &cfg.spsa {
        let mut counter = 0u64;
        let spsa_cfg = SpsaConfig {
            seed: mix_seed(seed, 1),
            ..spsa.clone()
        };
        let res = spsa_minimize(
            |x| {
                counter += 1;
                objective.evaluate(x, mix_seed(seed, 1000 + counter)).map(|e| e.energy)
            },
            &theta,
            &spsa_cfg,
        )?;
        if let Some(t) = res.aborted_at {
            return Err(Error::NonFiniteObjective { trial: t });
        }
        trials = res.trace.len();
        trace = res.trace;
        theta = res.theta;
    }
    let mut sweeps = None;
    if let Some(refiner) = &cfg.refiner {
        let res = refine_coordinates(|x| objective.exact_energy(x), &theta, refiner)?;
        sweeps = Some(res.sweeps);
        trace.push(res.energy);
        theta = res.theta;
    }
    let final_estimate = objective.evaluate(&theta, mix_seed(seed, 2))?;
    Ok(VqeResult {
        exact_energy: objective.exact_energy(&theta)?,
        theta,
        energy: final_estimate.energy,
        std_error: final_estimate.std_error,
        trace,
        trials,
        refiner_sweeps: sweeps,
        retention: final_estimate.retention,
        restart,
        seed: cfg.seed,
    })
}

/// Runs all restarts (in parallel) and keeps the lowest final energy.
pub fn run_vqe<T: Real>(objective: &EnergyObjective<T>, theta0: &[f64], cfg: &VqeConfig) -> Result<VqeResult> {
    run_vqe_from(objective, &[theta0.to_vec()], cfg)
}

/// Like [`run_vqe`] with several explicit starting points; `cfg.restarts − 1`
/// perturbed copies of the first one are added.
pub fn run_vqe_from<T: Real>(objective: &EnergyObjective<T>, starts: &[Vec<f64>], cfg: &VqeConfig) -> Result<VqeResult> {
    let theta0 = starts.first().ok_or(Error::Empty("starting points"))?;
    for s in starts {
        if s.len() != objective.parameter_count() {
            return Err(Error::LengthMismatch {
                expected: objective.parameter_count(),
                got: s.len(),
            });
        }
    }
    let mut all = starts.to_vec();
    for r in 1..cfg.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, 500 + r as u64));
        let normal = Normal::new(0.0, cfg.restart_spread).map_err(|e| Error::InvalidModel(e.to_string()))?;
        all.push(theta0.iter().map(|t| t + normal.sample(&mut rng)).collect());
    }
    let results: Vec<Result<VqeResult>> = all
        .par_iter()
        .enumerate()
        .map(|(r, th)| run_single(objective, th, cfg, r))
        .collect();
    let mut best: Option<VqeResult> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.energy < b.energy) {
            best = Some(r);
        }
    }
    Ok(best.expect("at least one start"))
}

/// One output row: `g_over_omega, d, E_vqe, E_en, E_ex, delta_en, delta_ex,
/// baseline, trials, seed`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub g_over_omega: f64,
    pub d: usize,
    pub e_vqe: f64,
    pub e_en: f64,
    pub e_ex: f64,
    pub delta_en: f64,
    pub delta_ex: f64,
    pub baseline: f64,
    pub trials: usize,
    pub seed: u64,
}

impl SweepRow {
    pub const HEADER: [&'static str; 10] = [
        "g_over_omega",
        "d",
        "E_vqe",
        "E_en",
        "E_ex",
        "delta_en",
        "delta_ex",
        "baseline",
        "trials",
        "seed",
    ];

    pub fn new(g_over_omega: f64, d: usize, e_vqe: f64, e_en: f64, e_ex: f64, baseline: f64, trials: usize, seed: u64) -> Result<Self> {
        let (delta_en, delta_ex) = error_metrics(e_vqe, e_en, e_ex)?;
        Ok(Self {
            g_over_omega,
            d,
            e_vqe,
            e_en,
            e_ex,
            delta_en,
            delta_ex,
            baseline,
            trials,
            seed,
        })
    }

    pub fn fields(&self) -> [String; 10] {
        [
            self.g_over_omega.to_string(),
            self.d.to_string(),
            self.e_vqe.to_string(),
            self.e_en.to_string(),
            self.e_ex.to_string(),
            self.delta_en.to_string(),
            self.delta_ex.to_string(),
            self.baseline.to_string(),
            self.trials.to_string(),
            self.seed.to_string(),
        ]
    }
}
