//! INI-style experiment configuration. Every key has a default; unknown
//! sections and keys are rejected.

use std::collections::BTreeMap;
use std::str::FromStr;

use dicke_vqe::model::{AtomLabel, DickeModel, FockTruncation};
use dicke_vqe::sim::{NoiseModel, ReadoutError};
use dicke_vqe::vqe::{RefinerConfig, SpsaConfig, VqeConfig};
use ini::Ini;
use sha2::{Digest, Sha256};

use crate::error::CliError;

const KEYS: &[(&str, &[&str])] = &[
    ("run", &["seed", "name"]),
    (
        "model",
        &["n_atoms", "n_modes", "omega_q", "omega_c", "g_over_omega", "coupling_weights"],
    ),
    ("truncation", &["n_max", "reference_n_max"]),
    ("ansatz", &["depths", "per_photon", "atom_layer"]),
    (
        "optimizer",
        &[
            "spsa_trials",
            "spsa_a",
            "spsa_c",
            "spsa_alpha",
            "spsa_gamma",
            "spsa_target_step",
            "spsa_averaging",
            "refiner",
            "refiner_max_sweeps",
            "refiner_energy_tol",
            "restarts",
            "restart_spread",
        ],
    ),
    (
        "noise",
        &[
            "lambdas",
            "depolarizing",
            "amplitude_damping",
            "readout_p01",
            "readout_p10",
            "shots",
            "seeds",
            "variants",
        ],
    ),
    (
        "tomography",
        &[
            "g_over_omega",
            "n_max",
            "extent",
            "points",
            "depths",
            "labels",
            "source",
            "vqe_depth",
            "shots",
            "cutoffs",
        ],
    ),
    ("exact", &["n_max_values"]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AtomLayer {
    Auto,
    On,
    Off,
}

/// Measurement post-processing combination for the noisy runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Variant {
    pub mitigate: bool,
    pub postselect: bool,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match (self.mitigate, self.postselect) {
            (false, false) => "raw",
            (true, false) => "mitigated",
            (false, true) => "postselected",
            (true, true) => "mitigated+postselected",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let v = |mitigate, postselect| Some(Variant { mitigate, postselect });
        match s {
            "raw" => v(false, false),
            "mitigated" => v(true, false),
            "postselected" => v(false, true),
            "mitigated+postselected" => v(true, true),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSource {
    Exact,
    Vqe,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSection {
    pub n_atoms: usize,
    pub n_modes: usize,
    pub omega_q: Vec<f64>,
    pub omega_c: Vec<f64>,
    pub g_over_omega: Vec<f64>,
    /// Relative coupling pattern `w_ik`; `g_ik = g/ω · ω_c[0] · w_ik`.
    pub coupling_weights: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSection {
    pub lambdas: Vec<f64>,
    pub depolarizing: f64,
    pub amplitude_damping: f64,
    pub readout: ReadoutError,
    pub shots: u64,
    pub seeds: usize,
    pub variants: Vec<Variant>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TomographySection {
    pub g_over_omega: f64,
    pub n_max: usize,
    pub extent: f64,
    pub points: usize,
    pub depths: Vec<usize>,
    pub labels: Vec<AtomLabel>,
    pub source: StateSource,
    pub vqe_depth: usize,
    /// Zero means exact probabilities.
    pub shots: u64,
    pub cutoffs: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub model: ModelSection,
    pub n_max: Vec<usize>,
    pub reference_n_max: usize,
    pub depths: Vec<usize>,
    pub per_photon: bool,
    pub atom_layer: AtomLayer,
    pub vqe: VqeConfig,
    pub noise: NoiseSection,
    pub tomography: TomographySection,
    pub exact_n_max: Vec<usize>,
    /// SHA-256 of the config text, hex.
    pub hash: String,
}

fn err(section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("[{section}] {key}: {msg}"))
}

/// Scalar or comma list; `a:b:step` expands to an inclusive range.
fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, String>
where
    T::Err: std::fmt::Display,
{
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.trim().parse::<T>().map_err(|e| format!("'{x}': {e}")))
        .collect()
}

fn parse_floats(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let p = |x: &str| x.parse::<f64>().map_err(|e| format!("'{x}': {e}"));
        let (a, b, step) = (p(parts[0])?, p(parts[1])?, p(parts[2])?);
        if !(step > 0.0) || b < a {
            return Err("range needs start ≤ stop and step > 0".into());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        // rounded to 12 digits so that 0.1 steps print cleanly
        return Ok((0..=n).map(|i| ((a + i as f64 * step) * 1e12).round() / 1e12).collect());
    }
    let v: Vec<f64> = parse_list(s)?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err("non-finite value".into());
    }
    Ok(v)
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(format!("'{other}' is not a boolean")),
    }
}

struct Reader {
    values: BTreeMap<(String, String), String>,
}

impl Reader {
    fn get<T>(&self, section: &str, key: &str, default: T, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, CliError> {
        match self.values.get(&(section.to_string(), key.to_string())) {
            Some(v) => parse(v).map_err(|m| err(section, key, m)),
            None => Ok(default),
        }
    }

    fn scalar<T: FromStr>(&self, section: &str, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(section, key, default, |s| s.trim().parse::<T>().map_err(|e| e.to_string()))
    }
}

/// Broadcasts a one-element list to `n` entries.
fn broadcast<T: Clone>(v: Vec<T>, n: usize, section: &str, key: &str) -> Result<Vec<T>, CliError> {
    match v.len() {
        1 => Ok(vec![v[0].clone(); n]),
        l if l == n => Ok(v),
        l => Err(err(section, key, format!("expected 1 or {n} values, got {l}"))),
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        let mut values = BTreeMap::new();
        for (section, props) in ini.iter() {
            let Some(section) = section else {
                if props.iter().next().is_some() {
                    return Err(CliError::Config("keys outside a section".into()));
                }
                continue;
            };
            let Some((_, allowed)) = KEYS.iter().find(|(s, _)| *s == section) else {
                return Err(CliError::Config(format!("unknown section [{section}]")));
            };
            for (k, v) in props.iter() {
                if !allowed.contains(&k) {
                    return Err(err(section, k, "unknown key"));
                }
                values.insert((section.to_string(), k.to_string()), v.to_string());
            }
        }
        let r = Reader { values };

        let n_atoms: usize = r.scalar("model", "n_atoms", 1)?;
        let n_modes: usize = r.scalar("model", "n_modes", 1)?;
        if n_atoms == 0 || n_modes == 0 {
            return Err(CliError::Config("[model] needs at least one atom and one mode".into()));
        }
        let omega_q = broadcast(r.get("model", "omega_q", vec![1.0], parse_floats)?, n_atoms, "model", "omega_q")?;
        let omega_c = broadcast(r.get("model", "omega_c", vec![1.0], parse_floats)?, n_modes, "model", "omega_c")?;
        let g_over_omega = r.get("model", "g_over_omega", parse_floats("0:1:0.1").expect("default"), parse_floats)?;
        if g_over_omega.is_empty() {
            return Err(err("model", "g_over_omega", "empty sweep"));
        }
        let coupling_weights = r.get("model", "coupling_weights", vec![vec![1.0; n_modes]; n_atoms], |s| {
            s.split(';').map(parse_floats).collect::<Result<Vec<_>, _>>()
        })?;
        if coupling_weights.len() != n_atoms || coupling_weights.iter().any(|row| row.len() != n_modes) {
            return Err(err("model", "coupling_weights", format!("expected {n_atoms} rows of {n_modes}")));
        }

        let n_max = broadcast(r.get("truncation", "n_max", vec![3], parse_list)?, n_modes, "truncation", "n_max")?;
        if n_max.contains(&0) {
            return Err(err("truncation", "n_max", "must be ≥ 1"));
        }
        let reference_n_max = r.scalar("truncation", "reference_n_max", 60)?;

        let depths: Vec<usize> = r.get("ansatz", "depths", vec![3], parse_list)?;
        if depths.is_empty() || depths.contains(&0) {
            return Err(err("ansatz", "depths", "need depths ≥ 1"));
        }
        let per_photon = r.get("ansatz", "per_photon", false, parse_bool)?;
        let atom_layer = r.get("ansatz", "atom_layer", AtomLayer::Auto, |s| match s.trim() {
            "auto" => Ok(AtomLayer::Auto),
            x => parse_bool(x).map(|b| if b { AtomLayer::On } else { AtomLayer::Off }),
        })?;

        let d = SpsaConfig::default();
        let spsa_trials: usize = r.scalar("optimizer", "spsa_trials", d.max_trials)?;
        let spsa = SpsaConfig {
            max_trials: spsa_trials,
            a: r.get("optimizer", "spsa_a", None, |s| match s.trim() {
                "auto" => Ok(None),
                x => x.parse::<f64>().map(Some).map_err(|e| e.to_string()),
            })?,
            c: r.scalar("optimizer", "spsa_c", d.c)?,
            alpha: r.scalar("optimizer", "spsa_alpha", d.alpha)?,
            gamma: r.scalar("optimizer", "spsa_gamma", d.gamma)?,
            target_step: r.scalar("optimizer", "spsa_target_step", d.target_step)?,
            averaging_window: r.scalar("optimizer", "spsa_averaging", d.averaging_window)?,
            ..d
        };
        spsa.validate().map_err(|e| err("optimizer", "spsa", e))?;
        let rd = RefinerConfig::default();
        let refiner = RefinerConfig {
            max_sweeps: r.scalar("optimizer", "refiner_max_sweeps", rd.max_sweeps)?,
            energy_tol: r.scalar("optimizer", "refiner_energy_tol", rd.energy_tol)?,
            ..rd
        };
        let vd = VqeConfig::default();
        let seed = r.scalar("run", "seed", 0u64)?;
        let vqe = VqeConfig {
            spsa: (spsa_trials > 0).then_some(spsa),
            refiner: r.get("optimizer", "refiner", true, parse_bool)?.then_some(refiner),
            restarts: r.scalar("optimizer", "restarts", vd.restarts)?,
            restart_spread: r.scalar("optimizer", "restart_spread", vd.restart_spread)?,
            seed,
        };
        if vqe.restarts == 0 || !(vqe.restart_spread >= 0.0) {
            return Err(err("optimizer", "restarts", "need ≥ 1 restart and a non-negative spread"));
        }

        let noise = NoiseSection {
            lambdas: r.get("noise", "lambdas", vec![0.0, 0.1, 1.0], parse_floats)?,
            depolarizing: r.scalar("noise", "depolarizing", 0.01)?,
            amplitude_damping: r.scalar("noise", "amplitude_damping", 0.02)?,
            readout: ReadoutError {
                p01: r.scalar("noise", "readout_p01", 0.02)?,
                p10: r.scalar("noise", "readout_p10", 0.04)?,
            },
            shots: r.scalar("noise", "shots", 1000)?,
            seeds: r.scalar("noise", "seeds", 10)?,
            variants: r.get(
                "noise",
                "variants",
                vec![
                    Variant { mitigate: false, postselect: false },
                    Variant { mitigate: true, postselect: true },
                ],
                |s| {
                    s.split(',')
                        .map(|v| Variant::parse(v.trim()).ok_or(format!("unknown variant '{}'", v.trim())))
                        .collect()
                },
            )?,
        };
        if noise.shots == 0 || noise.seeds == 0 || noise.variants.is_empty() {
            return Err(err("noise", "shots", "shots, seeds and variants must be nonempty"));
        }

        let tomography = TomographySection {
            g_over_omega: r.scalar("tomography", "g_over_omega", 1.0)?,
            n_max: r.scalar("tomography", "n_max", 7)?,
            extent: r.scalar("tomography", "extent", 3.0)?,
            points: r.scalar("tomography", "points", 41)?,
            depths: r.get("tomography", "depths", vec![2, 4, 8], parse_list)?,
            labels: r.get("tomography", "labels", vec![AtomLabel::Z; n_atoms], |s| {
                s.trim()
                    .chars()
                    .map(|c| AtomLabel::from_char(c).ok_or(format!("unknown atom label '{c}'")))
                    .collect()
            })?,
            source: r.get("tomography", "source", StateSource::Exact, |s| match s.trim() {
                "exact" => Ok(StateSource::Exact),
                "vqe" => Ok(StateSource::Vqe),
                o => Err(format!("unknown source '{o}'")),
            })?,
            vqe_depth: r.scalar("tomography", "vqe_depth", 3)?,
            shots: r.scalar("tomography", "shots", 0)?,
            cutoffs: r.get("tomography", "cutoffs", parse_floats("0.25:2.5:0.25").expect("default"), parse_floats)?,
        };
        let t = &tomography;
        if t.labels.len() != n_atoms {
            return Err(err("tomography", "labels", format!("need one label per atom ({n_atoms})")));
        }
        if t.points == 0 || !(t.extent >= 0.0) || t.depths.is_empty() || t.depths.contains(&0) || t.vqe_depth == 0 || t.n_max == 0 {
            return Err(err("tomography", "grid", "points, depths and n_max must be positive"));
        }

        let exact_n_max = r.get("exact", "n_max_values", vec![n_max[0]], parse_list)?;
        if exact_n_max.is_empty() || exact_n_max.contains(&0) {
            return Err(err("exact", "n_max_values", "must be ≥ 1"));
        }

        Ok(Self {
            name: r.get("run", "name", "run".to_string(), |s| Ok(s.trim().to_string()))?,
            seed,
            model: ModelSection {
                n_atoms,
                n_modes,
                omega_q,
                omega_c,
                g_over_omega,
                coupling_weights,
            },
            n_max,
            reference_n_max,
            depths,
            per_photon,
            atom_layer,
            vqe,
            noise,
            tomography,
            exact_n_max,
            hash: hex(&Sha256::digest(text.as_bytes())),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.vqe.seed = seed;
        self
    }

    pub fn model_at(&self, g_over_omega: f64) -> Result<DickeModel<f64>, CliError> {
        let m = &self.model;
        let g = g_over_omega * m.omega_c[0];
        let couplings = m
            .coupling_weights
            .iter()
            .map(|row| row.iter().map(|w| g * w).collect())
            .collect();
        DickeModel::new(m.omega_q.clone(), m.omega_c.clone(), couplings).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn truncation(&self) -> FockTruncation {
        FockTruncation::new(self.n_max.clone()).expect("validated")
    }

    pub fn reference_truncation(&self) -> FockTruncation {
        FockTruncation::uniform(self.model.n_modes, self.reference_n_max)
    }

    pub fn noise_model(&self, n_qubits: usize, lambda: f64) -> NoiseModel {
        let n = &self.noise;
        NoiseModel::uniform(n_qubits, n.depolarizing, n.amplitude_damping, n.readout).with_lambda(lambda)
    }

    pub fn atom_layer_on(&self) -> bool {
        match self.atom_layer {
            AtomLayer::Auto => self.model.n_atoms > 1,
            AtomLayer::On => true,
            AtomLayer::Off => false,
        }
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
