use std::fs;
use std::path::{Path, PathBuf};

use dicke_vqe::ansatz::{build_ansatz, pad_parameters, polaron_displacement_params, AnsatzSpec};
use dicke_vqe::model::{build_fock_hamiltonian, exact_groundstate, groundstate_energy, to_complex, FockTruncation};
use dicke_vqe::ses::{encode_fock_vector, encode_hamiltonian, QubitLayout};
use dicke_vqe::sim::StateVector;
use dicke_vqe::vqe::{
    encoded_groundstate_energy, error_metrics, mix_seed, polaron_baseline, run_vqe, run_vqe_from, EnergyObjective,
    Estimator, ObjectiveOptions, SweepRow, VqeConfig,
};
use dicke_vqe::wigner::{exact_wigner_field, sample_wigner, wigner_error, GridAxis, WignerGrid, WignerSampling};
use log::info;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, StateSource, Variant};
use crate::error::{CliError, Context};
use crate::output::{num, Table};

fn spec_for(cfg: &ExperimentConfig, trunc: FockTruncation, d: usize) -> Result<AnsatzSpec, CliError> {
    Ok(AnsatzSpec::uniform(cfg.model.n_atoms, trunc, d)
        .map_err(|e| CliError::Config(e.to_string()))?
        .with_per_photon(cfg.per_photon)
        .with_atom_layer(cfg.atom_layer_on()))
}

/// Reference energies for one coupling value.
#[derive(Clone, Debug)]
pub struct References {
    pub e_en: f64,
    pub e_ex: f64,
    pub baseline: f64,
}

pub fn references(cfg: &ExperimentConfig, g: f64) -> Result<References, CliError> {
    let model = cfg.model_at(g)?;
    let ctx = || format!("references at g/ω={g}");
    Ok(References {
        e_en: encoded_groundstate_energy(&model, &cfg.truncation()).context(ctx)?,
        e_ex: groundstate_energy(&model, &cfg.reference_truncation()).context(ctx)?,
        baseline: polaron_baseline(&model, &cfg.truncation()).context(ctx)?.energy,
    })
}

/// Noiseless exact-objective VQE for every `(g, d)`; one row per point in
/// sweep order (`g` outer, `d` inner). Depths of one `g` run in ascending
/// order and also start from the padded optimum of the previous depth.
pub fn sweep(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let mut depths = cfg.depths.clone();
    depths.sort_unstable();
    let per_g: Vec<Result<Vec<SweepRow>, CliError>> = cfg
        .model
        .g_over_omega
        .par_iter()
        .enumerate()
        .map(|(gi, &g)| {
            let refs = references(cfg, g)?;
            let model = cfg.model_at(g)?;
            let mut rows = Vec::new();
            let mut prev: Option<(AnsatzSpec, Vec<f64>)> = None;
            for &d in &depths {
                let ctx = || format!("sweep point g/ω={g}, d={d}");
                let spec = spec_for(cfg, cfg.truncation(), d)?;
                let circuit = build_ansatz::<f64>(&spec).context(ctx)?;
                let obj = EnergyObjective::new(&model, circuit, ObjectiveOptions::default()).context(ctx)?;
                let mut starts = vec![polaron_displacement_params(&model, &spec).context(ctx)?];
                if let Some((ps, pt)) = &prev {
                    starts.push(pad_parameters(ps, pt, &spec).context(ctx)?);
                }
                let seed = mix_seed(cfg.seed, (gi * 1000 + d) as u64);
                let res = run_vqe_from(&obj, &starts, &VqeConfig { seed, ..cfg.vqe.clone() }).context(ctx)?;
                let trials = res.trials + res.refiner_sweeps.unwrap_or(0);
                info!("g/ω={g} d={d} E_vqe={} E_en={}", res.energy, refs.e_en);
                rows.push(
                    SweepRow::new(g, d, res.energy, refs.e_en, refs.e_ex, refs.baseline, trials, cfg.seed).context(ctx)?,
                );
                prev = Some((spec, res.theta));
            }
            Ok(rows)
        })
        .collect();
    let mut table = Table::new(&SweepRow::HEADER);
    for rows in per_g {
        for r in rows? {
            table.push(r.fields().to_vec());
        }
    }
    Ok(table)
}

pub const NOISY_HEADER: [&str; 10] = [
    "g_over_omega",
    "lambda",
    "variant",
    "seed",
    "E_vqe",
    "E_theta_exact",
    "E_en",
    "delta_en",
    "retention",
    "trials",
];

pub const BAND_HEADER: [&str; 7] = ["g_over_omega", "lambda", "variant", "runs", "median_delta_en", "min_delta_en", "max_delta_en"];

/// One noisy SPSA run.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyRun {
    pub g: f64,
    pub lambda: f64,
    pub variant: Variant,
    pub seed: u64,
    pub e_vqe: f64,
    pub e_theta_exact: f64,
    pub e_en: f64,
    pub delta_en: f64,
    pub retention: f64,
    pub trials: usize,
}

/// Shot-based SPSA under the scaled noise model for every
/// `(g, λ, variant, seed)`. The refiner is not used here.
pub fn noisy_runs(cfg: &ExperimentConfig) -> Result<Vec<NoisyRun>, CliError> {
    let d = *cfg.depths.first().expect("validated");
    let mut points = Vec::new();
    for &g in &cfg.model.g_over_omega {
        for &lambda in &cfg.noise.lambdas {
            for &variant in &cfg.noise.variants {
                for s in 0..cfg.noise.seeds {
                    points.push((g, lambda, variant, s as u64));
                }
            }
        }
    }
    let e_en: Vec<f64> = cfg
        .model
        .g_over_omega
        .iter()
        .map(|&g| encoded_groundstate_energy(&cfg.model_at(g)?, &cfg.truncation()).context(|| format!("E_en at g/ω={g}")))
        .collect::<Result<_, _>>()?;
    points
        .par_iter()
        .enumerate()
        .map(|(idx, &(g, lambda, variant, s))| {
            let ctx = || format!("noisy run g/ω={g}, λ={lambda}, {}, seed {s}", variant.name());
            let model = cfg.model_at(g)?;
            let spec = spec_for(cfg, cfg.truncation(), d)?;
            let circuit = build_ansatz::<f64>(&spec).context(ctx)?;
            let opts = ObjectiveOptions {
                estimator: Estimator::Shots(cfg.noise.shots),
                noise: Some(cfg.noise_model(circuit.n_qubits(), lambda)),
                mitigate_readout: variant.mitigate,
                postselect: variant.postselect,
            };
            let obj = EnergyObjective::new(&model, circuit, opts).context(ctx)?;
            let theta0 = polaron_displacement_params(&model, &spec).context(ctx)?;
            let seed = mix_seed(cfg.seed.wrapping_add(s), idx as u64);
            let vqe = VqeConfig {
                refiner: None,
                seed,
                ..cfg.vqe.clone()
            };
            let res = run_vqe(&obj, &theta0, &vqe).context(ctx)?;
            let gi = cfg.model.g_over_omega.iter().position(|&x| x == g).expect("from the sweep");
            let delta_en = error_metrics(res.energy, e_en[gi], e_en[gi]).context(ctx)?.0;
            Ok(NoisyRun {
                g,
                lambda,
                variant,
                seed: cfg.seed.wrapping_add(s),
                e_vqe: res.energy,
                e_theta_exact: res.exact_energy,
                e_en: e_en[gi],
                delta_en,
                retention: res.retention,
                trials: res.trials,
            })
        })
        .collect()
}

pub fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn noisy_tables(runs: &[NoisyRun]) -> (Table, Table) {
    let mut all = Table::new(&NOISY_HEADER);
    for r in runs {
        all.push(vec![
            num(r.g),
            num(r.lambda),
            r.variant.name().into(),
            r.seed.to_string(),
            num(r.e_vqe),
            num(r.e_theta_exact),
            num(r.e_en),
            num(r.delta_en),
            num(r.retention),
            r.trials.to_string(),
        ]);
    }
    let mut bands = Table::new(&BAND_HEADER);
    let mut keys: Vec<(f64, f64, Variant)> = Vec::new();
    for r in runs {
        if !keys.iter().any(|k| *k == (r.g, r.lambda, r.variant)) {
            keys.push((r.g, r.lambda, r.variant));
        }
    }
    for (g, lambda, variant) in keys {
        let mut d: Vec<f64> = runs
            .iter()
            .filter(|r| (r.g, r.lambda, r.variant) == (g, lambda, variant))
            .map(|r| r.delta_en)
            .collect();
        let n = d.len();
        let med = median(&mut d);
        bands.push(vec![
            num(g),
            num(lambda),
            variant.name().into(),
            n.to_string(),
            num(med),
            num(d[0]),
            num(d[n - 1]),
        ]);
    }
    (all, bands)
}

/// Per-depth Wigner fields and the `ΔW(|α|)` curves.
pub struct WignerOutput {
    pub fields: Vec<(usize, Table)>,
    pub errors: Table,
}

pub fn wigner(cfg: &ExperimentConfig) -> Result<WignerOutput, CliError> {
    let t = &cfg.tomography;
    let model = cfg.model_at(t.g_over_omega)?;
    let n_modes = cfg.model.n_modes;
    let trunc = FockTruncation::uniform(n_modes, t.n_max);
    let layout = QubitLayout::new(cfg.model.n_atoms, &trunc);
    let ctx = || format!("Wigner state at g/ω={}", t.g_over_omega);
    let state: StateVector<f64> = match t.source {
        StateSource::Exact => {
            let (_, gs) = exact_groundstate(&build_fock_hamiltonian(&model, &trunc).context(ctx)?).context(ctx)?;
            encode_fock_vector(&to_complex(&gs), &layout).context(ctx)?
        }
        StateSource::Vqe => {
            let spec = spec_for(cfg, trunc.clone(), t.vqe_depth)?;
            let obj = EnergyObjective::new(&model, build_ansatz(&spec).context(ctx)?, ObjectiveOptions::default()).context(ctx)?;
            let theta0 = polaron_displacement_params(&model, &spec).context(ctx)?;
            let res = run_vqe(&obj, &theta0, &cfg.vqe).context(ctx)?;
            obj.prepare(&res.theta).context(ctx)?
        }
    };
    // exact field from the groundstate at the reference truncation
    let reference = cfg.reference_truncation();
    let (_, gs_ref) = exact_groundstate(&build_fock_hamiltonian(&model, &reference).context(ctx)?).context(ctx)?;
    let grid = WignerGrid::new(vec![GridAxis::square(t.extent, t.points); n_modes], t.labels.clone())
        .map_err(|e| CliError::Config(e.to_string()))?;
    let exact = exact_wigner_field(&to_complex(&gs_ref), &reference, &grid).context(ctx)?;
    let sampling = if t.shots == 0 {
        WignerSampling::Exact
    } else {
        WignerSampling::Shots(t.shots)
    };
    let mut header: Vec<String> = vec!["re_alpha".into(), "im_alpha".into()];
    for k in 1..n_modes {
        header.push(format!("re_alpha_{k}"));
        header.push(format!("im_alpha_{k}"));
    }
    header.extend(["w_sampled", "w_exact", "retention"].map(String::from));
    let header_ref: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut fields = Vec::new();
    let mut errors = Table::new(&["d", "abs_alpha", "delta_w"]);
    for (di, &d) in t.depths.iter().enumerate() {
        let ctx = || format!("Wigner sampling at d={d}");
        let field = sample_wigner(&state, &layout, &grid, d, sampling, mix_seed(cfg.seed, di as u64)).context(ctx)?;
        let mut table = Table::new(&header_ref);
        for (p, w) in field.points.iter().zip(&exact) {
            let mut row: Vec<String> = p.alpha.iter().flat_map(|a| [num(a.re), num(a.im)]).collect();
            row.extend([num(p.value), num(*w), num(p.retention)]);
            table.push(row);
        }
        for &r in &t.cutoffs {
            let dw = wigner_error(&field, &exact, r).context(ctx)?;
            errors.push(vec![d.to_string(), num(r), num(dw)]);
        }
        fields.push((d, table));
    }
    Ok(WignerOutput { fields, errors })
}

pub const EXACT_HEADER: [&str; 6] = ["g_over_omega", "n_max", "E_en", "E_ex", "baseline", "baseline_error"];

/// Exact references and polaron baseline for every `g` and `n_max` value.
pub fn exact(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let mut points = Vec::new();
    for &g in &cfg.model.g_over_omega {
        for &n in &cfg.exact_n_max {
            points.push((g, n));
        }
    }
    let rows: Vec<Result<Vec<String>, CliError>> = points
        .par_iter()
        .map(|&(g, n)| {
            let ctx = || format!("exact point g/ω={g}, n_max={n}");
            let model = cfg.model_at(g)?;
            let trunc = FockTruncation::uniform(cfg.model.n_modes, n);
            let e_en = groundstate_energy(&model, &trunc).context(ctx)?;
            let e_ex = groundstate_energy(&model, &cfg.reference_truncation()).context(ctx)?;
            let b = polaron_baseline(&model, &trunc).context(ctx)?.energy;
            let berr = error_metrics(b, e_ex, e_ex).map(|m| m.0).unwrap_or(f64::NAN);
            Ok(vec![num(g), n.to_string(), num(e_en), num(e_ex), num(b), num(berr)])
        })
        .collect();
    let mut table = Table::new(&EXACT_HEADER);
    for r in rows {
        table.push(r?);
    }
    Ok(table)
}

/// Text artifacts for the first sweep point at the first depth, warm-start
/// parameters.
pub struct Dump {
    pub hamiltonian: String,
    pub circuit: String,
    pub state: Vec<u8>,
}

pub fn dump(cfg: &ExperimentConfig) -> Result<Dump, CliError> {
    let g = cfg.model.g_over_omega[0];
    let d = cfg.depths[0];
    let ctx = || format!("dump at g/ω={g}, d={d}");
    let model = cfg.model_at(g)?;
    let spec = spec_for(cfg, cfg.truncation(), d)?;
    let circuit = build_ansatz::<f64>(&spec).context(ctx)?;
    let h = encode_hamiltonian(&model, circuit.layout()).context(ctx)?;
    let theta = polaron_displacement_params(&model, &spec).context(ctx)?;
    let psi = circuit.prepare(&theta).context(ctx)?;
    let mut state = Vec::new();
    psi.write_dump(&mut state).context(ctx)?;
    Ok(Dump {
        hamiltonian: h.to_text(),
        circuit: circuit.dump(),
        state,
    })
}

pub fn write_hamiltonian(cfg: &ExperimentConfig, out: &Path) -> Result<PathBuf, CliError> {
    let d = dump(cfg)?;
    fs::create_dir_all(out)?;
    let p = out.join("hamiltonian.txt");
    fs::write(&p, d.hamiltonian)?;
    Ok(p)
}
