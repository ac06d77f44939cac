use dicke_vqe::ansatz::{build_ansatz, polaron_displacement_params, AnsatzSpec};
use dicke_vqe::model::{groundstate_energy, DickeModel, FockTruncation};
use dicke_vqe::sim::{Counts, NoiseModel, ReadoutError};
use dicke_vqe::vqe::*;
use dicke_vqe::Error;
use proptest::prelude::*;

fn objective(n: usize, m: usize, n_max: usize, d: usize, g: f64, opts: ObjectiveOptions) -> (DickeModel<f64>, EnergyObjective<f64>, Vec<f64>) {
    let model = DickeModel::resonant(n, m, 1.0, g).unwrap();
    let spec = AnsatzSpec::uniform(n, FockTruncation::uniform(m, n_max), d).unwrap();
    let circuit = build_ansatz::<f64>(&spec).unwrap();
    let theta0 = polaron_displacement_params(&model, &spec).unwrap();
    let obj = EnergyObjective::new(&model, circuit, opts).unwrap();
    (model, obj, theta0)
}

fn refine_only(seed: u64) -> VqeConfig {
    VqeConfig {
        spsa: None,
        refiner: Some(RefinerConfig::default()),
        restarts: 1,
        seed,
        ..VqeConfig::default()
    }
}

#[test]
fn zero_angles_give_vacuum_energy() {
    for (n, m) in [(1, 1), (2, 1), (2, 2)] {
        let (model, obj, theta0) = objective(n, m, 2, 2, 0.7, ObjectiveOptions::default());
        let e = obj.exact_energy(&vec![0.0; theta0.len()]).unwrap();
        assert!((e - model.vacuum_energy()).abs() < 1e-12);
        assert!((e + n as f64 / 2.0).abs() < 1e-12);
    }
}

#[test]
fn rabi_two_level_cavity_is_solved_exactly() {
    // n_max = 1: the even-parity block {|g,0⟩, |e,1⟩} has energies -1/2, 3/2
    // coupled by g, so E = 1/2 − √(1 + g²)
    let g: f64 = 0.4;
    let expected = 0.5 - (1.0 + g * g).sqrt();
    assert!((expected + 0.577_032_961_426_900_7).abs() < 1e-15);
    let (model, obj, theta0) = objective(1, 1, 1, 1, g, ObjectiveOptions::default());
    let e_en = encoded_groundstate_energy(&model, &FockTruncation::uniform(1, 1)).unwrap();
    assert!((e_en - expected).abs() < 1e-12);
    let res = run_vqe(&obj, &theta0, &refine_only(0)).unwrap();
    assert!((res.energy - expected).abs() < 1e-9, "{}", res.energy);
}

#[test]
fn encoded_and_fock_groundstates_agree() {
    let model = DickeModel::new(vec![1.0, 0.9], vec![1.0, 1.2], vec![vec![0.3, -0.2], vec![0.5, 0.1]]).unwrap();
    let trunc = FockTruncation::new(vec![2, 3]).unwrap();
    let a = encoded_groundstate_energy(&model, &trunc).unwrap();
    let b = groundstate_energy(&model, &trunc).unwrap();
    assert!((a - b).abs() < 1e-12);
}

#[test]
fn metrics_and_undefined_denominator() {
    let (en, ex) = error_metrics(-0.99, -1.0, -1.01).unwrap();
    assert!((en - 0.01).abs() < 1e-12);
    assert!((ex - 0.01 / 1.01).abs() < 1e-12);
    assert!(matches!(error_metrics(1.0, 0.0, -1.0), Err(Error::UndefinedMetric(_))));
    assert!(matches!(error_metrics(1.0, -1.0, 1e-14), Err(Error::UndefinedMetric(_))));
}

#[test]
fn variational_ordering_holds() {
    for g in [0.2, 0.6, 1.0] {
        let (model, obj, theta0) = objective(1, 1, 3, 2, g, ObjectiveOptions::default());
        let e_en = encoded_groundstate_energy(&model, &FockTruncation::uniform(1, 3)).unwrap();
        let e_ex = groundstate_energy(&model, &FockTruncation::uniform(1, 40)).unwrap();
        let res = run_vqe(&obj, &theta0, &refine_only(1)).unwrap();
        assert!(res.energy >= e_en - 1e-10);
        assert!(e_en >= e_ex - 1e-12);
    }
}

#[test]
fn deeper_circuits_do_not_lose_accuracy() {
    let g = 0.9;
    let trunc = FockTruncation::uniform(1, 3);
    let model = DickeModel::resonant(1, 1, 1.0, g).unwrap();
    let e_en = encoded_groundstate_energy(&model, &trunc).unwrap();
    let errs: Vec<f64> = (1..=4)
        .map(|d| {
            let (_, obj, theta0) = objective(1, 1, 3, d, g, ObjectiveOptions::default());
            let cfg = VqeConfig { restarts: 3, ..refine_only(3) };
            let e = run_vqe(&obj, &theta0, &cfg).unwrap().energy;
            error_metrics(e, e_en, e_en).unwrap().0
        })
        .collect();
    assert!(errs[3] < errs[0], "{errs:?}");
    assert!(errs[3] < 0.01, "{errs:?}");
}

#[test]
fn shot_estimate_matches_exact_within_error_bars() {
    let opts = ObjectiveOptions {
        estimator: Estimator::Shots(20_000),
        ..ObjectiveOptions::default()
    };
    let (_, obj, theta0) = objective(2, 1, 2, 2, 0.5, opts);
    let exact = obj.exact_energy(&theta0).unwrap();
    for seed in 0..5 {
        let est = obj.evaluate(&theta0, seed).unwrap();
        assert!(est.std_error > 0.0);
        assert!((est.energy - exact).abs() < 4.0 * est.std_error, "{} vs {exact} ± {}", est.energy, est.std_error);
    }
}

#[test]
fn noiseless_postselection_keeps_everything() {
    let opts = ObjectiveOptions {
        postselect: true,
        ..ObjectiveOptions::default()
    };
    let (_, obj, theta0) = objective(1, 1, 3, 2, 0.8, opts);
    let est = obj.evaluate(&theta0, 0).unwrap();
    assert!((est.retention - 1.0).abs() < 1e-12);
    assert!((est.energy - obj.exact_energy(&theta0).unwrap()).abs() < 1e-10);
}

#[test]
fn noisy_postselection_discards_leaked_outcomes() {
    let n_qubits = 1 + 4;
    let noise = NoiseModel::uniform(n_qubits, 0.01, 0.01, ReadoutError::symmetric(0.02));
    let opts = ObjectiveOptions {
        noise: Some(noise.clone()),
        postselect: true,
        mitigate_readout: true,
        ..ObjectiveOptions::default()
    };
    let (_, obj, theta0) = objective(1, 1, 3, 2, 0.8, opts);
    let est = obj.evaluate(&theta0, 0).unwrap();
    assert!(est.retention < 1.0 && est.retention > 0.5, "{}", est.retention);
    // at λ = 0 the noisy objective reduces to the ideal one
    let opts0 = ObjectiveOptions {
        noise: Some(noise.with_lambda(0.0)),
        postselect: true,
        mitigate_readout: true,
        ..ObjectiveOptions::default()
    };
    let (_, obj0, _) = objective(1, 1, 3, 2, 0.8, opts0);
    let e0 = obj0.evaluate(&theta0, 0).unwrap().energy;
    assert!((e0 - obj0.exact_energy(&theta0).unwrap()).abs() < 1e-10);
}

#[test]
fn postselect_counts() {
    let layout = dicke_vqe::ses::QubitLayout::new(1, &FockTruncation::uniform(1, 1));
    let vac = layout.vacuum_index();
    let mut c = Counts::new(layout.total_qubits());
    c.add(vac, 30);
    c.add(vac & !0b10, 10); // empty register
    let (kept, r) = postselect(&c, &layout).unwrap();
    assert_eq!(kept.shots(), 30);
    assert!((r - 0.75).abs() < 1e-12);
    let mut bad = Counts::new(layout.total_qubits());
    bad.add(0, 5);
    assert!(matches!(postselect(&bad, &layout), Err(Error::NoRetainedShots)));
}

#[test]
fn spsa_descends_a_quadratic_bowl() {
    let target = [0.3, -0.5, 0.8];
    let f = |x: &[f64]| Ok(x.iter().zip(&target).map(|(a, b)| (a - b) * (a - b)).sum::<f64>());
    let cfg = SpsaConfig {
        max_trials: 300,
        seed: 7,
        ..SpsaConfig::default()
    };
    let res = spsa_minimize(f, &[0.0; 3], &cfg).unwrap();
    assert_eq!(res.trace.len(), 300);
    assert_eq!(res.evaluations, 1 + 4 + 600);
    assert!(res.energy < 0.01, "{}", res.energy);
}

#[test]
fn spsa_zero_budget_returns_start() {
    let cfg = SpsaConfig {
        max_trials: 0,
        ..SpsaConfig::default()
    };
    let res = spsa_minimize(|x| Ok(x[0] * x[0] + 1.0), &[2.0], &cfg).unwrap();
    assert_eq!(res.theta, vec![2.0]);
    assert_eq!(res.energy, 5.0);
    assert!(res.trace.is_empty());
}

#[test]
fn spsa_stops_on_non_finite_values() {
    let mut calls = 0;
    let f = |x: &[f64]| {
        calls += 1;
        Ok(if calls > 20 { f64::NAN } else { x[0] * x[0] })
    };
    let res = spsa_minimize(f, &[1.0], &SpsaConfig::default()).unwrap();
    assert!(res.aborted_at.is_some());
    assert!(res.energy.is_finite());
}

#[test]
fn refiner_finds_quadratic_minimum_in_few_sweeps() {
    let f = |x: &[f64]| Ok((x[0] - 1.0).powi(2) + 2.0 * (x[1] + 0.5).powi(2) + 0.5 * x[0] * x[1]);
    let res = refine_coordinates(f, &[0.0, 0.0], &RefinerConfig::default()).unwrap();
    // stationary point of the quadratic
    let det = 2.0 * 4.0 - 0.5 * 0.5;
    let xs = (2.0 * 4.0 - 0.5 * (-2.0)) / det;
    let ys = (2.0 * -2.0 - 0.5 * 2.0) / det;
    assert!(res.converged);
    assert!((res.theta[0] - xs).abs() < 1e-4 && (res.theta[1] - ys).abs() < 1e-4, "{:?}", res.theta);
    assert!(res.sweeps <= 30);
}

#[test]
fn run_vqe_is_seed_deterministic_across_thread_counts() {
    let opts = ObjectiveOptions {
        estimator: Estimator::Shots(500),
        ..ObjectiveOptions::default()
    };
    let (_, obj, theta0) = objective(1, 1, 2, 2, 0.5, opts);
    let cfg = VqeConfig {
        spsa: Some(SpsaConfig {
            max_trials: 20,
            ..SpsaConfig::default()
        }),
        refiner: None,
        restarts: 3,
        seed: 11,
        ..VqeConfig::default()
    };
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_vqe(&obj, &theta0, &cfg).unwrap())
    };
    let a = run(1);
    let b = run(4);
    assert_eq!(a, b);
    let c = run_vqe(&obj, &theta0, &VqeConfig { seed: 12, ..cfg.clone() }).unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn wrong_parameter_count_is_rejected() {
    let (_, obj, theta0) = objective(1, 1, 2, 2, 0.5, ObjectiveOptions::default());
    let r = run_vqe(&obj, &theta0[1..], &refine_only(0));
    assert!(matches!(r, Err(Error::LengthMismatch { .. })));
}

#[test]
fn baseline_at_zero_coupling_is_vacuum() {
    let model = DickeModel::resonant(1, 1, 1.0, 0.0).unwrap();
    let b = polaron_baseline(&model, &FockTruncation::uniform(1, 3)).unwrap();
    assert!((b.energy + 0.5).abs() < 1e-12);
}

#[test]
fn baseline_is_an_upper_bound_and_reproducible() {
    for (n, m, g) in [(1, 1, 0.5), (1, 2, 0.8), (2, 1, 0.6)] {
        let model = DickeModel::resonant(n, m, 1.0, g).unwrap();
        let trunc = FockTruncation::uniform(m, 3);
        let b = polaron_baseline(&model, &trunc).unwrap();
        let e_en = groundstate_energy(&model, &trunc).unwrap();
        assert!(b.energy >= e_en - 1e-10);
        assert!(b.energy < model.vacuum_energy());
        let again = polaron_energy(&model, &trunc, &b.f).unwrap();
        assert!((again - b.energy).abs() < 1e-12);
    }
}

#[test]
fn polaron_state_is_normalized_when_untruncated() {
    let trunc = FockTruncation::uniform(1, 40);
    let psi = polaron_state(2, &trunc, &[vec![0.4], vec![-0.3]]);
    let norm: f64 = psi.iter().map(|a| a * a).sum();
    assert!((norm - 1.0).abs() < 1e-12);
}

#[test]
fn mix_seed_separates_streams() {
    assert_ne!(mix_seed(0, 0), mix_seed(0, 1));
    assert_ne!(mix_seed(0, 1), mix_seed(1, 0));
    assert_eq!(mix_seed(42, 3), mix_seed(42, 3));
}

#[test]
fn sweep_row_fields() {
    let row = SweepRow::new(0.5, 3, -0.99, -1.0, -1.0, -0.95, 150, 9).unwrap();
    assert_eq!(SweepRow::HEADER.len(), row.fields().len());
    assert_eq!(row.fields()[1], "3");
    assert!((row.delta_en - 0.01).abs() < 1e-12);
}

#[test]
fn f32_objective_tracks_f64() {
    let model = DickeModel::<f32>::resonant(1, 1, 1.0, 0.5).unwrap();
    let spec = AnsatzSpec::uniform(1, FockTruncation::uniform(1, 2), 2).unwrap();
    let obj = EnergyObjective::new(&model, build_ansatz::<f32>(&spec).unwrap(), ObjectiveOptions::default()).unwrap();
    let (_, obj64, theta0) = objective(1, 1, 2, 2, 0.5, ObjectiveOptions::default());
    let a = obj.exact_energy(&theta0).unwrap();
    let b = obj64.exact_energy(&theta0).unwrap();
    assert!((a - b).abs() < 1e-5);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn energy_is_bounded_below_by_truncated_groundstate(
        theta in prop::collection::vec(-2.0f64..2.0, 3),
        g in 0.0f64..1.2,
    ) {
        let (model, obj, _) = objective(1, 1, 2, 3, g, ObjectiveOptions::default());
        let e_en = groundstate_energy(&model, &FockTruncation::uniform(1, 2)).unwrap();
        prop_assert!(obj.exact_energy(&theta).unwrap() >= e_en - 1e-10);
    }

    #[test]
    fn exact_energy_matches_full_register_expectation(
        n_atoms in 1usize..3,
        n_modes in 1usize..3,
        per_photon in any::<bool>(),
        g in 0.0f64..1.2,
        raw in prop::collection::vec(-1.5f64..1.5, 64),
    ) {
        let model = DickeModel::<f64>::resonant(n_atoms, n_modes, 1.0, g).unwrap();
        let spec = AnsatzSpec::uniform(n_atoms, FockTruncation::uniform(n_modes, 2), 2)
            .unwrap()
            .with_per_photon(per_photon);
        let obj = EnergyObjective::new(&model, build_ansatz(&spec).unwrap(), ObjectiveOptions::default()).unwrap();
        let theta = &raw[..obj.parameter_count()];
        let full = obj.prepare(theta).unwrap().expectation(obj.hamiltonian()).unwrap();
        prop_assert!((obj.exact_energy(theta).unwrap() - full).abs() < 1e-12);
    }

    #[test]
    fn shot_estimates_are_byte_reproducible(seed in any::<u64>(), theta in prop::collection::vec(-1.0f64..1.0, 4)) {
        let opts = ObjectiveOptions { estimator: Estimator::Shots(200), ..ObjectiveOptions::default() };
        let (_, obj, _) = objective(1, 1, 1, 4, 0.5, opts);
        let a = obj.evaluate(&theta, seed).unwrap();
        let b = obj.evaluate(&theta, seed).unwrap();
        prop_assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        prop_assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }
}

#[test]
fn padded_parameters_reproduce_the_shallower_circuit() {
    let trunc = FockTruncation::uniform(2, 2);
    for per_photon in [false, true] {
        let small = AnsatzSpec::uniform(2, trunc.clone(), 2).unwrap().with_per_photon(per_photon);
        let big = AnsatzSpec::uniform(2, trunc.clone(), 3).unwrap().with_per_photon(per_photon);
        let theta: Vec<f64> = (0..small.parameter_count()).map(|i| 0.1 + 0.07 * i as f64).collect();
        let padded = dicke_vqe::ansatz::pad_parameters(&small, &theta, &big).unwrap();
        let a = build_ansatz::<f64>(&small).unwrap().prepare(&theta).unwrap();
        let b = build_ansatz::<f64>(&big).unwrap().prepare(&padded).unwrap();
        assert!(a.fidelity(&b) > 1.0 - 1e-12);
        assert!(dicke_vqe::ansatz::pad_parameters(&big, &padded, &small).is_err());
    }
}

#[test]
fn best_energy_is_non_increasing_in_depth() {
    let trunc = FockTruncation::uniform(1, 3);
    for g in [0.4, 1.0] {
        let model = DickeModel::resonant(1, 1, 1.0, g).unwrap();
        let mut prev: Option<(AnsatzSpec, Vec<f64>, f64)> = None;
        for d in 1..=3 {
            let spec = AnsatzSpec::uniform(1, trunc.clone(), d).unwrap();
            let obj = EnergyObjective::new(&model, build_ansatz::<f64>(&spec).unwrap(), ObjectiveOptions::default()).unwrap();
            let mut starts = vec![polaron_displacement_params(&model, &spec).unwrap()];
            if let Some((ps, pt, _)) = &prev {
                starts.push(dicke_vqe::ansatz::pad_parameters(ps, pt, &spec).unwrap());
            }
            let res = run_vqe_from(&obj, &starts, &VqeConfig { restarts: 2, ..refine_only(d as u64) }).unwrap();
            if let Some((_, _, e)) = &prev {
                assert!(res.energy <= e + 1e-12, "d={d}: {} > {e}", res.energy);
            }
            prev = Some((spec, res.theta, res.energy));
        }
    }
}

#[test]
fn postselection_does_not_increase_noisy_error() {
    // one atom and a two-level mode: three qubits
    let g = 0.6;
    let model = DickeModel::resonant(1, 1, 1.0, g).unwrap();
    let trunc = FockTruncation::uniform(1, 1);
    let e_en = groundstate_energy(&model, &trunc).unwrap();
    let spec = AnsatzSpec::uniform(1, trunc.clone(), 2).unwrap();
    let circuit = build_ansatz::<f64>(&spec).unwrap();
    let ideal = EnergyObjective::new(&model, circuit.clone(), ObjectiveOptions::default()).unwrap();
    let theta = run_vqe(&ideal, &polaron_displacement_params(&model, &spec).unwrap(), &refine_only(0)).unwrap().theta;
    let base = NoiseModel::uniform(3, 0.02, 0.05, ReadoutError::symmetric(0.03));
    for lambda in [0.1, 0.5, 1.0] {
        let err = |postselect| {
            let opts = ObjectiveOptions {
                noise: Some(base.clone().with_lambda(lambda)),
                postselect,
                mitigate_readout: true,
                ..ObjectiveOptions::default()
            };
            let obj = EnergyObjective::new(&model, circuit.clone(), opts).unwrap();
            (obj.evaluate(&theta, 0).unwrap().energy - e_en).abs()
        };
        let (raw, post) = (err(false), err(true));
        assert!(post <= raw + 1e-12, "λ={lambda}: {post} > {raw}");
    }
}
