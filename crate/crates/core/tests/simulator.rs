use dicke_vqe::model::{DickeModel, FockTruncation};
use dicke_vqe::pauli::{Pauli, PauliSum};
use dicke_vqe::ses::{encode_hamiltonian, QubitLayout};
use dicke_vqe::sim::*;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(n: usize, rng: &mut impl Rng) -> StateVector<f64> {
    let amps: Vec<C64> = (0..1 << n)
        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    let mut s = StateVector::from_amplitudes(n, amps).unwrap();
    s.normalize();
    s
}

/// Haar-ish unitary from the QR factor of a complex Gaussian-like matrix.
fn random_unitary(dim: usize, rng: &mut impl Rng) -> Vec<C64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let q = m.qr().q();
    let mut out = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            out.push(q[(r, c)]);
        }
    }
    out
}

/// Embeds a local gate matrix into the full space and applies it densely.
fn dense_apply(amps: &[C64], qubits: &[usize], local: &[C64]) -> Vec<C64> {
    let k = qubits.len();
    let ldim = 1 << k;
    let mut out = vec![C64::new(0.0, 0.0); amps.len()];
    for (b, &a) in amps.iter().enumerate() {
        let lin: usize = qubits.iter().enumerate().map(|(i, &q)| ((b >> q) & 1) << i).sum();
        let rest = qubits.iter().fold(b, |acc, &q| acc & !(1 << q));
        for lout in 0..ldim {
            let tgt = qubits
                .iter()
                .enumerate()
                .fold(rest, |acc, (i, &q)| acc | (((lout >> i) & 1) << q));
            out[tgt] += local[lout * ldim + lin] * a;
        }
    }
    out
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// exp(generator) via nalgebra, returned row-major.
fn expm(gen: &DMatrix<C64>) -> Vec<C64> {
    let e = gen.clone().exp();
    let d = gen.nrows();
    (0..d * d).map(|i| e[(i / d, i % d)]).collect()
}

/// Controlled-bond generator θ X_c ⊗ (|v⟩⟨u| − |u⟩⟨v|) over local bits
/// (control, low, high).
fn controlled_bond_generator(theta: f64) -> DMatrix<C64> {
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| C64::new(v, 0.0)));
    // two-qubit bond operator on (low, high), local index low + 2 high
    let mut k = DMatrix::zeros(4, 4);
    k[(1, 2)] = C64::new(1.0, 0.0);
    k[(2, 1)] = C64::new(-1.0, 0.0);
    // kron order: high bits on the left
    k.kronecker(&x) * C64::new(theta, 0.0)
}

#[test]
fn identity_gate_is_bit_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let psi = random_state(4, &mut rng);
    let mut phi = psi.clone();
    apply_gate(&mut phi, &GateOp::identity(2)).unwrap();
    assert_eq!(psi, phi);
    let mut phi = psi.clone();
    phi.apply(&GateOp::controlled_bond(0, 1, 2, 0.0)).unwrap();
    assert_eq!(psi, phi);
}

#[test]
fn controlled_bond_matches_matrix_exponential() {
    for theta in [0.3, -1.1, std::f64::consts::FRAC_PI_2] {
        let oracle = expm(&controlled_bond_generator(theta));
        let gate = GateOp::controlled_bond(0, 1, 2, theta);
        assert!(max_diff(&gate.local_matrix(), &oracle) < 1e-13);
    }
}

#[test]
fn controlled_bond_full_transfer_at_quarter_turn() {
    // control |+⟩ on qubit 0, bond excitation on the high qubit (2)
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0b100] = C64::new(h, 0.0);
    amps[0b101] = C64::new(h, 0.0);
    let mut psi = StateVector::from_amplitudes(3, amps.clone()).unwrap();
    let gate = GateOp::controlled_bond(0, 1, 2, std::f64::consts::FRAC_PI_2);
    psi.apply(&gate).unwrap();
    let oracle = dense_apply(&amps, &[0, 1, 2], &expm(&controlled_bond_generator(std::f64::consts::FRAC_PI_2)));
    assert!(max_diff(psi.amplitudes(), &oracle) < 1e-13);
    // X = +1 eigenstate: exp(θK)|u⟩ = +|v⟩ at θ = π/2
    assert!((psi.amplitudes()[0b010].re - h).abs() < 1e-13);
    assert!((psi.amplitudes()[0b011].re - h).abs() < 1e-13);
    let high: f64 = [0b100, 0b101].iter().map(|&i| psi.amplitudes()[i].norm_sqr()).sum();
    assert!(high < 1e-26);
}

#[test]
fn exchange_gates_match_matrix_exponential() {
    let theta = 0.7;
    let mut g = DMatrix::<C64>::zeros(4, 4);
    // local index: low + 2 high; v = 1, u = 2
    g[(2, 1)] = C64::new(theta, 0.0);
    g[(1, 2)] = C64::new(-theta, 0.0);
    let real = GateOp::exchange(0, 1, theta, Quadrature::Real);
    assert!(max_diff(&real.local_matrix(), &expm(&g)) < 1e-13);
    let mut g = DMatrix::<C64>::zeros(4, 4);
    g[(2, 1)] = C64::new(0.0, theta);
    g[(1, 2)] = C64::new(0.0, theta);
    let imag = GateOp::exchange(0, 1, theta, Quadrature::Imag);
    assert!(max_diff(&imag.local_matrix(), &expm(&g)) < 1e-13);
}

#[test]
fn kernels_agree_with_dense_embedding() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gates = vec![
        GateOp::controlled_bond(3, 0, 4, 0.41),
        GateOp::controlled_bond(1, 4, 2, -0.9),
        GateOp::exchange(2, 0, 0.3, Quadrature::Real),
        GateOp::exchange(4, 1, -1.2, Quadrature::Imag),
        GateOp::ry(2, 0.77),
        GateOp::h(1),
        GateOp::s_dag(3),
        GateOp::cz(4, 0),
        GateOp::unitary(vec![2, 0, 3], random_unitary(8, &mut rng)).unwrap(),
    ];
    for g in &gates {
        let psi = random_state(5, &mut rng);
        let mut fast = psi.clone();
        fast.apply(g).unwrap();
        let slow = dense_apply(psi.amplitudes(), &g.qubits(), &g.local_matrix());
        assert!(max_diff(fast.amplitudes(), &slow) < 1e-13, "{g:?}");
        let mut back = fast.clone();
        back.apply(&g.inverse()).unwrap();
        assert!(max_diff(back.amplitudes(), psi.amplitudes()) < 1e-13);
    }
}

#[test]
fn invalid_gates_rejected() {
    let mut psi = StateVector::<f64>::zero(3).unwrap();
    assert!(psi.apply(&GateOp::h(3)).is_err());
    assert!(psi.apply(&GateOp::controlled_bond(0, 1, 1, 0.2)).is_err());
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    assert!(GateOp::single(0, [o, o, z, o]).is_err());
    assert!(GateOp::unitary(vec![0, 1, 2, 3], vec![o; 256]).is_err());
    assert!(GateOp::unitary(vec![0, 0], vec![o; 16]).is_err());
}

#[test]
fn random_three_qubit_unitary_preserves_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut psi = random_state(4, &mut rng);
    let g = GateOp::unitary(vec![3, 1, 0], random_unitary(8, &mut rng)).unwrap();
    psi.apply(&g).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn long_random_circuit_preserves_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 6;
    let mut psi = random_state(n, &mut rng);
    for _ in 0..1000 {
        let mut qs: Vec<usize> = (0..n).collect();
        for i in 0..3 {
            let j = rng.random_range(i..n);
            qs.swap(i, j);
        }
        let angle = rng.random::<f64>() * 6.0 - 3.0;
        let g = match rng.random_range(0..5) {
            0 => GateOp::controlled_bond(qs[0], qs[1], qs[2], angle),
            1 => GateOp::exchange(qs[0], qs[1], angle, Quadrature::Real),
            2 => GateOp::exchange(qs[0], qs[1], angle, Quadrature::Imag),
            3 => GateOp::ry(qs[0], angle),
            _ => GateOp::cz(qs[0], qs[1]),
        };
        psi.apply(&g).unwrap();
    }
    assert!((psi.norm() - 1.0).abs() < 1e-10);
}

#[test]
fn z_on_all_zero_is_plus_one() {
    let psi = StateVector::<f64>::zero(3).unwrap();
    for q in 0..3 {
        let z = PauliSum::term(3, C64::new(1.0, 0.0), &[(q, Pauli::Z)]);
        assert_eq!(psi.expectation(&z).unwrap(), 1.0);
    }
}

#[test]
fn encoded_hamiltonian_on_noninteracting_vacuum() {
    let model = DickeModel::new(vec![1.0, 1.3], vec![0.9], vec![vec![0.0], vec![0.0]]).unwrap();
    let layout = QubitLayout::new(2, &FockTruncation::uniform(1, 3));
    let h = encode_hamiltonian(&model, &layout).unwrap();
    let psi = StateVector::basis(layout.total_qubits(), layout.vacuum_index()).unwrap();
    let e: f64 = psi.expectation(&h).unwrap();
    assert!((e + 1.15).abs() < 1e-14);
}

#[test]
fn expectation_matches_dense_oracle_on_ses_states() {
    let model = DickeModel::new(vec![1.0], vec![1.0, 0.8], vec![vec![0.6, 0.3]]).unwrap();
    let layout = QubitLayout::new(1, &FockTruncation::uniform(2, 2));
    let h = encode_hamiltonian(&model, &layout).unwrap();
    let dense = h.to_dense();
    let dim = 1 << layout.total_qubits();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        for &i in &layout.ses_indices() {
            amps[i] = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        let mut psi = StateVector::from_amplitudes(layout.total_qubits(), amps).unwrap();
        psi.normalize();
        let a = psi.amplitudes();
        let mut oracle = C64::new(0.0, 0.0);
        for r in 0..dim {
            for c in 0..dim {
                oracle += a[r].conj() * dense[r * dim + c] * a[c];
            }
        }
        let e = psi.expectation(&h).unwrap();
        assert!((e - oracle.re).abs() < 1e-10);
    }
}

#[test]
fn non_hermitian_observable_rejected() {
    let psi = StateVector::<f64>::zero(2).unwrap();
    let o = PauliSum::term(2, C64::new(0.0, 1.0), &[(0, Pauli::X)]);
    assert!(psi.expectation(&o).is_err());
    let rho = DensityMatrix::from_pure(&psi);
    assert!(rho.expectation(&o).is_err());
}

#[test]
fn basis_state_sampling_is_deterministic_outcome() {
    let psi = StateVector::<f64>::basis(3, 5).unwrap();
    let counts = psi.sample_counts(&[], 1000, 9).unwrap();
    assert_eq!(counts.get(5), 1000);
    assert_eq!(counts.iter().count(), 1);
}

#[test]
fn plus_state_frequency_within_three_sigma() {
    let mut psi = StateVector::<f64>::zero(1).unwrap();
    psi.apply(&GateOp::h(0)).unwrap();
    let shots = 100_000u64;
    let counts = psi.sample_counts(&[], shots, 2024).unwrap();
    let sigma = (shots as f64 * 0.25).sqrt();
    assert!((counts.get(1) as f64 - shots as f64 / 2.0).abs() < 3.0 * sigma);
}

#[test]
fn ghz_only_yields_all_zero_or_all_one() {
    let mut psi = StateVector::<f64>::zero(3).unwrap();
    psi.apply(&GateOp::h(0)).unwrap();
    // CNOT = H_t CZ H_t
    for t in [1, 2] {
        psi.apply_all(&[GateOp::h(t), GateOp::cz(0, t), GateOp::h(t)]).unwrap();
    }
    let counts = psi.sample_counts(&[], 5000, 1).unwrap();
    assert_eq!(counts.get(0) + counts.get(7), 5000);
    assert!(counts.get(0) > 0 && counts.get(7) > 0);
}

#[test]
fn sampling_is_seed_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let psi = random_state(5, &mut rng);
    let a = psi.sample_counts(&[GateOp::h(2)], 7777, 42).unwrap();
    let b = psi.sample_counts(&[GateOp::h(2)], 7777, 42).unwrap();
    let c = psi.sample_counts(&[GateOp::h(2)], 7777, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert_eq!(a.shots(), 7777);
}

fn random_circuit(n: usize, len: usize, rng: &mut impl Rng) -> Vec<GateOp<f64>> {
    (0..len)
        .map(|_| {
            let a = rng.random_range(0..n);
            let b = (a + 1 + rng.random_range(0..n - 1)) % n;
            let c = (0..n).find(|&q| q != a && q != b).unwrap();
            let angle = rng.random::<f64>() * 3.0;
            match rng.random_range(0..4) {
                0 => GateOp::controlled_bond(a, b, c, angle),
                1 => GateOp::exchange(a, b, angle, Quadrature::Imag),
                2 => GateOp::ry(a, angle),
                _ => GateOp::h(a),
            }
        })
        .collect()
}

#[test]
fn zero_noise_density_matches_statevector() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 4;
    let circuit = random_circuit(n, 60, &mut rng);
    let init = random_state(n, &mut rng);
    let noise = NoiseModel::uniform(n, 0.01, 0.02, ReadoutError::symmetric(0.03)).with_lambda(0.0);
    let rho = run_noisy(&circuit, &noise, &init).unwrap();
    let mut psi = init.clone();
    psi.apply_all(&circuit).unwrap();
    let pure = DensityMatrix::from_pure(&psi);
    for r in 0..16 {
        for c in 0..16 {
            assert!((rho.get(r, c) - pure.get(r, c)).norm() < 1e-12);
        }
    }
    assert!(rho.fidelity_with_pure(&psi) > 1.0 - 1e-10);
}

#[test]
fn full_depolarizing_gives_maximally_mixed() {
    let init = StateVector::<f64>::zero(1).unwrap();
    let noise = NoiseModel::uniform(1, 1.0, 0.0, ReadoutError::default());
    let rho = run_noisy(&[GateOp::ry(0, 0.4)], &noise, &init).unwrap();
    assert!((rho.get(0, 0).re - 0.5).abs() < 1e-15);
    assert!((rho.get(1, 1).re - 0.5).abs() < 1e-15);
    assert!(rho.get(0, 1).norm() < 1e-15);
}

#[test]
fn amplitude_damping_populations() {
    let p = 0.3;
    let init = StateVector::<f64>::basis(1, 1).unwrap();
    let noise = NoiseModel::uniform(1, 0.0, p, ReadoutError::default());
    let rho = run_noisy(&[GateOp::identity(0)], &noise, &init).unwrap();
    assert!((rho.get(0, 0).re - p).abs() < 1e-15);
    assert!((rho.get(1, 1).re - (1.0 - p)).abs() < 1e-15);
}

#[test]
fn density_cap_enforced() {
    let init = StateVector::<f64>::zero(9).unwrap();
    let err = run_noisy(&[], &NoiseModel::noiseless(9), &init).unwrap_err();
    assert!(matches!(err, dicke_vqe::Error::DensityMatrixCap { n_qubits: 9, cap: 8 }));
    assert!(run_noisy_capped(&[], &NoiseModel::noiseless(9), &init, 9).is_ok());
}

#[test]
fn lambda_scaling_clamps() {
    let noise = NoiseModel::uniform(2, 0.4, 0.2, ReadoutError::symmetric(0.3)).with_lambda(3.0);
    let s = noise.scaled();
    assert_eq!(s.depolarizing, vec![1.0, 1.0]);
    assert!((s.amplitude_damping[0] - 0.6).abs() < 1e-15);
    assert!((s.readout[1].p01 - 0.9).abs() < 1e-15);
}

fn kraus_depolarizing(p: f64) -> Vec<[C64; 4]> {
    let r = |x: f64| C64::new(x, 0.0);
    let (a, b) = ((1.0 - 0.75 * p).sqrt(), (p / 4.0).sqrt());
    vec![
        [r(a), r(0.0), r(0.0), r(a)],
        [r(0.0), r(b), r(b), r(0.0)],
        [r(0.0), C64::new(0.0, -b), C64::new(0.0, b), r(0.0)],
        [r(b), r(0.0), r(0.0), r(-b)],
    ]
}

fn kraus_damping(p: f64) -> Vec<[C64; 4]> {
    let r = |x: f64| C64::new(x, 0.0);
    vec![
        [r(1.0), r(0.0), r(0.0), r((1.0 - p).sqrt())],
        [r(0.0), r(p.sqrt()), r(0.0), r(0.0)],
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn channel_kernels_match_kraus_oracle(seed in any::<u64>(), q in 0usize..3, p in 0.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(3, &mut rng);
        let mut circuit = random_circuit(3, 5, &mut rng);
        circuit.truncate(5);
        let mut base = DensityMatrix::from_pure(&psi);
        for g in &circuit {
            base.apply(g).unwrap();
            base.depolarize(g.qubits()[0], 0.2);
        }
        let mut fast = base.clone();
        fast.depolarize(q, p);
        fast.amplitude_damp(q, p);
        let mut slow = base.clone();
        slow.apply_kraus(q, &kraus_depolarizing(p));
        slow.apply_kraus(q, &kraus_damping(p));
        for r in 0..8 {
            for c in 0..8 {
                prop_assert!((fast.get(r, c) - slow.get(r, c)).norm() < 1e-13);
            }
        }
        prop_assert!((fast.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn noisy_runs_preserve_trace(seed in any::<u64>(), lambda in 0.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let circuit = random_circuit(4, 30, &mut rng);
        let init = random_state(4, &mut rng);
        let noise = NoiseModel::uniform(4, 0.05, 0.08, ReadoutError::default()).with_lambda(lambda);
        let rho = run_noisy(&circuit, &noise, &init).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.trace().im.abs() < 1e-12);
    }

    #[test]
    fn mitigation_reduces_total_variation(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_state(3, &mut rng);
        let truth = Distribution::new(3, psi.probabilities()).unwrap();
        let errs = vec![ReadoutError::symmetric(0.02); 3];
        let clean = truth.sample(100_000, seed).unwrap();
        let noisy = corrupt_counts(&clean, &errs, seed ^ 1).unwrap().to_distribution().unwrap();
        let fixed = mitigate_readout(&noisy, &errs).unwrap();
        prop_assert!(fixed.total_variation(&truth) < noisy.total_variation(&truth));
        let s: f64 = fixed.probs().iter().sum();
        prop_assert!((s - 1.0).abs() < 1e-9);
    }
}

#[test]
fn zero_flip_readout_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let d = Distribution::new(3, random_state(3, &mut rng).probabilities()).unwrap();
    let errs = vec![ReadoutError::default(); 3];
    assert_eq!(apply_readout_error(&d, &errs).unwrap(), d);
    assert_eq!(mitigate_readout(&d, &errs).unwrap(), d);
    let counts = d.sample(500, 1).unwrap();
    assert_eq!(corrupt_counts(&counts, &errs, 3).unwrap(), counts);
}

#[test]
fn corrupt_then_mitigate_recovers_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let d = Distribution::new(3, random_state(3, &mut rng).probabilities()).unwrap();
    let errs = vec![
        ReadoutError { p01: 0.02, p10: 0.05 },
        ReadoutError { p01: 0.1, p10: 0.01 },
        ReadoutError::symmetric(0.2),
    ];
    let noisy = apply_readout_error(&d, &errs).unwrap();
    let back = mitigate_readout(&noisy, &errs).unwrap();
    let err = d.probs().iter().zip(back.probs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8);
}

#[test]
fn mitigation_stays_on_simplex() {
    // a histogram with an impossible zero forces the constrained solve
    let errs = vec![ReadoutError::symmetric(0.1); 2];
    let d = Distribution::new(2, vec![0.0, 0.5, 0.5, 0.0]).unwrap();
    let m = mitigate_readout(&d, &errs).unwrap();
    assert!(m.probs().iter().all(|&p| p >= 0.0));
    assert!((m.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // constrained optimum is no worse than the projection of the raw inverse
    let resid = |x: &[f64]| {
        let ad = apply_readout_error(&Distribution::new(2, x.to_vec()).unwrap(), &errs).unwrap();
        ad.probs().iter().zip(d.probs()).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
    };
    assert!(resid(m.probs()) <= resid(&project_simplex(&[-0.125, 0.625, 0.625, -0.125])) + 1e-12);
}

#[test]
fn singular_confusion_rejected() {
    let d = Distribution::new(1, vec![0.5, 0.5]).unwrap();
    let err = mitigate_readout(&d, &[ReadoutError::symmetric(0.5)]).unwrap_err();
    assert!(matches!(err, dicke_vqe::Error::SingularConfusion { qubit: 0 }));
}

#[test]
fn trajectories_average_to_density_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let circuit = random_circuit(3, 12, &mut rng);
    let init = random_state(3, &mut rng);
    let noise = NoiseModel::uniform(3, 0.1, 0.15, ReadoutError::default());
    let rho = run_noisy(&circuit, &noise, &init).unwrap();
    let scaled = noise.scaled();
    let mut avg = vec![0.0; 8];
    let n_traj = 4000;
    for _ in 0..n_traj {
        let psi = run_trajectory(&circuit, &scaled, &init, &mut rng).unwrap();
        for (a, p) in avg.iter_mut().zip(psi.probabilities()) {
            *a += p / n_traj as f64;
        }
    }
    for (a, p) in avg.iter().zip(rho.probabilities()) {
        assert!((a - p).abs() < 0.03, "{a} vs {p}");
    }
}

#[test]
fn state_dump_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    let psi = random_state(3, &mut rng);
    let mut buf = Vec::new();
    psi.write_dump(&mut buf).unwrap();
    assert!(buf.starts_with(b"qubits=3\n"));
    assert_eq!(buf.len(), 9 + 8 * 16);
    let back = StateVector::<f64>::read_dump(&buf[..]).unwrap();
    assert_eq!(back, psi);
    assert!(StateVector::<f64>::read_dump(&b"qubits=3\nabc"[..]).is_err());
}

#[test]
fn single_precision_engine() {
    let mut psi = StateVector::<f32>::zero(3).unwrap();
    psi.apply(&GateOp::h(0)).unwrap();
    psi.apply(&GateOp::controlled_bond(0, 1, 2, 0.5f32)).unwrap();
    assert!((psi.norm() - 1.0).abs() < 1e-6);
}
