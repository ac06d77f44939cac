use dicke_vqe::ansatz::*;
use dicke_vqe::model::{DickeModel, FockTruncation};
use dicke_vqe::ses::{encode_annihilation, QubitLayout};
use dicke_vqe::sim::StateVector;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn spec(n: usize, m: usize, n_max: usize, d: usize) -> AnsatzSpec {
    AnsatzSpec::uniform(n, FockTruncation::uniform(m, n_max), d).unwrap()
}

#[test]
fn single_bond_circuit() {
    let c = build_ansatz::<f64>(&spec(1, 1, 1, 1)).unwrap();
    assert_eq!(c.controlled_bond_count(), 1);
    assert_eq!(c.parameter_count(), 1);
}

#[test]
fn rabi_three_steps() {
    let c = build_ansatz::<f64>(&spec(1, 1, 3, 3)).unwrap();
    assert_eq!(c.controlled_bond_count(), 9);
    assert_eq!(c.parameter_count(), 3);
}

#[test]
fn two_atoms_two_modes_counts() {
    let s = spec(2, 2, 4, 4);
    let c = build_ansatz::<f64>(&s).unwrap();
    assert_eq!(c.controlled_bond_count(), 64);
    assert_eq!(s.polaron_parameter_count(), 16);
    assert_eq!(s.atom_parameter_count(), 4);
}

#[test]
fn even_bonds_precede_odd_bonds() {
    let c = build_ansatz::<f64>(&spec(1, 1, 4, 1)).unwrap();
    let lows: Vec<usize> = c
        .templates()
        .iter()
        .filter_map(|g| match g {
            GateTemplate::Bond { low, .. } => Some(*low - 1),
            _ => None,
        })
        .collect();
    assert_eq!(lows, vec![0, 2, 1, 3]);
}

#[test]
fn multi_atom_requires_layer() {
    let s = spec(2, 1, 2, 1).with_atom_layer(false);
    assert!(build_ansatz::<f64>(&s).is_err());
    assert!(AnsatzSpec::uniform(1, FockTruncation::uniform(1, 2), 0).is_err());
}

#[test]
fn zero_parameters_prepare_vacuum() {
    for s in [spec(1, 1, 3, 2), spec(2, 2, 2, 3)] {
        let c = build_ansatz::<f64>(&s).unwrap();
        let psi = c.prepare(&vec![0.0; c.parameter_count()]).unwrap();
        let vac = c.reference_state().unwrap();
        assert!((psi.fidelity(&vac) - 1.0).abs() < 1e-15);
        let program = c.bind_parameters(&vec![0.0; c.parameter_count()]).unwrap();
        for g in program {
            if let dicke_vqe::sim::GateOp::ControlledBond { angle, .. } = g {
                assert_eq!(angle, 0.0);
            }
        }
    }
}

#[test]
fn single_bond_matches_givens_oracle() {
    let f = 0.37;
    let c = build_ansatz::<f64>(&spec(1, 1, 1, 1)).unwrap();
    let psi = c.prepare(&[f]).unwrap();
    // exp(f X ⊗ K) on 3 qubits, local index atom + 2·photon0 + 4·photon1
    let x = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| C64::new(v, 0.0)));
    let mut k = DMatrix::<C64>::zeros(4, 4);
    k[(1, 2)] = C64::new(1.0, 0.0);
    k[(2, 1)] = C64::new(-1.0, 0.0);
    let u = (k.kronecker(&x) * C64::new(f, 0.0)).exp();
    // |g⟩|0̃⟩: atom bit 1, register qubit 0 set
    let start = 0b011;
    for b in 0..8 {
        assert!((psi.amplitudes()[b] - u[(b, start)]).norm() < 1e-14);
    }
    // closed form: cos f on |g,0⟩, sin f on |e,1⟩ with the atom flipped
    assert!((psi.amplitudes()[0b011].re - f.cos()).abs() < 1e-14);
    assert!((psi.amplitudes()[0b100].re + f.sin()).abs() < 1e-14);
}

#[test]
fn binding_is_deterministic_and_checked() {
    let c = build_ansatz::<f64>(&spec(2, 1, 3, 2)).unwrap();
    let theta: Vec<f64> = (0..c.parameter_count()).map(|i| 0.1 * i as f64 - 0.3).collect();
    assert_eq!(c.bind_parameters(&theta).unwrap(), c.bind_parameters(&theta).unwrap());
    assert!(c.bind_parameters(&theta[1..]).is_err());
}

#[test]
fn per_photon_parameters() {
    let s = spec(1, 1, 3, 2).with_per_photon(true);
    assert_eq!(s.parameter_count(), 6);
    let c = build_ansatz::<f64>(&s).unwrap();
    assert_eq!(c.controlled_bond_count(), 6);
    // uniform per-photon angles reproduce the shared-parameter circuit
    let shared = build_ansatz::<f64>(&spec(1, 1, 3, 2)).unwrap();
    let a = c.prepare(&[0.3, 0.3, 0.3, 0.2, 0.2, 0.2]).unwrap();
    let b = shared.prepare(&[0.3, 0.2]).unwrap();
    assert!((a.fidelity(&b) - 1.0).abs() < 1e-14);
}

#[test]
fn atom_layer_zero_is_ground_and_touches_atoms_only() {
    let layout = QubitLayout::new(3, &FockTruncation::uniform(1, 2));
    let layer = build_atom_layer::<f64>(&layout, 0);
    assert_eq!(layer.len(), 3 + 2 + 3);
    for g in &layer {
        let qs = match g {
            GateTemplate::AtomRy { qubit, .. } => vec![*qubit],
            GateTemplate::Fixed(op) => op.qubits(),
            GateTemplate::Bond { .. } => panic!("bond gate in atom layer"),
        };
        assert!(qs.iter().all(|&q| q < 3));
    }
}

fn atom_state(theta: &[f64; 4]) -> StateVector<f64> {
    let s = spec(2, 1, 1, 1);
    let c = build_ansatz::<f64>(&s).unwrap();
    // polaron slots 0,1 stay at zero; atom slots are 2..6
    let mut full = vec![0.0; 6];
    full[2..].copy_from_slice(theta);
    c.prepare(&full).unwrap()
}

#[test]
fn atom_layer_reaches_bell_state() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let layout = QubitLayout::new(2, &FockTruncation::uniform(1, 1));
    let gg = dicke_vqe::ses::encode_state(&[0], &[false, false], &layout).unwrap();
    let ee = dicke_vqe::ses::encode_state(&[0], &[true, true], &layout).unwrap();
    let target = |psi: &StateVector<f64>| {
        let a = psi.amplitudes();
        (h * (a[gg] + a[ee])).norm_sqr()
    };
    // coarse grid then coordinate refinement
    let steps = 16;
    let ang = |i: usize| -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / steps as f64;
    let mut best = ([0.0; 4], 0.0);
    for a in 0..steps {
        for b in 0..steps {
            for c in 0..steps {
                for d in 0..steps {
                    let t = [ang(a), ang(b), ang(c), ang(d)];
                    let f = target(&atom_state(&t));
                    if f > best.1 {
                        best = (t, f);
                    }
                }
            }
        }
    }
    let mut step = 0.2;
    while step > 1e-9 {
        let mut improved = false;
        for p in 0..4 {
            for sgn in [-1.0, 1.0] {
                let mut t = best.0;
                t[p] += sgn * step;
                let f = target(&atom_state(&t));
                if f > best.1 {
                    best = (t, f);
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    assert!(best.1 > 1.0 - 1e-10, "fidelity {}", best.1);
}

#[test]
fn warm_start_values() {
    let m0 = DickeModel::rabi(1.0, 1.0, 0.0).unwrap();
    let s = spec(1, 1, 3, 3);
    assert_eq!(polaron_displacement_params(&m0, &s).unwrap(), vec![0.0; 3]);
    // bare-frequency formula
    assert_eq!(displacement_amplitudes(&[0.5], &[1.0], 1.0), vec![0.25]);
}

#[test]
fn renormalized_frequency_matches_root_oracle() {
    let (wq, w, g) = (1.0, 1.0, 0.8);
    // independent oracle: bisection on h(x) = x − wq exp(−2 (g/(w+x))²)
    let h = |x: f64| x - wq * (-2.0 * (g / (w + x)).powi(2)).exp();
    let (mut lo, mut hi) = (0.0, wq);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let wp = renormalized_frequency(wq, &[g], &[w]).unwrap();
    assert!((wp - lo).abs() < 1e-9);
    let m = DickeModel::rabi(wq, w, g).unwrap();
    let f = polaron_displacements(&m)[0][0];
    assert!((f - g / (w + lo)).abs() < 1e-9);
}

/// Dense `exp(f X_atom (ã − ã†))` applied to the encoded vacuum.
fn exact_polaron_state(n_max: usize, f: f64) -> Vec<C64> {
    let layout = QubitLayout::new(1, &FockTruncation::uniform(1, n_max));
    let a = encode_annihilation::<f64>(0, &layout).unwrap();
    let x = dicke_vqe::pauli::PauliSum::term(layout.total_qubits(), C64::new(1.0, 0.0), &[(0, dicke_vqe::pauli::Pauli::X)]);
    let gen = x.mul(&a.add(&a.adjoint().scale_re(-1.0))).scale_re(f);
    let dim = 1 << layout.total_qubits();
    let dense = gen.to_dense();
    let m = DMatrix::from_row_slice(dim, dim, &dense).exp();
    (0..dim).map(|r| m[(r, layout.vacuum_index())]).collect()
}

#[test]
fn trotter_state_converges_to_polaron_state() {
    let n_max = 6;
    let f = 0.45;
    let exact = exact_polaron_state(n_max, f);
    let exact = StateVector::from_amplitudes(n_max + 2, exact).unwrap();
    let mut last = 0.0;
    for d in 1..=8 {
        let c = build_ansatz::<f64>(&spec(1, 1, n_max, d)).unwrap();
        let psi = c.prepare(&vec![f; d]).unwrap();
        let fid = psi.fidelity(&exact);
        assert!(fid >= last - 1e-12, "d = {d}: {fid} < {last}");
        last = fid;
    }
    assert!(last > 0.999);
}

#[test]
fn circuit_dump_format() {
    let c = build_ansatz::<f64>(&spec(1, 1, 2, 1)).unwrap();
    let text = c.dump();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], "cbond 0,1,2 0 1");
    assert!(lines[1].starts_with("cbond 0,2,3 0 1.414"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn gate_count_formula(
        n in 1usize..4,
        nmax in proptest::collection::vec(1usize..5, 1..4),
        seed in any::<u64>(),
    ) {
        let m = nmax.len();
        let depths: Vec<Vec<usize>> = (0..n)
            .map(|i| (0..m).map(|k| 1 + ((seed >> (3 * (i * m + k))) & 3) as usize).collect())
            .collect();
        let expected: usize = (0..n)
            .flat_map(|i| (0..m).map(move |k| (i, k)))
            .map(|(i, k)| depths[i][k] * nmax[k])
            .sum();
        let s = AnsatzSpec::new(n, FockTruncation::new(nmax).unwrap(), depths).unwrap();
        let c = build_ansatz::<f64>(&s).unwrap();
        prop_assert_eq!(c.controlled_bond_count(), expected);
        prop_assert_eq!(s.controlled_bond_count(), expected);
    }

    #[test]
    fn prepared_states_stay_in_ses(
        theta in proptest::collection::vec(-2.0f64..2.0, 16),
        n in 1usize..3,
        m in 1usize..3,
        nmax in 1usize..4,
        d in 1usize..3,
        per_photon in any::<bool>(),
    ) {
        let s = spec(n, m, nmax, d).with_per_photon(per_photon);
        let c = build_ansatz::<f64>(&s).unwrap();
        let th: Vec<f64> = (0..c.parameter_count()).map(|i| theta[i % 16]).collect();
        let psi = c.prepare(&th).unwrap();
        let leak: f64 = psi
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(b, _)| !c.layout().in_ses(*b))
            .map(|(_, a)| a.norm_sqr())
            .sum();
        prop_assert!(leak <= 1e-10);
        prop_assert!((psi.norm() - 1.0).abs() < 1e-10);
    }
}
