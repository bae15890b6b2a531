use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use wstate::circuit::{embed, unitary_of};
use wstate::format;
use wstate::simulator::{Backend, BasisKey, QuantumState, SimConfig, Simulator};
use wstate::{build_w_circuit, gate_matrix, lower, rotation_matrix, Circuit, Gate, Level};

fn w_input(n: usize) -> String {
    std::iter::once('V')
        .chain(std::iter::repeat_n('H', n - 1))
        .collect()
}

fn arb_gate(n: u32) -> impl Strategy<Value = Gate> {
    let pair = (1..=n, 1..=n).prop_filter("distinct", |(c, t)| c != t);
    let angle = -7.0f64..7.0;
    prop_oneof![
        (pair.clone(), angle.clone()).prop_map(|((c, t), a)| Gate::f(c, t, a).unwrap()),
        pair.clone().prop_map(|(c, t)| Gate::cnot(c, t).unwrap()),
        pair.prop_map(|(c, t)| Gate::cz(c, t).unwrap()),
        (1..=n, angle).prop_map(|(q, a)| Gate::rot(q, a).unwrap()),
    ]
}

/// Any gate list, tagged with the least lowered level that admits it.
fn arb_circuit(max_qubits: u32, max_gates: usize) -> impl Strategy<Value = Circuit> {
    (2..=max_qubits).prop_flat_map(move |n| {
        prop_oneof![
            proptest::collection::vec(arb_gate(n), 0..max_gates).prop_map(move |gates| {
                let composite: Vec<Gate> = gates
                    .into_iter()
                    .filter(|g| matches!(g, Gate::F { .. } | Gate::Cnot { .. }))
                    .collect();
                Circuit::new(n as usize, composite, Level::Composite).unwrap()
            }),
            proptest::collection::vec(arb_gate(n), 0..max_gates).prop_map(move |gates| {
                let cz: Vec<Gate> = gates
                    .into_iter()
                    .filter(|g| !matches!(g, Gate::F { .. }))
                    .chain([Gate::cz(1, 2).unwrap()])
                    .collect();
                Circuit::new(n as usize, cz, Level::CzLevel).unwrap()
            }),
        ]
    })
}

proptest! {
    #[test]
    fn rotation_is_a_symmetric_involution(alpha in -100.0f64..100.0) {
        let r = rotation_matrix(alpha).unwrap();
        let m = r.as_matrix();
        prop_assert!((m * m - DMatrix::<f64>::identity(2, 2)).amax() < 1e-14);
        prop_assert_eq!(m.transpose(), m.clone());
    }

    #[test]
    fn gate_matrices_are_orthogonal(g in arb_gate(2)) {
        prop_assert!(gate_matrix(&g).orthogonality_defect() < 1e-14);
    }

    #[test]
    fn unitary_product_is_associative(
        (n, gates) in (2usize..=4).prop_flat_map(|n| (Just(n), proptest::collection::vec(arb_gate(n as u32), 3)))
    ) {
        let e: Vec<DMatrix<f64>> = gates.iter().map(|g| embed(g, n).unwrap()).collect();
        let left = (&e[2] * &e[1]) * &e[0];
        let right = &e[2] * (&e[1] * &e[0]);
        prop_assert!((&left - &right).amax() < 1e-12);

        let composite_ok = gates.iter().all(|g| matches!(g, Gate::F { .. } | Gate::Cnot { .. }));
        if composite_ok {
            let c = Circuit::new(n, gates.clone(), Level::Composite).unwrap();
            let u = unitary_of(&c).unwrap();
            prop_assert!((&u - &left).amax() < 1e-12);
        }
        let dim = 1usize << n;
        prop_assert!((left.transpose() * &left - DMatrix::<f64>::identity(dim, dim)).amax() < 1e-12);
    }

    #[test]
    fn text_format_round_trips(c in arb_circuit(6, 12)) {
        let text = format::to_text(&c);
        let parsed = format::parse(&text).unwrap();
        prop_assert_eq!(&parsed, &c);
        prop_assert_eq!(format::to_text(&parsed), text);
    }

    #[test]
    fn lowering_preserves_random_unitaries(c in arb_circuit(4, 8)) {
        let lowered = lower(&c, Level::Elementary).unwrap();
        let diff = unitary_of(&c).unwrap() - unitary_of(&lowered).unwrap();
        prop_assert!(diff.amax() < 1e-12);
    }

    #[test]
    fn simulators_match_oracle_on_random_circuits(c in arb_circuit(5, 10), seed in any::<u64>()) {
        let n = c.n_qubits();
        let u = unitary_of(&c).unwrap();
        let b = StdRng::seed_from_u64(seed).gen_range(0..1usize << n);
        let cfg = SimConfig::default();
        let key = BasisKey::from_index(n, b);
        for backend in [Backend::Dense, Backend::Sparse] {
            let input = QuantumState::from_entries(n, vec![(key.clone(), 1.0)], backend, &cfg).unwrap();
            let out = Simulator::new(cfg).run(&c, &input).unwrap();
            for row in 0..1usize << n {
                let got = out.amplitude(&BasisKey::from_index(n, row));
                prop_assert!((got - u[(row, b)]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn lowering_preserves_synthesized_unitaries() {
    for n in 3..=8 {
        let c = build_w_circuit(n).unwrap();
        let cz = lower(&c, Level::CzLevel).unwrap();
        let elem = lower(&c, Level::Elementary).unwrap();
        let u = unitary_of(&c).unwrap();
        assert!(
            (&u - unitary_of(&cz).unwrap()).amax() < 1e-12,
            "n={n} cz level"
        );
        assert!(
            (&u - unitary_of(&elem).unwrap()).amax() < 1e-12,
            "n={n} elementary"
        );
    }
}

#[test]
fn dense_and_sparse_agree() {
    let cfg = SimConfig::default();
    let sim = Simulator::new(cfg);
    for n in 3..=12 {
        let c = build_w_circuit(n).unwrap();
        let bits = w_input(n);
        let dense = sim
            .run(
                &c,
                &QuantumState::basis(n, &bits, Backend::Dense, &cfg).unwrap(),
            )
            .unwrap();
        let sparse = sim
            .run(
                &c,
                &QuantumState::basis(n, &bits, Backend::Sparse, &cfg).unwrap(),
            )
            .unwrap();
        for i in 0..1usize << n {
            let k = BasisKey::from_index(n, i);
            assert!((dense.amplitude(&k) - sparse.amplitude(&k)).abs() < 1e-12);
        }
    }
}

#[test]
fn lowered_circuits_agree_across_backends() {
    let cfg = SimConfig::default();
    let sim = Simulator::new(cfg);
    for n in 3..=10 {
        let c = lower(&build_w_circuit(n).unwrap(), Level::Elementary).unwrap();
        let bits = w_input(n);
        let dense = sim
            .run(
                &c,
                &QuantumState::basis(n, &bits, Backend::Dense, &cfg).unwrap(),
            )
            .unwrap();
        let sparse = sim
            .run(
                &c,
                &QuantumState::basis(n, &bits, Backend::Sparse, &cfg).unwrap(),
            )
            .unwrap();
        let w = wstate::w_reference(n).unwrap();
        assert!(1.0 - wstate::fidelity(&dense, &w).unwrap() < 1e-10);
        assert!(1.0 - wstate::fidelity(&sparse, &w).unwrap() < 1e-10);
        assert_eq!(sparse.nnz(), n);
    }
}

#[test]
fn simulator_matches_unitary_columns() {
    let cfg = SimConfig::default();
    let sim = Simulator::new(cfg);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for n in 3..=8 {
        let c = build_w_circuit(n).unwrap();
        let u = unitary_of(&c).unwrap();
        for _ in 0..10 {
            let b = rng.gen_range(0..1usize << n);
            let key = BasisKey::from_index(n, b);
            for backend in [Backend::Dense, Backend::Sparse] {
                let input =
                    QuantumState::from_entries(n, vec![(key.clone(), 1.0)], backend, &cfg).unwrap();
                let out = sim.run(&c, &input).unwrap();
                for row in 0..1usize << n {
                    let got = out.amplitude(&BasisKey::from_index(n, row));
                    assert!((got - u[(row, b)]).abs() < 1e-12, "n={n} b={b} row={row}");
                }
            }
        }
    }
}

#[test]
fn sparse_support_never_exceeds_n() {
    let sim = Simulator::default();
    for n in 3..=64 {
        let c = build_w_circuit(n).unwrap();
        let input = sim
            .basis_state(n, &w_input(n), wstate::BackendChoice::Sparse)
            .unwrap();
        let mut peak = 0;
        sim.run_observed(&c, &input, |_, _, s| peak = peak.max(s.nnz()))
            .unwrap();
        assert!(peak <= n, "n={n} peak={peak}");
    }
}

#[test]
fn norm_is_preserved_after_every_gate() {
    let sim = Simulator::default();
    for n in [3, 10, 57, 300, 2000] {
        let c = build_w_circuit(n).unwrap();
        let input = sim
            .basis_state(n, &w_input(n), wstate::BackendChoice::Sparse)
            .unwrap();
        let mut worst = 0.0f64;
        sim.run_observed(&c, &input, |_, _, s| {
            worst = worst.max((s.norm_sqr() - 1.0).abs());
        })
        .unwrap();
        assert!(worst <= 1e-10, "n={n} worst={worst}");
    }
}

#[test]
fn dense_norm_after_every_gate() {
    let sim = Simulator::default();
    for n in 3..=14 {
        let c = lower(&build_w_circuit(n).unwrap(), Level::Elementary).unwrap();
        let input = sim
            .basis_state(n, &w_input(n), wstate::BackendChoice::Dense)
            .unwrap();
        sim.run_observed(&c, &input, |step, _, s| {
            assert!((s.norm_sqr() - 1.0).abs() < 1e-13 * (step + 1) as f64);
        })
        .unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Tilting the first plate by `d` rotates the output away from W by `4 d`.
    #[test]
    fn first_plate_sensitivity_is_cos_squared(n in 3usize..40, delta in -3.0f64..3.0) {
        let cfg = SimConfig::default();
        let rec = wstate::analysis::angle_sensitivity(n, 1, &[delta], wstate::BackendChoice::Sparse, &cfg).unwrap();
        let want = (4.0 * delta.to_radians()).cos().powi(2);
        prop_assert!((rec[0].fidelity - want).abs() < 1e-12);
    }

    #[test]
    fn sensitivity_falls_off_quadratically(n in 3usize..30, position in 1usize..3, delta in 0.001f64..0.02) {
        let cfg = SimConfig::default();
        let recs = wstate::analysis::angle_sensitivity(
            n, position, &[delta, 2.0 * delta], wstate::BackendChoice::Sparse, &cfg,
        ).unwrap();
        let ratio = (1.0 - recs[1].fidelity) / (1.0 - recs[0].fidelity);
        prop_assert!((ratio - 4.0).abs() < 0.05, "ratio {}", ratio);
    }
}

#[test]
fn sensitivity_agrees_with_unitary_oracle() {
    let cfg = SimConfig::default();
    for (position, delta) in [(1usize, 45.0f64), (2, 45.0), (1, 7.5), (2, -12.0)] {
        let rec = wstate::analysis::angle_sensitivity(
            3,
            position,
            &[delta],
            wstate::BackendChoice::Dense,
            &cfg,
        )
        .unwrap()[0];
        let c = build_w_circuit(3).unwrap();
        let mut gates = c.gates().to_vec();
        let slot = gates
            .iter()
            .position(
                |g| matches!(g, Gate::F { control, .. } if control.get() as usize == position),
            )
            .unwrap();
        if let Gate::F {
            control,
            target,
            alpha,
        } = gates[slot]
        {
            gates[slot] = Gate::f(
                control.get(),
                target.get(),
                alpha.radians() + 4.0 * delta.to_radians(),
            )
            .unwrap();
        }
        let u = unitary_of(&c.with_gates(gates).unwrap()).unwrap();
        // input |VHH> is column 4; W_3 covers rows 4, 2 and 1
        let overlap: f64 = [4, 2, 1].iter().map(|&r| u[(r, 4)]).sum::<f64>() / 3f64.sqrt();
        assert!(
            (rec.fidelity - overlap * overlap).abs() < 1e-12,
            "position {position} delta {delta}"
        );
    }
}

#[test]
fn amplitudes_stay_real_and_finite() {
    let sim = Simulator::default();
    for n in [3, 9, 40] {
        let c = lower(&build_w_circuit(n).unwrap(), Level::Elementary).unwrap();
        let input = sim
            .basis_state(n, &w_input(n), wstate::BackendChoice::Sparse)
            .unwrap();
        sim.run_observed(&c, &input, |_, _, s| {
            assert!(s
                .entries()
                .iter()
                .all(|(_, a)| a.is_finite() && a.abs() <= 1.0 + 1e-12));
        })
        .unwrap();
    }
}
