use std::collections::BTreeMap;

use proptest::prelude::*;
use rae_core::inference::replicate_moments;
use rae_core::lambda_fit::{model_curve, unit_interval_grid};
use rae_core::simulator::final_state;
use rae_core::{
    chebyshev_parity_probability, combine_energy, crb_rmse, direct_estimate, exact_expectation,
    exact_ground_energy, fisher_matrix, fit_lambda, h2_one_qubit_hamiltonian, h2_two_qubit_hamiltonian,
    log_likelihood, parity_distribution, rmse_stats, AnsatzSpec, LayerSchedule, LikelihoodCurve, ParityDataset,
    ParityOutcome, ParityRecord, PauliString, PauliSum, RaeCircuit, TermEstimate,
};

fn ansatz_and_word() -> impl Strategy<Value = (AnsatzSpec, PauliString)> {
    let one = (-7.0..7.0f64, prop::sample::select(vec!["Z", "X", "Y"]))
        .prop_map(|(t, w)| (AnsatzSpec::one_qubit(t), w.parse().unwrap()));
    let two = (-7.0..7.0f64, prop::sample::select(vec!["ZI", "IZ", "XX", "YY", "XY", "ZX"]))
        .prop_map(|(t, w)| (AnsatzSpec::two_qubit(t), w.parse().unwrap()));
    prop_oneof![one, two]
}

fn records() -> impl Strategy<Value = Vec<ParityRecord>> {
    prop::collection::btree_set(0u32..20, 1..6).prop_flat_map(|layers| {
        let n = layers.len();
        (Just(layers), prop::collection::vec((1u64..5000, 0.0..=1.0f64), n)).prop_map(|(layers, counts)| {
            layers
                .into_iter()
                .zip(counts)
                .map(|(l, (n, frac))| ParityRecord {
                    layers: l,
                    n_shots: n,
                    e_even: (frac * n as f64).round() as u64,
                })
                .collect()
        })
    })
}

fn schedule(layers: &std::collections::BTreeSet<u32>, n: u64) -> LayerSchedule {
    LayerSchedule::new(layers.iter().copied().collect(), n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simulated_parity_follows_the_chebyshev_law(
        (ansatz, word) in ansatz_and_word(),
        l in 0u32..7,
        lambda in 0.0..0.5f64,
    ) {
        let pi = exact_expectation(&ansatz, &word).unwrap();
        let circuit = RaeCircuit::new(ansatz, word, l, lambda).unwrap();
        let p = parity_distribution(&circuit).unwrap();
        let formula = chebyshev_parity_probability(pi, lambda, l, ParityOutcome::Even);
        prop_assert!((p - formula).abs() < 1e-10, "sim {p} vs {formula}");
    }

    #[test]
    fn final_states_are_physical((ansatz, word) in ansatz_and_word(), l in 0u32..7, lambda in 0.0..2.0f64) {
        let rho = final_state(&RaeCircuit::new(ansatz, word, l, lambda).unwrap()).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-10);
        prop_assert!(rho.trace().im.abs() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!(rho.is_physical(1e-10));
    }

    #[test]
    fn parity_outcomes_sum_to_one(pi in -1.0..=1.0f64, lambda in 0.0..3.0f64, l in 0u32..50) {
        let even = chebyshev_parity_probability(pi, lambda, l, ParityOutcome::Even);
        let odd = chebyshev_parity_probability(pi, lambda, l, ParityOutcome::Odd);
        prop_assert!((even + odd - 1.0).abs() < 1e-11);
        prop_assert!(even > 0.0 && odd > 0.0);
    }

    #[test]
    fn log_likelihood_ignores_record_order(
        recs in records(),
        pi in -0.99..0.99f64,
        lambda in 0.0..0.5f64,
        rotate in 0usize..6,
    ) {
        let word: PauliString = "Z".parse().unwrap();
        let a = ParityDataset::new(word.clone(), recs.clone()).unwrap();
        let mut shuffled = recs;
        let k = rotate % shuffled.len();
        shuffled.rotate_left(k);
        shuffled.reverse();
        let b = ParityDataset::new(word, shuffled).unwrap();
        let (la, lb) = (log_likelihood(&a, pi, lambda), log_likelihood(&b, pi, lambda));
        prop_assert!((la - lb).abs() <= 1e-9 * la.abs().max(1.0));
    }

    #[test]
    fn dataset_json_round_trips(recs in records()) {
        let ds = ParityDataset::new("XX".parse().unwrap(), recs).unwrap().with_metadata("seed", 3);
        prop_assert_eq!(ParityDataset::from_json(&ds.to_json().unwrap()).unwrap(), ds);
    }

    #[test]
    fn direct_estimate_stays_in_range(n in 1u64..100_000, frac in 0.0..=1.0f64) {
        let e = (frac * n as f64).floor() as u64;
        let ds = ParityDataset::new(
            "Z".parse().unwrap(),
            vec![ParityRecord { layers: 0, n_shots: n, e_even: e }],
        ).unwrap();
        let est = direct_estimate(&ds).unwrap();
        prop_assert!((-1.0..=1.0).contains(&est.pi_hat));
        prop_assert_eq!(est.lambda_hat, 0.0);
    }

    #[test]
    fn fisher_information_is_additive_over_disjoint_layers(
        a in prop::collection::btree_set(0u32..15, 1..5),
        b in prop::collection::btree_set(15u32..30, 1..5),
        pi in -0.95..0.95f64,
        lambda in 0.001..0.3f64,
        n in 1u64..10_000,
    ) {
        let fa = fisher_matrix(pi, lambda, &schedule(&a, n)).unwrap();
        let fb = fisher_matrix(pi, lambda, &schedule(&b, n)).unwrap();
        let union: std::collections::BTreeSet<u32> = a.union(&b).copied().collect();
        let f = fisher_matrix(pi, lambda, &schedule(&union, n)).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1e-300);
        prop_assert!(close(f.i11, fa.i11 + fb.i11));
        prop_assert!(close(f.i22, fa.i22 + fb.i22));
        prop_assert!((f.i12 - fa.i12 - fb.i12).abs() <= 1e-9 * (f.i11 * f.i22).sqrt());
    }

    #[test]
    fn fisher_matrix_is_positive_semidefinite(
        layers in prop::collection::btree_set(0u32..30, 1..6),
        pi in -0.99..0.99f64,
        lambda in 0.0..1.0f64,
    ) {
        let f = fisher_matrix(pi, lambda, &schedule(&layers, 1000)).unwrap();
        prop_assert!(f.i11 >= 0.0 && f.i22 >= 0.0 && f.det >= 0.0);
        prop_assert!(f.det <= f.i11 * f.i22 * (1.0 + 1e-9));
    }

    #[test]
    fn adding_a_depth_never_loosens_the_bound(
        layers in prop::collection::btree_set(0u32..20, 2..6),
        extra in 20u32..40,
        pi in -0.9..0.9f64,
        lambda in 0.001..0.3f64,
    ) {
        let base = schedule(&layers, 2000);
        let mut more = layers.clone();
        more.insert(extra);
        if let (Ok(before), Ok(after)) = (crb_rmse(pi, lambda, &base), crb_rmse(pi, lambda, &schedule(&more, 2000))) {
            prop_assert!(after <= before * (1.0 + 1e-9), "{after} > {before}");
        }
    }

    #[test]
    fn energy_is_linear_in_the_coefficients(
        pis in prop::collection::vec(-1.0..=1.0f64, 5),
        vars in prop::collection::vec(0.0..1e-4f64, 5),
        biases in prop::collection::vec(-1e-3..1e-3f64, 5),
        s in -3.0..3.0f64,
        shift in -5.0..5.0f64,
    ) {
        let h = h2_two_qubit_hamiltonian();
        let est: BTreeMap<PauliString, TermEstimate> = h
            .non_identity_terms()
            .zip(pis.iter().zip(&vars).zip(&biases))
            .map(|(t, ((&pi_hat, &variance), &bias))| (t.word.clone(), TermEstimate { pi_hat, variance, bias }))
            .collect();
        let base = combine_energy(&h, &est).unwrap();
        let scaled = combine_energy(&h.scaled(s), &est).unwrap();
        prop_assert!((scaled.energy - s * base.energy).abs() < 1e-12 * (1.0 + base.energy.abs()));
        prop_assert!((scaled.variance - s * s * base.variance).abs() < 1e-15);
        prop_assert!((scaled.bias - s * base.bias).abs() < 1e-15);

        let shifted = combine_energy(&h.shifted(shift), &est).unwrap();
        prop_assert!((shifted.energy - base.energy - shift).abs() < 1e-12);
        prop_assert_eq!(shifted.variance, base.variance);
        prop_assert_eq!(shifted.rmse, base.rmse);
    }

    #[test]
    fn ground_energy_shifts_with_the_identity_term(shift in -10.0..10.0f64) {
        for h in [h2_one_qubit_hamiltonian(), h2_two_qubit_hamiltonian()] {
            let e0 = exact_ground_energy(&h).unwrap();
            let e1 = exact_ground_energy(&h.shifted(shift)).unwrap();
            prop_assert!((e1 - e0 - shift).abs() < 1e-10);
        }
    }

    #[test]
    fn ground_energy_bounds_every_ansatz_energy(theta in -7.0..7.0f64) {
        let cases: [(PauliSum, AnsatzSpec); 2] = [
            (h2_one_qubit_hamiltonian(), AnsatzSpec::one_qubit(theta)),
            (h2_two_qubit_hamiltonian(), AnsatzSpec::two_qubit(theta)),
        ];
        for (h, ansatz) in cases {
            let energy: f64 = h.identity_coefficient()
                + h.non_identity_terms().map(|t| t.coeff * exact_expectation(&ansatz, &t.word).unwrap()).sum::<f64>();
            prop_assert!(energy >= exact_ground_energy(&h).unwrap() - 1e-10);
        }
    }

    #[test]
    fn rmse_decomposes_into_bias_and_variance(
        reps in prop::collection::vec(-1.0..1.0f64, 1..200),
        pi_ref in -1.0..1.0f64,
    ) {
        let s = rmse_stats(&reps, pi_ref).unwrap();
        let (mean, var) = replicate_moments(&reps);
        let bias = mean - pi_ref;
        prop_assert!((s.mse - (bias * bias + var)).abs() < 1e-12);
        prop_assert!(s.sigma_rmse >= 0.0);
    }

    #[test]
    fn lambda_fit_ignores_point_order(l in 1u32..6, lambda in 0.0..0.3f64, rotate in 1usize..10) {
        let curve = model_curve(l, lambda, &unit_interval_grid(), 8192).unwrap();
        let mut points = curve.points.clone();
        points.rotate_left(rotate);
        points.reverse();
        let shuffled = LikelihoodCurve::new(l, points).unwrap();
        let (a, b) = (fit_lambda(&curve).unwrap(), fit_lambda(&shuffled).unwrap());
        prop_assert!((a.lambda - b.lambda).abs() < 1e-9);
        prop_assert!((a.lambda - lambda).abs() < 1e-6);
    }
}
