use crossinfo_core::linalg::{sym_eigenvalues, Matrix};
use crossinfo_core::qinfo::{
    coefficient_matrix, coherence_relative_entropy, diagnose, purity_channels, schmidt_spectrum, shannon_entropy,
    svd_perturbation_predict, von_neumann_entropy, Bipartition, ReducedDensity,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn state_strategy() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1..=8usize, 1..=8usize).prop_flat_map(|(l, r)| {
        prop::collection::vec(-1.0f64..1.0, l * r)
            .prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3))
            .prop_map(move |v| (l, r, v))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn schmidt_matches_reduced_density((l, r, state) in state_strategy()) {
        let bip = Bipartition::generic(l, r);
        let c = coefficient_matrix(&state, &bip).unwrap();
        prop_assert!((c.matrix().frobenius_norm() - 1.0).abs() < 1e-12);
        let s = schmidt_spectrum(&c, 5).unwrap();
        prop_assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(s.weights.windows(2).all(|w| w[0] >= w[1]));
        let rho_x = c.rho_left(&bip.left_labels);
        let rho_y = c.rho_right(&bip.right_labels);
        let sx = rho_x.entropy().unwrap();
        let sy = rho_y.entropy().unwrap();
        prop_assert!((s.entropy() - sx).abs() < 1e-10);
        prop_assert!((sx - sy).abs() < 1e-10);
        prop_assert!(s.entropy() <= (l.min(r) as f64).ln() + 1e-12);
        // the dense oracle: descending eigenvalues of C Cᵀ
        let mut ev = sym_eigenvalues(&c.matrix().gram_rows()).unwrap();
        ev.reverse();
        for (w, e) in s.weights.iter().zip(&ev) {
            prop_assert!((w - e).abs() < 1e-12);
        }
    }

    #[test]
    fn diagnostics_invariants((l, r, state) in state_strategy()) {
        let bip = Bipartition::generic(l, r);
        let d = diagnose(0.0, 0, &state, &bip, 5).unwrap();
        prop_assert!(d.c_d_x >= 0.0 && d.c_d_y >= 0.0);
        prop_assert_eq!(d.purity, d.p_diag + d.p_off);
        prop_assert!(d.purity <= 1.0 + 1e-12 && d.purity >= 1.0 / l as f64 - 1e-12);
        prop_assert!(d.s_config <= ((l * r) as f64).ln() + 1e-12);
        let c = coefficient_matrix(&state, &bip).unwrap();
        let p = purity_channels(&c.rho_left(&bip.left_labels));
        prop_assert!((p.purity - p.purity_trace).abs() < 1e-12);
    }
}

#[test]
fn random_density_coherence_matches_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let a = Matrix::from_fn(4, 4, |_, _| rng.gen_range(-1.0..1.0));
        let g = a.gram_rows();
        let rho = g.scaled(1.0 / g.trace());
        let density = ReducedDensity::new(rho.clone(), vec![0, 1, 2, 3]).unwrap();
        let direct = shannon_entropy(&rho.diagonal()) - von_neumann_entropy(&sym_eigenvalues(&rho).unwrap());
        let got = coherence_relative_entropy(&density).unwrap();
        assert!((got - direct.max(0.0)).abs() < 1e-12);
        assert!(got > 0.0);
    }
}

#[test]
fn perturbation_error_is_second_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = Matrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
    let dir = Matrix::from_fn(5, 5, |_, _| rng.gen_range(-1.0..1.0));
    let dir = dir.scaled(1.0 / dir.frobenius_norm());
    let errors = |size: f64| -> Vec<f64> {
        let next = c.add(&dir.scaled(size)).unwrap();
        svd_perturbation_predict(&c, &next)
            .unwrap()
            .iter()
            .map(|p| (p.predicted - p.actual).abs())
            .collect()
    };
    let e1 = errors(1e-4);
    let e2 = errors(5e-5);
    for (a, b) in e1.iter().zip(&e2) {
        let ratio = a / b;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
    }
}
