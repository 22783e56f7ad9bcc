use proptest::prelude::*;
use spikeres::*;

fn signal_strategy(max_d: usize) -> impl Strategy<Value = SpikeSignal> {
    (1..=max_d)
        .prop_flat_map(|d| {
            (
                proptest::collection::vec(0.5f64..2.0, d),
                proptest::collection::vec(any::<bool>(), d),
                proptest::collection::vec(0.0f64..1.0, d + 1),
            )
        })
        .prop_map(|(mags, signs, weights)| {
            // Nodes in [-1, 1] with gaps at least 0.1.
            let d = mags.len();
            let slack = 2.0 - 0.1 * (d as f64 - 1.0);
            let total: f64 = weights.iter().sum::<f64>() + 1e-9;
            let mut x = -1.0 + slack * weights[0] / total;
            let mut nodes = vec![x];
            for w in &weights[1..d] {
                x += 0.1 + slack * w / total;
                nodes.push(x);
            }
            let amps = mags.iter().zip(&signs).map(|(m, s)| if *s { *m } else { -*m }).collect();
            SpikeSignal::new(amps, nodes).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn moments_are_permutation_invariant(s in signal_strategy(5), rot in 0usize..5) {
        let d = s.dim();
        let mut a = s.amplitudes().to_vec();
        let mut x = s.nodes().to_vec();
        a.rotate_left(rot % d);
        x.rotate_left(rot % d);
        let t = SpikeSignal::new(a, x).unwrap();
        prop_assert_eq!(moments(&s, 8), moments(&t, 8));
    }

    #[test]
    fn moments_are_linear_in_amplitudes(s in signal_strategy(5), c in -3.0f64..3.0) {
        prop_assume!(c.abs() > 1e-3);
        let scaled = SpikeSignal::new(s.amplitudes().iter().map(|a| c * a).collect(), s.nodes().to_vec()).unwrap();
        for (u, v) in moments(&scaled, 8).iter().zip(moments(&s, 8)) {
            prop_assert!((u - c * v).abs() <= 1e-13 * (1.0 + v.abs() * c.abs()));
        }
    }

    #[test]
    fn node_distance_is_a_metric(
        u in proptest::collection::vec(-1.0f64..1.0, 3),
        v in proptest::collection::vec(-1.0f64..1.0, 3),
        w in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        let duv = node_distance(&u, &v).unwrap();
        prop_assert_eq!(duv, node_distance(&v, &u).unwrap());
        prop_assert_eq!(node_distance(&u, &u).unwrap(), 0.0);
        prop_assert!(duv <= node_distance(&u, &w).unwrap() + node_distance(&w, &v).unwrap() + 1e-15);
    }

    #[test]
    fn prony_round_trip(s in signal_strategy(4)) {
        let rec = prony_solve(&prony_forward(&s), s.dim()).unwrap();
        prop_assert!(node_distance(s.nodes(), rec.nodes()).unwrap() <= 1e-9);
    }

    #[test]
    fn newton_residual_is_monotone(s in signal_strategy(3), shift in -0.02f64..0.02) {
        let nodes: Vec<f64> = s.nodes().iter().map(|x| x + shift).collect();
        let guess = SpikeSignal::new(s.amplitudes().to_vec(), nodes).unwrap();
        if let Ok(sol) = newton_invert(&prony_forward(&s), &guess, 1e-13, 50) {
            prop_assert!(sol.history.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn noiseless_decimation_recovers(s in signal_strategy(4)) {
        let oracle = FourierOracle::exact(&s, 2.0 * s.dim() as f64).unwrap();
        let report = decimated_prony(&oracle, &DecimationConfig::new(s.dim(), 1.0)).unwrap();
        prop_assert!(report.node_error.unwrap() <= 1e-9, "{:?}", report.node_error);
        for &f in &[0.0, 0.3, 1.0] {
            let gap = (fourier_eval(&report.recovered, f) - oracle.measure(f).unwrap()).norm();
            prop_assert!(gap <= 1e-8);
        }
    }

    #[test]
    fn signal_json_round_trip(s in signal_strategy(5)) {
        prop_assert_eq!(SpikeSignal::from_json(&s.to_json()).unwrap(), s);
    }
}
