//! Checks against independent references: exact rational arithmetic,
//! closed forms and finite differences.

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spikeres::adversary::{
    exact_gamma, random_cluster, table_delta_closed_form, table_delta_tabulated, table_moment_differences,
};
use spikeres::exact::{from_decimal, moments_exact, to_f64};
use spikeres::signal::fourier_series_eval;
use spikeres::*;

fn random_signal(rng: &mut ChaCha8Rng, d: usize, min_gap: f64) -> SpikeSignal {
    loop {
        let nodes: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let amps: Vec<f64> = (0..d)
            .map(|_| rng.random_range(0.5..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        if let Ok(s) = SpikeSignal::new(amps, nodes) {
            if d == 1 || s.min_gap() >= min_gap {
                return s;
            }
        }
    }
}

#[test]
fn moments_agree_with_rational_arithmetic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let d = rng.random_range(1..=5);
        let s = random_signal(&mut rng, d, 0.01);
        let exact = moments_exact(&s, 10);
        for (m, e) in moments(&s, 10).iter().zip(&exact) {
            let e = to_f64(e);
            assert!((m - e).abs() <= 4.0 * f64::EPSILON * e.abs().max(1.0), "{m} vs {e}");
        }
    }
}

#[test]
fn taylor_series_matches_closed_form() {
    let s = SpikeSignal::new(vec![1.5, -0.7, 0.3], vec![-0.2, 0.05, 0.31]).unwrap();
    for &f in &[0.0, 0.1, 0.5, 1.0, 2.0] {
        let series = fourier_series_eval(&s, f, 60);
        let closed = fourier_eval(&s, f);
        assert!((series - closed).norm() <= 1e-13, "s = {f}");
    }
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let d = rng.random_range(1..=5);
        let s = random_signal(&mut rng, d, 0.05);
        let jac = prony_jacobian(&s);
        let p = s.params();
        for c in 0..2 * d {
            let step = 1e-6 * p[c].abs().max(1.0);
            let eval = |delta: f64| {
                let mut q = p.clone();
                q[c] += delta;
                let (a, x) = q.split_at(d);
                moments(&SpikeSignal::new(a.to_vec(), x.to_vec()).unwrap(), 2 * d)
            };
            let (plus, minus) = (eval(step), eval(-step));
            for k in 0..2 * d {
                let fd = (plus[k] - minus[k]) / (2.0 * step);
                let an = jac.matrix()[(k, c)];
                assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "k={k} c={c}: {fd} vs {an}");
            }
        }
    }
}

#[test]
fn two_node_amplitude_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let s = random_signal(&mut rng, 2, 0.2);
        let m = moments(&s, 4);
        let rec = prony_solve(&PronyImage::new(m.clone()).unwrap(), 2).unwrap();
        let x2 = rec.nodes()[1];
        let a2 = (m[0] * m[2] - m[1] * m[1]) / (m[0] * x2 * x2 - 2.0 * m[1] * x2 + m[2]);
        assert!((a2 - rec.amplitudes()[1]).abs() <= 1e-9 * a2.abs().max(1.0));
        assert!((a2 - s.amplitudes()[1]).abs() <= 1e-9 * a2.abs().max(1.0));
    }
}

#[test]
fn moment_gaps_obey_cluster_scale_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let bounds = AmplitudeBounds::new(1.0, 2.0).unwrap();
    for l in 2..=3 {
        for _ in 0..20 {
            let h = 10f64.powf(rng.random_range(-3.0..-1.0));
            let (f0, spec) = random_cluster(&mut rng, l, h, 0.8 / (l - 1) as f64, 0.0, &bounds).unwrap();
            let config = AdversaryConfig {
                bounds: Some(bounds),
                ..AdversaryConfig::default()
            };
            let pair = construct_max_adversary(&f0, &spec, &config).unwrap();
            for (k, g) in exact_gamma(&pair, 2 * l + 3).iter().enumerate() {
                let bound = 4.0 * l as f64 * bounds.upper * h.powi(k as i32);
                assert!(*g <= bound, "l={l} k={k}: {g} > {bound}");
            }
        }
    }
}

#[test]
fn table_differences_follow_zero_pattern() {
    let (h, eta) = (0.1, 0.05);
    for family in Family::ALL {
        let diffs = table_moment_differences(family, h, eta, 5).unwrap();
        for (k, dm) in diffs.iter().enumerate() {
            let zero = k < family.matched() || (family == Family::F1 && k % 2 == 0) || (family == Family::F3 && k == 4);
            assert_eq!(dm.is_zero(), zero, "{family:?} k={k}");
        }
    }
    let f1 = table_moment_differences(Family::F1, h, eta, 2).unwrap();
    assert_eq!(to_f64(&f1[1]).abs(), 0.1);
}

#[test]
fn f3_cubic_difference_matches_symbolic_expansion() {
    let (h, eta) = (0.1, 0.05);
    let diffs = table_moment_differences(Family::F3, h, eta, 4).unwrap();
    let (hq, eq) = (from_decimal(h).unwrap(), from_decimal(eta).unwrap());
    let two = BigRational::one() + BigRational::one();
    let cube = |v: &BigRational| v * v * v;
    let symbolic = &two * (cube(&(&hq + &two * &eq)) - cube(&(&hq + &eq)) - cube(&eq));
    assert_eq!(diffs[3], symbolic);
    // Expanded: 6 h^2 eta + 18 h eta^2 + 12 eta^3.
    let closed = table_delta_closed_form(Family::F3, h, eta)[3];
    assert!((closed.abs() - to_f64(&symbolic)).abs() <= 1e-16);
    // The tabulated cubic coefficient 16 differs by 4 eta^3.
    let tabulated = table_delta_tabulated(Family::F3, h, eta)[3];
    assert!((tabulated - to_f64(&symbolic) - 4.0 * eta.powi(3)).abs() <= 1e-16);
}
