//! Local behaviour of the inverse Prony map.

use spikeres::prony::linear_prediction;
use spikeres::stats::log_log_fit;
use spikeres::*;

/// Deviation of `PM^{-1}(mu0 + mu)` from its linearization grows like `|mu|^2`.
#[test]
fn deviation_from_linearization_is_quadratic() {
    let base = SpikeSignal::new(vec![1.0, 1.5, -0.8], vec![-0.6, 0.1, 0.7]).unwrap();
    let mu0 = prony_forward(&base);
    let direction = [0.3, -0.5, 0.2, 0.7, -0.1, 0.4];
    let mut points = Vec::new();
    for k in 0..6 {
        let t = 1e-2 * 0.5f64.powi(k);
        let mu: Vec<f64> = direction.iter().map(|v| t * v).collect();
        let target = PronyImage::new(mu0.values().iter().zip(&mu).map(|(a, b)| a + b).collect()).unwrap();
        let exact = newton_invert(&target, &base, 1e-14, 50).unwrap().signal.params();
        let linear = linear_prediction(&base, &mu).unwrap();
        let dev = exact.iter().zip(&linear).fold(0.0, |m: f64, (a, b)| m.max((a - b).abs()));
        points.push((t, dev));
    }
    let fit = log_log_fit(&points).unwrap();
    assert!((fit.slope - 2.0).abs() < 0.1, "slope {}", fit.slope);
}

#[test]
fn conditioning_degrades_as_nodes_merge() {
    let wide = conditioning(&SpikeSignal::new(vec![1.0, 1.0], vec![-0.5, 0.5]).unwrap()).unwrap();
    let tight = conditioning(&SpikeSignal::new(vec![1.0, 1.0], vec![-0.05, 0.05]).unwrap()).unwrap();
    assert!(tight.inverse_norm > 100.0 * wide.inverse_norm);
    assert!(tight.node_projection_gain > wide.node_projection_gain);
}

#[test]
fn adversary_vanishes_with_eta() {
    let f0 = SpikeSignal::new(vec![1.0, 1.2, 1.5], vec![-0.3, 0.0, 0.35]).unwrap();
    let spec = ClusterSpec::new(3, 0.7, 0.4, -0.35, 0).unwrap();
    let pair = construct_adversary(&f0, &spec, 1e-12).unwrap();
    assert!(pair.node_displacement < 1e-9);
}
