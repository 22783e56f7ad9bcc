use std::fs;

use spikeres::adversary::{table_moment_differences, Family};
use spikeres::exact::to_f64;
use spikeres_xlab::*;

fn csv_rows(path: &std::path::Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn table2_f5_row_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    run_tables(0.1, 0.05, tmp.path()).unwrap();
    let rows = csv_rows(&tmp.path().join("table2.csv"));
    let f5 = rows.iter().find(|r| r[0] == "F5").unwrap();
    for cell in &f5[1..6] {
        assert!(cell.parse::<f64>().unwrap().abs() <= 1e-18);
    }
    let f1 = rows.iter().find(|r| r[0] == "F1").unwrap();
    assert_eq!(f1[2].parse::<f64>().unwrap().abs(), 0.1);
}

#[test]
fn tiny_eta_collapses_differences() {
    let tmp = tempfile::tempdir().unwrap();
    run_tables(0.1, 1e-14, tmp.path()).unwrap();
    for row in csv_rows(&tmp.path().join("table2.csv")) {
        for cell in &row[1..6] {
            assert!(cell.parse::<f64>().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn figure1_curves_start_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = run_figure1(0.1, 0.05, 1.0, 64, tmp.path()).unwrap();
    let rows = csv_rows(&tmp.path().join("figure1.csv"));
    assert_eq!(rows.len(), 64);
    for cell in &rows[0][1..] {
        assert_eq!(cell.parse::<f64>().unwrap(), 0.0);
    }
    assert_eq!(manifest.summary["fits"].as_array().unwrap().len(), 3);
}

/// `|DF5(1)| / h` recomputed from exact moment differences with a
/// 40-digit value of pi and 60 Taylor terms.
#[test]
fn figure1_f5_endpoint_matches_extended_precision() {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    let (h, eta) = (0.1, 0.05);
    let tmp = tempfile::tempdir().unwrap();
    run_figure1(h, eta, 1.0, 32, tmp.path()).unwrap();
    let last = csv_rows(&tmp.path().join("figure1.csv")).pop().unwrap();
    assert_eq!(last[0].parse::<f64>().unwrap(), 1.0);
    let printed: f64 = last[3].parse().unwrap();

    let terms = 60;
    let dm = table_moment_differences(Family::F5, h, eta, terms).unwrap();
    let pi = BigRational::new(
        "3141592653589793238462643383279502884197".parse::<BigInt>().unwrap(),
        BigInt::from(10).pow(39),
    );
    let two_pi = &pi + &pi;
    // sum_k dm_k (-2 pi i)^k / k!, split into real and imaginary parts.
    let (mut re, mut im) = (BigRational::zero(), BigRational::zero());
    let mut coeff = BigRational::from_integer(1.into());
    for (k, d) in dm.iter().enumerate() {
        let term = d * &coeff;
        match k % 4 {
            0 => re += term,
            1 => im -= term,
            2 => re -= term,
            _ => im += term,
        }
        coeff = coeff * &two_pi / BigRational::from_integer((k as i64 + 1).into());
    }
    let expected = to_f64(&re).hypot(to_f64(&im)) / h;
    assert!((printed - expected).abs() <= 1e-12, "{printed} vs {expected}");
}

#[test]
fn adversary_demo_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let manifest = run_adversary_demo(3, 0.01, 5, tmp.path()).unwrap();
    let pair = spikeres::AdversaryPair::from_json(&fs::read_to_string(tmp.path().join("pair.json")).unwrap()).unwrap();
    assert!(pair.moment_residual <= 1e-10);
    let header = fs::read_to_string(tmp.path().join("gap_profile.csv")).unwrap();
    assert!(header.starts_with("s,re_gap,im_gap,abs_gap\n"));
    let order: f64 = manifest.summary["fitted_order"].as_str().unwrap().parse().unwrap();
    assert!((order - 5.0).abs() < 0.3, "{order}");
}

#[test]
fn scaling_l1_slope() {
    let tmp = tempfile::tempdir().unwrap();
    let eps: Vec<f64> = (3..=9).map(|k| 10f64.powi(-k)).collect();
    let manifest = run_scaling(1, 10.0, &eps, 4, 2, tmp.path()).unwrap();
    let fit = ScalingFit::from_summary(&manifest.summary).unwrap();
    assert!((fit.slope - 1.0).abs() <= 0.15);
    let rows = csv_rows(&tmp.path().join("scaling.csv"));
    assert_eq!(rows.len(), 28);
    let header = fs::read_to_string(tmp.path().join("scaling.csv")).unwrap();
    assert!(header.starts_with("l,N,epsilon,h_epsilon,trial,node_error,residual,stride_used\n"));
}

#[test]
fn rerun_gives_identical_digests() {
    let tmp = tempfile::tempdir().unwrap();
    let a = run_gap_bound(&[2], 4, 9, &tmp.path().join("a")).unwrap();
    let b = run_gap_bound(&[2], 4, 9, &tmp.path().join("b")).unwrap();
    assert_eq!(a.outputs, b.outputs);
    assert_eq!(a.summary["violations"], 0);
}
