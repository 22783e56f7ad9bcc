//! Experiment drivers. Each `run_*` function writes its files into the
//! output directory, records them in `manifest.json`, and returns the manifest.

use std::f64::consts::TAU;
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use spikeres::adversary::{
    gap_bound_constant, random_cluster, table_delta_closed_form, table_delta_tabulated, table_moment_differences,
};
use spikeres::decimation::{derive_seed, error_scaling_sweep_with, scaling_slope, sweep_bounds, worst_case_curve};
use spikeres::exact::to_f64;
use spikeres::fmt::{g17, serialize_f64};
use spikeres::signal::fourier_difference;
use spikeres::*;

use crate::error::{Result, XlabError};
use crate::spec::{Csv, ExperimentKind, ExperimentSpec, OutputSet, RunManifest};

/// Runs a validated spec. Parallel sections use the current rayon pool.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<RunManifest> {
    spec.validate()?;
    let start = Instant::now();
    let mut out = OutputSet::create(&spec.output_dir)?;
    let summary = match spec.kind {
        ExperimentKind::Tables => tables(spec, &mut out)?,
        ExperimentKind::Figure1 => figure1(spec, &mut out)?,
        ExperimentKind::GapBound => gap_bound(spec, &mut out)?,
        ExperimentKind::Scaling => scaling(spec, &mut out)?,
        ExperimentKind::AdversaryDemo => adversary_demo(spec, &mut out)?,
        ExperimentKind::Decimate => decimate(spec, &mut out)?,
    };
    out.finish(spec.clone(), start.elapsed().as_secs_f64(), summary)
}

pub fn run_tables(h: f64, eta: f64, out: &Path) -> Result<RunManifest> {
    run_experiment(&ExperimentSpec::new(ExperimentKind::Tables, out).with("h", h).with("eta", eta))
}

pub fn run_figure1(h: f64, eta: f64, s_max: f64, samples: usize, out: &Path) -> Result<RunManifest> {
    run_experiment(
        &ExperimentSpec::new(ExperimentKind::Figure1, out)
            .with("h", h)
            .with("eta", eta)
            .with("s_max", s_max)
            .with("samples", samples),
    )
}

pub fn run_gap_bound(ls: &[usize], trials: usize, seed: u64, out: &Path) -> Result<RunManifest> {
    run_experiment(
        &ExperimentSpec::new(ExperimentKind::GapBound, out)
            .with("l", ls.to_vec())
            .with("trials", trials)
            .with("seed", seed),
    )
}

pub fn run_scaling(
    l: usize,
    bandwidth: f64,
    epsilon_ladder: &[f64],
    trials: usize,
    seed: u64,
    out: &Path,
) -> Result<RunManifest> {
    run_experiment(
        &ExperimentSpec::new(ExperimentKind::Scaling, out)
            .with("l", l)
            .with("N", bandwidth)
            .with("epsilons", epsilon_ladder.to_vec())
            .with("trials", trials)
            .with("seed", seed),
    )
}

pub fn run_adversary_demo(l: usize, h: f64, seed: u64, out: &Path) -> Result<RunManifest> {
    run_experiment(
        &ExperimentSpec::new(ExperimentKind::AdversaryDemo, out)
            .with("l", l)
            .with("h", h)
            .with("seed", seed),
    )
}

pub fn run_decimate(
    signal: &SpikeSignal,
    config: &DecimationConfig,
    epsilon: f64,
    bandwidth: f64,
    out: &Path,
) -> Result<RunManifest> {
    run_experiment(
        &ExperimentSpec::new(ExperimentKind::Decimate, out)
            .with("signal", serde_json::from_str::<Value>(&signal.to_json())?)
            .with("config", serde_json::to_value(config)?)
            .with("epsilon", epsilon)
            .with("N", bandwidth),
    )
}

fn tables(spec: &ExperimentSpec, out: &mut OutputSet) -> Result<Value> {
    let (h, eta) = (spec.f64("h")?, spec.f64("eta")?);
    if !(h > 0.0 && eta > 0.0 && eta <= h / 2.0) {
        return Err(XlabError::Spec(format!("need 0 < eta <= h/2, got h = {h}, eta = {eta}")));
    }

    let mut t1 = Csv::new(&["family", "signal", "j", "amplitude", "node"]);
    for family in Family::ALL {
        let pair = table_signals(family, h, eta)?;
        for (tag, signal) in [("F0", &pair.f0), ("F1", &pair.f1)] {
            for (j, (a, x)) in signal.spikes().enumerate() {
                t1.row(&[family.name().into(), tag.into(), j.to_string(), g17(a), g17(x)]);
            }
        }
    }
    out.write("table1.csv", &t1.into_bytes())?;

    let mut t2 = Csv::new(&[
        "family",
        "dm0",
        "dm1",
        "dm2",
        "dm3",
        "dm4",
        "closed_form_max_abs_diff",
        "tabulated_max_abs_diff",
        "double_precision_max_abs_diff",
    ]);
    let mut rows = Vec::new();
    for family in Family::ALL {
        let exact: Vec<f64> = table_moment_differences(family, h, eta, 5)?.iter().map(to_f64).collect();
        let closed = table_delta_closed_form(family, h, eta);
        let tabulated = table_delta_tabulated(family, h, eta);
        let pair = table_signals(family, h, eta)?;
        let (m0, m1) = (moments(&pair.f0, 5), moments(&pair.f1, 5));
        let max_diff = |f: &dyn Fn(usize) -> f64| (0..5).map(f).fold(0.0, f64::max);
        let closed_diff = max_diff(&|k| (exact[k] - closed[k]).abs());
        let tabulated_diff = max_diff(&|k| (exact[k].abs() - tabulated[k]).abs());
        let double_diff = max_diff(&|k| (exact[k] - (m0[k] - m1[k])).abs());
        let mut cells = vec![family.name().to_string()];
        cells.extend(exact.iter().map(|v| g17(*v)));
        cells.extend([g17(closed_diff), g17(tabulated_diff), g17(double_diff)]);
        t2.row(&cells);
        rows.push(json!({
            "family": family.name(),
            "differences": exact.iter().map(|v| g17(*v)).collect::<Vec<_>>(),
            "closed_form_max_abs_diff": g17(closed_diff),
            "tabulated_max_abs_diff": g17(tabulated_diff),
        }));
    }
    out.write("table2.csv", &t2.into_bytes())?;
    Ok(json!({ "table2": rows }))
}

#[derive(Serialize)]
struct OrderFit {
    family: &'static str,
    #[serde(serialize_with = "serialize_f64")]
    fitted_order: f64,
    #[serde(serialize_with = "serialize_f64")]
    fitted_constant: f64,
}

fn figure1(spec: &ExperimentSpec, out: &mut OutputSet) -> Result<Value> {
    let (h, eta, s_max) = (spec.f64("h")?, spec.f64("eta")?, spec.f64("s_max")?);
    let samples = spec.usize("samples")?;
    if samples < 16 {
        return Err(XlabError::Spec(format!("samples must be >= 16, got {samples}")));
    }
    if !(s_max > 0.0) {
        return Err(XlabError::Spec(format!("s_max must be positive, got {s_max}")));
    }
    let pairs = Family::ALL
        .iter()
        .map(|&f| table_signals(f, h, eta))
        .collect::<std::result::Result<Vec<_>, _>>()?;

    let mut csv = Csv::new(&["s", "df1_over_h", "df3_over_h", "df5_over_h"]);
    for i in 0..samples {
        let s = s_max * i as f64 / (samples - 1) as f64;
        let mut cells = vec![g17(s)];
        cells.extend(pairs.iter().map(|p| g17(fourier_difference(&p.f0, &p.f1, s).norm() / h)));
        csv.row(&cells);
    }
    out.write("figure1.csv", &csv.into_bytes())?;

    let mut fits = Vec::new();
    for (family, pair) in Family::ALL.iter().zip(&pairs) {
        let profile = fourier_gap(pair, s_max, samples)?;
        fits.push(OrderFit {
            family: family.name(),
            fitted_order: profile.fitted_order,
            fitted_constant: profile.fitted_constant,
        });
    }
    let summary = serde_json::to_value(&fits)?;
    out.write("figure1_fit.json", serde_json::to_string_pretty(&fits)?.as_bytes())?;
    Ok(json!({ "fits": summary }))
}

/// Points of the gap-bound grid on `[0, 1/(2 pi h)]`.
const GAP_GRID: usize = 1001;

#[derive(Debug, Clone, Serialize)]
pub struct GapBoundRow {
    pub l: usize,
    pub trial: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub h: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub node_displacement: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub max_gap: f64,
    /// `max_s |gap(s)| / (C2 (h s)^(2l-1) + tau)`, with `tau` the rounding
    /// allowance of the evaluated gap.
    #[serde(serialize_with = "serialize_f64")]
    pub max_ratio: f64,
    pub holds: bool,
}

/// Random maximal adversarial pairs at log-uniform scales `h in [1e-3, 1e-1]`,
/// checked against `C2 (h s)^(2l-1)` on `|s| <= 1/(2 pi h)`.
pub fn gap_bound_rows(ls: &[usize], trials: usize, seed: u64) -> Result<Vec<GapBoundRow>> {
    let bounds = sweep_bounds();
    let cells: Vec<(usize, usize)> = ls.iter().flat_map(|&l| (0..trials).map(move |t| (l, t))).collect();
    let rows = Execution::default().map(cells, |(l, trial)| -> Result<GapBoundRow> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, l as u64, trial as u64, 0x6a9]));
        let h = 10f64.powf(-1.0 - 2.0 * rand::Rng::random::<f64>(&mut rng));
        let rho = if l > 1 { 0.8 / (l - 1) as f64 } else { 1.0 };
        let (f0, spec) = random_cluster(&mut rng, l, h, rho, 0.0, &bounds)?;
        let config = AdversaryConfig {
            bounds: Some(bounds),
            ..AdversaryConfig::default()
        };
        let pair = construct_max_adversary(&f0, &spec, &config)?;
        let c2 = gap_bound_constant(l, bounds.upper);
        let tau = 8.0 * f64::EPSILON * (pair.f0.l1_amplitude() + pair.f1.l1_amplitude());
        let s_edge = 1.0 / (TAU * h);
        let (mut max_gap, mut max_ratio) = (0.0f64, 0.0f64);
        for i in 0..GAP_GRID {
            let s = s_edge * i as f64 / (GAP_GRID - 1) as f64;
            let gap = fourier_difference(&pair.f0, &pair.f1, s).norm();
            max_gap = max_gap.max(gap);
            max_ratio = max_ratio.max(gap / (c2 * (h * s).powi(2 * l as i32 - 1) + tau));
        }
        Ok(GapBoundRow {
            l,
            trial,
            h,
            node_displacement: pair.node_displacement,
            max_gap,
            max_ratio,
            holds: max_ratio <= 1.0,
        })
    });
    rows.into_iter().collect()
}

fn gap_bound(spec: &ExperimentSpec, out: &mut OutputSet) -> Result<Value> {
    let ls = spec.usize_list("l")?;
    if ls.contains(&0) {
        return Err(XlabError::Spec("l must be >= 1".into()));
    }
    let rows = gap_bound_rows(&ls, spec.usize("trials")?, spec.u64("seed")?)?;
    let mut csv = Csv::new(&["l", "trial", "h", "node_displacement", "max_gap", "max_ratio", "holds"]);
    for r in &rows {
        csv.row(&[
            r.l.to_string(),
            r.trial.to_string(),
            g17(r.h),
            g17(r.node_displacement),
            g17(r.max_gap),
            g17(r.max_ratio),
            r.holds.to_string(),
        ]);
    }
    out.write("gap_bound.csv", &csv.into_bytes())?;
    let violations = rows.iter().filter(|r| !r.holds).count();
    let worst = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    Ok(json!({ "pairs": rows.len(), "violations": violations, "worst_ratio": g17(worst) }))
}

/// Fitted scaling law of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub l: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub slope: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub intercept: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub slope_stderr: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub band95_low: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub band95_high: f64,
    /// `1 / (2l - 1)`.
    #[serde(serialize_with = "serialize_f64")]
    pub expected_slope: f64,
    pub failed_cells: usize,
    /// `(epsilon, worst node error)` pairs, as 17-digit strings.
    pub worst_case: Vec<(String, String)>,
}

impl ScalingFit {
    pub fn from_summary(summary: &Value) -> Result<Self> {
        let num = |key: &str| -> Result<f64> {
            summary[key]
                .as_str()
                .and_then(|s| s.parse().ok())
                .or_else(|| summary[key].as_f64())
                .ok_or_else(|| XlabError::Spec(format!("summary lacks '{key}'")))
        };
        Ok(Self {
            l: summary["l"].as_u64().unwrap_or(0) as usize,
            slope: num("slope")?,
            intercept: num("intercept")?,
            slope_stderr: num("slope_stderr")?,
            band95_low: num("band95_low")?,
            band95_high: num("band95_high")?,
            expected_slope: num("expected_slope")?,
            failed_cells: summary["failed_cells"].as_u64().unwrap_or(0) as usize,
            worst_case: serde_json::from_value(summary["worst_case"].clone())?,
        })
    }
}

fn scaling(spec: &ExperimentSpec, out: &mut OutputSet) -> Result<Value> {
    let l = spec.usize("l")?;
    if !(1..=3).contains(&l) {
        return Err(XlabError::Spec(format!("l must be 1, 2 or 3, got {l}")));
    }
    let bandwidth = spec.f64("N")?;
    let epsilons = spec.f64_list("epsilons")?;
    let trials = spec.usize("trials")?;
    let seed = spec.u64("seed")?;
    let rows = error_scaling_sweep_with(l, bandwidth, &epsilons, trials, seed, Execution::default())
        .map_err(|e| match e {
            spikeres::Error::InvalidInput(msg) => XlabError::Spec(msg),
            other => other.into(),
        })?;

    let mut csv = Csv::new(&[
        "l",
        "N",
        "epsilon",
        "h_epsilon",
        "trial",
        "node_error",
        "residual",
        "stride_used",
    ]);
    for r in &rows {
        csv.row(&[
            r.l.to_string(),
            g17(r.bandwidth),
            g17(r.epsilon),
            g17(r.h_epsilon),
            r.trial.to_string(),
            g17(r.node_error),
            g17(r.residual),
            g17(r.stride_used),
        ]);
    }
    out.write("scaling.csv", &csv.into_bytes())?;

    let failed_cells = rows.iter().filter(|r| r.error.is_some()).count();
    if failed_cells > 0 {
        let mut failures = Csv::new(&["epsilon", "trial", "error"]);
        for r in rows.iter().filter(|r| r.error.is_some()) {
            let msg = r.error.as_deref().unwrap_or_default().replace([',', '\n'], ";");
            failures.row(&[g17(r.epsilon), r.trial.to_string(), msg]);
        }
        out.write("scaling_failures.csv", &failures.into_bytes())?;
    }
    let fit = scaling_slope(&rows);
    let (slope, intercept, stderr, (lo, hi)) = match &fit {
        Some(f) => (f.slope, f.intercept, f.slope_stderr, f.band95()),
        None => (f64::NAN, f64::NAN, f64::NAN, (f64::NAN, f64::NAN)),
    };
    let result = ScalingFit {
        l,
        slope,
        intercept,
        slope_stderr: stderr,
        band95_low: lo,
        band95_high: hi,
        expected_slope: 1.0 / (2 * l - 1) as f64,
        failed_cells,
        worst_case: worst_case_curve(&rows).iter().map(|(e, w)| (g17(*e), g17(*w))).collect(),
    };
    let text = serde_json::to_string_pretty(&result)?;
    out.write("scaling_fit.json", text.as_bytes())?;
    Ok(serde_json::from_str(&text)?)
}

fn adversary_demo(spec: &ExperimentSpec, out: &mut OutputSet) -> Result<Value> {
    let (l, h, seed) = (spec.usize("l")?, spec.f64("h")?, spec.u64("seed")?);
    if l == 0 || !(h > 0.0) {
        return Err(XlabError::Spec("need l >= 1 and h > 0".into()));
    }
    let bounds = sweep_bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, l as u64]));
    let rho = if l > 1 { 0.8 / (l - 1) as f64 } else { 1.0 };
    let (f0, cluster) = random_cluster(&mut rng, l, h, rho, 0.0, &bounds)?;
    let config = AdversaryConfig {
        bounds: Some(bounds),
        ..AdversaryConfig::default()
    };
    let pair = construct_max_adversary(&f0, &cluster, &config)?;
    out.write("pair.json", pair.to_json().as_bytes())?;
    let profile = fourier_gap(&pair, 1.0 / (TAU * h), 512)?;
    out.write("gap_profile.csv", profile.to_csv().as_bytes())?;
    Ok(json!({
        "eta": g17(pair.eta),
        "node_displacement": g17(pair.node_displacement),
        "displacement_over_h": g17(pair.node_displacement / h),
        "moment_residual": g17(pair.moment_residual),
        "fitted_order": g17(profile.fitted_order),
    }))
}

fn decimate(spec: &ExperimentSpec, out: &mut OutputSet) -> Result<Value> {
    let signal = SpikeSignal::from_json(&spec.parameters["signal"].to_string())
        .map_err(|e| XlabError::Spec(format!("signal: {e}")))?;
    let config = DecimationConfig::from_json(&spec.parameters["config"].to_string())
        .map_err(|e| XlabError::Spec(format!("config: {e}")))?;
    let (epsilon, bandwidth) = (spec.f64("epsilon")?, spec.f64("N")?);
    let oracle = make_random_oracle(&signal, epsilon, bandwidth, config.seed)
        .map_err(|e| XlabError::Spec(e.to_string()))?;
    let report = decimated_prony(&oracle, &config)?;
    let text = report.to_json();
    out.write("report.json", text.as_bytes())?;
    Ok(serde_json::from_str(&text)?)
}
