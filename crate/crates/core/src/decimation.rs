//! Noisy band-limited Fourier oracles and decimated Prony reconstruction.
//!
//! The reconstruction samples the oracle on a ladder of strides
//! `Delta_0, Delta_0/2, ...`, solves a Prony system in `z_j = exp(-2 pi i Delta x_j)`
//! at each stride, and refines every candidate by damped Gauss-Newton on the
//! union of all samples. The candidate with the smallest residual wins.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{construct_max_adversary, gap_bound_constant, random_cluster, AdversaryConfig, AdversaryPair};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::fmt::{serialize_f64, serialize_opt_f64};
use crate::signal::{fourier_difference, fourier_eval, node_distance, AmplitudeBounds, ClusterSpec, SpikeSignal};
use crate::stats::{log_log_fit, LinearFit};

/// Fraction of the aliasing limit `2 Delta T < 1` used by the coarsest stride.
const ALIAS_FRACTION: f64 = 0.9;
/// Grid size for the adversarial noise bound.
const ADVERSARY_GRID: usize = 1024;
const MAX_REJECTIONS: usize = 30;
const MAX_REFINE_ITER: usize = 500;

/// Which member of an adversarial pair an oracle pretends to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    F0,
    F1,
}

#[derive(Debug, Clone, PartialEq)]
enum Noise {
    None,
    /// Uniform on the disc of radius epsilon, hashed from `(seed, s)`.
    Uniform { seed: u64 },
    /// The oracle reports the transform of another signal.
    Substitute { measured: SpikeSignal },
}

/// A measurement `Phi(s)` with `|Phi(s) - F(base)(s)| <= epsilon` on `[-N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierOracle {
    base_signal: SpikeSignal,
    noise: Noise,
    epsilon: f64,
    bandwidth: f64,
}

impl FourierOracle {
    /// Noise-free oracle.
    pub fn exact(signal: &SpikeSignal, bandwidth: f64) -> Result<Self> {
        check_bandwidth(bandwidth)?;
        Ok(Self {
            base_signal: signal.clone(),
            noise: Noise::None,
            epsilon: 0.0,
            bandwidth,
        })
    }

    pub fn base_signal(&self) -> &SpikeSignal {
        &self.base_signal
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// `Phi(s)`. Fails outside `[-N, N]` or if the noise bound would be broken.
    pub fn measure(&self, s: f64) -> Result<Complex64> {
        if !(s.abs() <= self.bandwidth) {
            return Err(Error::OutOfBand {
                s,
                bandwidth: self.bandwidth,
            });
        }
        let (value, noise) = match &self.noise {
            Noise::None => (fourier_eval(&self.base_signal, s), Complex64::new(0.0, 0.0)),
            Noise::Uniform { seed } => {
                let n = disc_sample(*seed, s) * self.epsilon;
                (fourier_eval(&self.base_signal, s) + n, n)
            }
            Noise::Substitute { measured } => (
                fourier_eval(measured, s),
                fourier_difference(measured, &self.base_signal, s),
            ),
        };
        let slack = 4.0 * f64::EPSILON * self.base_signal.l1_amplitude();
        if noise.norm() > self.epsilon * (1.0 + 1e-9) + slack {
            return Err(Error::NoiseBound {
                s,
                noise: noise.norm(),
                epsilon: self.epsilon,
            });
        }
        Ok(value)
    }

    /// `Phi(s) - F(base)(s)`.
    pub fn noise(&self, s: f64) -> Result<Complex64> {
        self.measure(s)?;
        Ok(match &self.noise {
            Noise::None => Complex64::new(0.0, 0.0),
            Noise::Uniform { seed } => disc_sample(*seed, s) * self.epsilon,
            Noise::Substitute { measured } => fourier_difference(measured, &self.base_signal, s),
        })
    }

    pub fn sample(&self, freqs: &[f64]) -> Result<Vec<Complex64>> {
        freqs.iter().map(|&s| self.measure(s)).collect()
    }
}

fn check_bandwidth(bandwidth: f64) -> Result<()> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidInput(format!("bandwidth must be positive, got {bandwidth}")));
    }
    Ok(())
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a tuple of integers, used to derive per-cell seeds.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(0x243F_6A88_85A3_08D3, |h, &p| splitmix(h ^ splitmix(p)))
}

/// Point uniform on the unit disc, a pure function of `(seed, s)`.
fn disc_sample(seed: u64, s: f64) -> Complex64 {
    let s = if s == 0.0 { 0.0 } else { s };
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, s.to_bits()]));
    loop {
        let re = 2.0 * rng.random::<f64>() - 1.0;
        let im = 2.0 * rng.random::<f64>() - 1.0;
        if re * re + im * im <= 1.0 {
            return Complex64::new(re, im);
        }
    }
}

/// Oracle whose measurement is `F(F0)` whichever member it claims to measure.
///
/// For `F1` the noise is `F(F0) - F(F1)`; `epsilon` is its maximum over a
/// 1024-point grid of `[0, N]` (the gap magnitude is even in `s`).
pub fn make_adversarial_oracle(pair: &AdversaryPair, which: Which, bandwidth: f64) -> Result<FourierOracle> {
    check_bandwidth(bandwidth)?;
    let limit = 1.0 / (TAU * pair.cluster.h);
    if bandwidth > limit {
        return Err(Error::ValidityRange { bandwidth, limit });
    }
    let epsilon = (0..ADVERSARY_GRID)
        .map(|i| bandwidth * i as f64 / (ADVERSARY_GRID - 1) as f64)
        .map(|s| fourier_difference(&pair.f0, &pair.f1, s).norm())
        .fold(0.0, f64::max);
    let base_signal = match which {
        Which::F0 => pair.f0.clone(),
        Which::F1 => pair.f1.clone(),
    };
    Ok(FourierOracle {
        base_signal,
        noise: Noise::Substitute {
            measured: pair.f0.clone(),
        },
        epsilon,
        bandwidth,
    })
}

/// Oracle with noise uniform on the complex disc of radius `epsilon`,
/// deterministic in `(seed, s)` and independent of query order.
pub fn make_random_oracle(signal: &SpikeSignal, epsilon: f64, bandwidth: f64, seed: u64) -> Result<FourierOracle> {
    check_bandwidth(bandwidth)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidInput(format!("epsilon must be >= 0, got {epsilon}")));
    }
    Ok(FourierOracle {
        base_signal: signal.clone(),
        noise: if epsilon == 0.0 {
            Noise::None
        } else {
            Noise::Uniform { seed }
        },
        epsilon,
        bandwidth,
    })
}

fn default_levels() -> usize {
    3
}

/// Parameters of [`decimated_prony`]. Accepted as JSON, e.g.
/// `{"model_order": 2, "node_bound": 0.05, "levels": 3, "refine_tol": 0.0, "seed": 7}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecimationConfig {
    pub model_order: usize,
    /// A priori bound `max |x_j| <= T`.
    pub node_bound: f64,
    #[serde(default = "default_levels")]
    pub levels: usize,
    /// Refinement stops once the max residual is at or below this.
    #[serde(default)]
    pub refine_tol: f64,
    #[serde(default)]
    pub seed: u64,
}

impl DecimationConfig {
    pub fn new(model_order: usize, node_bound: f64) -> Self {
        Self {
            model_order,
            node_bound,
            levels: default_levels(),
            refine_tol: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.model_order == 0 || self.levels == 0 {
            return Err(Error::InvalidInput("model_order and levels must be >= 1".into()));
        }
        if !(self.node_bound > 0.0 && self.node_bound.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "node_bound must be positive, got {}",
                self.node_bound
            )));
        }
        if !(self.refine_tol >= 0.0) {
            return Err(Error::InvalidInput("refine_tol must be >= 0".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Samples per stride level.
    pub fn samples_per_level(&self) -> usize {
        4 * self.model_order
    }

    /// Strides `Delta_0 / 2^i`, `i < levels`, where `Delta_0` is the largest
    /// stride that keeps all samples in band and `2 Delta T <= 0.9`.
    pub fn stride_ladder(&self, bandwidth: f64) -> Vec<f64> {
        let in_band = bandwidth / (self.samples_per_level() - 1) as f64;
        let alias = ALIAS_FRACTION / (2.0 * self.node_bound);
        let coarsest = in_band.min(alias);
        (0..self.levels).map(|i| coarsest / 2f64.powi(i as i32)).collect()
    }
}

/// Result of a reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub recovered: SpikeSignal,
    /// `d(X_true, X_rec)` against the oracle's base signal.
    #[serde(serialize_with = "serialize_opt_f64")]
    pub node_error: Option<f64>,
    #[serde(serialize_with = "serialize_opt_f64")]
    pub amplitude_error: Option<f64>,
    /// `max |Phi(s) - F(recovered)(s)|` over every sample used.
    #[serde(serialize_with = "serialize_f64")]
    pub residual: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub stride_used: f64,
    pub refinement_iterations: usize,
    /// Sum of squared residuals before refinement and after each accepted step.
    #[serde(skip)]
    pub refinement_history: Vec<f64>,
    pub sample_count: usize,
}

impl ReconstructionReport {
    /// Fills the error fields against `truth` (left `None` on dimension mismatch).
    pub fn evaluate(&mut self, truth: &SpikeSignal) {
        if truth.dim() == self.recovered.dim() {
            self.node_error = node_distance(truth.nodes(), self.recovered.nodes()).ok();
            self.amplitude_error = Some(
                truth
                    .amplitudes()
                    .iter()
                    .zip(self.recovered.amplitudes())
                    .fold(0.0, |m, (a, b)| m.max((a - b).abs())),
            );
        } else {
            self.node_error = None;
            self.amplitude_error = None;
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

struct SampleSet {
    freqs: Vec<f64>,
    values: Vec<Complex64>,
}

pub fn decimated_prony(oracle: &FourierOracle, config: &DecimationConfig) -> Result<ReconstructionReport> {
    config.validate()?;
    let d = config.model_order;
    let per_level = config.samples_per_level();
    let strides = config.stride_ladder(oracle.bandwidth());

    let mut cache: BTreeMap<u64, (f64, Complex64)> = BTreeMap::new();
    let mut levels = Vec::with_capacity(strides.len());
    for &stride in &strides {
        let mut values = Vec::with_capacity(per_level);
        for k in 0..per_level {
            let s = k as f64 * stride;
            let v = match cache.get(&s.to_bits()) {
                Some(&(_, v)) => v,
                None => {
                    let v = oracle.measure(s)?;
                    cache.insert(s.to_bits(), (s, v));
                    v
                }
            };
            values.push(v);
        }
        levels.push((stride, values));
    }
    let all = SampleSet {
        freqs: cache.values().map(|p| p.0).collect(),
        values: cache.values().map(|p| p.1).collect(),
    };
    let n = all.freqs.len();

    let scale = all.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let threshold = 10.0 * oracle.epsilon().max(1e-12 * scale) * (n as f64).sqrt();

    let mut best: Option<ReconstructionReport> = None;
    let mut order_failures = Vec::new();
    for (stride, values) in &levels {
        let candidate = match level_candidate(*stride, values, d) {
            Ok(c) => c,
            Err(e) => {
                order_failures.push(e.to_string());
                continue;
            }
        };
        let mut starts = vec![candidate.clone()];
        let mut next = 0;
        while next < starts.len() {
            let (recovered, iterations, history) = refine(&starts[next], &all, config.refine_tol);
            let residual = max_residual(&recovered, &all);
            if best.as_ref().is_none_or(|b| residual < b.residual) {
                best = Some(ReconstructionReport {
                    recovered,
                    node_error: None,
                    amplitude_error: None,
                    residual,
                    stride_used: *stride,
                    refinement_iterations: iterations,
                    refinement_history: history,
                    sample_count: n,
                });
            }
            if next == 0 && residual > threshold {
                starts.extend(reseeded(&candidate, config.node_bound, &all));
            }
            next += 1;
        }
    }
    let Some(mut report) = best else {
        return Err(Error::ModelOrder {
            order: d,
            reason: order_failures.join("; "),
        });
    };
    report.evaluate(oracle.base_signal());

    if !(report.residual <= threshold) {
        return Err(Error::ReconstructionFailure {
            best: Box::new(report),
            threshold,
        });
    }
    Ok(report)
}

/// Classical Prony solve on one stride level, with least-squares amplitudes.
fn level_candidate(stride: f64, values: &[Complex64], d: usize) -> Result<SpikeSignal> {
    let hankel = DMatrix::from_fn(d, d, |i, j| values[i + j]);
    let sv = hankel.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smax > 0.0) || !(smin > 4.0 * f64::EPSILON * smax) {
        return Err(Error::ModelOrder {
            order: d,
            reason: format!("Hankel matrix at stride {stride} is rank deficient"),
        });
    }
    let rhs = DVector::from_fn(d, |i, _| -values[i + d]);
    let coeffs = hankel.lu().solve(&rhs).ok_or_else(|| Error::ModelOrder {
        order: d,
        reason: format!("singular Hankel matrix at stride {stride}"),
    })?;
    let mut companion = DMatrix::<Complex64>::zeros(d, d);
    for i in 0..d {
        if i + 1 < d {
            companion[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
        companion[(i, d - 1)] = -coeffs[i];
    }
    let roots = companion.eigenvalues().ok_or_else(|| Error::ModelOrder {
        order: d,
        reason: "companion eigenvalues did not converge".into(),
    })?;
    let nodes: Vec<f64> = roots.iter().map(|z| -z.arg() / (TAU * stride)).collect();
    let freqs: Vec<f64> = (0..values.len()).map(|k| k as f64 * stride).collect();
    let amplitudes = least_squares_amplitudes(&nodes, &freqs, values)?;
    SpikeSignal::new(amplitudes, nodes)
}

/// Alternative starting points for a candidate whose refinement stalled.
/// Spurious nodes (outside `[-T, T]` or with amplitude below 1% of the
/// largest) are moved together onto a grid in `[-T, T]`; without spurious
/// nodes, each node is moved across the grid in turn. Amplitudes are refitted.
fn reseeded(candidate: &SpikeSignal, bound: f64, set: &SampleSet) -> Vec<SpikeSignal> {
    const GRID: usize = 8;
    let peak = candidate.amplitudes().iter().fold(0.0, |m: f64, a| m.max(a.abs()));
    let weak: Vec<usize> = (0..candidate.dim())
        .filter(|&j| candidate.nodes()[j].abs() > bound || candidate.amplitudes()[j].abs() < 0.01 * peak)
        .collect();
    let groups: Vec<Vec<usize>> = if weak.is_empty() {
        (0..candidate.dim()).map(|j| vec![j]).collect()
    } else {
        vec![weak]
    };
    let slot_node = |slot: usize| bound * (2.0 * (slot as f64 + 0.5) / GRID as f64 - 1.0);
    let mut starts = Vec::new();
    for group in &groups {
        let spread = (GRID / group.len()).max(1);
        for g in 0..GRID {
            let mut nodes = candidate.nodes().to_vec();
            for (i, &j) in group.iter().enumerate() {
                nodes[j] = slot_node((g + i * spread) % GRID);
            }
            let Ok(amplitudes) = least_squares_amplitudes(&nodes, &set.freqs, &set.values) else {
                continue;
            };
            if let Ok(signal) = SpikeSignal::new(amplitudes, nodes) {
                starts.push(signal);
            }
        }
    }
    starts
}

/// Real amplitudes minimizing `sum_s |sum_j a_j exp(-2 pi i s x_j) - Phi(s)|^2`.
fn least_squares_amplitudes(nodes: &[f64], freqs: &[f64], values: &[Complex64]) -> Result<Vec<f64>> {
    let n = freqs.len();
    let d = nodes.len();
    let mut design = DMatrix::zeros(2 * n, d);
    let mut rhs = DVector::zeros(2 * n);
    for (r, (&s, v)) in freqs.iter().zip(values).enumerate() {
        for (c, &x) in nodes.iter().enumerate() {
            let (sin, cos) = (TAU * (s * x)).sin_cos();
            design[(r, c)] = cos;
            design[(n + r, c)] = -sin;
        }
        rhs[r] = v.re;
        rhs[n + r] = v.im;
    }
    let svd = design.svd(true, true);
    let eps = 1e-14 * svd.singular_values.max();
    let sol = svd
        .solve(&rhs, eps)
        .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(sol.iter().copied().collect())
}

fn residual_vector(amps: &[f64], nodes: &[f64], set: &SampleSet) -> Vec<f64> {
    let n = set.freqs.len();
    let mut r = vec![0.0; 2 * n];
    for (i, (&s, v)) in set.freqs.iter().zip(&set.values).enumerate() {
        let model = (0..amps.len()).fold(Complex64::new(0.0, 0.0), |acc, j| {
            let (sin, cos) = (TAU * (s * nodes[j])).sin_cos();
            acc + Complex64::new(amps[j] * cos, -amps[j] * sin)
        });
        r[i] = model.re - v.re;
        r[n + i] = model.im - v.im;
    }
    r
}

fn max_residual(signal: &SpikeSignal, set: &SampleSet) -> f64 {
    set.freqs
        .iter()
        .zip(&set.values)
        .map(|(&s, v)| (fourier_eval(signal, s) - v).norm())
        .fold(0.0, f64::max)
}

fn jacobian(amps: &[f64], nodes: &[f64], set: &SampleSet) -> DMatrix<f64> {
    let d = amps.len();
    let n = set.freqs.len();
    let mut jac = DMatrix::zeros(2 * n, 2 * d);
    for (i, &s) in set.freqs.iter().enumerate() {
        for j in 0..d {
            let (sin, cos) = (TAU * (s * nodes[j])).sin_cos();
            jac[(i, j)] = cos;
            jac[(n + i, j)] = -sin;
            jac[(i, d + j)] = -TAU * s * amps[j] * sin;
            jac[(n + i, d + j)] = -TAU * s * amps[j] * cos;
        }
    }
    jac
}

/// Damped Gauss-Newton (Levenberg-Marquardt) on `(a, x)` over the full sample
/// set. Each step solves `[J; sqrt(mu) D] dp = [-r; 0]` with `D` the column
/// norms of `J`; only steps that lower the sum of squares are accepted.
fn refine(initial: &SpikeSignal, set: &SampleSet, tol: f64) -> (SpikeSignal, usize, Vec<f64>) {
    let d = initial.dim();
    let n = set.freqs.len();
    let mut amps = initial.amplitudes().to_vec();
    let mut nodes = initial.nodes().to_vec();
    let mut r = residual_vector(&amps, &nodes, set);
    let mut ss: f64 = r.iter().map(|v| v * v).sum();
    let mut history = vec![ss];
    let mut iterations = 0;
    let mut mu: f64 = 1e-6;
    let mut rejections = 0;

    while iterations < MAX_REFINE_ITER && rejections <= MAX_REJECTIONS {
        let max_abs = (0..n).map(|i| r[i].hypot(r[n + i])).fold(0.0, f64::max);
        if max_abs <= tol || ss == 0.0 {
            break;
        }
        let jac = jacobian(&amps, &nodes, set);
        let mut aug = DMatrix::zeros(2 * n + 2 * d, 2 * d);
        aug.rows_mut(0, 2 * n).copy_from(&jac);
        for c in 0..2 * d {
            aug[(2 * n + c, c)] = mu.sqrt() * jac.column(c).norm();
        }
        let mut rhs = DVector::zeros(2 * n + 2 * d);
        for (i, v) in r.iter().enumerate() {
            rhs[i] = -v;
        }
        let svd = aug.svd(true, true);
        let eps = 1e-15 * svd.singular_values.max();
        let Ok(step) = svd.solve(&rhs, eps) else {
            break;
        };
        let a2: Vec<f64> = (0..d).map(|j| amps[j] + step[j]).collect();
        let x2: Vec<f64> = (0..d).map(|j| nodes[j] + step[d + j]).collect();
        let r2 = residual_vector(&a2, &x2, set);
        let ss2: f64 = r2.iter().map(|v| v * v).sum();
        if !(ss2 < ss) {
            mu *= 4.0;
            rejections += 1;
            continue;
        }
        rejections = 0;
        mu = (mu / 3.0).max(1e-15);
        let gain = ss - ss2;
        amps = a2;
        nodes = x2;
        r = r2;
        ss = ss2;
        history.push(ss);
        iterations += 1;
        if gain <= 1e-15 * ss {
            break;
        }
    }
    let signal = SpikeSignal::new(amps, nodes).unwrap_or_else(|_| initial.clone());
    (signal, iterations, history)
}

/// One row of an error-scaling sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub l: usize,
    #[serde(serialize_with = "serialize_f64")]
    pub bandwidth: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub epsilon: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub h_epsilon: f64,
    pub trial: usize,
    /// `max(d(X0, X_rec), d(X1, X_rec))`; NaN when the cell failed.
    #[serde(serialize_with = "serialize_f64")]
    pub node_error: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub residual: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub stride_used: f64,
    pub error: Option<String>,
}

/// Cluster scale at which the adversarial gap reaches `epsilon`:
/// `h = (1/N) (epsilon / C2)^(1/(2l-1))`.
pub fn critical_cluster_size(l: usize, bandwidth: f64, epsilon: f64, upper: f64) -> f64 {
    (epsilon / gap_bound_constant(l, upper)).powf(1.0 / (2 * l - 1) as f64) / bandwidth
}

/// Amplitude bounds of the random clusters used by the sweeps.
pub fn sweep_bounds() -> AmplitudeBounds {
    AmplitudeBounds { lower: 1.0, upper: 2.0 }
}

fn nominal_rho(l: usize) -> f64 {
    if l > 1 {
        0.8 / (l - 1) as f64
    } else {
        1.0
    }
}

/// Worst-case node error against `epsilon` on adversarial data.
///
/// For each `epsilon` and trial: draw an `l`-cluster of size `h_epsilon`, build
/// the largest admissible adversarial pair, feed `F(F0)` to
/// [`decimated_prony`] as a measurement of `F1`, and record
/// `max(d(X0, X_rec), d(X1, X_rec))`. The cluster shape depends only on
/// `(seed, l, trial)`, so every `epsilon` sees the same normalized instances.
pub fn error_scaling_sweep(
    l: usize,
    bandwidth: f64,
    epsilons: &[f64],
    trials: usize,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    error_scaling_sweep_with(l, bandwidth, epsilons, trials, seed, Execution::default())
}

pub fn error_scaling_sweep_with(
    l: usize,
    bandwidth: f64,
    epsilons: &[f64],
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if l == 0 || trials == 0 {
        return Err(Error::InvalidInput("need l >= 1 and trials >= 1".into()));
    }
    check_bandwidth(bandwidth)?;
    if epsilons.iter().any(|e| !(*e > 0.0)) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidInput("epsilons must be positive and strictly descending".into()));
    }
    let cells: Vec<(f64, usize)> = epsilons
        .iter()
        .flat_map(|&e| (0..trials).map(move |t| (e, t)))
        .collect();
    Ok(exec.map(cells, |(epsilon, trial)| sweep_cell(l, bandwidth, epsilon, trial, seed)))
}

fn sweep_cell(l: usize, bandwidth: f64, epsilon: f64, trial: usize, seed: u64) -> SweepRow {
    let bounds = sweep_bounds();
    let h = critical_cluster_size(l, bandwidth, epsilon, bounds.upper);
    let mut row = SweepRow {
        l,
        bandwidth,
        epsilon,
        h_epsilon: h,
        trial,
        node_error: f64::NAN,
        residual: f64::NAN,
        stride_used: f64::NAN,
        error: None,
    };
    let outcome = (|| -> Result<(f64, ReconstructionReport)> {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, l as u64, trial as u64]));
        let (f0, spec) = random_cluster(&mut rng, l, h, nominal_rho(l), 0.0, &bounds)?;
        let config = AdversaryConfig {
            bounds: Some(bounds),
            ..AdversaryConfig::default()
        };
        let pair = construct_max_adversary(&f0, &spec, &config)?;
        let oracle = make_adversarial_oracle(&pair, Which::F1, bandwidth)?;
        let dconf = DecimationConfig::new(l, h);
        let report = decimated_prony(&oracle, &dconf)?;
        let rec = report.recovered.nodes();
        let worst = node_distance(pair.cluster0.nodes(), rec)?.max(node_distance(pair.cluster1.nodes(), rec)?);
        Ok((worst, report))
    })();
    match outcome {
        Ok((worst, report)) => {
            row.node_error = worst;
            row.residual = report.residual;
            row.stride_used = report.stride_used;
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Worst node error per epsilon, in input order; failed cells are skipped.
pub fn worst_case_curve(rows: &[SweepRow]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for row in rows {
        match out.last_mut() {
            Some(last) if last.0 == row.epsilon => {
                if row.node_error > last.1 || last.1.is_nan() {
                    last.1 = row.node_error;
                }
            }
            _ => out.push((row.epsilon, row.node_error)),
        }
    }
    out.retain(|(_, e)| e.is_finite());
    out
}

/// Log-log slope of worst-case node error against epsilon.
pub fn scaling_slope(rows: &[SweepRow]) -> Option<LinearFit> {
    log_log_fit(&worst_case_curve(rows))
}

/// One random-noise reconstruction at `epsilon = c3 (h N)^(2l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeTrial {
    #[serde(serialize_with = "serialize_f64")]
    pub epsilon: f64,
    #[serde(serialize_with = "serialize_f64")]
    pub h: f64,
    /// `d(X0, X_rec)`, infinite when reconstruction failed.
    #[serde(serialize_with = "serialize_f64")]
    pub node_error: f64,
    /// `rho h / 10`.
    #[serde(serialize_with = "serialize_f64")]
    pub tolerance: f64,
}

impl RegimeTrial {
    pub fn passed(&self) -> bool {
        self.node_error <= self.tolerance
    }
}

/// Reference instance for calibrating `c3`: two unit spikes at `+-h/2`.
pub fn reference_cluster(h: f64) -> (SpikeSignal, ClusterSpec) {
    let signal = SpikeSignal::new(vec![1.0, 1.0], vec![-0.5 * h, 0.5 * h]).expect("valid");
    let spec = ClusterSpec::new(2, h, 1.0, -0.5 * h, 0).expect("valid");
    (signal, spec)
}

/// Reconstructs `signal` (one cluster of size `h`, nominal separation `rho`)
/// from random noise of level `c3 (h N)^(2l)`.
pub fn regime_trial(signal: &SpikeSignal, h: f64, rho: f64, bandwidth: f64, c3: f64, noise_seed: u64) -> RegimeTrial {
    let l = signal.dim();
    let epsilon = c3 * (h * bandwidth).powi(2 * l as i32);
    let tolerance = rho * h / 10.0;
    let node_error = make_random_oracle(signal, epsilon, bandwidth, noise_seed)
        .and_then(|oracle| decimated_prony(&oracle, &DecimationConfig::new(l, h)))
        .map(|r| r.node_error.unwrap_or(f64::INFINITY))
        .unwrap_or(f64::INFINITY);
    RegimeTrial {
        epsilon,
        h,
        node_error,
        tolerance,
    }
}

/// Random `l`-cluster of size `h` at the origin with nominal separation `0.8/(l-1)`.
pub fn regime_instance(l: usize, h: f64, seed: u64, trial: usize) -> Result<(SpikeSignal, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(&[seed, l as u64, trial as u64, 0x7e6]));
    let rho = nominal_rho(l);
    let (signal, _) = random_cluster(&mut rng, l, h, rho, 0.0, &sweep_bounds())?;
    Ok((signal, rho))
}

/// Largest `c3` (bisected in log scale over `[lo, hi]`) for which every
/// noise seed in `seeds` keeps the reference instance within `rho h / 10`.
pub fn calibrate_c3(h: f64, bandwidth: f64, seeds: std::ops::Range<u64>, lo: f64, hi: f64, steps: usize) -> f64 {
    let (signal, spec) = reference_cluster(h);
    let ok = |c3: f64| {
        seeds
            .clone()
            .all(|seed| regime_trial(&signal, h, spec.rho, bandwidth, c3, seed).passed())
    };
    let (mut lo, mut hi) = (lo.ln(), hi.ln());
    for _ in 0..steps {
        let mid = 0.5 * (lo + hi);
        if ok(mid.exp()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(a: &[f64], x: &[f64]) -> SpikeSignal {
        SpikeSignal::new(a.to_vec(), x.to_vec()).unwrap()
    }

    #[test]
    fn exact_oracle_and_band_check() {
        let s = sig(&[1.0], &[0.0]);
        let o = make_random_oracle(&s, 0.0, 2.0, 1).unwrap();
        assert_eq!(o.measure(1.5).unwrap(), Complex64::new(1.0, 0.0));
        assert!(matches!(o.measure(2.5), Err(Error::OutOfBand { .. })));
        assert_eq!(o.noise(0.7).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn random_noise_is_deterministic_and_bounded() {
        let s = sig(&[1.0, -0.5], &[-0.2, 0.4]);
        let o = make_random_oracle(&s, 1e-3, 10.0, 42).unwrap();
        assert_eq!(o.measure(3.3).unwrap(), o.measure(3.3).unwrap());
        let other = make_random_oracle(&s, 1e-3, 10.0, 43).unwrap();
        assert_ne!(o.noise(3.3).unwrap(), other.noise(3.3).unwrap());
        for i in 0..2000 {
            let f = -10.0 + 20.0 * i as f64 / 1999.0;
            assert!(o.noise(f).unwrap().norm() <= 1e-3);
        }
    }

    #[test]
    fn config_validation_and_json() {
        let cfg = DecimationConfig::from_json(r#"{"model_order": 2, "node_bound": 0.5}"#).unwrap();
        assert_eq!(cfg.levels, 3);
        assert!(DecimationConfig::from_json(r#"{"model_order": 0, "node_bound": 0.5}"#).is_err());
        assert!(DecimationConfig::from_json(r#"{"model_order": 1, "node_bound": -1}"#).is_err());
    }

    #[test]
    fn stride_ladder_respects_aliasing_and_band() {
        let cfg = DecimationConfig::new(3, 0.7);
        let ladder = cfg.stride_ladder(10.0);
        assert_eq!(ladder.len(), 3);
        for (i, d) in ladder.iter().enumerate() {
            assert!(2.0 * d * cfg.node_bound < 1.0);
            assert!(d * 11.0 <= 10.0);
            if i > 0 {
                assert_eq!(ladder[i - 1] / d, 2.0);
            }
        }
    }

    #[test]
    fn noiseless_well_separated() {
        let s = sig(&[1.0, 1.0], &[-0.3, 0.3]);
        let o = FourierOracle::exact(&s, 5.0).unwrap();
        let r = decimated_prony(&o, &DecimationConfig::new(2, 0.5)).unwrap();
        assert!(r.node_error.unwrap() <= 1e-10, "{:?}", r.node_error);
        assert!(r.refinement_history.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn too_few_spikes_is_order_error() {
        let s = sig(&[1.0], &[0.2]);
        let o = FourierOracle::exact(&s, 5.0).unwrap();
        let err = decimated_prony(&o, &DecimationConfig::new(2, 0.5)).unwrap_err();
        assert!(matches!(err, Error::ModelOrder { .. }), "{err}");
    }

    #[test]
    fn seeds_are_order_sensitive() {
        assert_ne!(derive_seed(&[1, 2]), derive_seed(&[2, 1]));
    }
}
