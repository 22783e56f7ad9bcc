//! Spike-train signals, their moments and Fourier transform, and cluster geometry.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::serialize_f64_slice;
use crate::sum::{CompensatedSum, ComplexSum};

/// A finite sum of weighted Dirac spikes `F(x) = sum_j a_j delta(x - x_j)`.
///
/// Nodes are kept in non-decreasing order; the constructor sorts the
/// `(amplitude, node)` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignal")]
pub struct SpikeSignal {
    #[serde(serialize_with = "serialize_f64_slice")]
    amplitudes: Vec<f64>,
    #[serde(serialize_with = "serialize_f64_slice")]
    nodes: Vec<f64>,
}

#[derive(Deserialize)]
struct RawSignal {
    amplitudes: Vec<f64>,
    nodes: Vec<f64>,
}

impl TryFrom<RawSignal> for SpikeSignal {
    type Error = Error;

    fn try_from(raw: RawSignal) -> Result<Self> {
        SpikeSignal::new(raw.amplitudes, raw.nodes)
    }
}

impl SpikeSignal {
    pub fn new(amplitudes: Vec<f64>, nodes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != nodes.len() {
            return Err(Error::Dimension {
                expected: amplitudes.len(),
                got: nodes.len(),
            });
        }
        if amplitudes.is_empty() {
            return Err(Error::InvalidInput("a signal needs at least one spike".into()));
        }
        if amplitudes.iter().chain(&nodes).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("amplitudes and nodes must be finite".into()));
        }
        let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(amplitudes).collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let (nodes, amplitudes) = pairs.into_iter().unzip();
        Ok(Self { amplitudes, nodes })
    }

    pub fn single(amplitude: f64, node: f64) -> Result<Self> {
        Self::new(vec![amplitude], vec![node])
    }

    /// Builds a signal from a parameter vector laid out as `(a_1..a_d, x_1..x_d)`.
    pub fn from_params(params: &[f64]) -> Result<Self> {
        if !params.len().is_multiple_of(2) {
            return Err(Error::InvalidInput("parameter vector must have even length".into()));
        }
        let d = params.len() / 2;
        Self::new(params[..d].to_vec(), params[d..].to_vec())
    }

    /// The `(a_1..a_d, x_1..x_d)` parameter vector.
    pub fn params(&self) -> Vec<f64> {
        self.amplitudes.iter().chain(&self.nodes).copied().collect()
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spikes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.amplitudes.iter().copied().zip(self.nodes.iter().copied())
    }

    /// The superposition of two spike trains (spikes are concatenated, not merged).
    pub fn concat(&self, other: &SpikeSignal) -> SpikeSignal {
        let amplitudes = self.amplitudes.iter().chain(&other.amplitudes).copied().collect();
        let nodes = self.nodes.iter().chain(&other.nodes).copied().collect();
        SpikeSignal::new(amplitudes, nodes).expect("both inputs are valid")
    }

    pub fn scaled(&self, factor: f64) -> SpikeSignal {
        SpikeSignal {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            nodes: self.nodes.clone(),
        }
    }

    /// Spikes with indices in `range`, in node order.
    pub fn slice(&self, range: std::ops::Range<usize>) -> SpikeSignal {
        SpikeSignal {
            amplitudes: self.amplitudes[range.clone()].to_vec(),
            nodes: self.nodes[range].to_vec(),
        }
    }

    /// Spikes outside `range`, or `None` when nothing remains.
    pub fn without(&self, range: std::ops::Range<usize>) -> Option<SpikeSignal> {
        let keep: Vec<usize> = (0..self.dim()).filter(|i| !range.contains(i)).collect();
        if keep.is_empty() {
            return None;
        }
        Some(SpikeSignal {
            amplitudes: keep.iter().map(|&i| self.amplitudes[i]).collect(),
            nodes: keep.iter().map(|&i| self.nodes[i]).collect(),
        })
    }

    pub fn min_gap(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_node(&self) -> f64 {
        self.nodes.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn l1_amplitude(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.abs()).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("signal serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

/// Amplitude bounds `0 < m <= |a_j| <= M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeBounds {
    pub lower: f64,
    pub upper: f64,
}

impl AmplitudeBounds {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= upper && upper.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "amplitude bounds need 0 < m <= M < inf, got ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// Tightest bounds satisfied by the amplitudes of `signal`.
    pub fn tightest(signal: &SpikeSignal) -> Result<Self> {
        let mags = signal.amplitudes().iter().map(|a| a.abs());
        let lower = mags.clone().fold(f64::INFINITY, f64::min);
        let upper = mags.fold(0.0, f64::max);
        Self::new(lower, upper)
    }

    /// The bounds `(m/2, 2M)` admitted for the perturbed signal.
    pub fn relaxed(&self) -> Self {
        Self {
            lower: self.lower / 2.0,
            upper: self.upper * 2.0,
        }
    }

    pub fn contains(&self, amplitude: f64) -> bool {
        let a = amplitude.abs();
        self.lower <= a && a <= self.upper
    }

    pub fn admits(&self, signal: &SpikeSignal) -> bool {
        signal.amplitudes().iter().all(|&a| self.contains(a))
    }
}

/// An `(l, h, rho)` cluster: the host interval `[interval_start, interval_start + h]`
/// holds exactly the `l` nodes with indices `kappa..kappa + l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub l: usize,
    pub h: f64,
    pub rho: f64,
    pub interval_start: f64,
    pub kappa: usize,
}

// Slack for nodes sitting exactly on the interval boundary after rounding.
const BOUNDARY_SLACK: f64 = 1e-12;

impl ClusterSpec {
    pub fn new(l: usize, h: f64, rho: f64, interval_start: f64, kappa: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::InvalidInput("cluster must contain at least one node".into()));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidInput(format!("cluster length must be positive, got {h}")));
        }
        if !(rho > 0.0) || (l > 1 && rho > 1.0 / (l - 1) as f64 * (1.0 + BOUNDARY_SLACK)) {
            return Err(Error::InvalidInput(format!(
                "rho must lie in (0, 1/(l-1)], got {rho} for l = {l}"
            )));
        }
        Ok(Self {
            l,
            h,
            rho,
            interval_start,
            kappa,
        })
    }

    /// Cluster whose host interval is the span of nodes `kappa..kappa + l`.
    ///
    /// A single node gets a unit-length interval centred on it.
    pub fn spanning(signal: &SpikeSignal, kappa: usize, l: usize) -> Result<Self> {
        if l == 0 || kappa + l > signal.dim() {
            return Err(Error::InvalidInput(format!(
                "cluster {kappa}..{} out of range for {} nodes",
                kappa + l,
                signal.dim()
            )));
        }
        let nodes = &signal.nodes()[kappa..kappa + l];
        if l == 1 {
            return Self::new(1, 1.0, 1.0, nodes[0] - 0.5, kappa);
        }
        let h = nodes[l - 1] - nodes[0];
        let gap = signal.slice(kappa..kappa + l).min_gap();
        Self::new(l, h, gap / h, nodes[0], kappa)
    }

    pub fn interval_end(&self) -> f64 {
        self.interval_start + self.h
    }

    pub fn center(&self) -> f64 {
        self.interval_start + 0.5 * self.h
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.kappa..self.kappa + self.l
    }

    /// Checks the cluster conditions against `signal`.
    pub fn check(&self, signal: &SpikeSignal) -> Result<()> {
        if self.kappa + self.l > signal.dim() {
            return Err(Error::InvalidInput(format!(
                "cluster indices {}..{} exceed signal dimension {}",
                self.kappa,
                self.kappa + self.l,
                signal.dim()
            )));
        }
        let slack = BOUNDARY_SLACK * self.h.max(self.interval_start.abs());
        let (lo, hi) = (self.interval_start - slack, self.interval_end() + slack);
        let inside: Vec<usize> = signal
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, &x)| lo <= x && x <= hi)
            .map(|(i, _)| i)
            .collect();
        if inside != self.range().collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!(
                "host interval [{}, {}] holds nodes {:?}, expected {:?}",
                self.interval_start,
                self.interval_end(),
                inside,
                self.range()
            )));
        }
        if self.l > 1 {
            let gap = signal.slice(self.range()).min_gap();
            if gap < self.rho * self.h * (1.0 - BOUNDARY_SLACK) {
                return Err(Error::InvalidInput(format!(
                    "minimal cluster gap {gap} is below rho * h = {}",
                    self.rho * self.h
                )));
            }
        }
        Ok(())
    }
}

/// Affine map sending a cluster's host interval onto a target interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterMap {
    source_center: f64,
    target_center: f64,
    scale: f64,
}

impl ClusterMap {
    pub fn new(spec: &ClusterSpec, target_center: f64, target_halfwidth: f64) -> Result<Self> {
        if !(target_halfwidth > 0.0) {
            return Err(Error::InvalidInput(format!(
                "target half-width must be positive, got {target_halfwidth}"
            )));
        }
        Ok(Self {
            source_center: spec.center(),
            target_center,
            scale: 2.0 * target_halfwidth / spec.h,
        })
    }

    /// Map onto the normalized interval `[-1/2, 1/2]`.
    pub fn to_unit(spec: &ClusterSpec) -> Self {
        Self::new(spec, 0.0, 0.5).expect("positive half-width")
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn forward(&self, x: f64) -> f64 {
        self.target_center + (x - self.source_center) * self.scale
    }

    pub fn inverse(&self, y: f64) -> f64 {
        self.source_center + (y - self.target_center) / self.scale
    }

    pub fn apply(&self, signal: &SpikeSignal) -> SpikeSignal {
        self.map_nodes(signal, |x| self.forward(x))
    }

    pub fn unapply(&self, signal: &SpikeSignal) -> SpikeSignal {
        self.map_nodes(signal, |y| self.inverse(y))
    }

    fn map_nodes(&self, signal: &SpikeSignal, f: impl Fn(f64) -> f64) -> SpikeSignal {
        let nodes = signal.nodes().iter().map(|&x| f(x)).collect();
        SpikeSignal::new(signal.amplitudes().to_vec(), nodes).expect("affine image of a valid signal")
    }
}

/// Moments `m_k = sum_j a_j x_j^k` for `k = 0..count`, with compensated summation.
pub fn moments(signal: &SpikeSignal, count: usize) -> Vec<f64> {
    moments_raw(signal.amplitudes(), signal.nodes(), count)
}

/// Moments of unsorted parameter arrays.
pub(crate) fn moments_raw(amplitudes: &[f64], nodes: &[f64], count: usize) -> Vec<f64> {
    let mut acc = vec![CompensatedSum::new(); count];
    for (&a, &x) in amplitudes.iter().zip(nodes) {
        let mut term = a;
        for m in acc.iter_mut() {
            m.add(term);
            term *= x;
        }
    }
    acc.iter().map(CompensatedSum::value).collect()
}

/// Closed-form Fourier transform `sum_j a_j exp(-2 pi i s x_j)`.
pub fn fourier_eval(signal: &SpikeSignal, s: f64) -> Complex64 {
    let mut acc = ComplexSum::default();
    for (a, x) in signal.spikes() {
        acc.add(spike_transform(a, x, s));
    }
    acc.value()
}

/// `F(f0)(s) - F(f1)(s)`, summed as one compensated series so that common
/// spikes cancel exactly.
pub fn fourier_difference(f0: &SpikeSignal, f1: &SpikeSignal, s: f64) -> Complex64 {
    let mut acc = ComplexSum::default();
    for (a, x) in f0.spikes() {
        acc.add(spike_transform(a, x, s));
    }
    for (a, x) in f1.spikes() {
        acc.add(-spike_transform(a, x, s));
    }
    acc.value()
}

#[inline]
fn spike_transform(a: f64, x: f64, s: f64) -> Complex64 {
    let (sin, cos) = (TAU * (s * x)).sin_cos();
    Complex64::new(a * cos, -a * sin)
}

/// Truncated Taylor series `sum_{k < terms} m_k / k! (-2 pi i s)^k` of the transform.
pub fn fourier_series_eval(signal: &SpikeSignal, s: f64, terms: usize) -> Complex64 {
    let step = Complex64::new(0.0, -TAU * s);
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut acc = ComplexSum::default();
    for (k, m) in moments(signal, terms).into_iter().enumerate() {
        acc.add(coeff * m);
        coeff = coeff * step / (k + 1) as f64;
    }
    acc.value()
}

/// The l-infinity distance `max_s |v_s - w_s|` between two ordered node sets.
pub fn node_distance(v: &[f64], w: &[f64]) -> Result<f64> {
    if v.len() != w.len() {
        return Err(Error::Dimension {
            expected: v.len(),
            got: w.len(),
        });
    }
    Ok(v.iter().zip(w).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
}

/// Finds the leftmost largest group (at least two nodes) that fits in a window of length `h`.
///
/// The host interval starts at the group's first node; `rho` is the minimal
/// gap inside the group divided by `h`.
pub fn detect_cluster(signal: &SpikeSignal, h: f64) -> Option<ClusterSpec> {
    if !(h > 0.0) {
        return None;
    }
    let nodes = signal.nodes();
    let mut best: Option<(usize, usize)> = None;
    let mut end = 0;
    for start in 0..nodes.len() {
        end = end.max(start);
        while end + 1 < nodes.len() && nodes[end + 1] <= nodes[start] + h {
            end += 1;
        }
        let count = end - start + 1;
        if count >= 2 && best.is_none_or(|(_, c)| count > c) {
            best = Some((start, count));
        }
    }
    let (kappa, l) = best?;
    let gap = signal.slice(kappa..kappa + l).min_gap();
    Some(ClusterSpec {
        l,
        h,
        rho: gap / h,
        interval_start: nodes[kappa],
        kappa,
    })
}

/// Affinely maps the cluster nodes from the host interval onto
/// `[target_center - target_halfwidth, target_center + target_halfwidth]`.
///
/// Returns only the `l` cluster spikes; amplitudes are unchanged.
pub fn rescale_cluster(
    signal: &SpikeSignal,
    spec: &ClusterSpec,
    target_center: f64,
    target_halfwidth: f64,
) -> Result<SpikeSignal> {
    if spec.kappa + spec.l > signal.dim() {
        return Err(Error::InvalidInput("cluster out of range".into()));
    }
    let map = ClusterMap::new(spec, target_center, target_halfwidth)?;
    Ok(map.apply(&signal.slice(spec.range())))
}
