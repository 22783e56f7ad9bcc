//! Adversarial pairs: two clustered signals whose low-order moments agree,
//! so that their Fourier transforms differ only at high order near `s = 0`.

use std::f64::consts::TAU;
use std::str::FromStr;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::fmt::{g17, serialize_f64};
use crate::prony::{newton_invert, prony_forward, PronyImage};
use crate::signal::{
    fourier_difference, moments, node_distance, AmplitudeBounds, ClusterMap, ClusterSpec, SpikeSignal,
};

/// A pair `(F0, F1)` differing only inside one cluster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryPair {
    pub f0: SpikeSignal,
    pub f1: SpikeSignal,
    pub cluster: ClusterSpec,
    /// Shift of the last normalized moment used by the construction
    /// (the free parameter for tabulated families).
    #[serde(serialize_with = "serialize_f64")]
    pub eta: f64,
    /// `d(X0_l, X1_l)`.
    #[serde(serialize_with = "serialize_f64")]
    pub node_displacement: f64,
    /// `max_{k <= 2l-2} |m_k(F0) - m_k(F1)|`, computed exactly.
    #[serde(serialize_with = "serialize_f64")]
    pub moment_residual: f64,
    /// Cluster spikes of `f0`.
    pub cluster0: SpikeSignal,
    /// Cluster spikes of `f1`, in node order.
    pub cluster1: SpikeSignal,
}

impl AdversaryPair {
    fn assemble(f0: SpikeSignal, cluster: ClusterSpec, cluster1: SpikeSignal, eta: f64) -> Result<Self> {
        let cluster0 = f0.slice(cluster.range());
        let f1 = match f0.without(cluster.range()) {
            Some(rest) => rest.concat(&cluster1),
            None => cluster1.clone(),
        };
        let node_displacement = node_distance(cluster0.nodes(), cluster1.nodes())?;
        let mut pair = AdversaryPair {
            f0,
            f1,
            cluster,
            eta,
            node_displacement,
            moment_residual: 0.0,
            cluster0,
            cluster1,
        };
        pair.moment_residual = verify_moment_match(&pair).residual;
        Ok(pair)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pair serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))
    }
}

/// Tuning of the continuation used by [`construct_adversary_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryConfig {
    /// Bounds `A(m, M)` of the base signal; `None` uses the tightest bounds of its amplitudes.
    pub bounds: Option<AmplitudeBounds>,
    /// Newton tolerance on the normalized moments.
    pub newton_tol: f64,
    pub max_newton_iter: usize,
    /// Smallest continuation sub-step, relative to the requested shift.
    pub min_step_fraction: f64,
}

impl Default for AdversaryConfig {
    fn default() -> Self {
        Self {
            bounds: None,
            newton_tol: 1e-13,
            max_newton_iter: 30,
            min_step_fraction: 1e-8,
        }
    }
}

impl AdversaryConfig {
    fn bounds_for(&self, f0: &SpikeSignal) -> Result<AmplitudeBounds> {
        match self.bounds {
            Some(b) => Ok(b),
            None => AmplitudeBounds::tightest(f0),
        }
    }
}

/// Builds `F1` from `F0` by moving the last normalized cluster moment by `eta`
/// while holding `m_0 .. m_{2l-2}` fixed.
pub fn construct_adversary(f0: &SpikeSignal, cluster: &ClusterSpec, eta: f64) -> Result<AdversaryPair> {
    construct_adversary_with(f0, cluster, eta, &AdversaryConfig::default())
}

pub fn construct_adversary_with(
    f0: &SpikeSignal,
    cluster: &ClusterSpec,
    eta: f64,
    config: &AdversaryConfig,
) -> Result<AdversaryPair> {
    if !(eta != 0.0 && eta.is_finite()) {
        return Err(Error::InvalidInput(format!("eta must be finite and nonzero, got {eta}")));
    }
    cluster.check(f0)?;
    let bounds = config.bounds_for(f0)?;
    let map = ClusterMap::to_unit(cluster);
    let base = map.apply(&f0.slice(cluster.range()));

    let path = PathFollower::new(&base, config);
    let (normalized, achieved) = path.march(eta, eta.abs(), config.min_step_fraction * eta.abs(), |_| true);
    if achieved != eta {
        return Err(Error::Construction {
            achieved_eta: achieved,
            requested_eta: eta,
        });
    }
    if let Some(reason) = admissibility_violation(&normalized, &bounds.relaxed()) {
        return Err(Error::BoundViolation { reason });
    }
    let pair = AdversaryPair::assemble(f0.clone(), *cluster, map.unapply(&normalized), eta)?;
    check_residual(&pair)?;
    Ok(pair)
}

/// Follows the curve of matched moments as far as the admissible region
/// (`A(m/2, 2M)`, nodes in `[-1, 1]` after normalization) allows, in both
/// directions, and returns the pair with the larger node displacement.
pub fn construct_max_adversary(
    f0: &SpikeSignal,
    cluster: &ClusterSpec,
    config: &AdversaryConfig,
) -> Result<AdversaryPair> {
    cluster.check(f0)?;
    let bounds = config.bounds_for(f0)?;
    let relaxed = bounds.relaxed();
    let map = ClusterMap::to_unit(cluster);
    let base = map.apply(&f0.slice(cluster.range()));
    let path = PathFollower::new(&base, config);

    // |m_{2l-1}| <= l * 2M on [-1, 1], and the base value is at most l * M.
    let reach = 3.0 * cluster.l as f64 * bounds.upper;
    let mut best: Option<AdversaryPair> = None;
    for sign in [1.0, -1.0] {
        let (normalized, achieved) = path.march(sign * reach, reach / 32.0, reach * 1e-7, |s| {
            admissibility_violation(s, &relaxed).is_none()
        });
        if achieved == 0.0 {
            continue;
        }
        let pair = AdversaryPair::assemble(f0.clone(), *cluster, map.unapply(&normalized), achieved)?;
        if check_residual(&pair).is_ok()
            && best.as_ref().is_none_or(|b| pair.node_displacement > b.node_displacement)
        {
            best = Some(pair);
        }
    }
    best.ok_or(Error::Construction {
        achieved_eta: 0.0,
        requested_eta: reach,
    })
}

fn check_residual(pair: &AdversaryPair) -> Result<()> {
    let l = pair.cluster.l;
    let scale = moments(&pair.f0, 2 * l - 1)[2 * l - 2].abs().max(1.0);
    if pair.moment_residual > 1e-10 * scale {
        return Err(Error::Construction {
            achieved_eta: 0.0,
            requested_eta: pair.eta,
        });
    }
    Ok(())
}

fn admissibility_violation(normalized: &SpikeSignal, bounds: &AmplitudeBounds) -> Option<String> {
    if let Some(a) = normalized.amplitudes().iter().find(|&&a| !bounds.contains(a)) {
        return Some(format!(
            "amplitude {a} outside [{}, {}]",
            bounds.lower, bounds.upper
        ));
    }
    if normalized.max_abs_node() > 1.0 {
        return Some(format!(
            "normalized node {} outside [-1, 1]",
            normalized.max_abs_node()
        ));
    }
    if normalized.dim() > 1 && !(normalized.min_gap() > 0.0) {
        return Some("nodes collide".into());
    }
    None
}

/// Newton continuation along `PM^{-1}(mu0 + t e_{2l-1})` in normalized coordinates.
struct PathFollower<'a> {
    base: &'a SpikeSignal,
    mu0: PronyImage,
    tol: f64,
    max_iter: usize,
}

impl<'a> PathFollower<'a> {
    fn new(base: &'a SpikeSignal, config: &AdversaryConfig) -> Self {
        let mu0 = prony_forward(base);
        let scale = mu0.values().iter().fold(1.0f64, |m, v| m.max(v.abs()));
        Self {
            base,
            mu0,
            tol: config.newton_tol * scale,
            max_iter: config.max_newton_iter,
        }
    }

    /// Advances `t` from 0 towards `target`, doubling the sub-step after a
    /// success and halving it after a Newton failure or an `accept` refusal.
    /// Returns the last accepted point and its `t`.
    fn march(
        &self,
        target: f64,
        initial_step: f64,
        min_step: f64,
        accept: impl Fn(&SpikeSignal) -> bool,
    ) -> (SpikeSignal, f64) {
        let sign = target.signum();
        let max_step = initial_step.max(target.abs() / 8.0);
        let mut current = self.base.clone();
        let mut t = 0.0;
        let mut step = initial_step;
        while t != target {
            if step < min_step {
                break;
            }
            let remaining = (target - t).abs();
            let next = if step >= remaining { target } else { t + sign * step };
            match newton_invert(&self.mu0.with_last_shift(next), &current, self.tol, self.max_iter) {
                Ok(sol) if accept(&sol.signal) => {
                    current = sol.signal;
                    t = next;
                    step = (2.0 * step).min(max_step);
                }
                _ => step *= 0.5,
            }
        }
        (current, t)
    }
}

/// Outcome of [`verify_moment_match`].
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatch {
    /// `m_k(F0) - m_k(F1)` for `k = 0..2l`, computed exactly and rounded.
    pub differences: Vec<f64>,
    /// `max_{k <= 2l-2} |m_k(F0) - m_k(F1)|`.
    pub residual: f64,
    /// Number of leading moments that agree to 1e-12 relative.
    pub leading_matched: usize,
    /// `|m_{2l-1}(F0) - m_{2l-1}(F1)|`.
    pub last_gap: f64,
    /// All moments `m_0 .. m_{2l-1}` coincide exactly.
    pub degenerate: bool,
}

pub fn verify_moment_match(pair: &AdversaryPair) -> MomentMatch {
    let count = 2 * pair.cluster.l;
    let diffs = exact::moment_differences(&pair.f0, &pair.f1, count);
    let degenerate = diffs.iter().all(Zero::is_zero);
    let residual = exact::to_f64(&exact::abs_max(&diffs[..count - 1]));
    let differences: Vec<f64> = diffs.iter().map(exact::to_f64).collect();
    let scale0 = abs_moments(&pair.f0, count);
    let scale1 = abs_moments(&pair.f1, count);
    let leading_matched = differences
        .iter()
        .enumerate()
        .take_while(|(k, d)| d.abs() <= 1e-12 * scale0[*k].max(scale1[*k]).max(f64::MIN_POSITIVE))
        .count();
    MomentMatch {
        last_gap: exact::to_f64(&diffs[count - 1].abs()),
        differences,
        residual,
        leading_matched,
        degenerate,
    }
}

fn abs_moments(signal: &SpikeSignal, count: usize) -> Vec<f64> {
    let abs = SpikeSignal::new(
        signal.amplitudes().iter().map(|a| a.abs()).collect(),
        signal.nodes().iter().map(|x| x.abs()).collect(),
    )
    .expect("valid signal");
    moments(&abs, count)
}

/// Sampled Fourier difference `F(F0)(s) - F(F1)(s)` with a fitted vanishing order.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierGapProfile {
    pub samples: Vec<(f64, Complex64)>,
    /// Log-log slope of `|gap|` over `s in [s_max/100, s_max/10]`.
    pub fitted_order: f64,
    /// `max_s |gap(s)| / (h s)^fitted_order` over the grid.
    pub fitted_constant: f64,
    pub h: f64,
}

impl FourierGapProfile {
    /// CSV with columns `s, re(gap), im(gap), abs(gap)`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,re_gap,im_gap,abs_gap\n");
        for (s, g) in &self.samples {
            out.push_str(&format!("{},{},{},{}\n", g17(*s), g17(g.re), g17(g.im), g17(g.norm())));
        }
        out
    }
}

const FIT_POINTS: usize = 33;

pub fn fourier_gap(pair: &AdversaryPair, s_max: f64, samples: usize) -> Result<FourierGapProfile> {
    if samples < 2 || !(s_max > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need samples >= 2 and s_max > 0, got {samples} and {s_max}"
        )));
    }
    let gap = |s: f64| fourier_difference(&pair.f0, &pair.f1, s);
    let grid: Vec<(f64, Complex64)> = (0..samples)
        .map(|i| {
            let s = s_max * i as f64 / (samples - 1) as f64;
            (s, gap(s))
        })
        .collect();
    let max_gap = grid.iter().map(|(_, g)| g.norm()).fold(0.0, f64::max);
    if max_gap < 1e-15 {
        return Err(Error::Underflow { max_gap });
    }

    let (lo, hi) = (s_max / 100.0, s_max / 10.0);
    let points: Vec<(f64, f64)> = (0..FIT_POINTS)
        .map(|i| lo * (hi / lo).powf(i as f64 / (FIT_POINTS - 1) as f64))
        .map(|s| (s, gap(s).norm()))
        .filter(|(_, g)| *g > 0.0)
        .map(|(s, g)| (s.ln(), g.ln()))
        .collect();
    let fit = crate::stats::linear_fit(&points).ok_or(Error::Underflow { max_gap })?;
    let order = fit.slope;
    let h = pair.cluster.h;
    let fitted_constant = grid
        .iter()
        .filter(|(s, _)| *s > 0.0)
        .map(|(s, g)| g.norm() / (h * s).powf(order))
        .fold(0.0, f64::max);
    Ok(FourierGapProfile {
        samples: grid,
        fitted_order: order,
        fitted_constant,
        h,
    })
}

/// The gap-bound constant `C2 = 2 (4 l M) (2 pi)^(2l-1) / (2l-1)!`.
pub fn gap_bound_constant(l: usize, upper: f64) -> f64 {
    let n = 2 * l - 1;
    let factorial: f64 = (1..=n).map(|k| k as f64).product();
    2.0 * 4.0 * l as f64 * upper * TAU.powi(n as i32) / factorial
}

/// The three explicit three-spike families with prescribed matched moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    F1,
    F3,
    F5,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::F1, Family::F3, Family::F5];

    /// Number of leading moments the pair shares.
    pub fn matched(self) -> usize {
        match self {
            Family::F1 => 1,
            Family::F3 => 3,
            Family::F5 => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::F1 => "F1",
            Family::F3 => "F3",
            Family::F5 => "F5",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Ok(Family::F1),
            "F3" => Ok(Family::F3),
            "F5" => Ok(Family::F5),
            _ => Err(Error::InvalidInput(format!("unknown family {s}"))),
        }
    }
}

/// Amplitudes and nodes of `(F0, F1)` for a family, generic over the scalar type.
fn family_params<T>(family: Family, h: &T, eta: &T, one: &T) -> [(Vec<T>, Vec<T>); 2]
where
    T: Clone
        + std::ops::Add<Output = T>
        + std::ops::Neg<Output = T>
        + std::ops::Mul<Output = T>
        + std::ops::Div<Output = T>,
{
    let two = one.clone() + one.clone();
    let three = two.clone() + one.clone();
    let p = h.clone() + eta.clone();
    let q = h.clone() + two.clone() * eta.clone();
    let ones = vec![one.clone(), one.clone(), one.clone()];
    match family {
        Family::F1 => [
            (ones.clone(), vec![-p.clone(), -eta.clone(), p.clone()]),
            (ones, vec![-p.clone(), eta.clone(), p]),
        ],
        Family::F3 => [
            (ones.clone(), vec![-p.clone(), -eta.clone(), q.clone()]),
            (ones, vec![-q, eta.clone(), p]),
        ],
        Family::F5 => {
            let t = eta.clone() / h.clone();
            let outer = -(one.clone() + three.clone() * t.clone());
            let middle = two + three * t;
            [
                (
                    vec![outer.clone(), middle.clone(), -one.clone()],
                    vec![-p.clone(), -eta.clone(), q.clone()],
                ),
                (vec![-one.clone(), middle, outer], vec![-q, eta.clone(), p]),
            ]
        }
    }
}

/// The explicit pair `(F0_q, F1_q)` of a family at cluster scale `h` and offset `eta`.
pub fn table_signals(family: Family, h: f64, eta: f64) -> Result<AdversaryPair> {
    if !(h > 0.0 && eta > 0.0 && eta <= h / 2.0) {
        return Err(Error::InvalidInput(format!(
            "need h > 0 and 0 < eta <= h/2, got h = {h}, eta = {eta}"
        )));
    }
    let [(a0, x0), (a1, x1)] = family_params(family, &h, &eta, &1.0);
    let f0 = SpikeSignal::new(a0, x0)?;
    let f1 = SpikeSignal::new(a1, x1)?;
    let cluster = ClusterSpec::spanning(&f0, 0, 3)?;
    AdversaryPair::assemble(f0, cluster, f1, eta)
}

/// Exact `m_k(F0) - m_k(F1)`, `k < count`, with `h` and `eta` read as exact decimals.
pub fn table_moment_differences(family: Family, h: f64, eta: f64, count: usize) -> Result<Vec<BigRational>> {
    let h = exact::from_decimal(h)?;
    let eta = exact::from_decimal(eta)?;
    let one = BigRational::from_integer(1.into());
    let [(a0, x0), (a1, x1)] = family_params(family, &h, &eta, &one);
    let m0 = exact::moments_of(&a0, &x0, count);
    let m1 = exact::moments_of(&a1, &x1, count);
    Ok(m0.into_iter().zip(m1).map(|(a, b)| a - b).collect())
}

/// Closed-form `m_k(F0) - m_k(F1)`, `k = 0..5`, from expanding the family parameters.
pub fn table_delta_closed_form(family: Family, h: f64, eta: f64) -> [f64; 5] {
    match family {
        Family::F1 => [0.0, -2.0 * eta, 0.0, -2.0 * eta.powi(3), 0.0],
        Family::F3 => {
            let d3 = 2.0 * ((h + 2.0 * eta).powi(3) - (h + eta).powi(3) - eta.powi(3));
            [0.0, 0.0, 0.0, d3, 0.0]
        }
        Family::F5 => [0.0; 5],
    }
}

/// Reference magnitudes `|Delta m_k|`, `k = 0..5`, kept for cross-checking.
/// The F3 entry has a cubic coefficient of 16, while direct expansion
/// (see [`table_delta_closed_form`]) gives 12.
pub fn table_delta_tabulated(family: Family, h: f64, eta: f64) -> [f64; 5] {
    match family {
        Family::F1 => [0.0, 2.0 * eta, 0.0, 2.0 * eta.powi(3), 0.0],
        Family::F3 => [
            0.0,
            0.0,
            0.0,
            6.0 * h * h * eta + 18.0 * h * eta * eta + 16.0 * eta.powi(3),
            0.0,
        ],
        Family::F5 => [0.0; 5],
    }
}

/// Draws a signal consisting of one `(l, h, rho)` cluster centred at `center`.
///
/// Gaps are `rho h` plus a random share of the slack; amplitude magnitudes
/// are uniform in `[m, M]` with random signs.
pub fn random_cluster<R: Rng + ?Sized>(
    rng: &mut R,
    l: usize,
    h: f64,
    rho: f64,
    center: f64,
    bounds: &AmplitudeBounds,
) -> Result<(SpikeSignal, ClusterSpec)> {
    if l == 0 || !(h > 0.0) {
        return Err(Error::InvalidInput("need l >= 1 and h > 0".into()));
    }
    let rho = if l == 1 { 1.0 } else { rho };
    let slack = 1.0 - (l as f64 - 1.0) * rho;
    if slack < 0.0 || !(rho > 0.0) {
        return Err(Error::InvalidInput(format!("rho {rho} infeasible for l = {l}")));
    }
    let weights: Vec<f64> = (0..=l).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut offsets = Vec::with_capacity(l);
    let mut pos = slack * weights[0] / total;
    offsets.push(pos);
    for w in &weights[1..l] {
        pos += rho + slack * w / total;
        offsets.push(pos);
    }
    let start = center - 0.5 * h;
    let nodes: Vec<f64> = offsets.iter().map(|u| start + u * h).collect();
    let amplitudes: Vec<f64> = (0..l)
        .map(|_| {
            let mag = rng.random_range(bounds.lower..=bounds.upper);
            if rng.random_bool(0.5) {
                mag
            } else {
                -mag
            }
        })
        .collect();
    let signal = SpikeSignal::new(amplitudes, nodes)?;
    let realized = if l == 1 { 1.0 } else { signal.min_gap() / h };
    let spec = ClusterSpec::new(l, h, realized.min(1.0 / (l.max(2) - 1) as f64), start, 0)?;
    Ok((signal, spec))
}

/// `|m_k|` of exact differences, for tests on the bound chain.
pub fn exact_gamma(pair: &AdversaryPair, count: usize) -> Vec<f64> {
    exact::moment_differences(&pair.f0, &pair.f1, count)
        .iter()
        .map(|g| exact::to_f64(&g.abs()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_f5_parameters() {
        let pair = table_signals(Family::F5, 0.1, 0.05).unwrap();
        assert_eq!(pair.f0.amplitudes(), &[-2.5, 3.5, -1.0]);
        let expect = [-0.15, -0.05, 0.2];
        for (x, e) in pair.f0.nodes().iter().zip(expect) {
            assert!((x - e).abs() < 1e-16);
        }
    }

    #[test]
    fn family_collapse_at_tiny_eta() {
        let pair = table_signals(Family::F1, 0.1, 1e-14).unwrap();
        let d = node_distance(pair.f0.nodes(), pair.f1.nodes()).unwrap();
        assert!(d <= 2.1e-14);
        assert!(table_signals(Family::F1, 0.1, 0.0).is_err());
        assert!(table_signals(Family::F1, 0.1, 0.06).is_err());
    }

    #[test]
    fn moment_match_patterns() {
        for family in Family::ALL {
            let pair = table_signals(family, 0.1, 0.05).unwrap();
            let mm = verify_moment_match(&pair);
            assert_eq!(mm.leading_matched, family.matched(), "{family:?}");
            assert!(!mm.degenerate);
        }
        let f1 = verify_moment_match(&table_signals(Family::F1, 0.1, 0.05).unwrap());
        assert_eq!(f1.differences[0], 0.0);
        assert!((f1.differences[1].abs() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn identical_signals_are_degenerate() {
        let f0 = SpikeSignal::new(vec![1.0, 1.0], vec![-0.5, 0.5]).unwrap();
        let cluster = ClusterSpec::spanning(&f0, 0, 2).unwrap();
        let pair = AdversaryPair::assemble(f0.clone(), cluster, f0.clone(), 0.0).unwrap();
        let mm = verify_moment_match(&pair);
        assert_eq!(mm.residual, 0.0);
        assert!(mm.degenerate);
        assert!(matches!(fourier_gap(&pair, 1.0, 16), Err(Error::Underflow { .. })));
    }

    #[test]
    fn gap_constant_l1() {
        // 2 * 4M * 2 pi / 1!
        assert!((gap_bound_constant(1, 1.0) - 16.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn random_cluster_respects_geometry() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let bounds = AmplitudeBounds::new(1.0, 2.0).unwrap();
        for l in 1..=4 {
            let rho = if l > 1 { 0.8 / (l - 1) as f64 } else { 1.0 };
            let (s, spec) = random_cluster(&mut rng, l, 0.02, rho, 0.3, &bounds).unwrap();
            spec.check(&s).unwrap();
            assert!(bounds.admits(&s));
            if l > 1 {
                assert!(s.min_gap() >= rho * 0.02 * (1.0 - 1e-12));
            }
        }
    }

    #[test]
    fn bad_eta_rejected() {
        let f0 = SpikeSignal::new(vec![1.0, 1.0], vec![-0.5, 0.5]).unwrap();
        let cluster = ClusterSpec::new(2, 1.0, 1.0, -0.5, 0).unwrap();
        assert!(construct_adversary(&f0, &cluster, 0.0).is_err());
        assert!(construct_adversary(&f0, &cluster, f64::NAN).is_err());
    }
}
